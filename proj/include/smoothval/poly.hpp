#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothval/arith.hpp"
#include "smoothval/util.hpp"

namespace smoothval {

// Parse failure with the byte offset of the offending token.
class PolyParseError : public std::invalid_argument {
  public:
    PolyParseError(const std::string& msg, std::size_t offset)
        : std::invalid_argument(msg + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Integer-coefficient polynomial in the variable t, coefficients stored in
// ascending degree order. Immutable after construction; the discriminant is
// computed once on first request.
class IntPoly {
  public:
    explicit IntPoly(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
        while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
        if (coeffs_.empty() || (coeffs_.size() == 1 && coeffs_[0] == 0))
            throw std::invalid_argument("IntPoly: zero polynomial");
        lazy_ = std::make_shared<Lazy>();
    }

    unsigned degree() const { return static_cast<unsigned>(coeffs_.size() - 1); }
    const std::vector<mpz_class>& coeffs() const { return coeffs_; }
    const mpz_class& leading() const { return coeffs_.back(); }
    mpz_class coeff(unsigned i) const {
        return i < coeffs_.size() ? coeffs_[i] : mpz_class(0);
    }

    bool operator==(const IntPoly& o) const { return coeffs_ == o.coeffs_; }

    mpz_class eval(const mpz_class& n) const {
        mpz_class v = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * n + *it;
        return v;
    }

    // f(n) mod m with everything in machine words; m < 2^63.
    uint64_t eval_mod(uint64_t n, uint64_t m) const {
        uint64_t v = 0;
        n %= m;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            uint64_t c = mpz_fdiv_ui(it->get_mpz_t(), m);
            v = (mulmod_u64(v, n, m) + c) % m;
        }
        return v;
    }

    // Coefficients reduced mod m, ascending.
    std::vector<uint64_t> coeffs_mod(uint64_t m) const {
        std::vector<uint64_t> out(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            out[i] = mpz_fdiv_ui(coeffs_[i].get_mpz_t(), m);
        return out;
    }

    IntPoly derivative() const {
        if (degree() == 0) throw std::domain_error("derivative of a constant");
        std::vector<mpz_class> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<unsigned long>(i);
        return IntPoly(std::move(d));
    }

    mpz_class content() const {
        mpz_class g = 0;
        for (const auto& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        return g;
    }

    // True iff f(n) = 0 (mod p) for every n. For p <= degree this needs an
    // actual scan; for p > degree a nonzero polynomial function forces a
    // nonzero coefficient mod p, so the content test suffices.
    bool identically_zero_mod(uint64_t p) const {
        if (p <= degree()) {
            for (uint64_t n = 0; n < p; ++n)
                if (eval_mod(n, p) != 0) return false;
            return true;
        }
        return mpz_divisible_ui_p(content().get_mpz_t(), p) != 0;
    }

    // Throws if some prime p has f = 0 (mod p) identically. Only p <= degree
    // and primes dividing the content are candidates.
    void require_not_identically_zero_mod_any_prime() const {
        for (uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
            if (p > degree()) break;
            if (identically_zero_mod(p))
                throw std::domain_error("polynomial vanishes identically mod " +
                                        std::to_string(p));
        }
        if (degree() > 7) {
            // degrees above 7: scan the remaining small primes too
            PrimeTable t = PrimeTable::build(degree());
            for (uint64_t p : t.primes())
                if (p > 7 && identically_zero_mod(p))
                    throw std::domain_error("polynomial vanishes identically mod " +
                                            std::to_string(p));
        }
        mpz_class c = content();
        mpz_class g = degree();
        if (c > g) {
            // any prime factor of the content above the degree kills f mod p
            PrimeTable t = PrimeTable::build(1u << 16);
            Factorization fc = factorize(c, t);
            for (const auto& [p, e] : fc.factors) {
                (void)e;
                if (p > g)
                    throw std::domain_error("polynomial vanishes identically mod " +
                                            p.get_str());
            }
            if (!fc.fully_factored())
                throw std::domain_error("content too large to certify nonvanishing");
        }
    }

    // disc(f) = (-1)^(g(g-1)/2) Res(f, f') / lc(f), by a fraction-free
    // Sylvester determinant. Exact.
    const mpz_class& discriminant() const {
        std::call_once(lazy_->disc_once, [this]() {
            if (degree() == 0) return;  // checked below
            lazy_->disc = compute_discriminant();
            lazy_->disc_ready = true;
        });
        if (!lazy_->disc_ready)
            throw std::domain_error("discriminant requires degree >= 1");
        return lazy_->disc;
    }

    // nu(p) = exponent of p in |disc(f)|.
    unsigned nu(uint64_t p) const {
        const mpz_class& d = discriminant();
        if (d == 0) throw std::domain_error("nu undefined: zero discriminant");
        mpz_class a = abs(d);
        unsigned e = 0;
        while (mpz_divisible_ui_p(a.get_mpz_t(), p)) {
            mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), p);
            ++e;
        }
        return e;
    }

    // |disc| = prod p^nu(p); unresolved part flagged by factorize.
    Factorization nu_map(const PrimeTable& t) const {
        mpz_class a = abs(discriminant());
        if (a == 0) throw std::domain_error("nu_map undefined: zero discriminant");
        return factorize(a, t);
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            const mpz_class& c = coeffs_[i];
            if (c == 0) continue;
            if (!s.empty()) s += c > 0 ? " + " : " - ";
            else if (c < 0) s += "-";
            mpz_class a = abs(c);
            if (i == 0) {
                s += a.get_str();
            } else {
                if (a != 1) s += a.get_str() + "*";
                s += "t";
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s.empty() ? "0" : s;
    }

    // Stable identity string, used as the cache key for root tables.
    std::string key() const {
        std::string k;
        for (const auto& c : coeffs_) {
            k += c.get_str();
            k += ',';
        }
        return k;
    }

  private:
    struct Lazy {
        std::once_flag disc_once;
        mpz_class disc;
        bool disc_ready = false;
    };

    mpz_class compute_discriminant() const {
        const unsigned g = degree();
        IntPoly fp = derivative();
        // Sylvester matrix of f (degree g) and f' (degree g-1): size 2g-1
        const unsigned n = 2 * g - 1;
        std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n, 0));
        for (unsigned row = 0; row < g - 1; ++row)
            for (unsigned j = 0; j <= g; ++j) m[row][row + j] = coeffs_[g - j];
        for (unsigned row = 0; row < g; ++row)
            for (unsigned j = 0; j <= g - 1; ++j)
                m[g - 1 + row][row + j] = fp.coeffs()[g - 1 - j];

        // Bareiss fraction-free elimination
        mpz_class det_sign = 1, prev = 1;
        for (unsigned k = 0; k + 1 < n; ++k) {
            if (m[k][k] == 0) {
                unsigned swap_row = k + 1;
                while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
                if (swap_row == n) return 0;  // singular: resultant is zero
                std::swap(m[k], m[swap_row]);
                det_sign = -det_sign;
            }
            for (unsigned i = k + 1; i < n; ++i) {
                for (unsigned j = k + 1; j < n; ++j) {
                    m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                    mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(),
                                 prev.get_mpz_t());
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        mpz_class res = det_sign * m[n - 1][n - 1];
        mpz_class disc;
        mpz_divexact(disc.get_mpz_t(), res.get_mpz_t(), leading().get_mpz_t());
        if ((static_cast<uint64_t>(g) * (g - 1) / 2) % 2 == 1) disc = -disc;
        return disc;
    }

    std::vector<mpz_class> coeffs_;
    std::shared_ptr<Lazy> lazy_;
};

// ---------------------------------------------------------------------------
// parsing
//
//   poly   := term (("+"|"-") term)* ;
//   term   := [integer "*"] "t" ["^" integer] | integer ;
//   integer:= ["-"] digit+ ;
// ---------------------------------------------------------------------------

namespace detail {

struct PolyParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit PolyParser(const std::string& s) : text(s) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    mpz_class integer() {
        skip_ws();
        std::size_t start = pos;
        bool neg = accept('-');
        skip_ws();
        std::string digits;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            digits += text[pos++];
        if (digits.empty()) throw PolyParseError("expected integer", start);
        mpz_class v(digits);
        return neg ? mpz_class(-v) : v;
    }

    // term := [integer "*"] "t" ["^" integer] | integer
    void term(int sign, std::map<unsigned, mpz_class>& acc) {
        skip_ws();
        std::size_t start = pos;
        mpz_class c = 1;
        bool have_coeff = false;
        if (pos < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '-')) {
            c = integer();
            have_coeff = true;
        }
        skip_ws();
        bool star = accept('*');
        if (star && have_coeff) skip_ws();
        if (star && !have_coeff) throw PolyParseError("unexpected '*'", start);

        if (pos < text.size() && text[pos] == 't') {
            ++pos;
            unsigned long e = 1;
            if (accept('^')) {
                mpz_class ev = integer();
                if (ev < 0) throw PolyParseError("negative exponent", start);
                if (!ev.fits_ulong_p() || ev.get_ui() > 64)
                    throw PolyParseError("exponent too large", start);
                e = ev.get_ui();
            }
            acc[static_cast<unsigned>(e)] += sign * c;
        } else {
            if (star) throw PolyParseError("expected 't' after '*'", pos);
            if (!have_coeff) throw PolyParseError("expected term", start);
            acc[0] += sign * c;
        }
    }

    IntPoly parse() {
        std::map<unsigned, mpz_class> acc;
        int sign = 1;
        skip_ws();
        if (accept('-')) sign = -1;
        else accept('+');
        term(sign, acc);
        for (;;) {
            skip_ws();
            if (pos >= text.size()) break;
            if (accept('+')) sign = 1;
            else if (accept('-')) sign = -1;
            else throw PolyParseError("expected '+' or '-'", pos);
            term(sign, acc);
        }
        unsigned deg = 0;
        for (auto& [e, c] : acc)
            if (c != 0) deg = std::max(deg, e);
        std::vector<mpz_class> coeffs(deg + 1, mpz_class(0));
        bool all_zero = true;
        for (auto& [e, c] : acc) {
            if (c == 0) continue;
            coeffs[e] = c;
            all_zero = false;
        }
        if (all_zero) throw PolyParseError("zero polynomial", 0);
        return IntPoly(std::move(coeffs));
    }
};

}  // namespace detail

inline IntPoly parse_poly(const std::string& text) {
    detail::PolyParser p(text);
    return p.parse();
}

// ---------------------------------------------------------------------------
// extrema
// ---------------------------------------------------------------------------

namespace detail {

// Real roots of a polynomial (given as doubles, ascending) inside [lo, hi],
// by recursive critical-point isolation and bisection. Good to ~1e-9, which
// is ample: callers only need the integer neighborhood of each root.
inline void real_roots(const std::vector<double>& c, double lo, double hi,
                       std::vector<double>& out) {
    auto ev = [&](double x) {
        double v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    };
    std::size_t deg = c.size() - 1;
    while (deg > 0 && c[deg] == 0.0) --deg;
    if (deg == 0) return;
    if (deg == 1) {
        double r = -c[0] / c[1];
        if (r >= lo && r <= hi) out.push_back(r);
        return;
    }
    std::vector<double> dc(deg);
    for (std::size_t i = 1; i <= deg; ++i) dc[i - 1] = c[i] * static_cast<double>(i);
    std::vector<double> crit;
    real_roots(dc, lo, hi, crit);
    crit.push_back(lo);
    crit.push_back(hi);
    std::sort(crit.begin(), crit.end());
    for (std::size_t i = 0; i + 1 < crit.size(); ++i) {
        double a = crit[i], b = crit[i + 1];
        if (a == b) continue;
        double fa = ev(a), fb = ev(b);
        if (fa == 0.0) out.push_back(a);
        if (fa * fb < 0) {
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b);
                double fm = ev(m);
                if (fm == 0.0) { a = b = m; break; }
                if (fa * fm < 0) b = m;
                else a = m, fa = fm;
            }
            out.push_back(0.5 * (a + b));
        }
    }
    double fend = ev(hi);
    if (fend == 0.0) out.push_back(hi);
}

}  // namespace detail

// Exact max of |f(n)| over integers 1 <= n <= x. |f| can only peak at the
// endpoints or next to a critical point of f, so only those integers are
// evaluated.
inline mpz_class max_abs_value(const IntPoly& f, uint64_t x) {
    if (x < 1) throw std::domain_error("max_abs_value: x must be >= 1");
    std::vector<uint64_t> candidates = {1, x};
    if (f.degree() >= 2) {
        IntPoly fp = f.derivative();
        std::vector<double> dc(fp.coeffs().size());
        for (std::size_t i = 0; i < dc.size(); ++i) dc[i] = fp.coeffs()[i].get_d();
        std::vector<double> roots;
        detail::real_roots(dc, 1.0, static_cast<double>(x), roots);
        for (double r : roots) {
            for (double n : {std::floor(r) - 1, std::floor(r), std::ceil(r),
                             std::ceil(r) + 1}) {
                if (n >= 1 && n <= static_cast<double>(x))
                    candidates.push_back(static_cast<uint64_t>(n));
            }
        }
    }
    mpz_class best = 0;
    for (uint64_t n : candidates) {
        mpz_class v = abs(f.eval(mpz_class(static_cast<unsigned long>(n))));
        if (v > best) best = v;
    }
    return best;
}

// User-declared shape data for a polynomial: kappa = number of irreducible
// factors, k = number of distinct irreducible factors of maximal degree.
// Neither is computed (no factorization into irreducibles here); the Nagel
// slope estimator validates kappa empirically.
struct PolyProfile {
    IntPoly poly;
    unsigned kappa;
    unsigned k;

    PolyProfile(IntPoly f, unsigned kappa_, unsigned k_)
        : poly(std::move(f)), kappa(kappa_), k(k_) {
        if (k < 1 || kappa < k || kappa > poly.degree())
            throw std::domain_error("PolyProfile: need 1 <= k <= kappa <= degree");
    }

    mpz_class xi(uint64_t x) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = xi_cache_.find(x);
        if (it != xi_cache_.end()) return it->second;
        mpz_class v = max_abs_value(poly, x);
        xi_cache_.emplace(x, v);
        return v;
    }

  private:
    mutable std::mutex mu_;
    mutable std::map<uint64_t, mpz_class> xi_cache_;
};

}  // namespace smoothval
