#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smoothval/arith.hpp"
#include "smoothval/localroots.hpp"
#include "smoothval/poly.hpp"
#include "smoothval/util.hpp"

namespace smoothval {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// A multiplicative function given by exact rational values on prime powers,
// together with the (kappa, beta) parameters under which its mean value
// M_g(x) = sum g(n)/n obeys c(g) log^kappa x + O(log^{beta-1} x).
class MultiplicativeSpec {
  public:
    using ValueFn = std::function<mpq_class(uint64_t p, unsigned r)>;

    MultiplicativeSpec(std::string name, ValueFn fn, std::complex<double> kappa,
                       double beta)
        : name_(std::move(name)), fn_(std::move(fn)), kappa_(kappa), beta_(beta) {
        double xi = kappa.real(), eta = kappa.imag();
        if (!(eta * eta < 2 * xi + 1))
            throw std::domain_error("MultiplicativeSpec: need eta^2 < 2 xi + 1");
        if (!(beta >= 0 && beta < xi + 1))
            throw std::domain_error("MultiplicativeSpec: need 0 <= beta < xi + 1");
    }

    const std::string& name() const { return name_; }
    std::complex<double> kappa() const { return kappa_; }
    double beta() const { return beta_; }

    mpq_class value_at(uint64_t p, unsigned r) const {
        if (r == 0) return 1;  // g(1) = 1
        return fn_(p, r);
    }

    static MultiplicativeSpec one() {
        return MultiplicativeSpec(
            "one", [](uint64_t, unsigned) { return mpq_class(1); }, 1.0, 1.0);
    }
    // g supported only on n = 1 (zeta_g = 1 identically)
    static MultiplicativeSpec unit_only() {
        return MultiplicativeSpec(
            "unit", [](uint64_t, unsigned) { return mpq_class(0); }, 0.0, 0.0);
    }
    static MultiplicativeSpec phi_over_n() {
        return MultiplicativeSpec(
            "phi/n",
            [](uint64_t p, unsigned) { return frac(p - 1, p); },
            1.0, 1.0);
    }
    static MultiplicativeSpec for_sigma(const IntPoly& f, double kappa) {
        return MultiplicativeSpec(
            "sigma[" + f.to_string() + "]",
            [f](uint64_t p, unsigned r) {
                return mpq_class(static_cast<unsigned long>(sigma_pp(f, p, r)));
            },
            kappa, kappa);
    }
    static MultiplicativeSpec for_sigma_lambda(const IntPoly& f, double kappa) {
        return MultiplicativeSpec(
            "sigma_lambda[" + f.to_string() + "]",
            [f](uint64_t p, unsigned r) {
                return mpq_class(static_cast<unsigned long>(sigma_lambda_pp(f, p, r)));
            },
            kappa, kappa);
    }

  private:
    std::string name_;
    ValueFn fn_;
    std::complex<double> kappa_;
    double beta_;
};

// Per-loop evaluator with a prime-power memo; not shared across threads.
class MultEvaluator {
  public:
    MultEvaluator(const MultiplicativeSpec& spec, const PrimeTable& table)
        : spec_(spec), table_(table) {}

    double at(uint64_t n) {
        if (n == 1) return 1.0;
        double v = 1.0;
        uint64_t m = n;
        while (m > 1) {
            uint64_t p = table_.spf(m);
            unsigned e = 0;
            while (m % p == 0) m /= p, ++e;
            v *= memo(p, e);
        }
        return v;
    }

    mpq_class at_exact(uint64_t n) {
        mpq_class v(1);
        uint64_t m = n;
        while (m > 1) {
            uint64_t p = table_.spf(m);
            unsigned e = 0;
            while (m % p == 0) m /= p, ++e;
            v *= spec_.value_at(p, e);
        }
        return v;
    }

  private:
    double memo(uint64_t p, unsigned e) {
        uint64_t key = p * 64 + e;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        double v = spec_.value_at(p, e).get_d();
        memo_.emplace(key, v);
        return v;
    }

    const MultiplicativeSpec& spec_;
    const PrimeTable& table_;
    std::unordered_map<uint64_t, double> memo_;
};

// M_g(x, q) = sum_{n <= x, (n,q)=1} g(n)/n by direct enumeration.
inline double mean_value(const MultiplicativeSpec& spec, double x, uint64_t q,
                         PrimeTable& table) {
    if (x < 1) throw std::domain_error("mean_value: x must be >= 1");
    uint64_t n_max = static_cast<uint64_t>(x);
    if (n_max > table.limit()) throw std::domain_error("mean_value: x beyond table");
    table.ensure_spf();
    MultEvaluator ev(spec, table);
    Kahan acc;
    for (uint64_t n = 1; n <= n_max; ++n) {
        if (q > 1 && gcd_u64(n, q) != 1) continue;
        acc.add(ev.at(n) / static_cast<double>(n));
    }
    return acc.value();
}

// Exact-rational mean value for x <= 10^4.
inline mpq_class mean_value_exact(const MultiplicativeSpec& spec, uint64_t x,
                                  uint64_t q, PrimeTable& table) {
    if (x < 1 || x > 10'000)
        throw std::domain_error("mean_value_exact: x must be in [1, 10^4]");
    table.ensure_spf();
    MultEvaluator ev(spec, table);
    mpq_class acc(0);
    for (uint64_t n = 1; n <= x; ++n) {
        if (q > 1 && gcd_u64(n, q) != 1) continue;
        mpq_class t = ev.at_exact(n);
        t /= mpq_class(static_cast<unsigned long>(n));
        acc += t;
    }
    return acc;
}

// Calls fn(n, M_g(n, q)) for every integer n in [1, x]; used by the
// residual-bound checks that must inspect every point of a range.
template <typename Fn>
void scan_mean_value(const MultiplicativeSpec& spec, uint64_t x, uint64_t q,
                     PrimeTable& table, Fn&& fn) {
    table.ensure_spf();
    MultEvaluator ev(spec, table);
    Kahan acc;
    for (uint64_t n = 1; n <= x; ++n) {
        if (q <= 1 || gcd_u64(n, q) == 1) acc.add(ev.at(n) / static_cast<double>(n));
        fn(n, acc.value());
    }
}

// ---------------------------------------------------------------------------
// Euler products
// ---------------------------------------------------------------------------

namespace detail {

struct LocalSeries {
    mpq_class value;     // 1 + sum_r g(p^r)/p^r (closed tail when stabilized)
    bool exact;          // true when the tail telescoped exactly
    double trunc_error;  // heuristic bound on the dropped tail otherwise
};

// The local series at p. When g(p^r) stabilizes (three equal consecutive
// values) the geometric tail is summed in closed form, which keeps factors
// like (1-1/p)(1 + 1/p + 1/p^2 + ...) exactly telescoping to 1.
inline LocalSeries local_series_at(const MultiplicativeSpec& spec, uint64_t p) {
    LocalSeries out{mpq_class(1), false, 0.0};
    mpz_class pe(1);
    mpq_class v_prev2, v_prev;
    double last_abs = 0;
    int growth = 0, tiny = 0;
    for (unsigned r = 1; r <= 128; ++r) {
        pe *= static_cast<unsigned long>(p);
        mpq_class v = spec.value_at(p, r);
        mpq_class term = v / mpq_class(pe);
        out.value += term;
        double ta = std::abs(term.get_d());
        if (r >= 3 && v == v_prev && v_prev == v_prev2) {
            // constant from here on: sum_{j>r} v/p^j = v / (p^r (p-1))
            mpq_class tail = v / mpq_class(pe * static_cast<unsigned long>(p - 1));
            out.value += tail;
            out.exact = true;
            return out;
        }
        if (r > 1) {
            if (ta >= last_abs && ta > 0) ++growth;
            else growth = 0;
            if (growth >= 4)
                throw std::domain_error("euler product: local series diverges at p=" +
                                        std::to_string(p));
        }
        if (ta < 1e-17 * std::max(1.0, std::abs(out.value.get_d()))) {
            if (++tiny >= 2) {
                out.trunc_error = ta * 2.0 * static_cast<double>(p) / (p - 1.0);
                return out;
            }
        } else {
            tiny = 0;
        }
        v_prev2 = v_prev;
        v_prev = v;
        last_abs = ta;
    }
    out.trunc_error = last_abs * 2.0;
    return out;
}

inline mpq_class mpq_int_pow(const mpq_class& base, unsigned e) {
    mpq_class r(1);
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace detail

struct EulerConstant {
    double value = 0;
    double tail_estimate = 0;
};

// c(g) at cutoff P:
//   Gamma(kappa+1)^{-1} prod_{p<=P} (1-1/p)^kappa (1 + sum_r g(p^r)/p^r),
// with the p | q local factors reduced to (1-1/p)^kappa (the coprime
// variant's (phi(q)/q)^kappa prefactor). Real kappa only; the complex case
// is stored by MultiplicativeSpec but has no consumer here.
inline EulerConstant euler_constant(const MultiplicativeSpec& spec, uint64_t P,
                                    uint64_t q, const PrimeTable& table) {
    double xi = spec.kappa().real();
    if (spec.kappa().imag() != 0.0)
        throw std::domain_error("euler_constant: complex kappa not supported");
    if (table.limit() < P) throw std::domain_error("euler_constant: P beyond table");

    bool int_kappa = xi >= 0 && xi == std::floor(xi) && xi <= 8;
    unsigned ik = static_cast<unsigned>(xi);

    double value = 1.0 / std::tgamma(xi + 1.0);
    for (uint64_t p : table.primes()) {
        if (p > P) break;
        double factor;
        bool p_divides_q = q > 1 && q % p == 0;
        if (int_kappa) {
            mpq_class f = detail::mpq_int_pow(frac(p - 1, p), ik);
            if (!p_divides_q) f *= detail::local_series_at(spec, p).value;
            factor = f.get_d();
        } else {
            factor = std::pow(1.0 - 1.0 / static_cast<double>(p), xi);
            if (!p_divides_q) factor *= detail::local_series_at(spec, p).value.get_d();
        }
        value *= factor;
    }

    // Tail heuristic: |local factor - 1| summed over (P, 2P], extrapolated
    // geometrically (each further octave assumed to contribute at most as
    // much again). Reported, never absorbed.
    double dev = 0.0;
    for (uint64_t p : table.primes()) {
        if (p <= P) continue;
        if (p > 2 * P || p > table.limit()) break;
        double f = std::pow(1.0 - 1.0 / static_cast<double>(p), xi);
        if (!(q > 1 && q % p == 0)) f *= detail::local_series_at(spec, p).value.get_d();
        dev += std::abs(f - 1.0);
    }
    return {value, std::abs(value) * std::expm1(2.0 * dev)};
}

// ---------------------------------------------------------------------------
// Nagel sums: sum_{p<w} sigma(p) log p / p = kappa log w + O(1)
// ---------------------------------------------------------------------------

inline double nagel_sum(const IntPoly& f, double w, const PrimeTable& table) {
    if (w < 2) return 0.0;
    if (w > static_cast<double>(table.limit()) + 1)
        throw std::domain_error("nagel_sum: w beyond prime table");
    Kahan acc;
    for (uint64_t p : table.primes()) {
        if (static_cast<double>(p) >= w) break;
        uint64_t s = sigma_p_unrestricted(f, p);
        if (s)
            acc.add(static_cast<double>(s) * std::log(static_cast<double>(p)) /
                    static_cast<double>(p));
    }
    return acc.value();
}

// Least-squares slope of the Nagel sum against log w over an equally
// log-spaced grid; the estimator for kappa.
inline double nagel_slope(const IntPoly& f, double w_lo, double w_hi, int points,
                          const PrimeTable& table) {
    if (points < 2) throw std::domain_error("nagel_slope: need >= 2 grid points");
    if (w_lo < 2 || w_hi <= w_lo) throw std::domain_error("nagel_slope: bad range");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = w_lo * std::pow(w_hi / w_lo, static_cast<double>(i) / (points - 1));

    std::vector<double> tvals(points);
    Kahan acc;
    std::size_t gi = 0;
    for (uint64_t p : table.primes()) {
        while (gi < grid.size() && static_cast<double>(p) >= grid[gi])
            tvals[gi++] = acc.value();
        if (gi >= grid.size()) break;
        uint64_t s = sigma_p_unrestricted(f, p);
        if (s)
            acc.add(static_cast<double>(s) * std::log(static_cast<double>(p)) /
                    static_cast<double>(p));
    }
    while (gi < grid.size()) tvals[gi++] = acc.value();

    double mx = 0, my = 0;
    for (int i = 0; i < points; ++i) {
        mx += std::log(grid[i]);
        my += tvals[i];
    }
    mx /= points;
    my /= points;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        double dx = std::log(grid[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (tvals[i] - my);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Mertens-type products
// ---------------------------------------------------------------------------

struct MertensProduct {
    mpq_class exact;      // valid when exact_valid
    bool exact_valid = false;
    double value = 1.0;
    double main_term = 1.0;  // log w2 / log w1
};

// prod_{w1 <= p < w2} (1 - sigma(p)/p)^{-1}, exact rational plus float,
// with the predicted main term log w2 / log w1.
inline MertensProduct mertens_sigma_product(const IntPoly& f, double w1, double w2,
                                            const PrimeTable& table) {
    if (w1 < 2 || w2 < w1) throw std::domain_error("mertens: need 2 <= w1 <= w2");
    if (w2 > static_cast<double>(table.limit()) + 1)
        throw std::domain_error("mertens: w2 beyond prime table");
    MertensProduct out;
    out.exact = 1;
    out.main_term = w2 > w1 ? std::log(w2) / std::log(w1) : 1.0;
    std::size_t n_factors = 0;
    for (uint64_t p : table.primes()) {
        double pd = static_cast<double>(p);
        if (pd < w1) continue;
        if (pd >= w2) break;
        uint64_t s = sigma_p(f, p);
        if (s >= p) throw std::domain_error("mertens: sigma(p) >= p at p=" +
                                            std::to_string(p));
        out.value *= pd / (pd - static_cast<double>(s));
        if (n_factors < 20'000) {
            out.exact *= frac(p, p - s);
            ++n_factors;
            out.exact_valid = true;
        } else {
            out.exact_valid = false;
        }
    }
    if (out.exact_valid) out.value = out.exact.get_d();
    return out;
}

// ---------------------------------------------------------------------------
// zeta_g
// ---------------------------------------------------------------------------

enum class ZetaMode { Direct, Euler };

// zeta_g(s) = sum g(n)/n^s (direct, truncated at cutoff) or the Euler
// product over p <= cutoff. The two routes must agree within the tail
// bounds; tests assert that.
inline double zeta_g(const MultiplicativeSpec& spec, double s, ZetaMode mode,
                     uint64_t cutoff, PrimeTable& table) {
    if (s <= 1.0) throw std::domain_error("zeta_g: need s > 1");
    if (mode == ZetaMode::Direct) {
        if (cutoff > table.limit()) throw std::domain_error("zeta_g: cutoff beyond table");
        table.ensure_spf();
        MultEvaluator ev(spec, table);
        Kahan acc;
        double window = 0, prev_window = -1;
        constexpr uint64_t kWindow = 10'000;
        for (uint64_t n = 1; n <= cutoff; ++n) {
            double term = ev.at(n) * std::pow(static_cast<double>(n), -s);
            acc.add(term);
            window += std::abs(term);
            if (n % kWindow == 0) {
                if (prev_window >= 0 && n > 3 * kWindow && window > 1.5 * prev_window)
                    throw std::domain_error("zeta_g: direct sum not converging");
                prev_window = window;
                window = 0;
            }
        }
        return acc.value();
    }
    // Euler mode
    if (cutoff > table.limit()) throw std::domain_error("zeta_g: cutoff beyond table");
    double prod = 1.0;
    for (uint64_t p : table.primes()) {
        if (p > cutoff) break;
        double x = std::pow(static_cast<double>(p), -s);
        double local = 1.0, xr = 1.0;
        double v_prev = 0, v_prev2 = 0;
        bool have_prev = false, have_prev2 = false;
        for (unsigned r = 1; r <= 256; ++r) {
            xr *= x;
            double v = spec.value_at(p, r).get_d();
            local += v * xr;
            if (have_prev2 && v == v_prev && v_prev == v_prev2) {
                local += v * xr * x / (1.0 - x);  // constant tail
                break;
            }
            if (std::abs(v * xr) < 1e-18 * local) break;
            have_prev2 = have_prev;
            v_prev2 = v_prev;
            have_prev = true;
            v_prev = v;
        }
        if (local <= 0)
            throw std::domain_error("zeta_g: nonpositive local factor at p=" +
                                    std::to_string(p));
        prod *= local;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Lemma-level products
// ---------------------------------------------------------------------------

// prod_{w1 < p <= w2} (1 - sigma(ph)/(p sigma(h)))^{-1} and its three-factor
// decomposition: the p not dividing h part, the p | h, p not dividing Delta
// part, and the p | h, p | Delta part. The product of the three factors must
// equal the whole exactly.
struct SecondLemProduct {
    mpq_class whole, first, second, third;
};

inline SecondLemProduct secondlem_product(const IntPoly& f, uint64_t h, double w1,
                                          double w2, const PrimeTable& table) {
    if (h == 0) throw std::domain_error("secondlem: h must be positive");
    if (!sigma_star_positive(f, h, table))
        throw std::domain_error("secondlem: requires sigma*(h) > 0");
    uint64_t sig_h = sigma(f, h, table);
    const mpz_class& disc = f.discriminant();

    SecondLemProduct out{1, 1, 1, 1};
    auto h_factors = factor_u64(h, table);
    for (uint64_t p : table.primes()) {
        double pd = static_cast<double>(p);
        if (pd <= w1) continue;
        if (pd > w2) break;
        uint64_t sp = sigma_p(f, p);
        if (sp >= p) throw std::domain_error("secondlem: sigma(p) >= p");
        out.first *= frac(p, p - sp);

        unsigned rp = 0;
        for (auto& [hp, he] : h_factors)
            if (hp == p) rp = he;
        uint64_t sig_ph;
        if (rp == 0) {
            sig_ph = sp * sig_h;
        } else {
            // p^rp || h: sigma(ph) = sigma(p^{rp+1}) * sigma(h) / sigma(p^rp)
            uint64_t s_lo = sigma_pp(f, p, rp);
            uint64_t s_hi = sigma_pp(f, p, rp + 1);
            sig_ph = s_hi * (sig_h / s_lo);
        }
        // whole term: p sigma(h) / (p sigma(h) - sigma(ph))
        mpq_class denom(static_cast<unsigned long>(p));
        denom *= static_cast<unsigned long>(sig_h);
        mpq_class num = denom;
        denom -= static_cast<unsigned long>(sig_ph);
        if (denom <= 0)
            throw std::logic_error("secondlem: sigma(ph) >= p sigma(h) with sigma*>0");
        out.whole *= num / denom;

        if (rp > 0) {
            bool p_div_disc = mpz_divisible_ui_p(disc.get_mpz_t(), p) != 0;
            mpq_class one_minus_sp = frac(p - sp, p);
            if (!p_div_disc) {
                // (1 - sigma(p)/p)(1 - 1/p)^{-1}
                out.second *= one_minus_sp * frac(p, p - 1);
            } else {
                out.third *= one_minus_sp * (num / denom);
            }
        }
    }
    return out;
}

// sum_{1 <= h <= L^delta} G(h) sigma*(h)/h with G(h) = prod_{p|h}
// (1 - sigma(p)/p)^{-1}, exact, plus the predicted main term
// delta log L prod_p (1-sigma(p)/p)^{-1} (1-1/p) (partial product).
struct WeightedHSum {
    mpq_class sum;
    double main_term = 0;
    uint64_t h_max = 0;
};

inline WeightedHSum weighted_h_sum(const IntPoly& f, double L, double delta,
                                   const PrimeTable& table) {
    if (!(L >= 2) || !(delta > 0 && delta < 0.5))
        throw std::domain_error("weighted_h_sum: need L >= 2, 0 < delta < 1/2");
    WeightedHSum out;
    out.h_max = static_cast<uint64_t>(std::pow(L, delta) * (1 + 1e-12));
    out.sum = 0;
    for (uint64_t h = 1; h <= out.h_max; ++h) {
        mpq_class star = sigma_star(f, h, table);
        if (star == 0) continue;
        mpq_class G(1);
        for (auto& [p, e] : factor_u64(h, table)) {
            (void)e;
            uint64_t sp = sigma_p(f, p);
            if (sp >= p) throw std::domain_error("weighted_h_sum: sigma(p) >= p");
            G *= frac(p, p - sp);
        }
        out.sum += G * star / mpq_class(static_cast<unsigned long>(h));
    }
    double prod = 1.0;
    uint64_t cut = std::min<uint64_t>(table.limit(), 100'000);
    for (uint64_t p : table.primes()) {
        if (p > cut) break;
        double sp = static_cast<double>(sigma_p(f, p));
        double pd = static_cast<double>(p);
        prod *= (1.0 - 1.0 / pd) / (1.0 - sp / pd);
    }
    out.main_term = delta * std::log(L) * prod;
    return out;
}

}  // namespace smoothval
