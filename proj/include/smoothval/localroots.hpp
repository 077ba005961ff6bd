#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "smoothval/arith.hpp"
#include "smoothval/poly.hpp"
#include "smoothval/util.hpp"

namespace smoothval {

// Roots of f modulo p^r, complete and ascending. sigma() is the paper's
// sigma(p^r); sigma_lambda() counts only roots coprime to p.
struct LocalRoots {
    uint64_t p = 0;
    unsigned r = 0;
    uint64_t modulus = 0;  // p^r
    std::vector<uint64_t> roots;

    uint64_t sigma() const { return roots.size(); }
    uint64_t sigma_lambda() const {
        uint64_t c = 0;
        for (uint64_t b : roots)
            if (b % p != 0) ++c;
        return c;
    }
};

namespace detail {

// Exhaustive root scan mod p using a forward-difference table: after the
// g+1 initial evaluations every step costs g modular additions.
inline std::vector<uint64_t> brute_roots_mod_p(const IntPoly& f, uint64_t p) {
    std::vector<uint64_t> roots;
    unsigned g = f.degree();
    if (p <= g + 2 || g == 0) {
        for (uint64_t b = 0; b < p; ++b)
            if (f.eval_mod(b, p) == 0) roots.push_back(b);
        return roots;
    }
    std::vector<uint64_t> d(g + 1);
    for (unsigned j = 0; j <= g; ++j) d[j] = f.eval_mod(j, p);
    for (unsigned i = 1; i <= g; ++i)
        for (unsigned j = g; j >= i; --j) d[j] = (d[j] + p - d[j - 1]) % p;
    for (uint64_t b = 0; b < p; ++b) {
        if (d[0] == 0) roots.push_back(b);
        for (unsigned j = 0; j < g; ++j) {
            d[j] += d[j + 1];
            if (d[j] >= p) d[j] -= p;
        }
    }
    return roots;
}

// ---- F_p[x] helpers for the root-counting path (deg gcd(f, x^p - x)) ----

using FpPoly = std::vector<uint64_t>;  // ascending coefficients, no lead zero

inline void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline FpPoly fp_rem(FpPoly a, const FpPoly& b, uint64_t p) {
    uint64_t inv_lead = invmod_u64(b.back(), p);
    while (a.size() >= b.size()) {
        uint64_t c = mulmod_u64(a.back(), inv_lead, p);
        std::size_t shift = a.size() - b.size();
        if (c != 0)
            for (std::size_t i = 0; i < b.size(); ++i) {
                uint64_t s = mulmod_u64(c, b[i], p);
                a[shift + i] = (a[shift + i] + p - s) % p;
            }
        a.pop_back();
        fp_trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& mod,
                        uint64_t p) {
    if (a.empty() || b.empty()) return {};
    std::vector<unsigned __int128> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            acc[i + j] += static_cast<unsigned __int128>(a[i]) * b[j] % p;
    }
    FpPoly out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i)
        out[i] = static_cast<uint64_t>(acc[i] % p);
    fp_trim(out);
    return fp_rem(std::move(out), mod, p);
}

// Number of distinct roots of f mod p as deg gcd(f, x^p - x); x^p is
// computed by repeated squaring in F_p[x]/(f).
inline uint64_t gcd_root_count(const IntPoly& f, uint64_t p) {
    FpPoly fbar = f.coeffs_mod(p);
    fp_trim(fbar);
    if (fbar.empty())
        throw std::domain_error("sigma: polynomial vanishes identically mod " +
                                std::to_string(p));
    if (fbar.size() == 1) return 0;
    if (fbar.size() == 2) return 1;
    uint64_t inv_lead = invmod_u64(fbar.back(), p);
    for (auto& c : fbar) c = mulmod_u64(c, inv_lead, p);

    FpPoly result = {1};
    FpPoly base = {0, 1};
    base = fp_rem(std::move(base), fbar, p);  // degree >= 2, so base = x
    uint64_t e = p;
    while (e) {
        if (e & 1) result = fp_mulmod(result, base, fbar, p);
        base = fp_mulmod(base, base, fbar, p);
        e >>= 1;
    }
    // result = x^p mod fbar; subtract x
    if (result.size() < 2) result.resize(2, 0);
    result[1] = (result[1] + p - 1) % p;
    fp_trim(result);

    // gcd(fbar, result)
    FpPoly a = fbar, b = result;
    while (!b.empty()) {
        FpPoly r = fp_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a.size() - 1;
}

struct RootCaches {
    std::shared_mutex mu;
    std::map<std::tuple<std::string, uint64_t, unsigned>,
             std::shared_ptr<const LocalRoots>>
        roots;
    std::map<std::pair<std::string, uint64_t>, uint64_t> counts;

    static RootCaches& instance() {
        static RootCaches c;
        return c;
    }
};

inline uint64_t checked_pow(uint64_t p, unsigned r) {
    uint64_t pe = 1;
    for (unsigned i = 0; i < r; ++i) {
        if (pe > (uint64_t(1) << 62) / p)
            throw std::domain_error("prime power exceeds 2^62");
        pe *= p;
    }
    return pe;
}

}  // namespace detail

// Complete root set of f mod p^r. r = 1 is an exhaustive scan; r > 1 lifts
// each root mod p^(r-1): a Newton step when f'(b) != 0 mod p, otherwise all
// p candidate lifts are tested. Results are cached per (f, p, r); duplicated
// concurrent computation is idempotent.
inline std::shared_ptr<const LocalRoots> roots_mod_prime_power(const IntPoly& f,
                                                               uint64_t p,
                                                               unsigned r) {
    if (r == 0) throw std::domain_error("roots_mod_prime_power: r must be >= 1");
    auto& caches = detail::RootCaches::instance();
    auto key = std::make_tuple(f.key(), p, r);
    {
        std::shared_lock lock(caches.mu);
        auto it = caches.roots.find(key);
        if (it != caches.roots.end()) return it->second;
    }

    auto out = std::make_shared<LocalRoots>();
    out->p = p;
    out->r = r;
    out->modulus = detail::checked_pow(p, r);
    if (r == 1) {
        if (f.identically_zero_mod(p))
            throw std::domain_error("sigma undefined: f vanishes identically mod " +
                                    std::to_string(p));
        out->roots = detail::brute_roots_mod_p(f, p);
    } else {
        auto prev = roots_mod_prime_power(f, p, r - 1);
        uint64_t pe = out->modulus;
        uint64_t pe_prev = prev->modulus;
        IntPoly fp = f.degree() >= 1 ? f.derivative() : f;
        for (uint64_t b : prev->roots) {
            uint64_t fb = f.eval_mod(b, pe);
            if (f.degree() >= 1) {
                uint64_t fpb = fp.eval_mod(b, p);
                if (fpb != 0) {
                    // unique lift: b - f(b)/f'(b) mod p^r
                    uint64_t a1 = (fb / pe_prev) % p;
                    uint64_t t = mulmod_u64(a1, invmod_u64(fpb, p), p);
                    t = (p - t) % p;
                    out->roots.push_back(b + t * pe_prev);
                    continue;
                }
            }
            for (uint64_t j = 0; j < p; ++j) {
                uint64_t c = b + j * pe_prev;
                if (f.eval_mod(c, pe) == 0) out->roots.push_back(c);
            }
        }
        std::sort(out->roots.begin(), out->roots.end());
    }

    std::unique_lock lock(caches.mu);
    auto [it, inserted] = caches.roots.emplace(key, out);
    return it->second;
}

// sigma(p) without enumerating roots: exhaustive below a threshold, else the
// gcd(f, x^p - x) degree count. The dual routes are cross-checked in tests.
inline uint64_t sigma_p(const IntPoly& f, uint64_t p) {
    constexpr uint64_t kBruteBound = 1u << 13;
    if (p < kBruteBound) return roots_mod_prime_power(f, p, 1)->sigma();

    auto& caches = detail::RootCaches::instance();
    auto key = std::make_pair(f.key(), p);
    {
        std::shared_lock lock(caches.mu);
        auto it = caches.counts.find(key);
        if (it != caches.counts.end()) return it->second;
    }
    if (f.identically_zero_mod(p))
        throw std::domain_error("sigma undefined: f vanishes identically mod " +
                                std::to_string(p));
    uint64_t n = detail::gcd_root_count(f, p);
    std::unique_lock lock(caches.mu);
    caches.counts.emplace(key, n);
    return n;
}

inline uint64_t sigma_pp(const IntPoly& f, uint64_t p, unsigned r) {
    if (r == 1) return sigma_p(f, p);
    return roots_mod_prime_power(f, p, r)->sigma();
}

// Root count mod p in Nagel's sense: no nonvanishing hypothesis, so the
// count is p itself when f vanishes identically as a function mod p (which
// happens for reducible f like (t^2+1)(t^2+2) at p = 2). Only an identically
// zero reduction (all coefficients divisible by p) is rejected.
inline uint64_t sigma_p_unrestricted(const IntPoly& f, uint64_t p) {
    constexpr uint64_t kBruteBound = 1u << 13;
    if (p >= kBruteBound) return sigma_p(f, p);  // p > degree: same semantics
    auto cs = f.coeffs_mod(p);
    bool nonzero = false;
    for (uint64_t c : cs)
        if (c) nonzero = true;
    if (!nonzero)
        throw std::domain_error("sigma: zero polynomial mod " + std::to_string(p));
    uint64_t count = 0;
    for (uint64_t b = 0; b < p; ++b) {
        uint64_t v = 0;
        for (std::size_t i = cs.size(); i-- > 0;) v = (mulmod_u64(v, b, p) + cs[i]) % p;
        if (v == 0) ++count;
    }
    return count;
}

// sigma_Lambda(p^r): roots coprime to p. For r = 1 this is sigma(p) minus
// one exactly when p | f(0) (the root b = 0), so no enumeration is needed.
inline uint64_t sigma_lambda_pp(const IntPoly& f, uint64_t p, unsigned r) {
    if (r == 1) {
        uint64_t s = sigma_p(f, p);
        bool zero_root = f.eval_mod(0, p) == 0;
        return zero_root ? s - 1 : s;
    }
    return roots_mod_prime_power(f, p, r)->sigma_lambda();
}

// sigma(h) = prod sigma(p^r) over p^r || h, by the Chinese remainder theorem.
inline uint64_t sigma(const IntPoly& f, uint64_t h, const PrimeTable& table) {
    if (h == 0) throw std::domain_error("sigma: h must be positive");
    uint64_t s = 1;
    for (auto& [p, e] : factor_u64(h, table)) {
        s *= sigma_pp(f, p, e);
        if (s == 0) return 0;
    }
    return s;
}

inline uint64_t sigma_lambda(const IntPoly& f, uint64_t h, const PrimeTable& table) {
    if (h == 0) throw std::domain_error("sigma_lambda: h must be positive");
    uint64_t s = 1;
    for (auto& [p, e] : factor_u64(h, table)) {
        s *= sigma_lambda_pp(f, p, e);
        if (s == 0) return 0;
    }
    return s;
}

// Exhaustive root count mod an arbitrary modulus. This is the independent
// oracle for the multiplicative machinery; a plain Horner scan.
inline uint64_t sigma_brute(const IntPoly& f, uint64_t m) {
    if (m == 0) throw std::domain_error("sigma_brute: modulus must be positive");
    auto cs = f.coeffs_mod(m);
    uint64_t c = 0;
    for (uint64_t b = 0; b < m; ++b) {
        uint64_t v = 0;
        for (std::size_t i = cs.size(); i-- > 0;) v = (mulmod_u64(v, b, m) + cs[i]) % m;
        if (v == 0) ++c;
    }
    return c;
}

inline uint64_t sigma_lambda_brute(const IntPoly& f, uint64_t m) {
    auto cs = f.coeffs_mod(m);
    uint64_t c = 0;
    for (uint64_t b = 0; b < m; ++b) {
        uint64_t v = 0;
        for (std::size_t i = cs.size(); i-- > 0;) v = (mulmod_u64(v, b, m) + cs[i]) % m;
        if (v == 0 && gcd_u64(b, m) == 1) ++c;
    }
    return c;
}

// sigma*(p^r) = sigma(p^r) - sigma(p^{r+1})/p, exact; likewise the
// sigma_Lambda variant.
inline mpq_class sigma_star_pp(const IntPoly& f, uint64_t p, unsigned r,
                               bool lambda_variant = false) {
    uint64_t lo = lambda_variant ? sigma_lambda_pp(f, p, r) : sigma_pp(f, p, r);
    uint64_t hi = lambda_variant ? sigma_lambda_pp(f, p, r + 1) : sigma_pp(f, p, r + 1);
    mpq_class v(static_cast<unsigned long>(lo));
    v -= frac(hi, p);
    return v;
}

// sigma*(h) as the product of sigma*(p^r) over p^r || h (the multiplicative
// extension of the prime-power stipulation).
inline mpq_class sigma_star(const IntPoly& f, uint64_t h, const PrimeTable& table,
                            bool lambda_variant = false) {
    if (h == 0) throw std::domain_error("sigma_star: h must be positive");
    mpq_class v(1);
    for (auto& [p, e] : factor_u64(h, table)) {
        v *= sigma_star_pp(f, p, e, lambda_variant);
        if (v == 0) return v;
    }
    return v;
}

inline bool sigma_star_positive(const IntPoly& f, uint64_t h,
                                const PrimeTable& table,
                                bool lambda_variant = false) {
    for (auto& [p, e] : factor_u64(h, table))
        if (sigma_star_pp(f, p, e, lambda_variant) <= 0) return false;
    return true;
}

// #{b mod dh : (b,h) = 1, dh | f(b)} for squarefree d. Writing h' = h(d,h)
// and d' = d/(d,h) the count is sigma_Lambda(h') sigma(d'); when
// sigma((d,h)) != 0 this equals sigma_Lambda(h(d,h)) sigma(d) / sigma((d,h)).
// Both the identity value and (when the modulus is small enough) the brute
// count are computed; disagreement is an internal inconsistency.
struct CoprimeRootCount {
    uint64_t identity = 0;
    std::optional<uint64_t> brute;
};

inline CoprimeRootCount count_roots_coprime_pair(const IntPoly& f, uint64_t d,
                                                 uint64_t h, const PrimeTable& table,
                                                 uint64_t brute_cap = 2'000'000) {
    if (d == 0 || h == 0)
        throw std::domain_error("count_roots_coprime_pair: d, h must be positive");
    for (auto& [p, e] : factor_u64(d, table)) {
        (void)p;
        if (e > 1) throw std::domain_error("count_roots_coprime_pair: d not squarefree");
    }
    uint64_t g = gcd_u64(d, h);
    CoprimeRootCount out;
    out.identity = sigma_lambda(f, h * g, table) * sigma(f, d / g, table);
    if (d * h <= brute_cap) {
        uint64_t m = d * h;
        uint64_t c = 0;
        for (uint64_t b = 0; b < m; ++b)
            if (f.eval_mod(b, m) == 0 && gcd_u64(b, h) == 1) ++c;
        out.brute = c;
        if (c != out.identity) {
            if (sigma(f, g, table) == 0 && c != 0)
                throw std::logic_error(
                    "count_roots_coprime_pair: sigma((d,h)) = 0 with nonzero count");
            throw std::logic_error("count_roots_coprime_pair: identity != brute count");
        }
    }
    return out;
}

}  // namespace smoothval
