#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothval/arith.hpp"
#include "smoothval/localroots.hpp"
#include "smoothval/multsum.hpp"
#include "smoothval/parallel.hpp"
#include "smoothval/poly.hpp"
#include "smoothval/smooth.hpp"
#include "smoothval/util.hpp"

namespace smoothval {

// Upper-bound sieve weights lambda_d supported on squarefree d | P(z),
// P(z) = prod of primes below z. lambda_1 = 1 and the fundamental property
// sum_{d|m} lambda_d >= [m=1] holds for every squarefree m | P(z).
struct SieveWeights {
    double z = 0, D = 0, beta = 2;
    std::vector<std::pair<uint64_t, int>> support;  // ascending d, lambda != 0
    std::vector<uint64_t> primes_below_z;

    int lambda(uint64_t d) const {
        auto it = std::lower_bound(support.begin(), support.end(),
                                   std::make_pair(d, -2));
        if (it != support.end() && it->first == d) return it->second;
        return 0;
    }
};

// The linear Rosser-Iwaniec upper weights: for d = p1 p2 ... pr with
// p1 > p2 > ... > pr < z, lambda_d = mu(d) iff
//     p_l^{beta+1} p_{l-1} ... p_1 < D   for every odd l <= r,
// else lambda_d = 0; lambda_1 = 1.
inline SieveWeights lambda_rosser(double z, double D, double beta,
                                  const PrimeTable& table) {
    if (!(z >= 2 && D >= z)) throw std::domain_error("lambda_rosser: need 2 <= z <= D");
    if (z > static_cast<double>(table.limit()) + 1)
        throw std::domain_error("lambda_rosser: z beyond prime table");
    SieveWeights w;
    w.z = z;
    w.D = D;
    w.beta = beta;
    for (uint64_t p : table.primes()) {
        if (static_cast<double>(p) >= z) break;
        w.primes_below_z.push_back(p);
    }
    // descending for the DFS; condition checks use long double (all desk
    // scale values are far from representability trouble)
    std::vector<uint64_t> desc(w.primes_below_z.rbegin(), w.primes_below_z.rend());

    w.support.emplace_back(1, 1);
    std::vector<std::pair<uint64_t, int>>& sup = w.support;

    // depth-first over decreasing primes; prune when an odd-position
    // condition fails (it fails for every extension too)
    std::function<void(std::size_t, unsigned, uint64_t)> dfs =
        [&](std::size_t start, unsigned r, uint64_t d) {
            for (std::size_t i = start; i < desc.size(); ++i) {
                uint64_t q = desc[i];
                unsigned nr = r + 1;
                if (nr % 2 == 1) {
                    long double cond = std::pow(static_cast<long double>(q),
                                                static_cast<long double>(beta) + 1.0L) *
                                       static_cast<long double>(d);
                    if (!(cond < static_cast<long double>(D))) continue;
                }
                uint64_t nd = d * q;
                sup.emplace_back(nd, nr % 2 ? -1 : 1);
                if (sup.size() > 2'000'000)
                    throw std::domain_error("lambda_rosser: support too large");
                dfs(i + 1, nr, nd);
            }
        };
    dfs(0, 0, 1);
    std::sort(sup.begin(), sup.end());
    return w;
}

// Verifies sum_{d|m} lambda_d >= [m=1] over squarefree m | P(z):
// exhaustively over all 2^k subsets when exhaustive (k <= 20 required),
// otherwise over all products of at most 3 primes.
inline bool fundamental_check(const SieveWeights& w, bool exhaustive) {
    std::size_t k = w.primes_below_z.size();
    // map support entries to bitmasks over the prime list
    std::vector<std::pair<uint64_t, int>> masked;  // (mask, lambda)
    for (auto& [d, lam] : w.support) {
        uint64_t mask = 0, rest = d;
        for (std::size_t i = 0; i < k && rest > 1; ++i) {
            if (rest % w.primes_below_z[i] == 0) {
                mask |= uint64_t(1) << i;
                rest /= w.primes_below_z[i];
            }
        }
        if (rest != 1) throw std::logic_error("fundamental_check: bad support entry");
        masked.emplace_back(mask, lam);
    }
    auto sum_over = [&](uint64_t mmask) {
        int s = 0;
        for (auto& [dm, lam] : masked)
            if ((dm & ~mmask) == 0) s += lam;
        return s;
    };
    if (exhaustive) {
        if (k > 20) throw std::domain_error("fundamental_check: too many primes");
        for (uint64_t m = 0; m < (uint64_t(1) << k); ++m) {
            int s = sum_over(m);
            if (m == 0 ? s < 1 : s < 0) return false;
        }
        return true;
    }
    if (sum_over(0) < 1) return false;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b)
            for (std::size_t c = b; c < k; ++c) {
                uint64_t m = (uint64_t(1) << a) | (uint64_t(1) << b) |
                             (uint64_t(1) << c);
                if (sum_over(m) < 0) return false;
            }
    return true;
}

// The linear-sieve upper function F(s) = 2 e^gamma / s on [1, 3], normalized
// so that s F(s) / 2 e^gamma = 1 at s = 1 (and s F(s) is nondecreasing).
inline double F_linear(double s) {
    if (!(s >= 1.0 && s <= 3.0)) throw std::domain_error("F_linear: need 1 <= s <= 3");
    return 2.0 * std::exp(kEulerGamma) / s;
}

// ---------------------------------------------------------------------------
// sieve sums over polynomial values
// ---------------------------------------------------------------------------

namespace detail {

struct HEntry {
    uint64_t h;
    std::vector<std::pair<uint64_t, uint16_t>> factors;
};

inline std::vector<HEntry> admissible_h(const IntPoly& f, double bound, bool weighted,
                                        const PrimeTable& table) {
    std::vector<HEntry> out;
    uint64_t h_hi = static_cast<uint64_t>(bound * (1 + 1e-12));
    for (uint64_t h = 1; h <= h_hi; ++h) {
        if (!(static_cast<double>(h) < bound)) break;  // strict h < bound
        if (!sigma_star_positive(f, h, table, weighted)) continue;
        HEntry e;
        e.h = h;
        for (auto& [p, ex] : factor_u64(h, table))
            e.factors.emplace_back(p, static_cast<uint16_t>(ex));
        out.push_back(std::move(e));
    }
    return out;
}

inline uint16_t exponent_of(const std::vector<std::pair<uint64_t, uint16_t>>& fac,
                            uint64_t p) {
    for (auto& [q, e] : fac)
        if (q == p) return e;
    return 0;
}

// Lambda(n) for all n <= x as a flat array (0 for non prime powers).
inline std::vector<double> lambda_table(uint64_t x, const PrimeTable& t) {
    std::vector<double> lam(x + 1, 0.0);
    for (uint64_t p : t.primes()) {
        if (p > x) break;
        double lp = std::log(static_cast<double>(p));
        for (uint64_t pk = p;; pk *= p) {
            lam[pk] = lp;
            if (pk > x / p) break;
        }
    }
    return lam;
}

}  // namespace detail

// S(z) (unweighted) or S_Lambda(z): over h < x^delta with sigma*(h) > 0
// (sigma_Lambda* when weighted), count n <= x with h | f(n) and every prime
// factor of f(n)/h above z; weighted terms carry Lambda(n) and the extra
// condition (n,h) = 1. Computed by full factorization of each f(n).
inline double S_direct(const IntPoly& f, uint64_t x, double z, double delta,
                       bool weighted, const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("S_direct: x must be >= 2");
    auto hs = detail::admissible_h(f, std::pow(static_cast<double>(x), delta),
                                   weighted, table);
    std::vector<double> lam;
    if (weighted) lam = detail::lambda_table(x, table);

    std::size_t n_chunks = (x + kSieveSegment - 1) / kSieveSegment;
    std::function<double(std::size_t)> work = [&](std::size_t ci) -> double {
        uint64_t a = std::max<uint64_t>(1, ci * kSieveSegment);
        uint64_t b = std::min<uint64_t>(x + 1, (ci + 1) * kSieveSegment);
        if (a >= b) return 0.0;
        SegmentFactors sf = factor_segment(f, a, b, table);
        Kahan acc;
        for (uint64_t n = a; n < b; ++n) {
            auto* fac = &sf.entries[sf.offsets[n - a]];
            std::size_t nf = sf.offsets[n - a + 1] - sf.offsets[n - a];
            for (const auto& he : hs) {
                if (weighted) {
                    if (lam[n] == 0.0) continue;
                    if (gcd_u64(n, he.h) != 1) continue;
                }
                bool divides = true;
                for (auto& [p, e] : he.factors) {
                    uint16_t have = 0;
                    for (std::size_t i = 0; i < nf; ++i)
                        if (fac[i].first == p) { have = fac[i].second; break; }
                    if (have < e) { divides = false; break; }
                }
                if (!divides) continue;
                bool rough = true;  // f(n)/h has no prime factor <= z
                for (std::size_t i = 0; i < nf; ++i) {
                    if (static_cast<double>(fac[i].first) > z) continue;
                    if (fac[i].second > detail::exponent_of(he.factors, fac[i].first)) {
                        rough = false;
                        break;
                    }
                }
                if (rough) acc.add(weighted ? lam[n] : 1.0);
            }
        }
        return acc.value();
    };
    auto parts = run_chunked<double>(n_chunks, threads, work);
    Kahan total;
    for (double v : parts) total.add(v);
    return total.value();
}

// S_d (unweighted) or (S_Lambda)_d: over the same h range, count n <= x with
// dh | f(n) (and (n,h) = 1, weight Lambda(n) when weighted). Also returns
// the main-term prediction:
//   weighted:    x  sum_h sigma_Lambda(h(d,h)) sigma(d/(d,h)) / phi(dh)
//   unweighted:  x  sum_h sigma(dh) / (dh)
struct SieveSumD {
    double value = 0;
    double main_term = 0;
};

inline SieveSumD S_d(const IntPoly& f, uint64_t x, uint64_t d, double delta,
                     bool weighted, const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("S_d: x must be >= 2");
    for (auto& [p, e] : factor_u64(d, table)) {
        (void)p;
        if (e > 1) throw std::domain_error("S_d: d must be squarefree");
    }
    auto hs = detail::admissible_h(f, std::pow(static_cast<double>(x), delta),
                                   weighted, table);
    std::vector<double> lam;
    if (weighted) lam = detail::lambda_table(x, table);
    auto d_factors = factor_u64(d, table);

    std::size_t n_chunks = (x + kSieveSegment - 1) / kSieveSegment;
    std::function<double(std::size_t)> work = [&](std::size_t ci) -> double {
        uint64_t a = std::max<uint64_t>(1, ci * kSieveSegment);
        uint64_t b = std::min<uint64_t>(x + 1, (ci + 1) * kSieveSegment);
        if (a >= b) return 0.0;
        SegmentFactors sf = factor_segment(f, a, b, table);
        Kahan acc;
        for (uint64_t n = a; n < b; ++n) {
            auto* fac = &sf.entries[sf.offsets[n - a]];
            std::size_t nf = sf.offsets[n - a + 1] - sf.offsets[n - a];
            auto v_of = [&](uint64_t p) -> uint16_t {
                for (std::size_t i = 0; i < nf; ++i)
                    if (fac[i].first == p) return fac[i].second;
                return 0;
            };
            for (const auto& he : hs) {
                if (weighted) {
                    if (lam[n] == 0.0) continue;
                    if (gcd_u64(n, he.h) != 1) continue;
                }
                bool divides = true;
                for (auto& [p, e] : he.factors) {
                    uint16_t need = e + (d % p == 0 ? 1 : 0);
                    if (v_of(p) < need) { divides = false; break; }
                }
                if (divides)
                    for (auto& [p, e] : d_factors) {
                        (void)e;
                        if (he.h % p == 0) continue;  // already counted above
                        if (v_of(p) < 1) { divides = false; break; }
                    }
                if (divides) acc.add(weighted ? lam[n] : 1.0);
            }
        }
        return acc.value();
    };
    auto parts = run_chunked<double>(n_chunks, threads, work);
    SieveSumD out;
    Kahan total;
    for (double v : parts) total.add(v);
    out.value = total.value();

    Kahan main;
    for (const auto& he : hs) {
        uint64_t g = gcd_u64(d, he.h);
        if (weighted) {
            uint64_t num = sigma_lambda(f, he.h * g, table) * sigma(f, d / g, table);
            uint64_t phi = euler_phi(d * he.h, table);
            main.add(static_cast<double>(x) * static_cast<double>(num) /
                     static_cast<double>(phi));
        } else {
            uint64_t s = sigma(f, d * he.h, table);
            main.add(static_cast<double>(x) * static_cast<double>(s) /
                     static_cast<double>(d * he.h));
        }
    }
    out.main_term = main.value();
    return out;
}

// ---------------------------------------------------------------------------
// the cancellation double sum (exact rational)
// ---------------------------------------------------------------------------

// LHS of the cancellation bound:
//   unweighted: sum_{d | P(z)} (lambda_d / d) sum_{h < L^delta, sigma*(h)>0}
//               sigma(dh)/h
//   weighted:   sum_{d | P(z)} lambda_d sum_{h < x^delta, sigma_L*(h)>0}
//               sigma_Lambda(h(d,h)) sigma(d/(d,h)) / phi(dh)
// plus the leading term (2 delta log L / log D)(s F(s) / 2 e^gamma).
struct CancelSum {
    mpq_class lhs;
    double rhs_leading = 0;
    double s = 0;
};

inline CancelSum cancel_double_sum(const IntPoly& f, double z, double D, double L,
                                   double delta, bool weighted,
                                   const PrimeTable& table) {
    SieveWeights w = lambda_rosser(z, D, 2, table);
    auto hs = detail::admissible_h(f, std::pow(L, delta), weighted, table);
    CancelSum out;
    out.lhs = 0;
    out.s = std::log(D) / std::log(z);
    for (auto& [d, lamd] : w.support) {
        mpq_class inner(0);
        for (const auto& he : hs) {
            if (weighted) {
                uint64_t g = gcd_u64(d, he.h);
                uint64_t num = sigma_lambda(f, he.h * g, table) *
                               sigma(f, d / g, table);
                if (num == 0) continue;
                inner += frac(num, euler_phi(d * he.h, table));
            } else {
                uint64_t s = sigma(f, d * he.h, table);
                if (s == 0) continue;
                inner += frac(s, he.h);
            }
        }
        if (!weighted) inner /= mpq_class(static_cast<unsigned long>(d));
        if (lamd > 0) out.lhs += inner;
        else out.lhs -= inner;
    }
    out.rhs_leading = (2.0 * delta * std::log(L) / std::log(D)) *
                      (out.s * F_linear(out.s) / (2.0 * std::exp(kEulerGamma)));
    return out;
}

// ---------------------------------------------------------------------------
// errors in prime counting over progressions
// ---------------------------------------------------------------------------

struct ApError {
    uint64_t q = 0;
    double E = 0;           // max over (a,q)=1 of |x/phi(q) - psi(x;q,a)|
    double x_over_phi = 0;
    uint64_t worst_a = 0;
};

inline ApError prime_ap_error(double x, uint64_t q, const PrimeTable& table) {
    if (q == 0) throw std::domain_error("prime_ap_error: q must be >= 1");
    uint64_t n_max = x >= 2 ? static_cast<uint64_t>(x) : 0;
    if (n_max > table.limit())
        throw std::domain_error("prime_ap_error: x beyond prime table");
    std::vector<Kahan> buckets(q);
    for (uint64_t p : table.primes()) {
        if (p > n_max) break;
        double lp = std::log(static_cast<double>(p));
        for (uint64_t pk = p;; pk *= p) {
            buckets[pk % q].add(lp);
            if (pk > n_max / p) break;
        }
    }
    ApError out;
    out.q = q;
    out.x_over_phi = x / static_cast<double>(euler_phi(q, table));
    out.E = -1;
    for (uint64_t a = 0; a < q; ++a) {
        if (gcd_u64(a, q) != 1 && q > 1) continue;
        double dev = std::abs(out.x_over_phi - buckets[a].value());
        if (dev > out.E) {
            out.E = dev;
            out.worst_a = a;
        }
    }
    if (out.E < 0) out.E = 0;  // q = 1 handled above via a = 0
    return out;
}

struct ErrorTermReport {
    double x = 0;
    std::vector<ApError> entries;
    double weighted = 0;  // optional: sum d(m) sigma(m) E(x,m)
};

// E(x, q) tabulated for q <= Q (Bombieri-Vinogradov left-hand data).
inline ErrorTermReport bv_sum(double x, uint64_t Q, const PrimeTable& table,
                              int threads = 1) {
    ErrorTermReport rep;
    rep.x = x;
    constexpr uint64_t kBlock = 16;
    std::size_t n_chunks = (Q + kBlock - 1) / kBlock;
    std::function<std::vector<ApError>(std::size_t)> work =
        [&](std::size_t ci) -> std::vector<ApError> {
        std::vector<ApError> out;
        uint64_t q_lo = ci * kBlock + 1, q_hi = std::min(Q, (ci + 1) * kBlock);
        for (uint64_t q = q_lo; q <= q_hi; ++q)
            out.push_back(prime_ap_error(x, q, table));
        return out;
    };
    auto chunks = run_chunked<std::vector<ApError>>(n_chunks, threads, work);
    for (auto& c : chunks)
        rep.entries.insert(rep.entries.end(), c.begin(), c.end());
    return rep;
}

// sum_{m < M} d(m) sigma(m) E(x, m), the error sum controlling the
// Lambda-weighted sieve bound.
inline double weighted_error_sum(const IntPoly& f, double x, uint64_t M,
                                 const PrimeTable& table, int threads = 1) {
    constexpr uint64_t kBlock = 16;
    if (M < 2) return 0.0;
    std::size_t n_chunks = (M - 1 + kBlock - 1) / kBlock;
    std::function<double(std::size_t)> work = [&](std::size_t ci) -> double {
        uint64_t m_lo = ci * kBlock + 1, m_hi = std::min(M - 1, (ci + 1) * kBlock);
        Kahan acc;
        for (uint64_t m = m_lo; m <= m_hi; ++m) {
            uint64_t s = sigma(f, m, table);
            if (s == 0) continue;
            double E = prime_ap_error(x, m, table).E;
            acc.add(static_cast<double>(divisor_count(m, table)) *
                    static_cast<double>(s) * E);
        }
        return acc.value();
    };
    auto parts = run_chunked<double>(n_chunks, threads, work);
    Kahan total;
    for (double v : parts) total.add(v);
    return total.value();
}

}  // namespace smoothval
