#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothval/arith.hpp"
#include "smoothval/dickman.hpp"
#include "smoothval/localroots.hpp"
#include "smoothval/parallel.hpp"
#include "smoothval/poly.hpp"

namespace smoothval {

// Per-n smoothness flags for f on [lo, hi): flags[n-lo] is true iff every
// prime factor of |f(n)| is <= y (|f(n)| = 1 counts as smooth; f(n) = 0 is
// rejected).
struct SmoothnessMask {
    uint64_t lo = 0, hi = 0;
    double y = 0;
    std::vector<uint8_t> flags;
    std::vector<mpz_class> cofactors;  // filled only on request

    bool flag(uint64_t n) const { return flags[n - lo] != 0; }
    uint64_t count() const {
        uint64_t c = 0;
        for (uint8_t f : flags) c += f;
        return c;
    }
};

namespace detail {

// |f(n)| for n in [a, b) by forward-difference propagation (g adds per
// step after g+1 initial evaluations). Throws on f(n) = 0.
inline std::vector<mpz_class> segment_values(const IntPoly& f, uint64_t a,
                                             uint64_t b) {
    const unsigned g = f.degree();
    std::vector<mpz_class> d(g + 1);
    for (unsigned j = 0; j <= g; ++j)
        d[j] = f.eval(mpz_class(static_cast<unsigned long>(a) + j));
    for (unsigned i = 1; i <= g; ++i)
        for (unsigned j = g; j >= i; --j) d[j] -= d[j - 1];

    std::vector<mpz_class> vals(b - a);
    for (uint64_t n = a; n < b; ++n) {
        if (d[0] == 0)
            throw std::domain_error("smoothness_sieve: f vanishes at n = " +
                                    std::to_string(n));
        vals[n - a] = abs(d[0]);
        for (unsigned j = 0; j < g; ++j) d[j] += d[j + 1];
    }
    return vals;
}

// Divide every prime power progression out of the segment's values.
// After this, each value's remaining cofactor has no prime factor <= bound.
inline void strip_progressions(const IntPoly& f, uint64_t a, uint64_t b,
                               uint64_t bound, const mpz_class& xi_seg,
                               const PrimeTable& table,
                               std::vector<mpz_class>& cof) {
    for (uint64_t p : table.primes()) {
        if (p > bound) break;
        uint64_t pe = 1;
        for (unsigned e = 1;; ++e) {
            bool last_level = false;
            if (pe > (uint64_t(1) << 62) / p) {
                last_level = true;  // next stride would overflow; finish by division
            } else {
                pe *= p;
                if (mpz_cmp_ui(xi_seg.get_mpz_t(), 0) != 0) {
                    mpz_class pez(static_cast<unsigned long>(pe));
                    if (pez > xi_seg) break;
                }
            }
            auto roots = roots_mod_prime_power(f, p, last_level ? e - 1 : e);
            if (roots->roots.empty()) break;
            uint64_t mod = roots->modulus;
            for (uint64_t rt : roots->roots) {
                uint64_t r0 = a % mod;
                uint64_t off = rt >= r0 ? rt - r0 : rt + mod - r0;
                for (uint64_t n = a + off; n < b; n += mod) {
                    mpz_class& c = cof[n - a];
                    if (last_level) {
                        while (mpz_divisible_ui_p(c.get_mpz_t(), p))
                            mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
                    } else {
                        mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
                    }
                }
            }
            if (last_level) break;
        }
    }
}

}  // namespace detail

// The smoothness sieve. For each prime p and power p^e within the value
// range, every n = b (mod p^e) with b a root of f mod p^e has one factor p
// divided out of its tracked cofactor, so cofactors are exact. Primes are
// only sieved up to B = min(y, sqrt(xi)+1): beyond B the cofactor is 1 or a
// single prime (two factors > sqrt(xi) would exceed xi), so the flag is
// decided exactly either way. Segmented over n; bit-identical for any
// worker count.
inline SmoothnessMask smoothness_sieve(const IntPoly& f, uint64_t lo, uint64_t hi,
                                       double y, const PrimeTable& table,
                                       int threads = 1, bool keep_cofactors = false) {
    if (lo < 1 || hi <= lo)
        throw std::domain_error("smoothness_sieve: need hi > lo >= 1");
    if (y < 2) throw std::domain_error("smoothness_sieve: need y >= 2");
    if (y >= 9e18) throw std::domain_error("smoothness_sieve: y out of range");
    uint64_t y_floor = static_cast<uint64_t>(y);

    struct Chunk {
        std::vector<uint8_t> flags;
        std::vector<mpz_class> cofactors;
    };
    uint64_t len = hi - lo;
    std::size_t n_chunks = (len + kSieveSegment - 1) / kSieveSegment;

    std::function<Chunk(std::size_t)> work = [&](std::size_t ci) -> Chunk {
        uint64_t a = lo + ci * kSieveSegment;
        uint64_t b = std::min(hi, a + kSieveSegment);
        Chunk out;
        std::vector<mpz_class> cof = detail::segment_values(f, a, b);
        mpz_class xi_seg = 0;
        for (const auto& v : cof)
            if (v > xi_seg) xi_seg = v;

        mpz_class sqrt_xi;
        mpz_sqrt(sqrt_xi.get_mpz_t(), xi_seg.get_mpz_t());
        sqrt_xi += 1;
        bool big_y = mpz_cmp_ui(sqrt_xi.get_mpz_t(), 0) > 0 &&
                     sqrt_xi <= mpz_class(static_cast<unsigned long>(y_floor));
        uint64_t bound = big_y ? sqrt_xi.get_ui() : y_floor;
        if (bound > table.limit())
            throw std::domain_error("smoothness_sieve: prime table too small (need " +
                                    std::to_string(bound) + ")");

        detail::strip_progressions(f, a, b, bound, xi_seg, table, cof);

        out.flags.resize(b - a);
        for (uint64_t i = 0; i < b - a; ++i) {
            const mpz_class& c = cof[i];
            bool smooth;
            if (big_y)
                smooth = c <= mpz_class(static_cast<unsigned long>(y_floor));
            else
                smooth = c == 1;
            out.flags[i] = smooth ? 1 : 0;
        }
        if (keep_cofactors) out.cofactors = std::move(cof);
        return out;
    };

    auto chunks = run_chunked<Chunk>(n_chunks, threads, work);

    SmoothnessMask mask;
    mask.lo = lo;
    mask.hi = hi;
    mask.y = y;
    mask.flags.reserve(len);
    for (auto& c : chunks) {
        mask.flags.insert(mask.flags.end(), c.flags.begin(), c.flags.end());
        if (keep_cofactors)
            mask.cofactors.insert(mask.cofactors.end(),
                                  std::make_move_iterator(c.cofactors.begin()),
                                  std::make_move_iterator(c.cofactors.end()));
    }
    return mask;
}

// Full factorization of |f(n)| on a segment: ascending (p, e) pairs per n.
// Used by the sieve-sum machinery; the leftover cofactor beyond sqrt(xi) is
// prime and is appended as an ordinary factor.
struct SegmentFactors {
    uint64_t lo = 0, hi = 0;
    std::vector<uint32_t> offsets;                    // size (hi-lo)+1
    std::vector<std::pair<uint64_t, uint16_t>> entries;
};

inline SegmentFactors factor_segment(const IntPoly& f, uint64_t a, uint64_t b,
                                     const PrimeTable& table) {
    SegmentFactors out;
    out.lo = a;
    out.hi = b;
    std::vector<mpz_class> cof = detail::segment_values(f, a, b);
    mpz_class xi_seg = 0;
    for (const auto& v : cof)
        if (v > xi_seg) xi_seg = v;
    mpz_class sqrt_xi;
    mpz_sqrt(sqrt_xi.get_mpz_t(), xi_seg.get_mpz_t());
    sqrt_xi += 1;
    if (!sqrt_xi.fits_ulong_p() || sqrt_xi.get_ui() > table.limit())
        throw std::domain_error("factor_segment: prime table too small");
    uint64_t bound = sqrt_xi.get_ui();

    std::vector<std::vector<std::pair<uint64_t, uint16_t>>> per_n(b - a);

    for (uint64_t p : table.primes()) {
        if (p > bound) break;
        uint64_t pe = 1;
        for (unsigned e = 1;; ++e) {
            if (pe > (uint64_t(1) << 62) / p)
                throw std::domain_error("factor_segment: stride overflow");
            pe *= p;
            {
                mpz_class pez(static_cast<unsigned long>(pe));
                if (pez > xi_seg) break;
            }
            auto roots = roots_mod_prime_power(f, p, e);
            if (roots->roots.empty()) break;
            for (uint64_t rt : roots->roots) {
                uint64_t r0 = a % pe;
                uint64_t off = rt >= r0 ? rt - r0 : rt + pe - r0;
                for (uint64_t n = a + off; n < b; n += pe) {
                    auto& lst = per_n[n - a];
                    if (!lst.empty() && lst.back().first == p)
                        ++lst.back().second;  // deeper level of the same prime
                    else
                        lst.emplace_back(p, 1);
                    mpz_divexact_ui(cof[n - a].get_mpz_t(), cof[n - a].get_mpz_t(), p);
                }
            }
        }
    }

    out.offsets.reserve(b - a + 1);
    out.offsets.push_back(0);
    for (uint64_t i = 0; i < b - a; ++i) {
        auto& lst = per_n[i];
        if (cof[i] > 1) {
            // all factors <= sqrt(xi) removed: the leftover is prime
            if (!cof[i].fits_ulong_p())
                throw std::domain_error("factor_segment: leftover exceeds u64");
            lst.emplace_back(cof[i].get_ui(), 1);
        }
        out.entries.insert(out.entries.end(), lst.begin(), lst.end());
        out.offsets.push_back(static_cast<uint32_t>(out.entries.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// counters
// ---------------------------------------------------------------------------

inline uint64_t count_flags(const SmoothnessMask& m) { return m.count(); }

inline uint64_t count_primes_flagged(const SmoothnessMask& m, const PrimeTable& t) {
    uint64_t c = 0;
    for (uint64_t p : t.primes()) {
        if (p < m.lo) continue;
        if (p >= m.hi) break;
        c += m.flag(p);
    }
    return c;
}

// sum of Lambda(n) over flagged n (only prime powers contribute), plus the
// number of contributing prime powers.
struct LambdaCount {
    double sum = 0;
    uint64_t terms = 0;
};

inline LambdaCount lambda_sum_flagged(const SmoothnessMask& m, const PrimeTable& t) {
    Kahan acc;
    uint64_t terms = 0;
    for (uint64_t p : t.primes()) {
        if (p >= m.hi) break;
        double lp = std::log(static_cast<double>(p));
        for (uint64_t pk = p;; pk *= p) {
            if (pk >= m.lo && pk < m.hi && m.flag(pk)) {
                acc.add(lp);
                ++terms;
            }
            if (pk > (m.hi - 1) / p) break;
        }
    }
    return {acc.value(), terms};
}

inline uint64_t count_pred_flagged(const SmoothnessMask& m,
                                   const std::function<bool(uint64_t)>& pred) {
    uint64_t c = 0;
    for (uint64_t n = m.lo; n < m.hi; ++n)
        if (m.flag(n) && pred(n)) ++c;
    return c;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

enum class SmoothFilter { All, Primes, Lambda, Set };

inline const char* filter_name(SmoothFilter f) {
    switch (f) {
        case SmoothFilter::All: return "all";
        case SmoothFilter::Primes: return "primes";
        case SmoothFilter::Lambda: return "lambda";
        case SmoothFilter::Set: return "set";
    }
    return "?";
}

struct SmoothRow {
    double delta = 0;       // g - log y / log x
    double y = 0;
    double count = 0;       // integer count, or x - Psi_Lambda has weight_sum
    double weight_sum = 0;  // Lambda-weighted count (lambda filter)
    double baseline = 0;    // Dickman (or stated) prediction for `ratio`
    double ratio = 0;       // count normalized per filter (see README)
    std::string tag;
};

struct SmoothReport {
    std::string poly;
    uint64_t x = 0;
    double L = 0;  // 0 = full range
    std::string filter;
    std::vector<SmoothRow> rows;
};

namespace detail {

inline double dickman_u(unsigned degree, double x, double y) {
    return degree * std::log(x) / std::log(y);
}

inline SmoothRow make_row(unsigned degree, uint64_t x, double y, double count,
                          double weight_sum, double numerator, double norm,
                          const std::string& tag) {
    SmoothRow row;
    row.y = y;
    row.delta = degree - std::log(y) / std::log(static_cast<double>(x));
    row.count = count;
    row.weight_sum = weight_sum;
    double u = dickman_u(degree, static_cast<double>(x), y);
    row.baseline = u <= 50 ? dickman_rho(u) : 0.0;
    row.ratio = norm > 0 ? numerator / norm : 0.0;
    row.tag = tag;
    return row;
}

}  // namespace detail

// Psi(f; x, y): y-smooth values over 1 <= n <= x.
inline SmoothReport psi_count(const IntPoly& f, uint64_t x, double y,
                              const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("psi_count: x must be >= 2");
    auto mask = smoothness_sieve(f, 1, x + 1, y, table, threads);
    SmoothReport rep{f.to_string(), x, 0, filter_name(SmoothFilter::All), {}};
    double c = static_cast<double>(mask.count());
    rep.rows.push_back(detail::make_row(f.degree(), x, y, c, 0, c,
                                        static_cast<double>(x), "psi"));
    return rep;
}

// Psi(f; x, L, y) = Psi(f; x, y) - Psi(f; x-L, y): the short-interval count
// over x-L < n <= x.
inline SmoothReport psi_interval(const IntPoly& f, uint64_t x, uint64_t L, double y,
                                 const PrimeTable& table, int threads = 1) {
    if (x < 2 || L < 2 || L > x)
        throw std::domain_error("psi_interval: need 2 <= L <= x");
    auto mask = smoothness_sieve(f, x - L + 1, x + 1, y, table, threads);
    SmoothReport rep{f.to_string(), x, static_cast<double>(L),
                     filter_name(SmoothFilter::All), {}};
    double c = static_cast<double>(mask.count());
    rep.rows.push_back(detail::make_row(f.degree(), x, y, c, 0, c,
                                        static_cast<double>(L), "psi_interval"));
    return rep;
}

// Phi(f; x, y): y-smooth values at prime arguments.
inline SmoothReport phi_primes(const IntPoly& f, uint64_t x, double y,
                               const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("phi_primes: x must be >= 2");
    auto mask = smoothness_sieve(f, 1, x + 1, y, table, threads);
    uint64_t c = count_primes_flagged(mask, table);
    SmoothReport rep{f.to_string(), x, 0, filter_name(SmoothFilter::Primes), {}};
    rep.rows.push_back(detail::make_row(f.degree(), x, y, static_cast<double>(c), 0,
                                        static_cast<double>(c),
                                        x / std::log(static_cast<double>(x)),
                                        "phi"));
    return rep;
}

// Psi_Lambda(f; x, y) = sum Lambda(n) over y-smooth values, and
// C_Lambda = x - Psi_Lambda.
inline SmoothReport psi_lambda(const IntPoly& f, uint64_t x, double y,
                               const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("psi_lambda: x must be >= 2");
    auto mask = smoothness_sieve(f, 1, x + 1, y, table, threads);
    LambdaCount lc = lambda_sum_flagged(mask, table);
    SmoothReport rep{f.to_string(), x, 0, filter_name(SmoothFilter::Lambda), {}};
    SmoothRow row = detail::make_row(f.degree(), x, y,
                                     static_cast<double>(lc.terms), lc.sum, lc.sum,
                                     static_cast<double>(x), "psi_lambda");
    rep.rows.push_back(row);
    return rep;
}

// Psi_A(f; x, y): smooth values over an arbitrary set given by a membership
// predicate with density eta (supplied by the caller for the baseline).
inline SmoothReport psi_set(const IntPoly& f, uint64_t x, double y,
                            const std::function<bool(uint64_t)>& pred, double eta,
                            const PrimeTable& table, int threads = 1) {
    if (x < 2) throw std::domain_error("psi_set: x must be >= 2");
    if (!(eta > 0 && eta <= 1)) throw std::domain_error("psi_set: need 0 < eta <= 1");
    auto mask = smoothness_sieve(f, 1, x + 1, y, table, threads);
    uint64_t c = count_pred_flagged(mask, pred);
    SmoothReport rep{f.to_string(), x, 0, filter_name(SmoothFilter::Set), {}};
    rep.rows.push_back(detail::make_row(f.degree(), x, y, static_cast<double>(c), 0,
                                        static_cast<double>(c),
                                        eta * static_cast<double>(x), "psi_set"));
    return rep;
}

// Ratios Psi(f; x, x^{g-delta})/x (or the filtered analogues) across a delta
// grid, plus the y = x^{g-1/k} point with baseline log^{-k} x.
inline SmoothReport delta_spectrum(const PolyProfile& profile, uint64_t x,
                                   const std::vector<double>& delta_grid,
                                   SmoothFilter filter, const PrimeTable& table,
                                   int threads = 1) {
    const IntPoly& f = profile.poly;
    unsigned g = f.degree();
    SmoothReport rep{f.to_string(), x, 0, filter_name(filter), {}};
    auto row_for_y = [&](double y, const std::string& tag) {
        switch (filter) {
            case SmoothFilter::Primes: {
                auto r = phi_primes(f, x, y, table, threads);
                r.rows[0].tag = tag;
                return r.rows[0];
            }
            case SmoothFilter::Lambda: {
                auto r = psi_lambda(f, x, y, table, threads);
                r.rows[0].tag = tag;
                return r.rows[0];
            }
            default: {
                auto r = psi_count(f, x, y, table, threads);
                r.rows[0].tag = tag;
                return r.rows[0];
            }
        }
    };
    for (double delta : delta_grid) {
        if (!(delta > 0 && delta < g))
            throw std::domain_error("delta_spectrum: need 0 < delta < degree");
        double y = std::pow(static_cast<double>(x), g - delta);
        rep.rows.push_back(row_for_y(y, "delta"));
    }
    // the x log^{-k} x point: y = x^{g - 1/k} (skipped when degenerate)
    double exp_silly = g - 1.0 / static_cast<double>(profile.k);
    if (exp_silly > 0) {
        double y_silly = std::pow(static_cast<double>(x), exp_silly);
        if (y_silly >= 2) {
            SmoothRow silly = row_for_y(y_silly, "log-power");
            silly.baseline = std::pow(std::log(static_cast<double>(x)),
                                      -static_cast<double>(profile.k));
            rep.rows.push_back(silly);
        }
    }
    return rep;
}

}  // namespace smoothval
