#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smoothval/util.hpp"

namespace smoothval {

// Segment size for every sieve in the library. 64K entries keeps the working
// set inside L1/L2 and, because chunk boundaries are fixed, makes all
// parallel runs produce bit-identical output.
inline constexpr uint64_t kSieveSegment = 1u << 16;

// All primes up to a limit, produced by a segmented sieve, plus an optional
// smallest-prime-factor table for fast factorization below the limit.
class PrimeTable {
  public:
    static PrimeTable build(uint64_t limit) {
        if (limit < 2) throw std::domain_error("PrimeTable: limit must be >= 2");
        PrimeTable t;
        t.limit_ = limit;

        // small primes up to sqrt(limit), by a plain sieve
        uint64_t root = isqrt_u64(limit);
        std::vector<uint8_t> small(root + 1, 1);
        for (uint64_t i = 2; i * i <= root; ++i)
            if (small[i])
                for (uint64_t j = i * i; j <= root; j += i) small[j] = 0;
        std::vector<uint64_t> base;
        for (uint64_t i = 2; i <= root; ++i)
            if (small[i]) base.push_back(i);

        std::vector<uint8_t> seg(kSieveSegment);
        for (uint64_t lo = 2; lo <= limit; lo += kSieveSegment) {
            uint64_t hi = std::min(lo + kSieveSegment - 1, limit);
            std::fill(seg.begin(), seg.begin() + (hi - lo + 1), 1);
            for (uint64_t p : base) {
                if (p * p > hi) break;
                uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
                for (uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
            }
            for (uint64_t n = lo; n <= hi; ++n)
                if (seg[n - lo]) t.primes_.push_back(n);
        }
        return t;
    }

    uint64_t limit() const { return limit_; }
    const std::vector<uint64_t>& primes() const { return primes_; }

    bool is_prime(uint64_t n) const {
        if (n > limit_) throw std::domain_error("PrimeTable: query above limit");
        if (!spf_.empty()) return n >= 2 && spf_[n] == n;
        return std::binary_search(primes_.begin(), primes_.end(), n);
    }

    // Smallest-prime-factor array, built on first use.
    void ensure_spf() {
        if (!spf_.empty()) return;
        if (limit_ > (1ull << 31))
            throw std::domain_error("PrimeTable: spf table limited to 2^31");
        spf_.assign(limit_ + 1, 0);
        for (uint64_t p : primes_) {
            for (uint64_t j = p; j <= limit_; j += p)
                if (spf_[j] == 0) spf_[j] = static_cast<uint32_t>(p);
        }
    }
    bool has_spf() const { return !spf_.empty(); }
    uint32_t spf(uint64_t n) const { return spf_[n]; }

  private:
    uint64_t limit_ = 0;
    std::vector<uint64_t> primes_;
    std::vector<uint32_t> spf_;
};

// Factorization of a u64 via the spf table (n <= limit) or trial division.
// Requires every prime factor to be <= limit^2; beyond that callers must use
// the arbitrary-precision factorize().
inline std::vector<std::pair<uint64_t, unsigned>> factor_u64(uint64_t n,
                                                             const PrimeTable& t) {
    if (n == 0) throw std::domain_error("factor_u64: n must be positive");
    std::vector<std::pair<uint64_t, unsigned>> out;
    if (n <= t.limit() && t.has_spf()) {
        while (n > 1) {
            uint64_t p = t.spf(n);
            unsigned e = 0;
            while (n % p == 0) n /= p, ++e;
            out.emplace_back(p, e);
        }
        return out;
    }
    uint64_t m = n;
    for (uint64_t p : t.primes()) {
        if (p * p > m) break;
        if (m % p == 0) {
            unsigned e = 0;
            while (m % p == 0) m /= p, ++e;
            out.emplace_back(p, e);
        }
    }
    if (m > 1) {
        if (m > t.limit() * t.limit())
            throw std::domain_error("factor_u64: cofactor exceeds table range");
        out.emplace_back(m, 1);  // no factor <= sqrt(m), hence prime
    }
    return out;
}

// Arbitrary-precision factorization. A cofactor larger than limit^2 cannot be
// certified prime by trial division alone and is reported as unresolved
// instead of being asserted prime.
struct Factorization {
    mpz_class value;
    std::vector<std::pair<mpz_class, unsigned>> factors;
    mpz_class unresolved = 1;  // 1 when fully factored

    bool fully_factored() const { return unresolved == 1; }

    mpz_class reconstruct() const {
        mpz_class r = unresolved;
        for (const auto& [p, e] : factors) {
            mpz_class pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
            r *= pe;
        }
        return r;
    }
};

inline Factorization factorize(const mpz_class& n, const PrimeTable& t) {
    if (n <= 0) throw std::domain_error("factorize: n must be positive");
    Factorization f;
    f.value = n;
    if (n.fits_ulong_p()) {
        uint64_t v = n.get_ui();
        if (v <= t.limit() * t.limit()) {
            for (auto& [p, e] : factor_u64(v, t))
                f.factors.emplace_back(mpz_class(static_cast<unsigned long>(p)), e);
            return f;
        }
    }
    mpz_class m = n;
    for (uint64_t p : t.primes()) {
        if (mpz_cmp_ui(m.get_mpz_t(), 1) == 0) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned e = 0;
            do {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(m.get_mpz_t(), p));
            f.factors.emplace_back(mpz_class(static_cast<unsigned long>(p)), e);
        }
    }
    if (m > 1) {
        mpz_class lim2 = mpz_class(static_cast<unsigned long>(t.limit()));
        lim2 *= lim2;
        if (m <= lim2) {
            f.factors.emplace_back(m, 1);  // prime: no divisor <= limit <= sqrt(m)
        } else {
            f.unresolved = m;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// classical arithmetic functions
// ---------------------------------------------------------------------------

inline int mobius(uint64_t n, const PrimeTable& t) {
    if (n == 0) throw std::domain_error("mobius: n must be positive");
    int m = 1;
    for (auto& [p, e] : factor_u64(n, t)) {
        (void)p;
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline uint64_t euler_phi(uint64_t n, const PrimeTable& t) {
    if (n == 0) throw std::domain_error("euler_phi: n must be positive");
    uint64_t r = n;
    for (auto& [p, e] : factor_u64(n, t)) {
        (void)e;
        r -= r / p;
    }
    return r;
}

inline uint64_t divisor_count(uint64_t n, const PrimeTable& t) {
    if (n == 0) throw std::domain_error("divisor_count: n must be positive");
    uint64_t d = 1;
    for (auto& [p, e] : factor_u64(n, t)) {
        (void)p;
        d *= e + 1;
    }
    return d;
}

inline unsigned omega(uint64_t n, const PrimeTable& t) {
    if (n == 0) throw std::domain_error("omega: n must be positive");
    return static_cast<unsigned>(factor_u64(n, t).size());
}

// Lambda(n) with its exact witness: log p together with (p, k) when n = p^k.
struct VonMangoldt {
    double log_p = 0.0;
    uint64_t p = 0;
    unsigned k = 0;

    bool is_prime_power() const { return p != 0; }
};

inline VonMangoldt von_mangoldt(uint64_t n, const PrimeTable& t) {
    if (n == 0) throw std::domain_error("von_mangoldt: n must be positive");
    if (n == 1) return {};
    auto f = factor_u64(n, t);
    if (f.size() != 1) return {};
    return {std::log(static_cast<double>(f[0].first)), f[0].first, f[0].second};
}

// ---------------------------------------------------------------------------
// Chebyshev-type sums over progressions
// ---------------------------------------------------------------------------

// sum of Lambda(n) over n <= t with n = a (mod q), by direct enumeration of
// prime powers. psi(t) is the q = 1 case.
inline double psi_progression(double t, uint64_t q, int64_t a, const PrimeTable& tab) {
    if (q == 0) throw std::domain_error("psi_progression: q must be >= 1");
    if (t < 2.0) return 0.0;
    uint64_t n_max = static_cast<uint64_t>(t);
    if (n_max > tab.limit())
        throw std::domain_error("psi_progression: t exceeds prime table limit");
    uint64_t res = static_cast<uint64_t>(((a % static_cast<int64_t>(q)) + static_cast<int64_t>(q)) % static_cast<int64_t>(q));
    Kahan acc;
    for (uint64_t p : tab.primes()) {
        if (p > n_max) break;
        double lp = std::log(static_cast<double>(p));
        for (uint64_t pk = p;; pk *= p) {
            if (pk % q == res) acc.add(lp);
            if (pk > n_max / p) break;
        }
    }
    return acc.value();
}

inline double chebyshev_psi(double t, const PrimeTable& tab) {
    return psi_progression(t, 1, 0, tab);
}

// Flags for "n is squarefree" on [lo, hi), by sieving multiples of p^2.
inline std::vector<uint8_t> squarefree_flags(uint64_t lo, uint64_t hi,
                                             const PrimeTable& t) {
    if (lo >= hi) return {};
    std::vector<uint8_t> flags(hi - lo, 1);
    for (uint64_t p : t.primes()) {
        uint64_t p2 = p * p;
        if (p2 >= hi) break;
        uint64_t start = ((lo + p2 - 1) / p2) * p2;
        for (uint64_t j = start; j < hi; j += p2) flags[j - lo] = 0;
    }
    if (lo == 0) flags[0] = 0;
    return flags;
}

}  // namespace smoothval
