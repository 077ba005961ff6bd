#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "smoothval/poly.hpp"

using namespace smoothval;

TEST_CASE("parse_poly grammar", "[poly]") {
    REQUIRE(parse_poly("t^2+1").coeffs() == std::vector<mpz_class>{1, 0, 1});
    REQUIRE(parse_poly("2*t^2 + 3*t + 1").coeffs() == std::vector<mpz_class>{1, 3, 2});
    REQUIRE(parse_poly("  t ^ 2  -  t  +  5 ").coeffs() ==
            std::vector<mpz_class>{5, -1, 1});
    REQUIRE(parse_poly("-t").coeffs() == std::vector<mpz_class>{0, -1});
    REQUIRE(parse_poly("7").coeffs() == std::vector<mpz_class>{7});
    REQUIRE(parse_poly("t^3+2").degree() == 3);
    // coefficient merging
    REQUIRE(parse_poly("t + t").coeffs() == std::vector<mpz_class>{0, 2});

    REQUIRE_THROWS_AS(parse_poly("t^2 - t^2"), PolyParseError);
    REQUIRE_THROWS_AS(parse_poly(""), PolyParseError);
    REQUIRE_THROWS_AS(parse_poly("t^2 + + 1"), PolyParseError);
    REQUIRE_THROWS_AS(parse_poly("2.5*t"), PolyParseError);
    REQUIRE_THROWS_AS(parse_poly("x^2+1"), PolyParseError);
    try {
        parse_poly("t^2 @ 1");
        FAIL("expected parse error");
    } catch (const PolyParseError& e) {
        REQUIRE(e.offset() == 4);
    }
}

TEST_CASE("eval", "[poly]") {
    auto f = parse_poly("t^2+1");
    REQUIRE(f.eval(7) == 50);
    REQUIRE(f.eval(0) == 1);
    REQUIRE(parse_poly("t^3+2").eval(100) == 1000002);
}

TEST_CASE("eval agrees with power summation", "[poly]") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 100; ++trial) {
        unsigned deg = 1 + rng() % 6;
        std::vector<mpz_class> cs(deg + 1);
        for (auto& c : cs)
            c = static_cast<long>(static_cast<int64_t>(rng() % 2001) - 1000);
        if (cs.back() == 0) cs.back() = 1;
        IntPoly f(cs);
        int64_t n = static_cast<int64_t>(rng() % 2'000'001) - 1'000'000;
        mpz_class direct = 0, npow = 1;
        for (unsigned i = 0; i <= f.degree(); ++i) {
            direct += f.coeffs()[i] * npow;
            npow *= n;
        }
        REQUIRE(f.eval(n) == direct);
    }
}

TEST_CASE("eval_mod", "[poly]") {
    auto f = parse_poly("t^2+1");
    for (uint64_t m : {2ull, 5ull, 97ull, 65536ull}) {
        for (uint64_t n = 0; n < std::min<uint64_t>(m, 50); ++n) {
            mpz_class v = f.eval(static_cast<unsigned long>(n));
            REQUIRE(f.eval_mod(n, m) == mpz_fdiv_ui(v.get_mpz_t(), m));
        }
    }
}

TEST_CASE("discriminant", "[poly]") {
    // quadratic oracle: b^2 - 4ac
    REQUIRE(parse_poly("t^2+1").discriminant() == -4);
    REQUIRE(parse_poly("t^2+t+1").discriminant() == -3);
    REQUIRE(parse_poly("t^2+2").discriminant() == -8);
    // depressed cubic oracle: -4p^3 - 27q^2
    REQUIRE(parse_poly("t^3+2").discriminant() == -108);
    REQUIRE(parse_poly("t^3 - t + 1").discriminant() == -23);
    // disc(fg) = disc(f) disc(g) Res(f,g)^2: (t^2+1)(t^2+2) has
    // Res(t^2+1, t^2+2) = 1, so disc = (-4)(-8) = 32
    REQUIRE(parse_poly("t^4+3*t^2+2").discriminant() == 32);
    // linear polynomials have discriminant 1
    REQUIRE(parse_poly("t").discriminant() == 1);
    REQUIRE(parse_poly("3*t+5").discriminant() == 1);
    REQUIRE_THROWS_AS(parse_poly("7").discriminant(), std::domain_error);
}

TEST_CASE("discriminant vanishes exactly for squareful polynomials", "[poly]") {
    // (t+1)^2 (t+2) = t^3 + 4t^2 + 5t + 2
    REQUIRE(parse_poly("t^3+4*t^2+5*t+2").discriminant() == 0);
    REQUIRE(parse_poly("t^2").discriminant() == 0);
    REQUIRE(parse_poly("t^2+2*t+1").discriminant() == 0);
    // squarefree comparisons
    REQUIRE(parse_poly("t^2+t").discriminant() != 0);
    REQUIRE(parse_poly("2*t^2+3*t+1").discriminant() == 1);  // (2t+1)(t+1)
}

TEST_CASE("nu reconstructs the discriminant", "[poly]") {
    auto t = PrimeTable::build(1 << 16);
    for (const char* s : {"t^2+1", "t^3+2", "t^4+3*t^2+2", "2*t^2+3*t+1"}) {
        auto f = parse_poly(s);
        auto nm = f.nu_map(t);
        REQUIRE(nm.fully_factored());
        REQUIRE(nm.reconstruct() == abs(f.discriminant()));
        for (auto& [p, e] : nm.factors)
            REQUIRE(f.nu(p.get_ui()) == e);
    }
}

TEST_CASE("max_abs_value", "[poly]") {
    REQUIRE(max_abs_value(parse_poly("t^2+1"), 10) == 101);
    REQUIRE(max_abs_value(parse_poly("-t^2+10*t"), 10) == 25);
    REQUIRE(max_abs_value(parse_poly("t"), 1) == 1);
    // scan oracle on assorted polynomials
    for (const char* s : {"t^3-300*t^2+5", "-2*t^3+17*t^2+t-4", "t^4-50*t^2+3"}) {
        auto f = parse_poly(s);
        mpz_class best = 0;
        for (uint64_t n = 1; n <= 400; ++n) {
            mpz_class v = abs(f.eval(static_cast<unsigned long>(n)));
            if (v > best) best = v;
        }
        REQUIRE(max_abs_value(f, 400) == best);
    }
}

TEST_CASE("identically zero mod p detection", "[poly]") {
    // t^2 + t = t(t+1) vanishes identically mod 2
    REQUIRE(parse_poly("t^2+t").identically_zero_mod(2));
    REQUIRE(!parse_poly("t^2+1").identically_zero_mod(2));
    REQUIRE(parse_poly("3*t^3+3*t").identically_zero_mod(3));  // t^3 = t mod 3
    REQUIRE(parse_poly("5*t^2+5").identically_zero_mod(5));
    REQUIRE(!parse_poly("5*t^2+5").identically_zero_mod(3));
    REQUIRE_THROWS_AS(
        parse_poly("t^2+t").require_not_identically_zero_mod_any_prime(),
        std::domain_error);
    parse_poly("t^2+1").require_not_identically_zero_mod_any_prime();
}

TEST_CASE("PolyProfile validation", "[poly]") {
    auto f = parse_poly("t^4+3*t^2+2");
    PolyProfile prof(f, 2, 2);
    REQUIRE(prof.xi(10) == 10302);  // 10^4 + 300 + 2
    REQUIRE_THROWS_AS(PolyProfile(f, 5, 1), std::domain_error);
    REQUIRE_THROWS_AS(PolyProfile(f, 2, 3), std::domain_error);
    REQUIRE_THROWS_AS(PolyProfile(f, 0, 0), std::domain_error);
}
