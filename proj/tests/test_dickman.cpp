#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "smoothval/dickman.hpp"

using namespace smoothval;

namespace {

// Independent oracle: progressive composite-Simpson solver for
// u rho(u) = int_{u-1}^u rho on a dyadic uniform grid. The grid step is
// 2^-12, so integer knots land on grid points and the panel error stays
// well under 1e-12 on [0, 3.5].
std::vector<double> grid_rho(double u_max) {
    const int per_unit = 1 << 12;
    const double h = 1.0 / per_unit;
    int n = static_cast<int>(u_max * per_unit) + 1;
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) {
        double u = j * h;
        if (u <= 1.0) {
            r[j] = 1.0;
            continue;
        }
        // composite Simpson over [u-1, u] = per_unit steps, solving for the
        // implicit right endpoint
        int j0 = j - per_unit;
        double s = r[j0];  // left endpoint weight 1
        for (int i = 1; i < per_unit; ++i) s += (i % 2 ? 4.0 : 2.0) * r[j0 + i];
        // right endpoint r[j] has weight 1: u r = (h/3)(s + r)  =>
        double c = h / 3.0;
        r[j] = c * s / (u - c);
    }
    return r;
}

}  // namespace

TEST_CASE("dickman closed forms", "[dickman]") {
    REQUIRE(dickman_rho(0) == 1.0);
    REQUIRE(dickman_rho(0.5) == 1.0);
    REQUIRE(dickman_rho(1) == 1.0);
    REQUIRE(std::abs(dickman_rho(2) - (1 - std::log(2.0))) <= 1e-8);
    REQUIRE(dickman_rho(1.5) == Catch::Approx(1 - std::log(1.5)).epsilon(1e-14));
    REQUIRE_THROWS_AS(dickman_rho(-0.1), std::domain_error);
    REQUIRE_THROWS_AS(dickman_rho(50.5), std::domain_error);
}

TEST_CASE("dickman against quadrature oracle", "[dickman]") {
    auto grid = grid_rho(3.5);
    const int per_unit = 1 << 12;
    // rho(3) within 1e-6 of the tol=1e-12 oracle (actual agreement is much
    // tighter; the loose bound is the stated contract)
    double rho3 = grid[3 * per_unit];
    REQUIRE(std::abs(dickman_rho(3) - rho3) <= 1e-6);
    REQUIRE(dickman_rho(3) == Catch::Approx(0.0486084).margin(1e-6));
    // dense agreement on [1, 3.5]
    double worst = 0;
    for (int j = per_unit; j < static_cast<int>(grid.size()); j += 37)
        worst = std::max(worst,
                         std::abs(dickman_rho(j / double(per_unit)) - grid[j]));
    REQUIRE(worst <= 1e-9);
}

TEST_CASE("dickman strictly decreasing on [1, 10]", "[dickman]") {
    double prev = dickman_rho(1.0);
    for (double u = 1.01; u <= 10.0 + 1e-12; u += 0.01) {
        double v = dickman_rho(u);
        REQUIRE(v < prev);
        REQUIRE(v > 0);
        prev = v;
    }
}

TEST_CASE("dickman known values", "[dickman]") {
    // classical table values
    REQUIRE(dickman_rho(3) == Catch::Approx(4.8608388e-2).epsilon(1e-6));
    REQUIRE(dickman_rho(4) == Catch::Approx(4.9109256e-3).epsilon(1e-6));
    REQUIRE(dickman_rho(5) == Catch::Approx(3.5472470e-4).epsilon(1e-6));
    REQUIRE(dickman_rho(10) == Catch::Approx(2.7701718e-11).epsilon(1e-6));
    // deep values stay positive and finite (stability check)
    REQUIRE(dickman_rho(20) > 0);
    REQUIRE(dickman_rho(49.5) > 0);
    REQUIRE(std::isfinite(dickman_rho(49.5)));
}

TEST_CASE("DickmanTable construction and sampling", "[dickman]") {
    DickmanTable t(6.0, 1e-10);
    REQUIRE(t.max_u() == 6.0);
    REQUIRE(t.tolerance() == 1e-10);
    auto samples = t.sample_grid(0.5);
    REQUIRE(samples.size() == 13);
    REQUIRE(samples[0].second == 1.0);
    REQUIRE_THROWS_AS(t.rho(6.5), std::domain_error);
    REQUIRE_THROWS_AS(DickmanTable(60.0), std::domain_error);
}
