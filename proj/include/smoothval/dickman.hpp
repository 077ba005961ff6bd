#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace smoothval {

namespace detail {

// Adaptive Simpson on a smooth integrand, absolute tolerance eps.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double eps) {
    if (a >= b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40);
}

}  // namespace detail

// Dickman's rho: the solution of u rho'(u) = -rho(u-1) with rho = 1 on
// [0, 1]. Each unit interval [k, k+1] is represented by a Chebyshev
// interpolant built from the cancellation-free integral recurrence
//     u rho(u) = integral_{u-1}^{u} rho(t) dt,
// whose right side is split into the known previous-interval part (adaptive
// Simpson) and the current-interval part (solved by Picard iteration on the
// Chebyshev coefficients, a contraction with factor < 1/(k+1)). All values
// stay positive, so relative accuracy survives down to rho(50) ~ 1e-85.
class DickmanTable {
  public:
    static constexpr int kN = 32;  // Chebyshev-Lobatto degree per interval

    explicit DickmanTable(double max_u, double tol = 1e-10)
        : max_u_(max_u), tol_(tol) {
        if (max_u < 1 || max_u > 50)
            throw std::domain_error("DickmanTable: max_u must be in [1, 50]");
        int top = static_cast<int>(std::ceil(max_u));
        for (int k = 2; k < top; ++k) build_interval(k);
    }

    double max_u() const { return max_u_; }
    double tolerance() const { return tol_; }

    double rho(double u) const {
        if (u < 0) throw std::domain_error("dickman_rho: u must be >= 0");
        if (u > max_u_ + 1e-12) throw std::domain_error("dickman_rho: u beyond table");
        if (u <= 1) return 1.0;
        if (u <= 2) return 1.0 - std::log(u);
        int k = static_cast<int>(std::floor(u));
        if (u == static_cast<double>(k)) --k;  // right endpoint of interval k-1
        if (k - 2 >= static_cast<int>(cheb_.size()))
            throw std::logic_error("DickmanTable: interval not built");
        return eval_interval(k, u);
    }

    // Dense (u, rho(u)) samples, mostly for reports.
    std::vector<std::pair<double, double>> sample_grid(double step) const {
        std::vector<std::pair<double, double>> out;
        for (double u = 0; u <= max_u_ + 1e-12; u += step) out.emplace_back(u, rho(u));
        return out;
    }

  private:
    using Coeffs = std::array<double, kN + 1>;

    double eval_interval(int k, double u) const {
        if (k == 1) return 1.0 - std::log(u);
        const Coeffs& c = cheb_[k - 2];
        double xi = 2.0 * (u - k) - 1.0;
        // Clenshaw
        double b1 = 0, b2 = 0;
        for (int j = kN; j >= 1; --j) {
            double b0 = 2 * xi * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return xi * b1 - b2 + c[0];
    }

    static Coeffs to_cheb(const std::array<double, kN + 1>& v) {
        // DCT-I on Lobatto nodes xi_i = cos(pi i / N)
        Coeffs c{};
        for (int j = 0; j <= kN; ++j) {
            double s = 0.5 * (v[0] + (j % 2 ? -1 : 1) * v[kN]);
            for (int i = 1; i < kN; ++i) s += v[i] * std::cos(M_PI * j * i / kN);
            c[j] = 2.0 * s / kN;
        }
        c[0] *= 0.5;
        c[kN] *= 0.5;
        return c;
    }

    // Antiderivative coefficients of a Chebyshev series (in xi).
    static Coeffs antiderivative(const Coeffs& a) {
        Coeffs b{};
        std::array<double, kN + 2> aa{};
        for (int j = 0; j <= kN; ++j) aa[j] = a[j];
        b[1] = aa[0] - 0.5 * aa[2];
        for (int j = 2; j <= kN; ++j) b[j] = (aa[j - 1] - aa[j + 1]) / (2.0 * j);
        return b;  // b[0] free; fixed by the lower limit
    }

    static double eval_cheb(const Coeffs& c, double xi) {
        double b1 = 0, b2 = 0;
        for (int j = kN; j >= 1; --j) {
            double b0 = 2 * xi * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return xi * b1 - b2 + c[0];
    }

    void build_interval(int k) {
        // nodes u_i in [k, k+1]
        std::array<double, kN + 1> u{}, nodes_xi{}, prev_part{}, v{};
        for (int i = 0; i <= kN; ++i) {
            nodes_xi[i] = std::cos(M_PI * i / kN);
            u[i] = k + 0.5 * (nodes_xi[i] + 1.0);
        }
        double rho_k = k == 2 ? 1.0 - std::log(2.0) : eval_interval(k - 1, k);
        double eps = 1e-16 * rho_k + 1e-300;

        auto prev = [&](double t) { return eval_interval(k - 1, t); };
        for (int i = 0; i <= kN; ++i)
            prev_part[i] = detail::adaptive_simpson(prev, u[i] - 1.0,
                                                    static_cast<double>(k), eps);
        for (int i = 0; i <= kN; ++i) v[i] = rho_k;  // initial guess

        for (int it = 0; it < 200; ++it) {
            Coeffs c = to_cheb(v);
            Coeffs B = antiderivative(c);
            double b_at_left = eval_cheb(B, -1.0);
            double delta = 0;
            for (int i = 0; i <= kN; ++i) {
                // du = dxi / 2
                double cur_part = 0.5 * (eval_cheb(B, nodes_xi[i]) - b_at_left);
                double nv = (prev_part[i] + cur_part) / u[i];
                delta = std::max(delta, std::abs(nv - v[i]));
                v[i] = nv;
            }
            if (delta <= 1e-16 * rho_k) break;
        }
        cheb_.push_back(to_cheb(v));
    }

    double max_u_;
    double tol_;
    std::vector<Coeffs> cheb_;  // interval [k, k+1] at index k-2
};

// rho(u) for 0 <= u <= 50 from a shared table built on first use.
inline double dickman_rho(double u, double tol = 1e-10) {
    if (u < 0) throw std::domain_error("dickman_rho: u must be >= 0");
    if (u > 50) throw std::domain_error("dickman_rho: u must be <= 50");
    (void)tol;  // the shared table is built well below any requested tol
    static const DickmanTable table(50.0, 1e-12);
    return table.rho(u);
}

}  // namespace smoothval
