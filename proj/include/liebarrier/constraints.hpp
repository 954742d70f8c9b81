#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "liebarrier/errors.hpp"
#include "liebarrier/market.hpp"
#include "liebarrier/symmetry.hpp"

namespace liebarrier {

/// Null-space basis of the terminal-surface constraint system over the
/// coefficient vector (c1..c6) or (c1..c6, k1, k2). Each basis entry is a
/// full 8-vector; the k-slots stay zero when psi was not included.
struct ConstraintSolution {
    bool with_psi = false;
    std::vector<std::array<double, 8>> basis;
    std::vector<double> singular_values;  ///< of the column-scaled collocation matrix

    int dimension() const { return static_cast<int>(basis.size()); }
};

/// 50 Chebyshev-spaced collocation abscissae on [0.1, 5], enough to
/// separate the six exponential-polynomial basis functions.
inline std::vector<double> default_collocation_points() {
    constexpr int n = 50;
    constexpr double lo = 0.1, hi = 5.0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<double> pts(n);
    for (int j = 0; j < n; ++j) {
        pts[j] = mid + half * std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    }
    return pts;
}

namespace detail {

// Terminal data f(x) = e^{(a+1)x} - e^{a x} and its first two derivatives.
struct TerminalData {
    double f, fp, fpp;
};

inline TerminalData terminal_data(double x, double a) {
    const double e_lo = std::exp(a * x);
    const double e_hi = std::exp((a + 1.0) * x);
    return TerminalData{e_hi - e_lo, (a + 1.0) * e_hi - a * e_lo,
                        (a + 1.0) * (a + 1.0) * e_hi - a * a * e_lo};
}

}  // namespace detail

/// Residual of the terminal-surface invariant condition at x > 0 for a
/// coefficient vector (c1..c6, k1, k2), with u_t eliminated through the
/// heat equation (u_t = u_xx of the terminal function):
///   (-c1 x^2 - c3 x - c5) f + k1 e^{a x} + k2 e^{(a+1)x}
///     - (c2 x + c4) f' - c6 f''.
inline double terminal_constraint_residual(const TransformParams& tp,
                                           const std::array<double, 8>& c, double x) {
    const auto [f, fp, fpp] = detail::terminal_data(x, tp.alpha);
    const double a = tp.alpha;
    return (-c[0] * x * x - c[2] * x - c[4]) * f + c[6] * std::exp(a * x) +
           c[7] * std::exp((a + 1.0) * x) - (c[1] * x + c[3]) * fp - c[5] * fpp;
}

/// Solves the terminal-condition constraints by collocating the residual
/// at sampled x > 0 and extracting the null space of the resulting linear
/// system (SVD, relative singular-value threshold 1e-10).
///
/// Without psi the null space is the single ray
///   c4 = -(2a+1) c6, c5 = (a^2+a) c6, c1 = c2 = c3 = 0,
/// returned normalized to c6 = 1. With psi it is three-dimensional, with
///   k1 = -a c4 - c5 - a^2 c6,  k2 = (a+1) c4 + c5 + (a+1)^2 c6.
inline ConstraintSolution solve_terminal_constraints(const TransformParams& tp, bool with_psi,
                                                     std::span<const double> points = {}) {
    std::vector<double> own;
    if (points.empty()) {
        own = default_collocation_points();
        points = own;
    }
    const int cols = with_psi ? 8 : 6;
    const int rows = static_cast<int>(points.size());
    if (rows < cols) {
        throw RankDeficiencyError("collocation needs at least as many points as unknowns");
    }
    for (int i = 0; i < rows; ++i) {
        if (!(points[i] > 0.0) || !std::isfinite(points[i])) {
            throw RankDeficiencyError("collocation points must be finite and > 0");
        }
        for (int j = 0; j < i; ++j) {
            if (std::abs(points[i] - points[j]) < 1e-12) {
                throw RankDeficiencyError("duplicated collocation points");
            }
        }
    }

    const double a = tp.alpha;
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const double x = points[i];
        const auto [f, fp, fpp] = detail::terminal_data(x, a);
        M(i, 0) = -x * x * f;
        M(i, 1) = -x * fp;
        M(i, 2) = -x * f;
        M(i, 3) = -fp;
        M(i, 4) = -f;
        M(i, 5) = -fpp;
        if (with_psi) {
            M(i, 6) = std::exp(a * x);
            M(i, 7) = std::exp((a + 1.0) * x);
        }
    }

    // Column scaling keeps the SVD threshold meaningful despite the large
    // dynamic range of the exponential basis on [0.1, 5].
    Eigen::VectorXd scale(cols);
    for (int j = 0; j < cols; ++j) {
        const double s = M.col(j).cwiseAbs().maxCoeff();
        scale(j) = s > 0.0 ? s : 1.0;
        M.col(j) /= scale(j);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);

    ConstraintSolution sol;
    sol.with_psi = with_psi;
    sol.singular_values.assign(sv.data(), sv.data() + sv.size());
    for (int j = 0; j < cols; ++j) {
        if (sv(j) > cutoff) continue;
        Eigen::VectorXd v = svd.matrixV().col(j).cwiseQuotient(scale);
        v /= v.norm();
        std::array<double, 8> entry{};
        for (int k = 0; k < cols; ++k) entry[static_cast<size_t>(k)] = v(k);
        sol.basis.push_back(entry);
    }

    if (!with_psi) {
        if (sol.basis.size() != 1 || std::abs(sol.basis[0][5]) < 1e-8) {
            throw RankDeficiencyError("collocation sampling failed to isolate the c6 ray");
        }
        auto& b = sol.basis[0];
        const double c6 = b[5];
        for (double& v : b) v /= c6;
    }
    return sol;
}

/// The three-generator subalgebra singled out by the terminal condition,
/// spanning the (c4, c5, c6) directions of the constraint null space with
/// psi coefficients k1 = -a c4 - c5 - a^2 c6, k2 = (a+1) c4 + c5 + (a+1)^2 c6:
///   X_a: c4 = 1,  psi = (-a, a+1)
///   X_b: c5 = -1, psi = (1, -1)
///   X_c: c6 = 1,  psi = (-a^2, (a+1)^2)
inline std::array<SymmetryVector, 3> subalgebra_generators(const TransformParams& tp) {
    const double a = tp.alpha;
    SymmetryVector xa, xb, xc;
    xa.c4 = 1.0;
    xa.psi = PsiSpec{-a, a + 1.0, a};
    xb.c5 = -1.0;
    xb.psi = PsiSpec{1.0, -1.0, a};
    xc.c6 = 1.0;
    xc.psi = PsiSpec{-a * a, (a + 1.0) * (a + 1.0), a};
    return {xa, xb, xc};
}

}  // namespace liebarrier
