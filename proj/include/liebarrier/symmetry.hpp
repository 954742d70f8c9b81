#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "liebarrier/errors.hpp"
#include "liebarrier/market.hpp"
#include "liebarrier/transform.hpp"

namespace liebarrier {

/// Two-exponential family of inhomogeneous generator terms,
///   psi(x, t) = k1 e^{alpha x + alpha^2 t} + k2 e^{(alpha+1)x + (alpha+1)^2 t}.
/// Each term solves the heat equation identically, so psi_t = psi_xx for
/// every (k1, k2). The family parameter alpha comes from the coordinate
/// transform.
struct PsiSpec {
    double k1 = 0.0;
    double k2 = 0.0;
    double alpha = 0.0;

    double value(double x, double t) const {
        const double a = alpha;
        return k1 * std::exp(a * x + a * a * t) + k2 * std::exp((a + 1.0) * x + (a + 1.0) * (a + 1.0) * t);
    }
    double d_dx(double x, double t) const {
        const double a = alpha;
        return k1 * a * std::exp(a * x + a * a * t) +
               k2 * (a + 1.0) * std::exp((a + 1.0) * x + (a + 1.0) * (a + 1.0) * t);
    }
};

/// Heat-equation point symmetry as a linear combination of the six
/// polynomial generators plus an optional psi-term:
///   xi  = 4 c1 x t + c2 x + 2 c3 t + c4
///   tau = 4 c1 t^2 + 2 c2 t + c6
///   phi = c1 u (-2t - x^2) - c3 u x - c5 u + psi(x, t)
struct SymmetryVector {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
    std::optional<PsiSpec> psi;
};

/// Generator coefficients (xi, tau, phi) at a point of (x, t, u)-space.
struct VectorFieldEval {
    double xi = 0.0;
    double tau = 0.0;
    double phi = 0.0;
};

inline VectorFieldEval eval_generator(const SymmetryVector& sv, double x, double t, double u) {
    VectorFieldEval e;
    e.xi = 4.0 * sv.c1 * x * t + sv.c2 * x + 2.0 * sv.c3 * t + sv.c4;
    e.tau = 4.0 * sv.c1 * t * t + 2.0 * sv.c2 * t + sv.c6;
    e.phi = sv.c1 * u * (-2.0 * t - x * x) - sv.c3 * u * x - sv.c5 * u;
    if (sv.psi) e.phi += sv.psi->value(x, t);
    return e;
}

/// Residual of the invariant surface condition
///   xi u_x + tau u_t - phi
/// at (x, t), with u_x and u_t by central differences of step h.
template <class F>
double isc_residual(const SymmetryVector& sv, F&& uFn, double x, double t, double h = 1e-4) {
    if (!(h > 0.0)) throw StepSizeError("stencil step must be > 0");
    const double u0 = uFn(x, t);
    const VectorFieldEval e = eval_generator(sv, x, t, u0);
    const double u_x = (uFn(x + h, t) - uFn(x - h, t)) / (2.0 * h);
    const double u_t = (uFn(x, t + h) - uFn(x, t - h)) / (2.0 * h);
    return e.xi * u_x + e.tau * u_t - e.phi;
}

/// Lower barrier in market coordinates: level curve g(p) with boundary
/// value G(p) (identically zero for the knock-out call), g(T) = K.
struct BarrierSpec {
    std::function<double(double)> level;  ///< g(p)
    std::function<double(double)> value;  ///< G(p)

    /// The discounted-strike barrier g(p) = K e^{-r(T-p)}, G = 0.
    static BarrierSpec discounted_strike(const MarketParams& m) {
        m.validate();
        BarrierSpec b;
        b.level = [m](double p) { return m.strike * std::exp(-m.rate * (m.maturity - p)); };
        b.value = [](double) { return 0.0; };
        return b;
    }

    /// Barrier abscissa in heat coordinates, x_b(t) = ln(g(p(t)) / K).
    double heat_x(double t, const MarketParams& m) const {
        const double p = m.maturity - 2.0 * t / (m.sigma * m.sigma);
        return std::log(level(p) / m.strike);
    }
};

/// Residual of the differentiated boundary form of the invariant surface
/// condition on the barrier curve,
///   xi_x u_x + xi_u u_x^2 + xi u_xx + tau_x u_t + tau_u u_x u_t + tau u_xt
///     - phi_x - phi_u u_x.
/// Coefficient partials are closed-form derivatives of the polynomial and
/// exponential generator coefficients; only the u-derivatives use stencils.
template <class F>
double boundary_isc_residual(const SymmetryVector& sv, F&& uFn, const BarrierSpec& barrier,
                             const MarketParams& m, double x, double t, double h = 1e-4) {
    if (!(h > 0.0)) throw StepSizeError("stencil step must be > 0");
    const double xb = barrier.heat_x(t, m);
    if (std::abs(x - xb) > 1e-8 * std::max(1.0, std::abs(xb))) {
        throw PointOffBarrier("evaluation point is not on the barrier curve x = x_b(t)");
    }

    const double u0 = uFn(x, t);
    const VectorFieldEval e = eval_generator(sv, x, t, u0);

    // xi and tau do not depend on u; tau does not depend on x.
    const double xi_x = 4.0 * sv.c1 * t + sv.c2;
    const double xi_u = 0.0;
    const double tau_x = 0.0;
    const double tau_u = 0.0;
    double phi_x = -2.0 * sv.c1 * u0 * x - sv.c3 * u0;
    if (sv.psi) phi_x += sv.psi->d_dx(x, t);
    const double phi_u = sv.c1 * (-2.0 * t - x * x) - sv.c3 * x - sv.c5;

    const double u_x = (uFn(x + h, t) - uFn(x - h, t)) / (2.0 * h);
    const double u_t = (uFn(x, t + h) - uFn(x, t - h)) / (2.0 * h);
    const double u_xx = (uFn(x + h, t) - 2.0 * u0 + uFn(x - h, t)) / (h * h);
    const double u_xt =
        (uFn(x + h, t + h) - uFn(x + h, t - h) - uFn(x - h, t + h) + uFn(x - h, t - h)) / (4.0 * h * h);

    return xi_x * u_x + xi_u * u_x * u_x + e.xi * u_xx + tau_x * u_t + tau_u * u_x * u_t +
           e.tau * u_xt - phi_x - phi_u * u_x;
}

/// The symmetry singled out by the transformed terminal data (psi = 0,
/// c4 = -(2 alpha + 1) c6, c5 = (alpha^2 + alpha) c6), normalized to c6 = 1.
inline SymmetryVector admissible_symmetry(const TransformParams& tp) {
    SymmetryVector sv;
    sv.c4 = -(2.0 * tp.alpha + 1.0);
    sv.c5 = tp.alpha * tp.alpha + tp.alpha;
    sv.c6 = 1.0;
    return sv;
}

}  // namespace liebarrier
