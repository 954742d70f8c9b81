#pragma once

#include <cmath>
#include <utility>

#include "liebarrier/errors.hpp"
#include "liebarrier/market.hpp"

namespace liebarrier {

/// Intermediate values of the three exponential substitutions
/// V -> w = e^{alpha x} V -> y = e^{beta t} w -> u = y / K.
/// Debug accessor only; the production path fuses the three factors into a
/// single e^{alpha x + beta t} / K to avoid cumulative rounding.
struct TransformStages {
    double V = 0.0;
    double w = 0.0;
    double y = 0.0;
    double u = 0.0;
};

namespace detail {

inline void check_bs_point(double S, double p, const MarketParams& m) {
    if (!(S > 0.0)) throw DomainError("asset price S must be > 0");
    if (!(p >= 0.0 && p <= m.maturity)) throw DomainError("calendar time p must lie in [0, T]");
}

inline double heat_time_max(const MarketParams& m) {
    return 0.5 * m.sigma * m.sigma * m.maturity;
}

}  // namespace detail

/// Market coordinates (S, p, V) -> heat coordinates (x, t, u).
inline HeatPoint to_heat(const BSPoint& pt, const MarketParams& m) {
    m.validate();
    detail::check_bs_point(pt.S, pt.p, m);
    const TransformParams tp = derive_params(m);
    const double x = std::log(pt.S / m.strike);
    const double t = 0.5 * m.sigma * m.sigma * (m.maturity - pt.p);
    const double u = std::exp(tp.alpha * x + tp.beta * t) * pt.V / m.strike;
    return HeatPoint{x, t, u};
}

/// Exact inverse of to_heat.
inline BSPoint from_heat(const HeatPoint& pt, const MarketParams& m) {
    m.validate();
    const double t_max = detail::heat_time_max(m);
    if (!(pt.t >= 0.0 && pt.t <= t_max)) throw DomainError("heat time t must lie in [0, sigma^2 T / 2]");
    const TransformParams tp = derive_params(m);
    const double S = m.strike * std::exp(pt.x);
    const double p = m.maturity - 2.0 * pt.t / (m.sigma * m.sigma);
    const double V = m.strike * pt.u * std::exp(-(tp.alpha * pt.x + tp.beta * pt.t));
    return BSPoint{S, p, V};
}

/// Per-stage view of the substitution chain at one point.
inline TransformStages transform_stages(const BSPoint& pt, const MarketParams& m) {
    m.validate();
    detail::check_bs_point(pt.S, pt.p, m);
    const TransformParams tp = derive_params(m);
    const double x = std::log(pt.S / m.strike);
    const double t = 0.5 * m.sigma * m.sigma * (m.maturity - pt.p);
    TransformStages s;
    s.V = pt.V;
    s.w = std::exp(tp.alpha * x) * pt.V;
    s.y = std::exp(tp.beta * t) * s.w;
    s.u = s.y / m.strike;
    return s;
}

/// Transformed terminal payoff: u(x, 0) = e^{(alpha+1)x} - e^{alpha x} for
/// x >= 0, zero for x < 0. Written as e^{alpha x} expm1(x) for accuracy
/// near x = 0.
inline double terminal_condition_heat(double x, const TransformParams& tp) {
    if (x < 0.0) return 0.0;
    return std::exp(tp.alpha * x) * std::expm1(x);
}

/// Optional step-size overrides for the residual stencils. Zero means
/// "choose 1e-4 relative to the coordinate scale".
struct FdSteps {
    double first = 0.0;   ///< step in the first coordinate (S or x)
    double second = 0.0;  ///< step in the second coordinate (p or t)
};

/// Central-difference residual of the backward pricing PDE
///   V_p + (sigma^2/2) S^2 V_SS + r S V_S - r V
/// at (S, p). valueFn is any (S, p) -> V callable, smooth near the point.
template <class F>
double bs_residual(F&& valueFn, double S, double p, const MarketParams& m, FdSteps h = {}) {
    m.validate();
    detail::check_bs_point(S, p, m);
    const double hS = h.first > 0.0 ? h.first : 1e-4 * S;
    const double hp = h.second > 0.0 ? h.second : 1e-4 * m.maturity;
    if (!(hS > 0.0) || !(hp > 0.0)) throw StepSizeError("stencil steps must be > 0");
    if (S - hS <= 0.0) throw StepSizeError("S stencil leaves S > 0");
    if (p - hp < 0.0 || p + hp > m.maturity) throw StepSizeError("p stencil leaves [0, T]");

    const double v0 = valueFn(S, p);
    const double vSp = valueFn(S + hS, p);
    const double vSm = valueFn(S - hS, p);
    const double vpp = valueFn(S, p + hp);
    const double vpm = valueFn(S, p - hp);

    const double V_p = (vpp - vpm) / (2.0 * hp);
    const double V_S = (vSp - vSm) / (2.0 * hS);
    const double V_SS = (vSp - 2.0 * v0 + vSm) / (hS * hS);
    return V_p + 0.5 * m.sigma * m.sigma * S * S * V_SS + m.rate * S * V_S - m.rate * v0;
}

/// Central-difference residual of u_t - u_xx at (x, t).
template <class F>
double heat_residual(F&& uFn, double x, double t, FdSteps h = {}) {
    const double hx = h.first > 0.0 ? h.first : 1e-4;
    const double ht = h.second > 0.0 ? h.second : 1e-4;
    if (!(hx > 0.0) || !(ht > 0.0)) throw StepSizeError("stencil steps must be > 0");
    const double u0 = uFn(x, t);
    const double u_t = (uFn(x, t + ht) - uFn(x, t - ht)) / (2.0 * ht);
    const double u_xx = (uFn(x + hx, t) - 2.0 * u0 + uFn(x - hx, t)) / (hx * hx);
    return u_t - u_xx;
}

}  // namespace liebarrier
