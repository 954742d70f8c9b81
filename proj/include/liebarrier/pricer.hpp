#pragma once

#include <cmath>

#include "liebarrier/errors.hpp"
#include "liebarrier/market.hpp"
#include "liebarrier/transform.hpp"

namespace liebarrier {

enum class Region { interior, barrier, outside, terminal };

inline const char* to_string(Region r) {
    switch (r) {
        case Region::interior: return "interior";
        case Region::barrier: return "barrier";
        case Region::outside: return "outside";
        case Region::terminal: return "terminal";
    }
    return "unknown";
}

struct PriceQuery {
    double spot = 0.0;  ///< S > 0
    double time = 0.0;  ///< calendar time p in [0, T]
};

struct PriceResult {
    double value = 0.0;
    Region region = Region::interior;
};

struct Greeks {
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
};

/// Maturity payoff of the call, max(S - K, 0).
inline double payoff(double S, double K) {
    if (!(S > 0.0)) throw DomainError("asset price S must be > 0");
    if (!(K > 0.0)) throw InvalidParameter("strike K must be > 0");
    return std::max(S - K, 0.0);
}

/// Invariant solution of the heat equation that carries the transformed
/// terminal data on x >= 0:
///   u(x, t) = e^{(alpha+1)x + (alpha+1)^2 t} - e^{alpha x + alpha^2 t}.
/// Evaluated as e^{alpha x + alpha^2 t} expm1(x + (2 alpha + 1) t), which
/// cancels exactly on the transformed barrier line x = -(2 alpha + 1) t.
inline double heat_solution(double x, double t, const TransformParams& tp) {
    return std::exp(tp.alpha * x + tp.alpha * tp.alpha * t) * std::expm1(x + (2.0 * tp.alpha + 1.0) * t);
}

/// The one barrier curve compatible with the invariant solution: the
/// discounted strike g(p) = K e^{-r(T-p)}. Nondecreasing in p, g(T) = K.
inline double barrier_level(double p, const MarketParams& m) {
    m.validate();
    if (!(p >= 0.0 && p <= m.maturity)) throw DomainError("calendar time p must lie in [0, T]");
    return m.strike * std::exp(-m.rate * (m.maturity - p));
}

namespace detail {
// Relative tolerance for deciding that a query sits on the barrier curve.
inline constexpr double kBarrierRelTol = 1e-12;
}  // namespace detail

/// Closed-form value of the down-and-out call with the discounted-strike
/// barrier:
///   V(S, p) = S - K e^{-r(T-p)} above the barrier, 0 on and below it,
///   max(S - K, 0) at maturity.
inline PriceResult price(const PriceQuery& q, const MarketParams& m) {
    m.validate();
    if (!(q.spot > 0.0)) throw InvalidParameter("query spot must be > 0");
    if (!(q.time >= 0.0 && q.time <= m.maturity)) throw InvalidParameter("query time must lie in [0, T]");

    if (q.time == m.maturity) {
        return PriceResult{payoff(q.spot, m.strike), Region::terminal};
    }
    const double b = barrier_level(q.time, m);
    const double gap = q.spot - b;
    if (std::abs(gap) <= detail::kBarrierRelTol * std::max(q.spot, b)) {
        return PriceResult{0.0, Region::barrier};
    }
    if (gap < 0.0) {
        return PriceResult{0.0, Region::outside};
    }
    return PriceResult{gap, Region::interior};
}

/// Analytic sensitivities of the interior closed form:
/// delta = 1, gamma = 0, theta = -r K e^{-r(T-p)}.
inline Greeks greeks(const PriceQuery& q, const MarketParams& m) {
    const PriceResult res = price(q, m);
    if (res.region != Region::interior) {
        throw RegionError("greeks are defined on the interior region only");
    }
    return Greeks{1.0, 0.0, -m.rate * barrier_level(q.time, m)};
}

}  // namespace liebarrier
