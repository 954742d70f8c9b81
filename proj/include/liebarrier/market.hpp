#pragma once

#include <cmath>
#include <string>

#include "liebarrier/errors.hpp"

namespace liebarrier {

/// Constant-coefficient market description: risk-free rate r, volatility
/// sigma, strike K and maturity T. All downstream coordinate maps and
/// pricers are parameterized by this one struct.
struct MarketParams {
    double rate = 0.0;      ///< r, per unit time, >= 0
    double sigma = 0.0;     ///< volatility, > 0
    double strike = 0.0;    ///< K, > 0
    double maturity = 0.0;  ///< T, > 0

    void validate() const {
        if (!(sigma > 0.0)) throw InvalidParameter("sigma must be > 0");
        if (!(strike > 0.0)) throw InvalidParameter("strike K must be > 0");
        if (!(maturity > 0.0)) throw InvalidParameter("maturity T must be > 0");
        if (!(rate >= 0.0)) throw InvalidParameter("rate r must be >= 0");
    }
};

/// Exponents of the substitutions that turn the backward pricing PDE into
/// the heat equation:
///   alpha = (2r/sigma^2 - 1) / 2,   beta = ((2r/sigma^2 + 1)^2) / 4.
/// They satisfy beta = (alpha + 1)^2 and (sigma^2/2) beta = (sigma^2/2) alpha^2 + r.
struct TransformParams {
    double alpha = 0.0;
    double beta = 0.0;
};

inline TransformParams derive_params(const MarketParams& m) {
    m.validate();
    const double q = 2.0 * m.rate / (m.sigma * m.sigma);
    return TransformParams{0.5 * (q - 1.0), 0.25 * (q + 1.0) * (q + 1.0)};
}

/// Point on the value surface in market coordinates. S > 0, 0 <= p <= T.
struct BSPoint {
    double S = 0.0;  ///< asset price
    double p = 0.0;  ///< calendar time
    double V = 0.0;  ///< option value
};

/// Point on the transformed surface: x = ln(S/K), t = (sigma^2/2)(T - p),
/// u = e^{alpha x + beta t} V / K. t runs forward from maturity (p = T maps
/// to t = 0).
struct HeatPoint {
    double x = 0.0;
    double t = 0.0;
    double u = 0.0;
};

}  // namespace liebarrier
