#pragma once

#include <stdexcept>
#include <string>

namespace liebarrier {

/// Market or configuration input violates a precondition (sigma <= 0, K <= 0, ...).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the coordinate domain (S <= 0, p outside [0,T], ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Finite-difference step would push a stencil outside the valid domain.
struct StepSizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Collocation sampling cannot resolve the constraint system.
struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symmetry generator unsuitable for the requested reduction (c6 = 0, ...).
struct DegenerateGenerator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Evaluation point is not on the barrier curve.
struct PointOffBarrier : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Least-squares fit left a residual too large for the requested basis.
struct FitFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solver produced NaN/Inf or an otherwise unusable state.
struct NumericalInstability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monte Carlo start value is not strictly above the barrier.
struct BelowBarrierStart : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operation requested outside its admissible pricing region.
struct RegionError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace liebarrier
