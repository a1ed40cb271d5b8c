#pragma once

#include "daa/model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace daa {

/// Largest tolerated deviation of a column norm from 1 along a trajectory.
inline constexpr double kNormDriftLimit = 1e-6;
/// Largest tolerated max-entry deviation of U^dagger U from the identity.
inline constexpr double kUnitarityLimit = 1e-8;

/// Error-control settings for the adaptive Dormand-Prince RK4(5) integrator.
struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
};

/// Single-particle state in the Wannier basis at a given time.
struct WaveFunction {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    /// |site> with 1-based site index.
    static WaveFunction localized(std::size_t n_sites, std::size_t site, double time = 0.0);

    double norm() const { return amplitudes.norm(); }
};

/// Time-ordered evolution operator over one drive period.
struct Propagator {
    Eigen::MatrixXcd matrix;
    double period = 0.0;

    /// max |(U^dagger U - I)_ij|
    double unitarity_defect() const;
};

enum class PropagatorMethod {
    /// adaptive RK4(5) integration of all basis columns
    column_integration,
    /// product of midpoint exponentials exp(-i H(t_mid) dt) over uniform steps
    stepwise_exponential,
};

struct PropagatorOptions {
    Tolerances tolerances{};
    /// Number of uniform steps for stepwise_exponential; 0 picks
    /// max(200, ceil(120 * T * norm_bound)).
    std::size_t steps = 0;
};

/// Integrates i d/dt psi = H(t) psi from state.time and returns the state at each
/// sample time. Samples must be ascending inside (state.time, t_final]; t_final is
/// appended when it is not already the last sample. Throws NumericalError on
/// step-size underflow or norm drift beyond kNormDriftLimit.
std::vector<WaveFunction> evolve(const WaveFunction& state, const ModelParams& params, double t_final,
                                 std::span<const double> sample_times = {}, const Tolerances& tol = {});

/// Evolves every column of `initial` from t0 and returns the block at each sample
/// time (ascending, all > t0). Column norms are checked against kNormDriftLimit.
std::vector<Eigen::MatrixXcd> evolve_block(const ModelParams& params, const Eigen::MatrixXcd& initial, double t0,
                                           std::span<const double> sample_times, const Tolerances& tol = {});

/// U(t1, t0) by integrating the identity. Requires t1 > t0.
Eigen::MatrixXcd propagator_between(const ModelParams& params, double t0, double t1, const Tolerances& tol = {});

/// U(T, 0). Requires omega > 0. Throws NumericalError when the result is not
/// unitary to kUnitarityLimit.
Propagator one_period_propagator(const ModelParams& params,
                                 PropagatorMethod method = PropagatorMethod::column_integration,
                                 const PropagatorOptions& options = {});

/// Intra-period propagators U(offset, 0) together with U(T, 0), from one integration.
struct PeriodSampling {
    std::vector<double> offsets;
    std::vector<Eigen::MatrixXcd> partial;
    Propagator full;
};

/// Offsets must be ascending in [0, T); an offset of 0 yields the identity.
PeriodSampling sample_period(const ModelParams& params, std::span<const double> offsets, const Tolerances& tol = {});

/// Default step count used by the stepwise exponential construction.
std::size_t default_exponential_steps(const ModelParams& params);

} // namespace daa
