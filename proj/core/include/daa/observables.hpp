#pragma once

#include "daa/evolution.hpp"
#include "daa/model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace daa {

/// Summed single-particle density n(i, t) over the even-site realisations.
struct DensityProfile {
    Eigen::VectorXd site_density;
    double time = 0.0;

    /// N_e: density on 1-based even sites 2, 4, ..., N
    double even_total() const;
    /// N_o: density on 1-based odd sites 1, 3, ..., N-1
    double odd_total() const;
    /// (N_e - N_o) / (N_e + N_o)
    double imbalance() const;
};

/// Sums |psi(i)|^2 over the columns of `states`.
DensityProfile density_from_states(const Eigen::MatrixXcd& states, double time);

/// Columns are the localized initial states delta_{i,2m}, m = 1..N/2.
Eigen::MatrixXcd even_site_states(std::size_t n_sites);

struct ImbalanceTrace {
    std::vector<double> sample_times;
    std::vector<double> instantaneous;
    double time_average = 0.0;
};

/// Trapezoidal mean of `values` over [times.front(), times.back()].
double trapezoid_average(std::span<const double> times, std::span<const double> values);

/// Runs every even-site realisation, sums the densities and returns the
/// imbalance at n_samples uniform times in [0, t_final] with its time average.
///
/// Undriven parameters are propagated exactly through the eigenbasis of H.
/// Driven runs whose window covers an integer number of periods with an integer
/// number of samples per period reuse the one-period propagator; anything else is
/// integrated directly.
ImbalanceTrace imbalance_trace(const ModelParams& params, double t_final, std::size_t n_samples,
                               const Tolerances& tol = {});

/// Driven imbalance over `periods` full periods from a precomputed period sampling
/// whose offsets are j*T/p, j = 0..p-1.
ImbalanceTrace imbalance_from_period(const ModelParams& params, const PeriodSampling& sampling,
                                     std::size_t periods);

/// Uniform intra-period offsets j*T/p.
std::vector<double> uniform_offsets(double period, std::size_t samples_per_period);

/// Ascending eigenvalues of the undriven Hamiltonian H0 (A and omega ignored).
Eigen::VectorXd aa_spectrum(const ModelParams& params);

/// Averaged IPR of the eigenstates of the undriven Hamiltonian H0.
double eigenstate_ipr(const ModelParams& params);

struct CriticalAmplitude {
    double value = 0.0;
    /// lambda < 2J: the undriven lattice is already delocalized
    bool statically_delocalized = false;
};

/// Smallest drive amplitude for which lambda + A cos(omega t) reaches 2J.
CriticalAmplitude critical_amplitude(double disorder_strength, double hopping);

} // namespace daa
