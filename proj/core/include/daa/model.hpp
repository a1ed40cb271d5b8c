#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <numbers>

namespace daa {

/// Ratio of the two lattice wavelengths used by the reference experiment.
inline constexpr double kDefaultIncommensuration = 532.0 / 738.2;
/// Golden-mean alternative, (sqrt(5) - 1) / 2.
inline constexpr double kGoldenMean = 0.6180339887498948482;

/// Location of the static metal-insulator transition in units of the hopping.
inline constexpr double kStaticCriticalRatio = 2.0;

/// Physical parameters of H(t) = H0 + V(t). Energies in units of J, hbar = 1.
struct ModelParams {
    std::size_t n_sites = 50;
    double hopping = 1.0;
    double disorder_strength = 0.0;
    double incommensuration = kDefaultIncommensuration;
    double phase = 0.0;
    double drive_amplitude = 0.0;
    double drive_angular_frequency = 0.0;

    bool driven() const noexcept { return drive_amplitude != 0.0 && drive_angular_frequency > 0.0; }

    /// Drive period 2*pi/omega. Throws InvalidParameter when omega == 0.
    double period() const;

    /// Effective disorder lambda + A cos(omega t) multiplying the quasiperiodic profile.
    double disorder_at(double t) const noexcept;

    /// Upper bound on the spectral norm of H(t) over a full period.
    double norm_bound() const noexcept;

    /// Throws InvalidParameter unless every field satisfies its invariant.
    void validate() const;
};

/// Quasiperiodic profile cos(2*pi*beta*i + phi) for sites i = 1..N.
Eigen::VectorXd onsite_profile(const ModelParams& params);

/// Dense Hamiltonian evaluated at one instant. H(t) is real symmetric for this
/// model, so entries are stored as reals; `complex()` lifts them when needed.
class HamiltonianMatrix {
public:
    HamiltonianMatrix(Eigen::MatrixXd entries, double time) : entries_(std::move(entries)), time_(time) {}

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    double time() const noexcept { return time_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    Eigen::MatrixXcd complex() const { return entries_.cast<std::complex<double>>(); }

private:
    Eigen::MatrixXd entries_;
    double time_;
};

/// Ring tight-binding Hamiltonian with periodic boundary conditions.
/// Bonds are summed literally, so for N = 2 the forward and wrap bonds add to 2J.
HamiltonianMatrix build_hamiltonian(const ModelParams& params, double t);

/// Applies H(t) to the columns of `in` without materialising the matrix.
/// `profile` must be onsite_profile(params).
void apply_hamiltonian(const ModelParams& params, const Eigen::VectorXd& profile, double t,
                       const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out);

} // namespace daa
