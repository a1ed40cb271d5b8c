#include "daa/observables.hpp"

#include "daa/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace daa {

namespace {

void require_even(std::size_t n_sites) {
    if (n_sites % 2 != 0) {
        throw InvalidParameter("imbalance needs an even number of sites, got " + std::to_string(n_sites));
    }
}

void check_total(const DensityProfile& density, double expected) {
    const double drift = std::abs(density.site_density.sum() - expected);
    if (drift > kNormDriftLimit * expected) {
        throw NumericalError("total density drifted by " + diagnostic(drift), density.time);
    }
}

Eigen::MatrixXd undriven_hamiltonian(const ModelParams& params) {
    // For omega == 0 the drive is a constant shift A cos(0) = A of the disorder.
    return build_hamiltonian(params, 0.0).entries();
}

ImbalanceTrace spectral_trace(const ModelParams& params, std::span<const double> times) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(undriven_hamiltonian(params));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed for the undriven Hamiltonian");
    }
    const Eigen::MatrixXd& v = solver.eigenvectors();
    const Eigen::VectorXd& energies = solver.eigenvalues();
    const auto n = static_cast<Eigen::Index>(params.n_sites);
    const Eigen::Index half = n / 2;

    // Coefficients of the even-site states in the eigenbasis: rows of V at sites 2, 4, ...
    Eigen::MatrixXd coeffs(n, half);
    for (Eigen::Index m = 0; m < half; ++m) {
        coeffs.col(m) = v.row(2 * m + 1).transpose();
    }

    ImbalanceTrace trace;
    trace.sample_times.assign(times.begin(), times.end());
    trace.instantaneous.reserve(times.size());
    Eigen::MatrixXd re(n, half);
    Eigen::MatrixXd im(n, half);
    Eigen::MatrixXcd states(n, half);
    for (double t : times) {
        const Eigen::ArrayXd c = (energies.array() * t).cos();
        const Eigen::ArrayXd s = (energies.array() * t).sin();
        re.noalias() = v * (c.matrix().asDiagonal() * coeffs);
        im.noalias() = -v * (s.matrix().asDiagonal() * coeffs);
        states.real() = re;
        states.imag() = im;
        const DensityProfile density = density_from_states(states, t);
        check_total(density, static_cast<double>(half));
        trace.instantaneous.push_back(density.imbalance());
    }
    trace.time_average = trapezoid_average(trace.sample_times, trace.instantaneous);
    return trace;
}

ImbalanceTrace integrated_trace(const ModelParams& params, std::span<const double> times, const Tolerances& tol) {
    const Eigen::MatrixXcd initial = even_site_states(params.n_sites);
    const double half = static_cast<double>(params.n_sites / 2);
    ImbalanceTrace trace;
    trace.sample_times.assign(times.begin(), times.end());
    trace.instantaneous.push_back(density_from_states(initial, 0.0).imbalance());
    const auto blocks = evolve_block(params, initial, 0.0, times.subspan(1), tol);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const DensityProfile density = density_from_states(blocks[k], times[k + 1]);
        check_total(density, half);
        trace.instantaneous.push_back(density.imbalance());
    }
    trace.time_average = trapezoid_average(trace.sample_times, trace.instantaneous);
    return trace;
}

} // namespace

double DensityProfile::even_total() const {
    double total = 0.0;
    for (Eigen::Index i = 1; i < site_density.size(); i += 2) total += site_density(i);
    return total;
}

double DensityProfile::odd_total() const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < site_density.size(); i += 2) total += site_density(i);
    return total;
}

double DensityProfile::imbalance() const {
    const double even = even_total();
    const double odd = odd_total();
    return (even - odd) / (even + odd);
}

DensityProfile density_from_states(const Eigen::MatrixXcd& states, double time) {
    return DensityProfile{states.cwiseAbs2().rowwise().sum(), time};
}

Eigen::MatrixXcd even_site_states(std::size_t n_sites) {
    require_even(n_sites);
    const auto n = static_cast<Eigen::Index>(n_sites);
    Eigen::MatrixXcd states = Eigen::MatrixXcd::Zero(n, n / 2);
    for (Eigen::Index m = 0; m < n / 2; ++m) {
        states(2 * m + 1, m) = 1.0;
    }
    return states;
}

double trapezoid_average(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size() || times.size() < 2) {
        throw InvalidParameter("trapezoid average needs at least two matching samples");
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        integral += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    }
    return integral / (times.back() - times.front());
}

std::vector<double> uniform_offsets(double period, std::size_t samples_per_period) {
    if (samples_per_period == 0) {
        throw InvalidParameter("samples_per_period must be positive");
    }
    std::vector<double> offsets(samples_per_period);
    for (std::size_t j = 0; j < samples_per_period; ++j) {
        offsets[j] = period * static_cast<double>(j) / static_cast<double>(samples_per_period);
    }
    return offsets;
}

ImbalanceTrace imbalance_from_period(const ModelParams& params, const PeriodSampling& sampling,
                                     std::size_t periods) {
    require_even(params.n_sites);
    if (periods == 0) {
        throw InvalidParameter("need at least one period");
    }
    const std::size_t per_period = sampling.partial.size();
    const double period = sampling.full.period;
    const double half = static_cast<double>(params.n_sites / 2);
    const double spacing = period / static_cast<double>(per_period);

    ImbalanceTrace trace;
    trace.sample_times.reserve(periods * per_period + 1);
    trace.instantaneous.reserve(periods * per_period + 1);

    Eigen::MatrixXcd states = even_site_states(params.n_sites);
    Eigen::MatrixXcd sampled(states.rows(), states.cols());
    Eigen::MatrixXcd next(states.rows(), states.cols());
    for (std::size_t k = 0; k < periods; ++k) {
        for (std::size_t j = 0; j < per_period; ++j) {
            const double t = spacing * static_cast<double>(k * per_period + j);
            sampled.noalias() = sampling.partial[j] * states;
            const DensityProfile density = density_from_states(sampled, t);
            check_total(density, half);
            trace.sample_times.push_back(t);
            trace.instantaneous.push_back(density.imbalance());
        }
        next.noalias() = sampling.full.matrix * states;
        states.swap(next);
    }
    const double t_end = spacing * static_cast<double>(periods * per_period);
    const DensityProfile density = density_from_states(states, t_end);
    check_total(density, half);
    trace.sample_times.push_back(t_end);
    trace.instantaneous.push_back(density.imbalance());
    trace.time_average = trapezoid_average(trace.sample_times, trace.instantaneous);
    return trace;
}

ImbalanceTrace imbalance_trace(const ModelParams& params, double t_final, std::size_t n_samples,
                               const Tolerances& tol) {
    params.validate();
    require_even(params.n_sites);
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw InvalidParameter("t_final must be positive and finite");
    }
    if (n_samples < 2) {
        throw InvalidParameter("n_samples must be >= 2");
    }
    const std::size_t intervals = n_samples - 1;
    std::vector<double> times(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
        times[s] = t_final * static_cast<double>(s) / static_cast<double>(intervals);
    }

    if (!params.driven()) {
        return spectral_trace(params, times);
    }

    const double period = params.period();
    const double ratio = t_final / period;
    const double periods = std::round(ratio);
    if (periods >= 1.0 && std::abs(ratio - periods) <= 1e-9 * ratio) {
        const auto whole = static_cast<std::size_t>(periods);
        if (intervals % whole == 0) {
            const auto offsets = uniform_offsets(period, intervals / whole);
            return imbalance_from_period(params, sample_period(params, offsets, tol), whole);
        }
    }
    return integrated_trace(params, times, tol);
}

Eigen::VectorXd aa_spectrum(const ModelParams& params) {
    ModelParams undriven = params;
    undriven.drive_amplitude = 0.0;
    undriven.drive_angular_frequency = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_hamiltonian(undriven, 0.0).entries(),
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed for H0");
    }
    return solver.eigenvalues();
}

double eigenstate_ipr(const ModelParams& params) {
    ModelParams undriven = params;
    undriven.drive_amplitude = 0.0;
    undriven.drive_angular_frequency = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_hamiltonian(undriven, 0.0).entries());
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed for H0");
    }
    const Eigen::MatrixXd& v = solver.eigenvectors();
    return v.cwiseAbs2().cwiseAbs2().sum() / static_cast<double>(v.cols());
}

CriticalAmplitude critical_amplitude(double disorder_strength, double hopping) {
    if (!std::isfinite(disorder_strength) || !std::isfinite(hopping) || !(hopping > 0.0)) {
        throw InvalidParameter("critical_amplitude needs finite lambda and J > 0");
    }
    const double critical = kStaticCriticalRatio * hopping;
    if (disorder_strength < critical) {
        return {0.0, true};
    }
    return {disorder_strength - critical, false};
}

} // namespace daa
