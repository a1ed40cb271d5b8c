#include "daa/model.hpp"

#include "daa/errors.hpp"

#include <cmath>
#include <string>

namespace daa {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw InvalidParameter(std::string("ModelParams.") + name + " must be finite");
    }
}

} // namespace

double ModelParams::period() const {
    if (!(drive_angular_frequency > 0.0)) {
        throw InvalidParameter("drive period undefined: drive_angular_frequency must be > 0");
    }
    return 2.0 * std::numbers::pi / drive_angular_frequency;
}

double ModelParams::disorder_at(double t) const noexcept {
    return disorder_strength + drive_amplitude * std::cos(drive_angular_frequency * t);
}

double ModelParams::norm_bound() const noexcept {
    return 2.0 * std::abs(hopping) + std::abs(disorder_strength) + std::abs(drive_amplitude);
}

void ModelParams::validate() const {
    if (n_sites < 2) {
        throw InvalidParameter("ModelParams.n_sites must be >= 2, got " + std::to_string(n_sites));
    }
    require_finite(hopping, "hopping");
    require_finite(disorder_strength, "disorder_strength");
    require_finite(incommensuration, "incommensuration");
    require_finite(phase, "phase");
    require_finite(drive_amplitude, "drive_amplitude");
    require_finite(drive_angular_frequency, "drive_angular_frequency");
    if (!(hopping > 0.0)) throw InvalidParameter("ModelParams.hopping must be > 0");
    if (disorder_strength < 0.0) throw InvalidParameter("ModelParams.disorder_strength must be >= 0");
    if (drive_amplitude < 0.0) throw InvalidParameter("ModelParams.drive_amplitude must be >= 0");
    if (drive_angular_frequency < 0.0) {
        throw InvalidParameter("ModelParams.drive_angular_frequency must be >= 0");
    }
}

Eigen::VectorXd onsite_profile(const ModelParams& params) {
    const auto n = static_cast<Eigen::Index>(params.n_sites);
    Eigen::VectorXd profile(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double site = static_cast<double>(k + 1);
        profile(k) = std::cos(2.0 * std::numbers::pi * params.incommensuration * site + params.phase);
    }
    return profile;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, double t) {
    params.validate();
    const auto n = static_cast<Eigen::Index>(params.n_sites);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = (i + 1) % n;
        h(i, j) += params.hopping;
        h(j, i) += params.hopping;
    }
    const double strength = params.disorder_at(t);
    h.diagonal() = strength * onsite_profile(params);
    return HamiltonianMatrix(std::move(h), t);
}

void apply_hamiltonian(const ModelParams& params, const Eigen::VectorXd& profile, double t,
                       const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) {
    const Eigen::Index n = in.rows();
    const double strength = params.disorder_at(t);
    const double j = params.hopping;
    if (n == 2) {
        // forward and wrap bonds coincide
        out.row(0) = strength * profile(0) * in.row(0) + 2.0 * j * in.row(1);
        out.row(1) = strength * profile(1) * in.row(1) + 2.0 * j * in.row(0);
        return;
    }
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
        const double* x = in.col(c).data();
        double* y = out.col(c).data();
        y[0] = strength * profile(0) * x[0] + j * (x[1] + x[n - 1]);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            y[i] = strength * profile(i) * x[i] + j * (x[i - 1] + x[i + 1]);
        }
        y[n - 1] = strength * profile(n - 1) * x[n - 1] + j * (x[n - 2] + x[0]);
    }
}

} // namespace daa
