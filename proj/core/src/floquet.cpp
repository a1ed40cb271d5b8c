#include "daa/floquet.hpp"

#include "daa/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace daa {

double FloquetDecomposition::angular_frequency() const {
    return 2.0 * std::numbers::pi / period;
}

Eigen::VectorXcd FloquetDecomposition::overlaps(const Eigen::VectorXcd& psi) const {
    return modes.adjoint() * psi;
}

Eigen::VectorXcd FloquetDecomposition::evolve_periods(const Eigen::VectorXcd& psi, long periods) const {
    const double elapsed = static_cast<double>(periods) * period;
    Eigen::VectorXcd c = overlaps(psi);
    for (Eigen::Index n = 0; n < c.size(); ++n) {
        c(n) *= std::polar(1.0, -quasienergies(n) * elapsed);
    }
    return modes * c;
}

double fold_quasienergy(double energy, double angular_frequency) {
    if (!(angular_frequency > 0.0) || !std::isfinite(angular_frequency)) {
        throw InvalidParameter("angular frequency must be positive and finite");
    }
    return energy - angular_frequency * std::ceil(energy / angular_frequency - 0.5);
}

FloquetDecomposition floquet_decompose(const Propagator& propagator) {
    const Eigen::MatrixXcd& u = propagator.matrix;
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw InvalidParameter("propagator must be a non-empty square matrix");
    }
    if (!(propagator.period > 0.0)) {
        throw InvalidParameter("propagator period must be > 0");
    }
    const double defect = propagator.unitarity_defect();
    if (defect > kUnitarityLimit) {
        throw NumericalError("propagator not unitary (defect " + diagnostic(defect) + ")");
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, true);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("complex Schur decomposition did not converge");
    }
    // For a normal matrix the triangular factor is diagonal up to rounding, so the
    // Schur vectors are an orthonormal eigenbasis even inside degenerate clusters.
    const Eigen::MatrixXcd& q = schur.matrixU();
    const Eigen::VectorXcd mu = schur.matrixT().diagonal();
    const Eigen::Index n = u.rows();
    const double omega = 2.0 * std::numbers::pi / propagator.period;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::VectorXd raw(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        raw(k) = fold_quasienergy(-std::arg(mu(k)) / propagator.period, omega);
    }
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return raw(a) < raw(b); });

    FloquetDecomposition out;
    out.period = propagator.period;
    out.quasienergies.resize(n);
    out.modes.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.quasienergies(k) = raw(src);
        out.modes.col(k) = q.col(src);
    }

    const Eigen::MatrixXcd image = u * out.modes;
    for (Eigen::Index k = 0; k < n; ++k) {
        const std::complex<double> phase = std::polar(1.0, -out.quasienergies(k) * out.period);
        const double residual = (image.col(k) - phase * out.modes.col(k)).cwiseAbs().maxCoeff();
        if (residual > kEigenResidualLimit) {
            throw NumericalError("Floquet mode " + std::to_string(k) + " residual " + std::to_string(residual) +
                                 " exceeds limit");
        }
    }
    return out;
}

Eigen::VectorXd mode_iprs(const Eigen::MatrixXcd& modes) {
    return modes.cwiseAbs2().cwiseAbs2().colwise().sum().transpose();
}

double averaged_ipr(const Eigen::MatrixXcd& modes) {
    if (modes.cols() == 0) {
        throw InvalidParameter("mode set is empty");
    }
    return mode_iprs(modes).sum() / static_cast<double>(modes.cols());
}

} // namespace daa
