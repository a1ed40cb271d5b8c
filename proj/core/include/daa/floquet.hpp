#pragma once

#include "daa/evolution.hpp"

#include <Eigen/Core>

namespace daa {

/// Floquet modes at t = 0 and their quasienergies, sorted by ascending quasienergy.
struct FloquetDecomposition {
    /// folded into (-omega/2, omega/2]
    Eigen::VectorXd quasienergies;
    /// column n holds the Wannier components b_i^(n) of mode n
    Eigen::MatrixXcd modes;
    double period = 0.0;

    double angular_frequency() const;

    /// c_n = <u_n(0)|psi(0)>
    Eigen::VectorXcd overlaps(const Eigen::VectorXcd& psi) const;

    /// sum_n c_n exp(-i eps_n k T) u_n, i.e. U^k psi for integer k.
    Eigen::VectorXcd evolve_periods(const Eigen::VectorXcd& psi, long periods) const;
};

/// Residual tolerance for U u_n = exp(-i eps_n T) u_n.
inline constexpr double kEigenResidualLimit = 1e-7;
/// Eigenvalues closer than this are treated as one degenerate cluster.
inline constexpr double kClusterGap = 1e-10;

/// Diagonalises a unitary one-period propagator through its complex Schur form.
/// Throws NumericalError when the input is not unitary to kUnitarityLimit or the
/// eigen-relation residual exceeds kEigenResidualLimit.
FloquetDecomposition floquet_decompose(const Propagator& propagator);

/// Maps an energy into the principal zone (-omega/2, omega/2]. Requires omega > 0.
double fold_quasienergy(double energy, double angular_frequency);

/// sum_i |b_i|^4 for each column.
Eigen::VectorXd mode_iprs(const Eigen::MatrixXcd& modes);

/// (1/N) sum_{i,n} |b_i^(n)|^4 for an orthonormal mode set.
double averaged_ipr(const Eigen::MatrixXcd& modes);

inline double averaged_ipr(const FloquetDecomposition& decomposition) {
    return averaged_ipr(decomposition.modes);
}

} // namespace daa
