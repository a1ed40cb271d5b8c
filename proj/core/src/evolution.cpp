#include "daa/evolution.hpp"

#include "daa/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace daa {

namespace odeint = boost::numeric::odeint;

namespace {

using RealState = std::vector<double>;

// Packs a complex N x k block as [Re | Im], each column-major.
RealState pack(const Eigen::MatrixXcd& block) {
    const Eigen::Index size = block.size();
    RealState x(static_cast<std::size_t>(2 * size));
    Eigen::Map<Eigen::MatrixXd>(x.data(), block.rows(), block.cols()) = block.real();
    Eigen::Map<Eigen::MatrixXd>(x.data() + size, block.rows(), block.cols()) = block.imag();
    return x;
}

Eigen::MatrixXcd unpack(const RealState& x, Eigen::Index rows, Eigen::Index cols) {
    const Eigen::Index size = rows * cols;
    Eigen::Map<const Eigen::MatrixXd> re(x.data(), rows, cols);
    Eigen::Map<const Eigen::MatrixXd> im(x.data() + size, rows, cols);
    Eigen::MatrixXcd out(rows, cols);
    out.real() = re;
    out.imag() = im;
    return out;
}

// d/dt (a + ib) = -i H (a + ib)  =>  da/dt = H b,  db/dt = -H a.
struct Schrodinger {
    const ModelParams& params;
    const Eigen::VectorXd& profile;
    Eigen::Index rows;
    Eigen::Index cols;
    double* last_time;

    void operator()(const RealState& x, RealState& dxdt, double t) const {
        *last_time = t;
        const Eigen::Index size = rows * cols;
        Eigen::Map<const Eigen::MatrixXd> re(x.data(), rows, cols);
        Eigen::Map<const Eigen::MatrixXd> im(x.data() + size, rows, cols);
        Eigen::Map<Eigen::MatrixXd> dre(dxdt.data(), rows, cols);
        Eigen::Map<Eigen::MatrixXd> dim(dxdt.data() + size, rows, cols);
        apply_hamiltonian(params, profile, t, im, dre);
        apply_hamiltonian(params, profile, t, re, dim);
        dim = -dim;
    }
};

void check_column_norms(const Eigen::MatrixXcd& block, const Eigen::VectorXd& initial_norms, double t) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        const double drift = std::abs(block.col(c).norm() - initial_norms(c));
        if (drift > kNormDriftLimit) {
            throw NumericalError("norm drift " + diagnostic(drift) + " in column " + std::to_string(c) +
                                     " exceeds limit at t=" + diagnostic(t) +
                                     " (integrator tolerances too loose?)",
                                 t);
        }
    }
}

void check_tolerances(const Tolerances& tol) {
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0)) {
        throw InvalidParameter("integrator tolerances must be positive");
    }
}

} // namespace

WaveFunction WaveFunction::localized(std::size_t n_sites, std::size_t site, double time) {
    if (site < 1 || site > n_sites) {
        throw InvalidParameter("site index " + std::to_string(site) + " outside 1.." + std::to_string(n_sites));
    }
    WaveFunction psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_sites)), time};
    psi.amplitudes(static_cast<Eigen::Index>(site - 1)) = 1.0;
    return psi;
}

double Propagator::unitarity_defect() const {
    const Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
    return (gram - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
}

std::vector<Eigen::MatrixXcd> evolve_block(const ModelParams& params, const Eigen::MatrixXcd& initial, double t0,
                                           std::span<const double> sample_times, const Tolerances& tol) {
    params.validate();
    check_tolerances(tol);
    if (initial.rows() != static_cast<Eigen::Index>(params.n_sites)) {
        throw InvalidParameter("initial block has " + std::to_string(initial.rows()) + " rows, lattice has " +
                               std::to_string(params.n_sites) + " sites");
    }
    double previous = t0;
    for (double s : sample_times) {
        if (!std::isfinite(s) || !(s > previous)) {
            throw InvalidParameter("sample times must be finite, ascending and later than the start time");
        }
        previous = s;
    }

    const Eigen::VectorXd profile = onsite_profile(params);
    const Eigen::VectorXd initial_norms = initial.colwise().norm().transpose();
    double last_time = t0;
    Schrodinger system{params, profile, initial.rows(), initial.cols(), &last_time};

    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_dopri5<RealState>());
    RealState x = pack(initial);
    double t = t0;
    double dt = 0.1 / params.norm_bound();

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(sample_times.size());
    for (double target : sample_times) {
        while (t < target) {
            const double remaining = target - t;
            const bool clipped = dt >= remaining;
            double step = clipped ? remaining : dt;
            const double before = t;
            const auto result = stepper.try_step(system, x, t, step);
            if (result == odeint::success) {
                if (clipped) {
                    t = target;
                } else {
                    dt = step;
                }
            } else {
                dt = step;
                if (dt < 1e-13 * std::max(1.0, std::abs(before))) {
                    throw NumericalError("step-size underflow at t=" + diagnostic(before), before);
                }
            }
        }
        Eigen::MatrixXcd block = unpack(x, initial.rows(), initial.cols());
        if (!block.allFinite()) {
            throw NumericalError("non-finite amplitudes at t=" + diagnostic(target), target);
        }
        check_column_norms(block, initial_norms, target);
        out.push_back(std::move(block));
    }
    return out;
}

std::vector<WaveFunction> evolve(const WaveFunction& state, const ModelParams& params, double t_final,
                                 std::span<const double> sample_times, const Tolerances& tol) {
    if (!(t_final > state.time)) {
        throw InvalidParameter("t_final must be later than the state's time");
    }
    if (std::abs(state.norm() - 1.0) > kNormDriftLimit) {
        throw InvalidParameter("initial state is not normalized");
    }
    std::vector<double> times(sample_times.begin(), sample_times.end());
    if (!times.empty() && times.back() > t_final) {
        throw InvalidParameter("sample time beyond t_final");
    }
    if (times.empty() || times.back() < t_final) {
        times.push_back(t_final);
    }
    const auto blocks = evolve_block(params, state.amplitudes, state.time, times, tol);
    std::vector<WaveFunction> out;
    out.reserve(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        out.push_back(WaveFunction{blocks[k].col(0), times[k]});
    }
    return out;
}

Eigen::MatrixXcd propagator_between(const ModelParams& params, double t0, double t1, const Tolerances& tol) {
    const auto n = static_cast<Eigen::Index>(params.n_sites);
    const double times[] = {t1};
    return evolve_block(params, Eigen::MatrixXcd::Identity(n, n), t0, times, tol).front();
}

std::size_t default_exponential_steps(const ModelParams& params) {
    const double estimate = std::ceil(120.0 * params.period() * params.norm_bound());
    return std::max<std::size_t>(200, static_cast<std::size_t>(estimate));
}

namespace {

Eigen::MatrixXcd stepwise_exponential(const ModelParams& params, std::size_t steps) {
    const double period = params.period();
    const double dt = period / static_cast<double>(steps);
    const auto n = static_cast<Eigen::Index>(params.n_sites);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(n);
    Eigen::MatrixXcd scaled(n, n);
    Eigen::MatrixXcd step(n, n);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        solver.compute(build_hamiltonian(params, t_mid).entries());
        if (solver.info() != Eigen::Success) {
            throw NumericalError("eigensolver failed in stepwise exponential", t_mid);
        }
        const Eigen::MatrixXd& v = solver.eigenvectors();
        const Eigen::VectorXcd phases =
            (std::complex<double>(0.0, -dt) * solver.eigenvalues().cast<std::complex<double>>()).array().exp();
        scaled = v.cast<std::complex<double>>() * phases.asDiagonal();
        step.noalias() = scaled * v.transpose().cast<std::complex<double>>();
        u = step * u;
    }
    return u;
}

} // namespace

Propagator one_period_propagator(const ModelParams& params, PropagatorMethod method,
                                 const PropagatorOptions& options) {
    params.validate();
    Propagator result;
    result.period = params.period();
    switch (method) {
    case PropagatorMethod::column_integration:
        result.matrix = propagator_between(params, 0.0, result.period, options.tolerances);
        break;
    case PropagatorMethod::stepwise_exponential:
        result.matrix =
            stepwise_exponential(params, options.steps > 0 ? options.steps : default_exponential_steps(params));
        break;
    }
    const double defect = result.unitarity_defect();
    if (defect > kUnitarityLimit) {
        throw NumericalError("one-period propagator not unitary: defect " + diagnostic(defect),
                             result.period);
    }
    return result;
}

PeriodSampling sample_period(const ModelParams& params, std::span<const double> offsets, const Tolerances& tol) {
    params.validate();
    const double period = params.period();
    const auto n = static_cast<Eigen::Index>(params.n_sites);

    std::vector<double> times;
    double previous = -1.0;
    for (double offset : offsets) {
        if (!(offset > previous) || offset < 0.0 || !(offset < period)) {
            throw InvalidParameter("period offsets must be ascending in [0, T)");
        }
        previous = offset;
        if (offset > 0.0) times.push_back(offset);
    }
    times.push_back(period);

    auto blocks = evolve_block(params, Eigen::MatrixXcd::Identity(n, n), 0.0, times, tol);

    PeriodSampling out;
    out.offsets.assign(offsets.begin(), offsets.end());
    std::size_t next = 0;
    for (double offset : offsets) {
        if (offset == 0.0) {
            out.partial.push_back(Eigen::MatrixXcd::Identity(n, n));
        } else {
            out.partial.push_back(std::move(blocks[next++]));
        }
    }
    out.full.period = period;
    out.full.matrix = std::move(blocks.back());
    const double defect = out.full.unitarity_defect();
    if (defect > kUnitarityLimit) {
        throw NumericalError("one-period propagator not unitary: defect " + diagnostic(defect), period);
    }
    return out;
}

} // namespace daa
