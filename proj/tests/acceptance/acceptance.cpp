// Acceptance suite: one PASS/FAIL line per criterion, preceded by the measured
// values it was judged on. Exit status is the number of failed criteria.

#include "daa/errors.hpp"
#include "daa/evolution.hpp"
#include "daa/floquet.hpp"
#include "daa/observables.hpp"
#include "daa/sweeps.hpp"
#include "../oracles.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace daa;

constexpr std::size_t kSites = 50;
constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string summary;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

void note(const std::string& line) {
    std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
}

// Linear interpolation of the first upward crossing of `level`; nullopt when none.
std::optional<double> upward_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (y[k - 1] < level && y[k] >= level) {
            return x[k - 1] + (level - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
        }
    }
    return std::nullopt;
}

std::optional<double> downward_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (y[k - 1] > level && y[k] <= level) {
            return x[k - 1] + (y[k - 1] - level) * (x[k] - x[k - 1]) / (y[k - 1] - y[k]);
        }
    }
    return std::nullopt;
}

std::vector<double> arange(double start, double stop, double step) {
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) v.push_back(start + step * static_cast<double>(k));
    return v;
}

ScanSettings settings(std::size_t threads, bool reference = false) {
    ScanSettings s;
    s.threads = threads;
    s.undriven_reference = reference;
    return s;
}

void require_no_failures(const ScanResult& r) {
    for (const auto& c : r.cells) {
        if (c.failed) throw NumericalError("scan cell failed: " + c.failure);
    }
}

// 1. Static transition at N=50, tau=1000, 20 phases.
Verdict static_transition(std::size_t threads) {
    ScanGrid g;
    g.axis1 = {axis::disorder, arange(0.0, 4.0, 0.1)};
    g.fixed.n_sites = kSites;
    g.phases = uniform_phases(20);
    const ScanResult r = static_disorder_scan(g, settings(threads));
    require_no_failures(r);

    std::vector<double> lambda, imb;
    for (const auto& c : r.cells) {
        lambda.push_back(c.params.disorder_strength);
        imb.push_back(c.mean_imbalance);
        note(fmt("lambda=%.1f  I=%.4f  (std %.4f)", lambda.back(), imb.back(), c.std_imbalance));
    }
    double worst_low = -1.0, worst_high = 2.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        if (lambda[k] <= 1.6 + 1e-9) worst_low = std::max(worst_low, imb[k]);
        if (lambda[k] >= 2.4 - 1e-9) worst_high = std::min(worst_high, imb[k]);
    }
    // The rise is measured between the two plateau edges named by the criterion.
    const auto at = [&](double l) {
        return imb[static_cast<std::size_t>(std::lround(l / 0.1))];
    };
    const double level = 0.5 * (at(1.6) + at(2.4));
    const auto half_rise = upward_crossing(lambda, imb, level);
    const auto half_of_top = upward_crossing(lambda, imb, 0.5 * imb.back());
    note(fmt("half-rise level (I(1.6)+I(2.4))/2 = %.4f; half of I(4) = %.4f crosses at lambda=%.3f", level,
             0.5 * imb.back(), half_of_top.value_or(NAN)));

    const bool ok = worst_low <= 0.05 && worst_high >= 0.1 && half_rise && std::abs(*half_rise - 2.0) <= 0.2;
    return {ok, fmt("max I(lambda<=1.6)=%.4f [<=0.05], min I(lambda>=2.4)=%.4f [>=0.1], half-rise at lambda=%.3f "
                    "[2.0+/-0.2]",
                    worst_low, worst_high, half_rise.value_or(NAN))};
}

ScanResult strong_drive(const std::vector<double>& omegas, std::size_t threads) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {3.0}};
    g.axis2 = Axis{axis::frequency, omegas};
    g.fixed.n_sites = kSites;
    g.phases = uniform_phases(20);
    ScanResult r = frequency_disorder_scan(g, settings(threads, true));
    require_no_failures(r);
    return r;
}

// 2. Frequency response at lambda = A = 3.
Verdict frequency_response(std::size_t threads) {
    std::vector<double> omegas = {0.1, 0.2};
    const auto window = arange(4.0, 8.0, 0.25);
    omegas.insert(omegas.end(), window.begin(), window.end());
    omegas.push_back(18.0);
    omegas.push_back(24.0);
    const ScanResult r = strong_drive(omegas, threads);

    bool slow_ok = true, fast_ok = true;
    double slow_max = 0.0, fast_dev = 0.0;
    std::vector<double> w, norm;
    for (std::size_t c = 0; c < omegas.size(); ++c) {
        const CellResult& cell = r.at(0, c);
        const double omega = omegas[c];
        note(fmt("omega=%.2f  I=%.4f  I(A=0)=%.4f  I/I(A=0)=%.3f", omega, cell.mean_imbalance,
                 cell.reference_imbalance, cell.normalized_imbalance()));
        if (omega <= 0.2) {
            slow_max = std::max(slow_max, cell.mean_imbalance);
            slow_ok = slow_ok && cell.mean_imbalance <= 0.05;
        } else if (omega >= 18.0) {
            const double dev = std::abs(cell.normalized_imbalance() - 1.0);
            fast_dev = std::max(fast_dev, dev);
            fast_ok = fast_ok && dev <= 0.15;
        } else {
            w.push_back(omega);
            norm.push_back(cell.normalized_imbalance());
        }
    }
    const auto onset = upward_crossing(w, norm, 0.5);
    const bool onset_ok = onset && std::abs(*onset - 6.0) <= 1.0;
    return {slow_ok && fast_ok && onset_ok,
            fmt("max I(omega<=0.2)=%.4f [<=0.05], max |I/I(A=0)-1| at omega>=18 = %.3f [<=0.15], half-rise at "
                "omega=%.3f [6+/-1]",
                slow_max, fast_dev, onset.value_or(NAN))};
}

// 3. Sign agreement of the two diagnostics on a 5x5 subsample of the default frequency grid.
Verdict diagnostic_concordance(std::size_t threads) {
    ScanGrid g;
    g.axis1 = {axis::disorder, {2.0, 2.75, 3.5, 4.25, 5.0}};
    std::vector<double> ratios;
    for (int k = 0; k < 5; ++k) ratios.push_back(0.25 * std::pow(64.0, k / 4.0));
    g.axis2 = Axis{axis::disorder_over_frequency, ratios};
    g.fixed.n_sites = kSites;
    g.phases = uniform_phases(20);
    const ScanResult r = frequency_disorder_scan(g, settings(threads));
    require_no_failures(r);

    const double ipr_threshold = 3.0 / static_cast<double>(kSites);
    std::size_t agree = 0;
    for (const auto& c : r.cells) {
        const bool ipr_localized = c.mean_ipr - ipr_threshold > 0.0;
        const bool imb_localized = c.mean_imbalance - 0.05 > 0.0;
        agree += ipr_localized == imb_localized;
        note(fmt("lambda=%.2f  lambda/omega=%.3f  I=%.4f  IPR*N=%.2f  %s", c.params.disorder_strength,
                 c.params.disorder_strength / c.params.drive_angular_frequency, c.mean_imbalance,
                 c.mean_ipr * kSites, ipr_localized == imb_localized ? "agree" : "DISAGREE"));
    }
    const double fraction = static_cast<double>(agree) / static_cast<double>(r.cells.size());
    return {fraction >= 0.8, fmt("%zu/%zu cells agree (%.0f%%) [>=80%%]", agree, r.cells.size(), 100.0 * fraction)};
}

// 4. Critical amplitude at nu = 0.005.
Verdict critical_amplitude_line(std::size_t threads) {
    bool ok = true;
    std::string detail;
    for (double lambda : {3.0, 4.0, 5.0}) {
        const double ac = critical_amplitude(lambda, 1.0).value;
        ScanGrid g;
        g.axis1 = {axis::disorder, {lambda}};
        g.axis2 = Axis{axis::amplitude, arange(0.0, ac + 1.5, 0.25)};
        g.fixed.n_sites = kSites;
        g.fixed.drive_angular_frequency = 2.0 * kPi * 0.005;
        g.phases = uniform_phases(20);
        const ScanResult r = amplitude_disorder_scan(g, settings(threads));
        require_no_failures(r);

        std::vector<double> amps, imb;
        double worst_localized = 2.0, worst_delocalized = -1.0;
        for (std::size_t c = 0; c < g.cols(); ++c) {
            const CellResult& cell = r.at(0, c);
            const double a = g.axis2->values[c];
            amps.push_back(a);
            imb.push_back(cell.mean_imbalance);
            note(fmt("lambda=%.0f  A=%.2f  A-A_c=%+.2f  I=%.4f  (std %.4f)  IPR*N=%.2f", lambda, a, a - ac,
                     cell.mean_imbalance, cell.std_imbalance, cell.mean_ipr * kSites));
            if (a <= ac - 0.5 + 1e-9) worst_localized = std::min(worst_localized, cell.mean_imbalance);
            if (a >= ac + 0.5 - 1e-9) worst_delocalized = std::max(worst_delocalized, cell.mean_imbalance);
        }
        const double top = *std::max_element(imb.begin(), imb.end());
        const auto half = downward_crossing(amps, imb, 0.5 * top);
        const bool line_ok = worst_localized > 0.1 && worst_delocalized <= 0.05 && half &&
                             std::abs(*half - ac) <= 0.3;
        ok = ok && line_ok;
        detail += fmt("lambda=%.0f: min I(A<=A_c-0.5)=%.3f, max I(A>=A_c+0.5)=%.3f, half-max at A=%.2f (A_c=%.0f); ",
                      lambda, worst_localized, worst_delocalized, half.value_or(NAN), ac);
    }
    detail += "[>0.1, <=0.05, +/-0.3]";
    return {ok, detail};
}

// 5. IPR finite-size scaling of the undriven lattice.
Verdict ipr_scaling(std::size_t threads) {
    ScanSettings s = settings(threads);
    const auto phases = uniform_phases(20);
    ModelParams delocalized;
    delocalized.disorder_strength = 1.0;
    const std::vector<std::size_t> small = {50, 100};
    const auto d = ipr_size_scaling(small, delocalized, phases, s);
    ModelParams localized;
    localized.disorder_strength = 5.0;
    const std::vector<std::size_t> large = {50, 500};
    const auto l = ipr_size_scaling(large, localized, phases, s);
    for (const auto& row : d) note(fmt("lambda=1  N=%zu  IPR=%.5f  IPR*N=%.3f", row.n_sites, row.mean_ipr, row.mean_ipr * row.n_sites));
    for (const auto& row : l) note(fmt("lambda=5  N=%zu  IPR=%.5f", row.n_sites, row.mean_ipr));
    const double rd = d[1].mean_ipr / d[0].mean_ipr;
    const double rl = l[1].mean_ipr / l[0].mean_ipr;
    return {std::abs(rd - 0.5) <= 0.15 && rl >= 0.7 && rl <= 1.3,
            fmt("IPR(100)/IPR(50) at lambda=1: %.3f [0.5+/-0.15], IPR(500)/IPR(50) at lambda=5: %.3f [0.7,1.3]", rd,
                rl)};
}

// 6. Bandwidth of H0 close to 2 lambda, for every default phase.
Verdict bandwidth() {
    double worst = 0.0;
    for (double lambda : {3.0, 4.0, 5.0}) {
        double lo = 1e300, hi = 0.0;
        for (double phi : uniform_phases(20)) {
            ModelParams p;
            p.disorder_strength = lambda;
            p.phase = phi;
            const Eigen::VectorXd e = aa_spectrum(p);
            const double width = e.maxCoeff() - e.minCoeff();
            lo = std::min(lo, width);
            hi = std::max(hi, width);
            worst = std::max(worst, std::abs(width / (2.0 * lambda) - 1.0));
        }
        note(fmt("lambda=%.0f  width in [%.3f, %.3f] over 20 phases, 2*lambda=%.0f", lambda, lo, hi, 2.0 * lambda));
    }
    return {worst <= 0.2, fmt("max |width/(2 lambda) - 1| = %.3f [<=0.2]", worst)};
}

// 7. Fast numerical property suite.
Verdict properties() {
    std::vector<std::string> broken;
    auto check = [&](bool ok, const std::string& what) {
        note(std::string(ok ? "ok   " : "FAIL ") + what);
        if (!ok) broken.push_back(what);
    };
    auto driven = [](double lambda, double a, double omega, double phi = 0.3) {
        ModelParams p;
        p.disorder_strength = lambda;
        p.drive_amplitude = a;
        p.drive_angular_frequency = omega;
        p.phase = phi;
        return p;
    };

    double defect = 0.0;
    for (const ModelParams& p : {driven(3.0, 3.0, 2.0 * kPi * 0.005), driven(3.0, 3.0, 1.0), driven(2.0, 2.0, 6.0),
                                 driven(5.0, 5.0, 20.0)}) {
        defect = std::max(defect, one_period_propagator(p).unitarity_defect());
    }
    check(defect <= kUnitarityLimit, fmt("unitarity defect %.2e <= 1e-8", defect));

    {
        const ModelParams p = driven(3.0, 3.0, 2.0);
        std::vector<double> times;
        for (int k = 1; k <= 100; ++k) times.push_back(k * p.period());
        double drift = 0.0;
        for (const auto& s : evolve(WaveFunction::localized(kSites, 2), p, times.back(), times)) {
            drift = std::max(drift, std::abs(s.norm() - 1.0));
        }
        check(drift <= 1e-6, fmt("norm drift over 100 periods %.2e <= 1e-6", drift));
    }

    double disagreement = 0.0;
    for (double omega : {1.0, 6.0, 20.0}) {
        const ModelParams p = driven(3.0, 3.0, omega);
        const Eigen::MatrixXcd a = one_period_propagator(p).matrix;
        const Eigen::MatrixXcd b = one_period_propagator(p, PropagatorMethod::stepwise_exponential).matrix;
        disagreement = std::max(disagreement, (a - b).cwiseAbs().maxCoeff());
    }
    check(disagreement <= 1e-6, fmt("RK vs stepwise exponential propagators %.2e <= 1e-6", disagreement));

    {
        const ModelParams p = driven(3.0, 3.0, 4.0);
        const Propagator u = one_period_propagator(p);
        const FloquetDecomposition fd = floquet_decompose(u);
        const Eigen::VectorXcd psi0 = WaveFunction::localized(kSites, 20).amplitudes;
        Eigen::VectorXcd direct = psi0;
        double err = 0.0;
        for (long k = 1; k <= 100; ++k) {
            direct = u.matrix * direct;
            err = std::max(err, (fd.evolve_periods(psi0, k) - direct).cwiseAbs().maxCoeff());
        }
        check(err <= 1e-6, fmt("Floquet reconstruction of U^k psi, k<=100: %.2e <= 1e-6", err));
    }

    {
        ModelParams p;
        p.disorder_strength = 5.0;
        p.drive_angular_frequency = 3.0;
        const FloquetDecomposition fd = floquet_decompose(one_period_propagator(p));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(oracle::reference_h0(p));
        std::vector<double> folded;
        for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
            folded.push_back(fold_quasienergy(solver.eigenvalues()(k), 3.0));
        }
        std::sort(folded.begin(), folded.end());
        double err = 0.0;
        for (Eigen::Index k = 0; k < fd.quasienergies.size(); ++k) {
            double d = std::abs(fd.quasienergies(k) - folded[static_cast<std::size_t>(k)]);
            err = std::max(err, std::min(d, 3.0 - d));
        }
        check(err <= 1e-6, fmt("A=0 quasienergies vs folded H0 eigenvalues %.2e <= 1e-6", err));
    }

    {
        bool bounded = true, starts_at_one = true;
        for (const ModelParams& p : {driven(0.0, 0.0, 0.0), driven(3.0, 0.0, 0.0), driven(3.0, 3.0, 2.0)}) {
            const double t_final = p.driven() ? 5.0 * p.period() : 100.0;
            const ImbalanceTrace tr = imbalance_trace(p, t_final, 101);
            starts_at_one = starts_at_one && std::abs(tr.instantaneous.front() - 1.0) <= 1e-12;
            for (double v : tr.instantaneous) bounded = bounded && v >= -1.0 && v <= 1.0;
        }
        check(bounded && starts_at_one, "imbalance in [-1, 1] with I(0) = 1");
    }

    {
        std::mt19937_64 rng(7);
        bool bounded = true;
        for (int draw = 0; draw < 10; ++draw) {
            const double ipr = averaged_ipr(oracle::random_unitary(kSites, rng));
            bounded = bounded && ipr >= 1.0 / kSites - 1e-12 && ipr <= 1.0 + 1e-12;
        }
        const double id = averaged_ipr(Eigen::MatrixXcd::Identity(kSites, kSites));
        const double ft = averaged_ipr(oracle::fourier_modes(kSites));
        check(bounded && std::abs(id - 1.0) <= 1e-12 && std::abs(ft - 1.0 / kSites) <= 1e-12,
              fmt("averaged IPR in [1/N, 1]; identity %.15f, Fourier %.15f", id, ft));
    }

    std::string summary = broken.empty() ? "all 7 properties hold" : std::to_string(broken.size()) + " broken: ";
    for (const auto& b : broken) summary += b + "; ";
    return {broken.empty(), summary};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict(std::size_t)> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria for the driven Aubry-Andre library"};
    std::vector<int> only;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--only", only, "criterion numbers to run (default: all)")->delimiter(',');
    app.add_option("--threads", threads, "worker threads for the scans")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "static transition", static_transition},
        {2, "frequency response at lambda=A=3", frequency_response},
        {3, "diagnostic concordance", diagnostic_concordance},
        {4, "critical amplitude A_c=lambda-2J", critical_amplitude_line},
        {5, "IPR finite-size scaling", ipr_scaling},
        {6, "bandwidth ~ 2 lambda", [](std::size_t) { return bandwidth(); }},
        {7, "property suite", [](std::size_t) { return properties(); }},
    };
    const std::set<int> selected(only.begin(), only.end());

    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) continue;
        std::printf("[%d] %s\n", c.id, c.name);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run(threads);
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s (%.0f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.summary.c_str(),
                    seconds);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed;
}
