#include "daa/sweeps.hpp"

#include "daa/errors.hpp"
#include "daa/floquet.hpp"
#include "daa/observables.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#ifndef DAA_VERSION
#define DAA_VERSION "unknown"
#endif

namespace daa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate_axis(const Axis& a) {
    if (a.values.empty()) {
        throw InvalidParameter("axis '" + a.name + "' has no values");
    }
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (!std::isfinite(a.values[k])) {
            throw InvalidParameter("axis '" + a.name + "' has a non-finite value");
        }
        if (k > 0 && !(a.values[k] > a.values[k - 1])) {
            throw InvalidParameter("axis '" + a.name + "' must be strictly ascending");
        }
    }
}

// Runs task(k) for k in [0, count) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            task(k);
        }
    };
    if (workers == 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

// Fixed summation order keeps results independent of scheduling.
Moments moments(std::span<const double> xs) {
    Moments m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

double undriven_window_imbalance(ModelParams params, const ScanSettings& settings) {
    if (params.drive_angular_frequency > 0.0) {
        const double t_final = static_cast<double>(settings.periods) * params.period();
        params.drive_amplitude = 0.0;
        return imbalance_trace(params, t_final, settings.periods * settings.samples_per_period + 1).time_average;
    }
    params.drive_amplitude = 0.0;
    return imbalance_trace(params, settings.static_time, settings.static_samples).time_average;
}

} // namespace

void ScanGrid::validate() const {
    validate_axis(axis1);
    if (axis2) validate_axis(*axis2);
    if (phases.empty()) {
        throw InvalidParameter("scan needs at least one phase");
    }
    for (double phi : phases) {
        if (!(phi >= 0.0 && phi < kTwoPi)) {
            throw InvalidParameter("phases must lie in [0, 2pi)");
        }
    }
    fixed.validate();
}

std::vector<double> uniform_phases(std::size_t count) {
    if (count == 0) throw InvalidParameter("phase count must be positive");
    std::vector<double> phases(count);
    for (std::size_t k = 0; k < count; ++k) {
        phases[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
    }
    return phases;
}

std::vector<double> random_phases(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw InvalidParameter("phase count must be positive");
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> dist(0.0, kTwoPi);
    std::vector<double> phases(count);
    for (double& phi : phases) {
        phi = dist(engine);
        if (phi >= kTwoPi) phi = 0.0;
    }
    return phases;
}

double CellResult::normalized_imbalance() const {
    return mean_imbalance / reference_imbalance;
}

std::size_t ScanResult::failed_cells() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; }));
}

CellSample evaluate_cell(const ModelParams& params, const ScanSettings& settings) {
    params.validate();
    CellSample sample;
    if (params.driven()) {
        const double period = params.period();
        const auto offsets = uniform_offsets(period, settings.samples_per_period);
        const PeriodSampling sampling = sample_period(params, offsets, settings.tolerances);
        sample.imbalance = imbalance_from_period(params, sampling, settings.periods).time_average;
        sample.ipr = averaged_ipr(floquet_decompose(sampling.full));
    } else {
        // Without a drive the Floquet modes are the eigenstates of H0.
        sample.imbalance = undriven_window_imbalance(params, settings);
        sample.ipr = eigenstate_ipr(params);
    }
    sample.reference_imbalance = settings.undriven_reference ? undriven_window_imbalance(params, settings)
                                                             : std::numeric_limits<double>::quiet_NaN();
    return sample;
}

ScanResult run_scan(const ScanGrid& grid, const ScanSettings& settings,
                    const std::function<ModelParams(const ModelParams&, double, double)>& bind) {
    grid.validate();
    if (settings.samples_per_period == 0 || settings.periods == 0 || settings.static_samples < 2 ||
        !(settings.static_time > 0.0)) {
        throw InvalidParameter("scan settings need positive periods, samples and window");
    }
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n_cells = grid.cell_count();
    const std::size_t n_phases = grid.phases.size();

    ScanResult result;
    result.grid = grid;
    result.cells.resize(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const double a1 = grid.axis1.values[c / grid.cols()];
        const double a2 = grid.axis2 ? grid.axis2->values[c % grid.cols()] : 0.0;
        try {
            result.cells[c].params = bind(grid.fixed, a1, a2);
        } catch (const std::exception& e) {
            result.cells[c].failed = true;
            result.cells[c].failure = e.what();
        }
        result.cells[c].n_phases = n_phases;
    }

    std::vector<CellSample> samples(n_cells * n_phases);
    std::vector<std::string> errors(n_cells * n_phases);
    std::vector<std::atomic<std::size_t>> remaining(n_cells);
    for (auto& r : remaining) r.store(n_phases);
    std::mutex report;

    parallel_for(n_cells * n_phases, settings.threads, [&](std::size_t task) {
        const std::size_t c = task / n_phases;
        const std::size_t k = task % n_phases;
        CellResult& cell = result.cells[c];
        if (!cell.failed) {
            try {
                ModelParams p = cell.params;
                p.phase = grid.phases[k];
                samples[task] = evaluate_cell(p, settings);
            } catch (const std::exception& e) {
                errors[task] = e.what();
            }
        }
        if (--remaining[c] != 0) return;

        // last phase of this cell: aggregate in phase order
        std::vector<double> imb(n_phases), ipr(n_phases), ref(n_phases);
        for (std::size_t j = 0; j < n_phases; ++j) {
            const std::size_t slot = c * n_phases + j;
            if (!errors[slot].empty() && !cell.failed) {
                cell.failed = true;
                cell.failure = "phase " + std::to_string(j) + ": " + errors[slot];
            }
            imb[j] = samples[slot].imbalance;
            ipr[j] = samples[slot].ipr;
            ref[j] = samples[slot].reference_imbalance;
        }
        if (!cell.failed) {
            const Moments mi = moments(imb);
            const Moments mp = moments(ipr);
            cell.mean_imbalance = mi.mean;
            cell.std_imbalance = mi.stddev;
            cell.mean_ipr = mp.mean;
            cell.std_ipr = mp.stddev;
            cell.reference_imbalance = moments(ref).mean;
        }
        if (settings.on_cell_complete) {
            std::lock_guard lock(report);
            settings.on_cell_complete(c, cell);
        }
    });

    result.metadata.settings = settings;
    result.metadata.settings.on_cell_complete = nullptr;
    result.metadata.code_version = code_version();
    result.metadata.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ScanResult frequency_disorder_scan(const ScanGrid& grid, const ScanSettings& settings) {
    if (grid.axis1.name != axis::disorder || !grid.axis2 ||
        (grid.axis2->name != axis::frequency && grid.axis2->name != axis::disorder_over_frequency)) {
        throw InvalidParameter("frequency scan needs axes (disorder_strength, drive_angular_frequency | "
                               "disorder_over_frequency)");
    }
    for (double v : grid.axis1.values) {
        if (!(v > 0.0)) throw InvalidParameter("frequency scan needs disorder_strength > 0");
    }
    for (double v : grid.axis2->values) {
        if (!(v > 0.0)) throw InvalidParameter("frequency scan needs positive frequency axis values");
    }
    const bool ratio = grid.axis2->name == axis::disorder_over_frequency;
    return run_scan(grid, settings, [ratio](const ModelParams& base, double lambda, double second) {
        ModelParams p = base;
        p.disorder_strength = lambda;
        p.drive_amplitude = lambda;
        p.drive_angular_frequency = ratio ? lambda / second : second;
        return p;
    });
}

ScanResult amplitude_disorder_scan(const ScanGrid& grid, const ScanSettings& settings) {
    if (grid.axis1.name != axis::disorder || !grid.axis2 || grid.axis2->name != axis::amplitude) {
        throw InvalidParameter("amplitude scan needs axes (disorder_strength, drive_amplitude)");
    }
    if (!(grid.fixed.drive_angular_frequency > 0.0)) {
        throw InvalidParameter("amplitude scan needs a drive frequency > 0");
    }
    for (double v : grid.axis1.values) {
        if (v < kStaticCriticalRatio * grid.fixed.hopping) {
            throw InvalidParameter("amplitude scan needs disorder_strength >= 2J");
        }
    }
    return run_scan(grid, settings, [](const ModelParams& base, double lambda, double amplitude) {
        ModelParams p = base;
        p.disorder_strength = lambda;
        p.drive_amplitude = amplitude;
        return p;
    });
}

ScanResult static_disorder_scan(const ScanGrid& grid, const ScanSettings& settings) {
    if (grid.axis1.name != axis::disorder || grid.axis2) {
        throw InvalidParameter("static scan takes a single disorder_strength axis");
    }
    return run_scan(grid, settings, [](const ModelParams& base, double lambda, double) {
        ModelParams p = base;
        p.disorder_strength = lambda;
        p.drive_amplitude = 0.0;
        p.drive_angular_frequency = 0.0;
        return p;
    });
}

std::vector<SizeScalingRow> ipr_size_scaling(std::span<const std::size_t> sizes, const ModelParams& cell,
                                             std::span<const double> phases, const ScanSettings& settings) {
    if (sizes.empty() || phases.empty()) {
        throw InvalidParameter("size scaling needs at least one size and one phase");
    }
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] < 2 || sizes[k] % 2 != 0 || (k > 0 && sizes[k] <= sizes[k - 1])) {
            throw InvalidParameter("sizes must be even, >= 2 and strictly ascending");
        }
    }
    const std::size_t n_phases = phases.size();
    std::vector<double> iprs(sizes.size() * n_phases);
    std::vector<std::string> errors(iprs.size());
    parallel_for(iprs.size(), settings.threads, [&](std::size_t task) {
        ModelParams p = cell;
        p.n_sites = sizes[task / n_phases];
        p.phase = phases[task % n_phases];
        try {
            if (p.driven()) {
                iprs[task] = averaged_ipr(floquet_decompose(one_period_propagator(
                    p, PropagatorMethod::column_integration, PropagatorOptions{settings.tolerances, 0})));
            } else {
                iprs[task] = eigenstate_ipr(p);
            }
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericalError("size scaling failed: " + e);
    }
    std::vector<SizeScalingRow> rows;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const Moments m = moments(std::span<const double>(iprs).subspan(s * n_phases, n_phases));
        rows.push_back({sizes[s], m.mean, m.stddev, n_phases});
    }
    return rows;
}

std::string code_version() {
    return DAA_VERSION;
}

} // namespace daa
