#pragma once

#include "daa/evolution.hpp"
#include "daa/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daa {

/// Axis names understood by the scan drivers.
namespace axis {
inline constexpr const char* disorder = "disorder_strength";
inline constexpr const char* frequency = "drive_angular_frequency";
inline constexpr const char* disorder_over_frequency = "disorder_over_frequency";
inline constexpr const char* amplitude = "drive_amplitude";
} // namespace axis

struct Axis {
    std::string name;
    std::vector<double> values;
};

/// Scan axes plus the parameter template and the disorder realisations.
struct ScanGrid {
    Axis axis1;
    std::optional<Axis> axis2;
    ModelParams fixed;
    std::vector<double> phases;

    std::size_t rows() const noexcept { return axis1.values.size(); }
    std::size_t cols() const noexcept { return axis2 ? axis2->values.size() : 1; }
    std::size_t cell_count() const noexcept { return rows() * cols(); }

    /// Throws InvalidParameter on empty, non-finite or non-ascending axes, or phases outside [0, 2pi).
    void validate() const;
};

/// phi_k = 2 pi k / count
std::vector<double> uniform_phases(std::size_t count = 20);
/// count draws from U[0, 2pi) with a 64-bit Mersenne twister.
std::vector<double> random_phases(std::size_t count, std::uint64_t seed);

struct CellResult {
    /// cell parameters with phase left at the template value
    ModelParams params;
    double mean_imbalance = 0.0;
    double std_imbalance = 0.0;
    double mean_ipr = 0.0;
    double std_ipr = 0.0;
    /// same-window imbalance with the drive switched off; NaN when not requested
    double reference_imbalance = 0.0;
    std::size_t n_phases = 0;
    bool failed = false;
    std::string failure;

    /// mean_imbalance / reference_imbalance
    double normalized_imbalance() const;
};

struct ScanSettings {
    Tolerances tolerances{};
    std::size_t samples_per_period = 20;
    std::size_t periods = 100;
    /// window for cells without a drive period
    double static_time = 1000.0;
    std::size_t static_samples = 2000;
    std::size_t threads = 1;
    bool undriven_reference = false;
    /// Invoked once per finished cell, serialized, in completion order.
    std::function<void(std::size_t cell, const CellResult&)> on_cell_complete;
};

struct ScanMetadata {
    ScanSettings settings;
    std::string code_version;
    double wall_seconds = 0.0;
};

struct ScanResult {
    ScanGrid grid;
    /// row-major over (axis1, axis2)
    std::vector<CellResult> cells;
    ScanMetadata metadata;

    const CellResult& at(std::size_t row, std::size_t col = 0) const { return cells.at(row * grid.cols() + col); }
    std::size_t failed_cells() const;
};

/// Per-realisation diagnostics of one parameter set.
struct CellSample {
    double imbalance = 0.0;
    double ipr = 0.0;
    double reference_imbalance = 0.0;
};

/// Time-averaged imbalance and averaged IPR for one fully specified parameter set.
/// Driven cells run `periods` periods and take the IPR of the Floquet modes from
/// the same one-period propagator; undriven cells use the static window and the
/// eigenstates of H0.
CellSample evaluate_cell(const ModelParams& params, const ScanSettings& settings);

/// Runs evaluate_cell for every cell and phase and aggregates over phases.
/// `bind` maps (template, axis1 value, axis2 value) to the cell parameters.
ScanResult run_scan(const ScanGrid& grid, const ScanSettings& settings,
                    const std::function<ModelParams(const ModelParams&, double, double)>& bind);

/// lambda x omega (or lambda x lambda/omega) at A = lambda in every cell.
ScanResult frequency_disorder_scan(const ScanGrid& grid, const ScanSettings& settings);

/// lambda x A at the template's omega. Every lambda must be >= 2J.
ScanResult amplitude_disorder_scan(const ScanGrid& grid, const ScanSettings& settings);

/// 1-D lambda scan of the undriven lattice over the static window.
ScanResult static_disorder_scan(const ScanGrid& grid, const ScanSettings& settings);

struct SizeScalingRow {
    std::size_t n_sites = 0;
    double mean_ipr = 0.0;
    double std_ipr = 0.0;
    std::size_t n_phases = 0;
};

/// Phase-averaged IPR of the cell for each lattice size (even, ascending).
std::vector<SizeScalingRow> ipr_size_scaling(std::span<const std::size_t> sizes, const ModelParams& cell,
                                             std::span<const double> phases, const ScanSettings& settings = {});

/// Library version baked in at build time.
std::string code_version();

} // namespace daa
