#pragma once

#include "daa/evolution.hpp"
#include "daa/model.hpp"
#include "daa/sweeps.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace YAML {
class Node;
}

namespace daa::cli {

enum class Experiment { static_imbalance, freq_scan, amp_scan, spectrum, floquet_cell, ipr_scaling };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Invalid configuration, located by source line (0 when unknown) and dotted field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, std::string field, const std::string& message);

    const std::string& source() const noexcept { return source_; }
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string source_;
    int line_;
    std::string field_;
};

enum class PhaseMode { uniform, random };

struct PhaseSpec {
    std::size_t count = 20;
    PhaseMode mode = PhaseMode::uniform;
    std::uint64_t seed = 0;

    std::vector<double> values() const;
};

struct IntegratorConfig {
    double rel_tol = Tolerances{}.rel;
    double abs_tol = Tolerances{}.abs;
    std::size_t samples_per_period = 20;
    std::size_t periods = 100;
    double static_time = 1000.0;
    std::size_t static_samples = 2000;
};

struct OutputConfig {
    std::string directory = "out";
    std::string format = "csv";
    bool heatmaps = true;
};

/// Fully resolved run description: every field is either read or defaulted.
struct RunConfig {
    Experiment experiment = Experiment::static_imbalance;
    ModelParams model;
    /// resolved axes, in scan order (axis1 first)
    std::vector<Axis> axes;
    /// lattice sizes for ipr-scaling
    std::vector<std::size_t> sizes;
    PhaseSpec phases;
    IntegratorConfig integrator;
    OutputConfig output;
    std::size_t threads = 1;

    ScanSettings scan_settings() const;
};

/// Where each setting came from; flags win over the file, the file over defaults.
struct Provenance {
    std::string config_path;
    std::vector<std::string> file_fields;
    std::vector<std::string> flag_fields;
};

/// Command-line overrides applied on top of the file.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> phases;
    std::optional<std::uint64_t> seed;
    /// generic "dotted.path=value" assignments
    std::vector<std::string> assignments;
};

/// Reads a YAML config file. A result table whose header embeds a config block is
/// accepted too, so a finished run can be replayed from its own output.
YAML::Node read_config_file(const std::string& path);

/// Extracts the embedded config block from commented result-table text; empty when absent.
std::string extract_embedded_config(const std::string& text);

/// Merges overrides into `doc` and resolves the complete configuration.
/// `experiment` (the subcommand) wins over the document's experiment key.
RunConfig resolve_config(const YAML::Node& doc, std::optional<Experiment> experiment, const Overrides& overrides,
                         const std::string& source, Provenance* provenance = nullptr);

/// Convenience wrapper: text in, resolved config out.
RunConfig parse_config(const std::string& yaml_text, std::optional<Experiment> experiment = std::nullopt,
                       const Overrides& overrides = {}, const std::string& source = "<string>");

/// Every resolved field as YAML, with doubles written to round-trip exactly.
std::string to_yaml(const RunConfig& config);

} // namespace daa::cli
