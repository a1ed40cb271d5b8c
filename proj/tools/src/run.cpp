#include "daa/cli/run.hpp"

#include "daa/errors.hpp"
#include "daa/floquet.hpp"
#include "daa/observables.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace daa::cli {

namespace fs = std::filesystem;

namespace {

struct Column {
    std::string name;
    std::string unit;
};

using Row = std::vector<std::string>;

std::string format_count(std::size_t n) {
    return std::to_string(n);
}

std::string header_block(const RunConfig& config) {
    std::ostringstream out;
    out << "# drivenaa " << code_version() << " experiment=" << to_string(config.experiment) << "\n";
    out << "# units: energies in J, times in hbar/J, angular frequencies in J/hbar\n";
    out << "# --- config ---\n";
    std::istringstream yaml(to_yaml(config));
    for (std::string line; std::getline(yaml, line);) {
        out << "# " << line << "\n";
    }
    out << "# --- end config ---\n";
    return out.str();
}

std::string column_row(const std::vector<Column>& columns) {
    std::string line;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (k) line += ',';
        line += columns[k].name;
        if (!columns[k].unit.empty()) line += '[' + columns[k].unit + ']';
    }
    return line;
}

std::string join(const Row& row, char sep) {
    std::string line;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) line += sep;
        line += row[k];
    }
    return line;
}

// Failure text goes into a CSV field, so strip separators.
std::string sanitize(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

class Writer {
public:
    Writer(const RunConfig& config, RunOutcome& outcome) : config_(config), outcome_(outcome) {
        fs::create_directories(config.output.directory);
    }

    fs::path path(const std::string& suffix) const {
        return fs::path(config_.output.directory) / (std::string(to_string(config_.experiment)) + suffix);
    }

    void table(const std::string& suffix, const std::vector<Column>& columns, const std::vector<Row>& rows) {
        const fs::path p = path(suffix);
        std::ofstream out(p);
        out << header_block(config_) << column_row(columns) << "\n";
        for (const auto& r : rows) out << join(r, ',') << "\n";
        finish(out, p);
    }

    void heatmap(const std::string& suffix, const ScanResult& scan, const std::function<double(const CellResult&)>& f) {
        const fs::path p = path(suffix);
        std::ofstream out(p);
        out << "# rows: " << scan.grid.axis1.name << " (" << path(".axis1.dat").filename().string() << "), columns: "
            << scan.grid.axis2->name << " (" << path(".axis2.dat").filename().string() << ")\n";
        for (std::size_t r = 0; r < scan.grid.rows(); ++r) {
            Row row;
            for (std::size_t c = 0; c < scan.grid.cols(); ++c) {
                const CellResult& cell = scan.at(r, c);
                row.push_back(cell.failed ? "nan" : format_number(f(cell)));
            }
            out << join(row, ' ') << "\n";
        }
        finish(out, p);
    }

    void axis(const std::string& suffix, const Axis& a) {
        const fs::path p = path(suffix);
        std::ofstream out(p);
        out << "# " << a.name << "\n";
        for (double v : a.values) out << format_number(v) << "\n";
        finish(out, p);
    }

    void metadata(const Provenance& prov, double wall_seconds, int exit_code, const std::vector<std::string>& failures,
                  const std::vector<std::pair<std::string, double>>& summary) {
        const fs::path p = path(".meta.yaml");
        YAML::Emitter e;
        e.SetDoublePrecision(17);
        e << YAML::BeginMap;
        e << YAML::Key << "code_version" << YAML::Value << code_version();
        e << YAML::Key << "wall_seconds" << YAML::Value << wall_seconds;
        e << YAML::Key << "exit_status" << YAML::Value << exit_code;
        e << YAML::Key << "config_source" << YAML::Value << prov.config_path;
        e << YAML::Key << "fields_from_file" << YAML::Value << YAML::Flow << prov.file_fields;
        e << YAML::Key << "fields_from_flags" << YAML::Value << YAML::Flow << prov.flag_fields;
        e << YAML::Key << "precedence" << YAML::Value << "flag > file > default";
        e << YAML::Key << "failures" << YAML::Value << failures;
        if (!summary.empty()) {
            e << YAML::Key << "summary" << YAML::Value << YAML::BeginMap;
            for (const auto& [k, v] : summary) e << YAML::Key << k << YAML::Value << v;
            e << YAML::EndMap;
        }
        e << YAML::EndMap;

        std::ofstream out(p);
        out << "# Replay with: daa " << to_string(config_.experiment) << " --config " << p.filename().string() << "\n";
        out << to_yaml(config_);
        out << "run:\n";
        std::istringstream body(e.c_str());
        for (std::string line; std::getline(body, line);) out << "  " << line << "\n";
        finish(out, p);
    }

private:
    void finish(std::ofstream& out, const fs::path& p) {
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + p.string());
        outcome_.files.push_back(p);
    }

    const RunConfig& config_;
    RunOutcome& outcome_;
};

ScanGrid make_grid(const RunConfig& config) {
    ScanGrid grid;
    grid.axis1 = config.axes.at(0);
    if (config.axes.size() > 1) grid.axis2 = config.axes[1];
    grid.fixed = config.model;
    grid.phases = config.phases.values();
    return grid;
}

class Checkpoint {
public:
    Checkpoint(fs::path path, const std::string& header) : path_(std::move(path)), out_(path_) {
        out_ << header << "cell,mean_imbalance,mean_ipr,status\n";
        out_.flush();
    }

    void record(std::size_t cell, const CellResult& r) {
        out_ << cell << ',' << format_number(r.mean_imbalance) << ',' << format_number(r.mean_ipr) << ','
             << (r.failed ? "failed" : "ok") << "\n";
        out_.flush();
    }

    void discard() {
        out_.close();
        fs::remove(path_);
    }

private:
    fs::path path_;
    std::ofstream out_;
};

struct ScanRun {
    ScanResult scan;
    std::vector<std::string> failures;
};

ScanRun execute_scan(const RunConfig& config, Writer& writer, std::ostream& log,
                     const std::function<ScanResult(const ScanGrid&, const ScanSettings&)>& driver,
                     bool reference) {
    const ScanGrid grid = make_grid(config);
    ScanSettings settings = config.scan_settings();
    settings.undriven_reference = reference;
    Checkpoint checkpoint(writer.path(".partial.csv"), header_block(config));
    std::size_t done = 0;
    const std::size_t total = grid.cell_count();
    settings.on_cell_complete = [&](std::size_t cell, const CellResult& r) {
        checkpoint.record(cell, r);
        log << "\r[" << to_string(config.experiment) << "] " << ++done << "/" << total << " cells" << std::flush;
    };
    ScanRun run{driver(grid, settings), {}};
    log << "\n";
    for (std::size_t c = 0; c < run.scan.cells.size(); ++c) {
        if (run.scan.cells[c].failed) run.failures.push_back("cell " + std::to_string(c) + ": " + run.scan.cells[c].failure);
    }
    if (run.failures.empty()) checkpoint.discard();
    return run;
}

std::string status(const CellResult& c) {
    return c.failed ? "failed" : "ok";
}

int scan_exit(const ScanRun& run) {
    if (run.failures.empty()) return kSuccess;
    return run.failures.size() == run.scan.cells.size() ? kNumericalFailure : kPartialFailure;
}

void heatmaps(Writer& w, const ScanResult& scan, bool normalized) {
    w.axis(".axis1.dat", scan.grid.axis1);
    w.axis(".axis2.dat", *scan.grid.axis2);
    w.heatmap(".imbalance.dat", scan, [](const CellResult& c) { return c.mean_imbalance; });
    w.heatmap(".ipr.dat", scan, [](const CellResult& c) { return c.mean_ipr; });
    if (normalized) {
        w.heatmap(".normalized_imbalance.dat", scan, [](const CellResult& c) { return c.normalized_imbalance(); });
    }
}

int run_static(const RunConfig& config, Writer& w, std::ostream& log, std::vector<std::string>& failures) {
    const ScanRun run = execute_scan(config, w, log, static_disorder_scan, false);
    std::vector<Row> rows;
    for (const auto& c : run.scan.cells) {
        rows.push_back({format_number(c.params.disorder_strength), format_number(c.mean_imbalance),
                        format_number(c.std_imbalance), format_number(c.mean_ipr), format_number(c.std_ipr),
                        format_count(c.n_phases), status(c), sanitize(c.failure)});
    }
    w.table(".csv",
            {{"disorder_strength", "J"}, {"mean_imbalance", ""}, {"std_imbalance", ""}, {"mean_ipr", ""},
             {"std_ipr", ""}, {"n_phases", ""}, {"status", ""}, {"failure", ""}},
            rows);
    failures = run.failures;
    return scan_exit(run);
}

int run_freq(const RunConfig& config, Writer& w, std::ostream& log, std::vector<std::string>& failures) {
    const ScanRun run = execute_scan(config, w, log, frequency_disorder_scan, true);
    std::vector<Row> rows;
    for (const auto& c : run.scan.cells) {
        const auto& p = c.params;
        rows.push_back({format_number(p.disorder_strength), format_number(p.drive_amplitude),
                        format_number(p.drive_angular_frequency),
                        format_number(p.disorder_strength / p.drive_angular_frequency), format_number(c.mean_imbalance),
                        format_number(c.std_imbalance), format_number(c.reference_imbalance),
                        format_number(c.normalized_imbalance()), format_number(c.mean_ipr), format_number(c.std_ipr),
                        format_count(c.n_phases), status(c), sanitize(c.failure)});
    }
    w.table(".csv",
            {{"disorder_strength", "J"}, {"drive_amplitude", "J"}, {"drive_angular_frequency", "J/hbar"},
             {"disorder_over_frequency", ""}, {"mean_imbalance", ""}, {"std_imbalance", ""},
             {"undriven_imbalance", ""}, {"normalized_imbalance", ""}, {"mean_ipr", ""}, {"std_ipr", ""},
             {"n_phases", ""}, {"status", ""}, {"failure", ""}},
            rows);
    if (config.output.heatmaps) heatmaps(w, run.scan, true);
    failures = run.failures;
    return scan_exit(run);
}

int run_amp(const RunConfig& config, Writer& w, std::ostream& log, std::vector<std::string>& failures) {
    const ScanRun run = execute_scan(config, w, log, amplitude_disorder_scan, false);
    std::vector<Row> rows;
    for (const auto& c : run.scan.cells) {
        const auto& p = c.params;
        rows.push_back({format_number(p.disorder_strength), format_number(p.drive_amplitude),
                        format_number(critical_amplitude(p.disorder_strength, p.hopping).value),
                        format_number(p.drive_angular_frequency), format_number(c.mean_imbalance),
                        format_number(c.std_imbalance), format_number(c.mean_ipr), format_number(c.std_ipr),
                        format_count(c.n_phases), status(c), sanitize(c.failure)});
    }
    w.table(".csv",
            {{"disorder_strength", "J"}, {"drive_amplitude", "J"}, {"critical_amplitude", "J"},
             {"drive_angular_frequency", "J/hbar"}, {"mean_imbalance", ""}, {"std_imbalance", ""}, {"mean_ipr", ""},
             {"std_ipr", ""}, {"n_phases", ""}, {"status", ""}, {"failure", ""}},
            rows);
    if (config.output.heatmaps) heatmaps(w, run.scan, false);
    failures = run.failures;
    return scan_exit(run);
}

int run_spectrum(const RunConfig& config, Writer& w) {
    std::vector<Row> rows;
    for (double lambda : config.axes.at(0).values) {
        ModelParams p = config.model;
        p.disorder_strength = lambda;
        const Eigen::VectorXd e = aa_spectrum(p);
        for (Eigen::Index k = 0; k < e.size(); ++k) {
            rows.push_back({format_number(lambda), std::to_string(k), format_number(e(k))});
        }
    }
    w.table(".csv", {{"disorder_strength", "J"}, {"level", ""}, {"energy", "J"}}, rows);
    return kSuccess;
}

int run_floquet_cell(const RunConfig& config, Writer& w, std::vector<std::pair<std::string, double>>& summary) {
    const ModelParams& p = config.model;
    const auto offsets = uniform_offsets(p.period(), config.integrator.samples_per_period);
    const Tolerances tol{config.integrator.rel_tol, config.integrator.abs_tol};
    const PeriodSampling sampling = sample_period(p, offsets, tol);
    const FloquetDecomposition fd = floquet_decompose(sampling.full);
    const Eigen::VectorXd iprs = mode_iprs(fd.modes);
    std::vector<Row> rows;
    for (Eigen::Index n = 0; n < fd.modes.cols(); ++n) {
        Eigen::Index peak = 0;
        fd.modes.col(n).cwiseAbs2().maxCoeff(&peak);
        rows.push_back({std::to_string(n), format_number(fd.quasienergies(n)), format_number(iprs(n)),
                        std::to_string(peak + 1)});
    }
    w.table(".csv", {{"mode", ""}, {"quasienergy", "J"}, {"mode_ipr", ""}, {"peak_site", ""}}, rows);

    const ImbalanceTrace trace = imbalance_from_period(p, sampling, config.integrator.periods);
    std::vector<Row> trace_rows;
    for (std::size_t k = 0; k < trace.sample_times.size(); ++k) {
        trace_rows.push_back({format_number(trace.sample_times[k]), format_number(trace.instantaneous[k])});
    }
    w.table(".imbalance.csv", {{"time", "hbar/J"}, {"imbalance", ""}}, trace_rows);

    summary = {{"averaged_ipr", averaged_ipr(fd)},
               {"time_averaged_imbalance", trace.time_average},
               {"period", fd.period},
               {"unitarity_defect", sampling.full.unitarity_defect()}};
    return kSuccess;
}

int run_ipr_scaling(const RunConfig& config, Writer& w) {
    std::vector<Row> rows;
    const auto phases = config.phases.values();
    for (double lambda : config.axes.at(0).values) {
        ModelParams cell = config.model;
        cell.disorder_strength = lambda;
        const auto table = ipr_size_scaling(config.sizes, cell, phases, config.scan_settings());
        for (const auto& r : table) {
            rows.push_back({format_number(lambda), format_number(cell.drive_amplitude), std::to_string(r.n_sites),
                            format_number(r.mean_ipr), format_number(r.std_ipr),
                            format_number(r.mean_ipr * static_cast<double>(r.n_sites)),
                            format_number(r.mean_ipr / table.front().mean_ipr), format_count(r.n_phases)});
        }
    }
    w.table(".csv",
            {{"disorder_strength", "J"}, {"drive_amplitude", "J"}, {"n_sites", ""}, {"mean_ipr", ""}, {"std_ipr", ""},
             {"ipr_times_n", ""}, {"ratio_to_smallest", ""}, {"n_phases", ""}},
            rows);
    return kSuccess;
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

RunOutcome run(const RunConfig& config, const Provenance& provenance, std::ostream& log) {
    RunOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> failures;
    std::vector<std::pair<std::string, double>> summary;
    try {
        Writer writer(config, outcome);
        switch (config.experiment) {
        case Experiment::static_imbalance:
            outcome.exit_code = run_static(config, writer, log, failures);
            break;
        case Experiment::freq_scan:
            outcome.exit_code = run_freq(config, writer, log, failures);
            break;
        case Experiment::amp_scan:
            outcome.exit_code = run_amp(config, writer, log, failures);
            break;
        case Experiment::spectrum:
            outcome.exit_code = run_spectrum(config, writer);
            break;
        case Experiment::floquet_cell:
            outcome.exit_code = run_floquet_cell(config, writer, summary);
            break;
        case Experiment::ipr_scaling:
            outcome.exit_code = run_ipr_scaling(config, writer);
            break;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        writer.metadata(provenance, wall, outcome.exit_code, failures, summary);
    } catch (const InvalidParameter& e) {
        outcome.exit_code = kConfigError;
        outcome.message = e.what();
    } catch (const NumericalError& e) {
        outcome.exit_code = kNumericalFailure;
        outcome.message = e.what();
    }
    if (outcome.message.empty() && !failures.empty()) {
        outcome.message = std::to_string(failures.size()) + " cell(s) failed; see metadata";
    }
    return outcome;
}

} // namespace daa::cli
