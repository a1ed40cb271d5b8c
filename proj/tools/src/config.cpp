#include "daa/cli/config.hpp"

#include "daa/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace daa::cli {

namespace {

constexpr std::string_view kConfigBegin = "--- config ---";
constexpr std::string_view kConfigEnd = "--- end config ---";
constexpr double kDefaultDriveFrequency = 0.005;

struct Experiments {
    Experiment id;
    std::string_view name;
};

constexpr Experiments kExperiments[] = {
    {Experiment::static_imbalance, "static-imbalance"}, {Experiment::freq_scan, "freq-scan"},
    {Experiment::amp_scan, "amp-scan"},                 {Experiment::spectrum, "spectrum"},
    {Experiment::floquet_cell, "floquet-cell"},         {Experiment::ipr_scaling, "ipr-scaling"},
};

int line_of(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    return mark.is_null() || mark.line < 0 ? 0 : mark.line + 1;
}

// Line of the deepest node along a dotted path in the parsed document.
int line_of_path(const YAML::Node& root, const std::string& field) {
    if (!root || !root.IsMap()) return 0;
    YAML::Node current = root;
    int line = 0;
    std::stringstream ss(field);
    for (std::string part; std::getline(ss, part, '.');) {
        if (!current.IsMap()) break;
        const YAML::Node& view = current;
        const YAML::Node next = view[part];
        if (!next) break;
        current.reset(next);
        if (const int l = line_of(current); l > 0) line = l;
    }
    return line;
}

class Decoder {
public:
    // `original` is the document as parsed; merged copies lose their source marks.
    Decoder(std::string source, std::vector<std::string> flag_fields, YAML::Node original)
        : source_(std::move(source)), flag_fields_(std::move(flag_fields)), original_(std::move(original)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) const {
        for (const auto& f : flag_fields_) {
            if (field == f || field.starts_with(f + ".")) throw ConfigError("<flags>", 0, field, message);
        }
        int line = line_of_path(original_, field);
        if (line == 0) line = line_of(node);
        throw ConfigError(source_, line, field, message);
    }

    template <class T>
    T scalar(const YAML::Node& node, const std::string& field) const {
        if (!node.IsScalar()) fail(node, field, "expected a scalar value");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, field, "cannot convert '" + node.Scalar() + "'");
        }
    }

    double number(const YAML::Node& node, const std::string& field) const {
        const auto v = scalar<double>(node, field);
        if (!std::isfinite(v)) fail(node, field, "value must be finite");
        return v;
    }

    std::size_t count(const YAML::Node& node, const std::string& field) const {
        const auto v = scalar<long long>(node, field);
        if (v < 0) fail(node, field, "value must be non-negative");
        return static_cast<std::size_t>(v);
    }

    void only_keys(const YAML::Node& map, const std::string& field, std::initializer_list<std::string_view> keys) const {
        if (!map.IsMap()) fail(map, field, "expected a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
            }
        }
    }

    std::vector<double> axis_values(const YAML::Node& node, const std::string& field) const {
        std::vector<double> values;
        if (node.IsSequence()) {
            for (const auto& item : node) values.push_back(number(item, field));
        } else if (node.IsMap()) {
            only_keys(node, field, {"start", "stop", "count", "step", "spacing"});
            if (!node["start"] || !node["stop"]) fail(node, field, "range needs start and stop");
            const double start = number(node["start"], field + ".start");
            const double stop = number(node["stop"], field + ".stop");
            const std::string spacing = node["spacing"] ? scalar<std::string>(node["spacing"], field + ".spacing")
                                                        : std::string("linear");
            std::size_t n = 0;
            if (node["count"]) {
                n = count(node["count"], field + ".count");
            } else if (node["step"]) {
                const double step = number(node["step"], field + ".step");
                if (!(step > 0.0)) fail(node["step"], field + ".step", "step must be > 0");
                n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
            } else {
                fail(node, field, "range needs count or step");
            }
            if (n == 0) fail(node, field, "range is empty");
            if (spacing == "log") {
                if (!(start > 0.0) || !(stop > 0.0)) fail(node, field, "log spacing needs positive bounds");
            } else if (spacing != "linear") {
                fail(node["spacing"], field + ".spacing", "spacing must be linear or log");
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
                values.push_back(spacing == "log" ? start * std::pow(stop / start, f) : start + (stop - start) * f);
            }
            if (n > 1) values.back() = stop;
        } else {
            fail(node, field, "expected a list of values or a range mapping");
        }
        if (values.empty()) fail(node, field, "axis is empty");
        for (std::size_t k = 1; k < values.size(); ++k) {
            if (!(values[k] > values[k - 1])) fail(node, field, "axis values must be strictly ascending");
        }
        return values;
    }

private:
    std::string source_;
    std::vector<std::string> flag_fields_;
    YAML::Node original_;
};

void flatten(const YAML::Node& node, const std::string& prefix, std::vector<std::string>& out) {
    if (node.IsMap()) {
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
        }
    } else if (!prefix.empty()) {
        out.push_back(prefix);
    }
}

void assign_path(YAML::Node root, const std::string& path, const YAML::Node& value) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw ConfigError("<flags>", 0, path, "malformed field path");
        parts.push_back(part);
    }
    if (parts.empty()) throw ConfigError("<flags>", 0, path, "malformed field path");
    // yaml-cpp nodes are handles; walk by reassigning the handle.
    std::vector<YAML::Node> chain{root};
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        YAML::Node child = chain.back()[parts[k]];
        if (!child.IsMap()) {
            child = YAML::Node(YAML::NodeType::Map);
            chain.back()[parts[k]] = child;
        }
        chain.push_back(chain.back()[parts[k]]);
    }
    chain.back()[parts.back()] = value;
}

ModelParams decode_model(const Decoder& d, const YAML::Node& node, Experiment experiment) {
    ModelParams m;
    bool have_omega = false;
    if (node) {
        d.only_keys(node, "model",
                    {"n_sites", "hopping", "disorder_strength", "incommensuration", "phase", "drive_amplitude",
                     "drive_angular_frequency", "drive_frequency"});
        if (node["n_sites"]) m.n_sites = d.count(node["n_sites"], "model.n_sites");
        if (node["hopping"]) m.hopping = d.number(node["hopping"], "model.hopping");
        if (node["disorder_strength"]) m.disorder_strength = d.number(node["disorder_strength"], "model.disorder_strength");
        if (const auto b = node["incommensuration"]) {
            if (b.IsScalar() && b.Scalar() == "golden") {
                m.incommensuration = kGoldenMean;
            } else {
                m.incommensuration = d.number(b, "model.incommensuration");
            }
        }
        if (node["phase"]) m.phase = d.number(node["phase"], "model.phase");
        if (node["drive_amplitude"]) m.drive_amplitude = d.number(node["drive_amplitude"], "model.drive_amplitude");
        if (node["drive_angular_frequency"] && node["drive_frequency"]) {
            d.fail(node["drive_frequency"], "model.drive_frequency",
                   "give either drive_frequency or drive_angular_frequency, not both");
        }
        if (node["drive_angular_frequency"]) {
            m.drive_angular_frequency = d.number(node["drive_angular_frequency"], "model.drive_angular_frequency");
            have_omega = true;
        }
        if (node["drive_frequency"]) {
            m.drive_angular_frequency =
                2.0 * std::numbers::pi * d.number(node["drive_frequency"], "model.drive_frequency");
            have_omega = true;
        }
    }
    if (!have_omega && experiment == Experiment::amp_scan) {
        m.drive_angular_frequency = 2.0 * std::numbers::pi * kDefaultDriveFrequency;
    }
    try {
        m.validate();
    } catch (const InvalidParameter& e) {
        d.fail(node, "model", e.what());
    }
    return m;
}

YAML::Node range(double start, double stop, std::size_t count, const char* spacing = "linear") {
    YAML::Node n(YAML::NodeType::Map);
    n["start"] = start;
    n["stop"] = stop;
    n["count"] = count;
    n["spacing"] = spacing;
    return n;
}

Axis decode_axis(const Decoder& d, const YAML::Node& grid, const char* name, const YAML::Node& fallback) {
    const YAML::Node node = grid && grid[name] ? grid[name] : fallback;
    return Axis{name, d.axis_values(node, std::string("grid.") + name)};
}

} // namespace

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": field '" + field + "': " + message),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

std::string_view to_string(Experiment e) {
    for (const auto& x : kExperiments) {
        if (x.id == e) return x.name;
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& x : kExperiments) {
        if (x.name == name) return x.id;
    }
    return std::nullopt;
}

std::vector<double> PhaseSpec::values() const {
    return mode == PhaseMode::uniform ? uniform_phases(count) : random_phases(count, seed);
}

ScanSettings RunConfig::scan_settings() const {
    ScanSettings s;
    s.tolerances = Tolerances{integrator.rel_tol, integrator.abs_tol};
    s.samples_per_period = integrator.samples_per_period;
    s.periods = integrator.periods;
    s.static_time = integrator.static_time;
    s.static_samples = integrator.static_samples;
    s.threads = threads;
    return s;
}

std::string extract_embedded_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    bool inside = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        std::string body = line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1);
        if (body == kConfigBegin) {
            inside = true;
        } else if (body == kConfigEnd) {
            break;
        } else if (inside) {
            out += body + "\n";
        }
    }
    return out;
}

YAML::Node read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "--config", "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (!text.empty() && text[0] == '#') {
        const std::string embedded = extract_embedded_config(text);
        if (!embedded.empty()) text = embedded;
    }
    try {
        YAML::Node doc = YAML::Load(text);
        return doc;
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path, e.mark.line + 1, "<document>", e.msg);
    }
}

RunConfig resolve_config(const YAML::Node& input, std::optional<Experiment> experiment, const Overrides& overrides,
                         const std::string& source, Provenance* provenance) {
    YAML::Node doc = input && !input.IsNull() ? YAML::Clone(input) : YAML::Node(YAML::NodeType::Map);
    if (!doc.IsMap()) throw ConfigError(source, line_of(doc), "<document>", "top level must be a mapping");

    Provenance prov;
    prov.config_path = source;
    flatten(doc, "", prov.file_fields);

    auto set_flag = [&](const std::string& path, const YAML::Node& value) {
        assign_path(doc, path, value);
        prov.flag_fields.push_back(path);
    };
    for (const auto& a : overrides.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("<flags>", 0, a, "expected key=value");
        YAML::Node value;
        try {
            value = YAML::Load(a.substr(eq + 1));
        } catch (const YAML::Exception& e) {
            throw ConfigError("<flags>", 0, a.substr(0, eq), e.what());
        }
        set_flag(a.substr(0, eq), value);
    }
    if (overrides.out) set_flag("output.directory", YAML::Node(*overrides.out));
    if (overrides.threads) set_flag("threads", YAML::Node(*overrides.threads));
    if (overrides.phases) set_flag("grid.phases.count", YAML::Node(*overrides.phases));
    if (overrides.seed) set_flag("grid.phases.seed", YAML::Node(*overrides.seed));
    if (experiment) set_flag("experiment", YAML::Node(std::string(to_string(*experiment))));

    Decoder d(source, prov.flag_fields, input);
    d.only_keys(doc, "", {"experiment", "model", "grid", "integrator", "output", "threads", "run"});

    RunConfig cfg;
    if (!doc["experiment"]) throw ConfigError(source, 0, "experiment", "missing (give a subcommand or the key)");
    const auto name = d.scalar<std::string>(doc["experiment"], "experiment");
    const auto parsed = parse_experiment(name);
    if (!parsed) d.fail(doc["experiment"], "experiment", "unknown experiment '" + name + "'");
    cfg.experiment = *parsed;

    cfg.model = decode_model(d, doc["model"], cfg.experiment);

    const YAML::Node grid = doc["grid"];
    if (grid) {
        d.only_keys(grid, "grid",
                    {"disorder_strength", "drive_angular_frequency", "disorder_over_frequency", "drive_amplitude",
                     "sizes", "phases"});
    }
    switch (cfg.experiment) {
    case Experiment::static_imbalance:
        cfg.axes.push_back(decode_axis(d, grid, axis::disorder, range(0.0, 4.0, 41)));
        break;
    case Experiment::spectrum:
        cfg.axes.push_back(decode_axis(d, grid, axis::disorder, range(0.0, 5.0, 51)));
        break;
    case Experiment::freq_scan:
        cfg.axes.push_back(decode_axis(d, grid, axis::disorder, range(2.0, 5.0, 21)));
        if (grid && grid[axis::frequency] && grid[axis::disorder_over_frequency]) {
            d.fail(grid, "grid", "give drive_angular_frequency or disorder_over_frequency, not both");
        }
        if (grid && grid[axis::frequency]) {
            cfg.axes.push_back(decode_axis(d, grid, axis::frequency, YAML::Node()));
        } else {
            cfg.axes.push_back(decode_axis(d, grid, axis::disorder_over_frequency, range(0.25, 16.0, 25, "log")));
        }
        break;
    case Experiment::amp_scan:
        cfg.axes.push_back(decode_axis(d, grid, axis::disorder, range(2.0, 5.0, 16)));
        cfg.axes.push_back(decode_axis(d, grid, axis::amplitude, range(0.0, 4.0, 21)));
        break;
    case Experiment::ipr_scaling: {
        YAML::Node cells(YAML::NodeType::Sequence);
        cells.push_back(1.0);
        cells.push_back(5.0);
        cfg.axes.push_back(decode_axis(d, grid, axis::disorder, cells));
        break;
    }
    case Experiment::floquet_cell:
        break;
    }
    if (cfg.experiment == Experiment::ipr_scaling) {
        if (grid && grid["sizes"]) {
            const YAML::Node sizes = grid["sizes"];
            if (!sizes.IsSequence() || sizes.size() == 0) d.fail(sizes, "grid.sizes", "expected a non-empty list");
            for (const auto& s : sizes) cfg.sizes.push_back(d.count(s, "grid.sizes"));
            for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
                if (cfg.sizes[k] < 2 || cfg.sizes[k] % 2 != 0 || (k > 0 && cfg.sizes[k] <= cfg.sizes[k - 1])) {
                    d.fail(sizes, "grid.sizes", "sizes must be even, >= 2 and strictly ascending");
                }
            }
        } else {
            cfg.sizes = {50, 100, 200, 500};
        }
    }
    if (cfg.experiment == Experiment::amp_scan) {
        for (double lambda : cfg.axes[0].values) {
            if (lambda < kStaticCriticalRatio * cfg.model.hopping) {
                d.fail(grid ? grid[axis::disorder] : doc, "grid.disorder_strength",
                       "amplitude scan needs disorder_strength >= 2J");
            }
        }
        for (double a : cfg.axes[1].values) {
            if (a < 0.0) d.fail(grid ? grid[axis::amplitude] : doc, "grid.drive_amplitude", "amplitudes must be >= 0");
        }
    }
    if (cfg.experiment == Experiment::freq_scan) {
        for (const auto& ax : cfg.axes) {
            for (double v : ax.values) {
                if (!(v > 0.0)) d.fail(grid ? grid[ax.name] : doc, "grid." + ax.name, "values must be > 0");
            }
        }
    }
    if (cfg.experiment == Experiment::floquet_cell && !(cfg.model.drive_angular_frequency > 0.0)) {
        d.fail(doc["model"], "model.drive_angular_frequency", "floquet-cell needs a drive frequency > 0");
    }
    if ((cfg.experiment == Experiment::static_imbalance || cfg.experiment == Experiment::freq_scan ||
         cfg.experiment == Experiment::amp_scan || cfg.experiment == Experiment::floquet_cell) &&
        cfg.model.n_sites % 2 != 0) {
        d.fail(doc["model"], "model.n_sites", "imbalance experiments need an even number of sites");
    }

    if (grid && grid["phases"]) {
        const YAML::Node ph = grid["phases"];
        d.only_keys(ph, "grid.phases", {"count", "mode", "seed"});
        if (ph["count"]) cfg.phases.count = d.count(ph["count"], "grid.phases.count");
        if (ph["mode"]) {
            const auto mode = d.scalar<std::string>(ph["mode"], "grid.phases.mode");
            if (mode == "uniform") {
                cfg.phases.mode = PhaseMode::uniform;
            } else if (mode == "random") {
                cfg.phases.mode = PhaseMode::random;
            } else {
                d.fail(ph["mode"], "grid.phases.mode", "mode must be uniform or random");
            }
        }
        if (ph["seed"]) {
            cfg.phases.seed = d.scalar<std::uint64_t>(ph["seed"], "grid.phases.seed");
            if (cfg.phases.mode != PhaseMode::random) {
                d.fail(ph["seed"], "grid.phases.seed", "seed is only meaningful with mode: random");
            }
        }
        if (cfg.phases.count == 0) d.fail(ph, "grid.phases.count", "need at least one phase");
    }

    if (const YAML::Node in = doc["integrator"]) {
        d.only_keys(in, "integrator",
                    {"rel_tol", "abs_tol", "samples_per_period", "periods", "static_time", "static_samples"});
        auto& ic = cfg.integrator;
        if (in["rel_tol"]) ic.rel_tol = d.number(in["rel_tol"], "integrator.rel_tol");
        if (in["abs_tol"]) ic.abs_tol = d.number(in["abs_tol"], "integrator.abs_tol");
        if (in["samples_per_period"]) ic.samples_per_period = d.count(in["samples_per_period"], "integrator.samples_per_period");
        if (in["periods"]) ic.periods = d.count(in["periods"], "integrator.periods");
        if (in["static_time"]) ic.static_time = d.number(in["static_time"], "integrator.static_time");
        if (in["static_samples"]) ic.static_samples = d.count(in["static_samples"], "integrator.static_samples");
        if (!(ic.rel_tol > 0.0) || !(ic.abs_tol > 0.0)) d.fail(in, "integrator", "tolerances must be > 0");
        if (ic.samples_per_period == 0 || ic.periods == 0) d.fail(in, "integrator", "periods and samples must be > 0");
        if (ic.static_samples < 2 || !(ic.static_time > 0.0)) {
            d.fail(in, "integrator", "static window needs >= 2 samples and a positive length");
        }
    }

    if (const YAML::Node out = doc["output"]) {
        d.only_keys(out, "output", {"directory", "format", "heatmaps"});
        if (out["directory"]) cfg.output.directory = d.scalar<std::string>(out["directory"], "output.directory");
        if (out["format"]) cfg.output.format = d.scalar<std::string>(out["format"], "output.format");
        if (out["heatmaps"]) cfg.output.heatmaps = d.scalar<bool>(out["heatmaps"], "output.heatmaps");
        if (cfg.output.format != "csv") d.fail(out["format"], "output.format", "only csv is supported");
        if (cfg.output.directory.empty()) d.fail(out["directory"], "output.directory", "must not be empty");
    }

    if (doc["threads"]) {
        cfg.threads = d.count(doc["threads"], "threads");
        if (cfg.threads == 0) d.fail(doc["threads"], "threads", "need at least one thread");
    }

    if (provenance) *provenance = std::move(prov);
    return cfg;
}

RunConfig parse_config(const std::string& yaml_text, std::optional<Experiment> experiment, const Overrides& overrides,
                       const std::string& source) {
    YAML::Node doc;
    try {
        doc = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, "<document>", e.msg);
    }
    return resolve_config(doc, experiment, overrides, source);
}

std::string to_yaml(const RunConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "experiment" << YAML::Value << std::string(to_string(c.experiment));
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "n_sites" << YAML::Value << c.model.n_sites;
    out << YAML::Key << "hopping" << YAML::Value << c.model.hopping;
    out << YAML::Key << "disorder_strength" << YAML::Value << c.model.disorder_strength;
    out << YAML::Key << "incommensuration" << YAML::Value << c.model.incommensuration;
    out << YAML::Key << "phase" << YAML::Value << c.model.phase;
    out << YAML::Key << "drive_amplitude" << YAML::Value << c.model.drive_amplitude;
    out << YAML::Key << "drive_angular_frequency" << YAML::Value << c.model.drive_angular_frequency;
    out << YAML::EndMap;

    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    for (const auto& a : c.axes) {
        out << YAML::Key << a.name << YAML::Value << YAML::Flow << a.values;
    }
    if (!c.sizes.empty()) out << YAML::Key << "sizes" << YAML::Value << YAML::Flow << c.sizes;
    out << YAML::Key << "phases" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "count" << YAML::Value << c.phases.count;
    out << YAML::Key << "mode" << YAML::Value << (c.phases.mode == PhaseMode::uniform ? "uniform" : "random");
    if (c.phases.mode == PhaseMode::random) out << YAML::Key << "seed" << YAML::Value << c.phases.seed;
    out << YAML::EndMap;
    out << YAML::EndMap;

    out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rel_tol" << YAML::Value << c.integrator.rel_tol;
    out << YAML::Key << "abs_tol" << YAML::Value << c.integrator.abs_tol;
    out << YAML::Key << "samples_per_period" << YAML::Value << c.integrator.samples_per_period;
    out << YAML::Key << "periods" << YAML::Value << c.integrator.periods;
    out << YAML::Key << "static_time" << YAML::Value << c.integrator.static_time;
    out << YAML::Key << "static_samples" << YAML::Value << c.integrator.static_samples;
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directory" << YAML::Value << c.output.directory;
    out << YAML::Key << "format" << YAML::Value << c.output.format;
    out << YAML::Key << "heatmaps" << YAML::Value << c.output.heatmaps;
    out << YAML::EndMap;
    out << YAML::Key << "threads" << YAML::Value << c.threads;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace daa::cli
