#include "twolevel/scenario.hpp"

#include "twolevel/csv.hpp"
#include "twolevel/errors.hpp"
#include "twolevel/plot.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#ifndef TWOLEVEL_VERSION
#define TWOLEVEL_VERSION "dev"
#endif

namespace twolevel {

using nlohmann::json;

namespace {

constexpr std::pair<Output, const char*> kOutputNames[] = {
    {Output::inversion, "inversion"},
    {Output::dipole, "dipole"},
    {Output::field, "field"},
    {Output::dipole_spectrum, "dipole_spectrum"},
    {Output::field_spectrum, "field_spectrum"},
    {Output::peaks, "peaks"},
    {Output::harmonics, "harmonics"},
    {Output::phase_scan, "phase_scan"},
    {Output::convergence, "convergence"},
};

const char* spectrum_name(SpectrumKind k) { return k == SpectrumKind::dipole ? "dipole" : "field"; }

// Typed, path-aware access to a JSON object. Every key read is recorded so
// leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key), "required key is missing");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v.get<bool>();
    }

    Reader object(const std::string& key) { return Reader(raw(key), field(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

SpectrumKind parse_spectrum_kind(Reader& r, const std::string& key, SpectrumKind fallback) {
    if (!r.has(key)) return fallback;
    const std::string s = r.string(key);
    if (s == "dipole") return SpectrumKind::dipole;
    if (s == "field") return SpectrumKind::field;
    throw ConfigError(r.field(key), "expected \"dipole\" or \"field\"");
}

json shape_to_json(const PulseShape& shape) {
    if (std::holds_alternative<BoxShape>(shape)) return {{"type", "box"}};
    if (const auto* s = std::get_if<SechShape>(&shape)) return {{"type", "sech"}, {"n_fwhm", s->n_fwhm}};
    if (const auto* s = std::get_if<SincShape>(&shape)) return {{"type", "sinc"}, {"n_fwhm", s->n_fwhm}};
    const auto& g = std::get<GaussianRampFlatShape>(shape);
    return {{"type", "gaussian_ramp_flat"}, {"ramp_cycles", g.ramp_cycles}};
}

PulseShape shape_from_json(Reader r) {
    const std::string type = r.string("type");
    PulseShape shape;
    if (type == "box") shape = BoxShape{};
    else if (type == "sech") shape = SechShape{r.number("n_fwhm")};
    else if (type == "sinc") shape = SincShape{r.number("n_fwhm")};
    else if (type == "gaussian_ramp_flat") shape = GaussianRampFlatShape{r.number("ramp_cycles", 10.0)};
    else throw ConfigError(r.field("type"), "unknown shape '" + type + "' (box, sech, sinc, gaussian_ramp_flat)");
    r.finish();
    return shape;
}

bool valid_label(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

} // namespace

const char* to_string(Output o) {
    for (const auto& [k, name] : kOutputNames)
        if (k == o) return name;
    return "?";
}

std::optional<Output> output_from_string(const std::string& s) {
    for (const auto& [k, name] : kOutputNames)
        if (s == name) return k;
    return std::nullopt;
}

PulseSpec ScenarioConfig::resolve(const Variant& v) const {
    PulseSpec p = pulse;
    if (v.x) p.x = *v.x;
    if (v.y) p.y = *v.y;
    if (v.phi) p.phi = *v.phi;
    if (v.area) {
        const auto* sech = std::get_if<SechShape>(&pulse.shape);
        if (!sech) throw ConfigError("variants." + v.label + ".area", "an envelope area needs a sech pulse");
        p.x = area_to_strength(*v.area, sech->n_fwhm);
    }
    return p;
}

void ScenarioConfig::validate() const {
    pulse.validate();
    if (k < 1) throw ConfigError("grid.k", "must be >= 1");
    if (samples_per_slice < 1) throw ConfigError("grid.samples_per_slice", "must be >= 1");
    oracle.validate();
    if (outputs.empty()) throw ConfigError("outputs", "at least one output is required");
    std::set<Output> unique(outputs.begin(), outputs.end());
    if (unique.size() != outputs.size()) throw ConfigError("outputs", "duplicate entry");

    auto wants = [&](Output o) { return unique.count(o) > 0; };
    if (wants(Output::dipole_spectrum) || wants(Output::field_spectrum) || wants(Output::peaks) ||
        wants(Output::harmonics) || wants(Output::phase_scan))
        frequency_grid.validate();
    if (!(analysis.peak_threshold > 0.0 && analysis.peak_threshold < 1.0))
        throw ConfigError("analysis.peak_threshold", "must lie in (0, 1)");
    if (analysis.max_odd_harmonic < 3 || analysis.max_odd_harmonic % 2 == 0)
        throw ConfigError("analysis.max_odd_harmonic", "must be an odd integer >= 3");
    if (wants(Output::harmonics) && frequency_grid.z_max < analysis.max_odd_harmonic)
        throw ConfigError("frequency_grid.z_max", "must reach analysis.max_odd_harmonic");
    if (phase_scan.points < 1) throw ConfigError("phase_scan.points", "must be >= 1");
    if (!(phase_scan.window > 0.0)) throw ConfigError("phase_scan.window", "must be positive");
    if (!std::isfinite(phase_scan.z_target)) throw ConfigError("phase_scan.z_target", "must be finite");
    if (convergence.k_list.empty()) throw ConfigError("convergence.k_list", "must not be empty");
    for (int kk : convergence.k_list)
        if (kk < 1) throw ConfigError("convergence.k_list", "entries must be >= 1");
    if (convergence.include_swa && wants(Output::convergence) && !std::holds_alternative<BoxShape>(pulse.shape))
        throw ConfigError("convergence.include_swa", "square-wave comparison needs a box pulse");

    std::set<std::string> labels;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const Variant& v = variants[i];
        const std::string where = "variants[" + std::to_string(i) + "]";
        if (!valid_label(v.label)) throw ConfigError(where + ".label", "must be non-empty [A-Za-z0-9_.-]");
        if (!labels.insert(v.label).second) throw ConfigError(where + ".label", "duplicate label");
        try {
            resolve(v).validate();
        } catch (const ConfigError& e) {
            throw ConfigError(where, e.what());
        }
    }
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

json to_json(const ScenarioConfig& c) {
    json outputs = json::array();
    for (Output o : c.outputs) outputs.push_back(to_string(o));
    json variants = json::array();
    for (const Variant& v : c.variants) {
        json jv{{"label", v.label}};
        if (v.x) jv["x"] = *v.x;
        if (v.area) jv["area"] = *v.area;
        if (v.y) jv["y"] = *v.y;
        if (v.phi) jv["phi"] = *v.phi;
        variants.push_back(jv);
    }
    return {
        {"name", c.name},
        {"pulse",
         {{"shape", shape_to_json(c.pulse.shape)},
          {"n_cycles", c.pulse.n_cycles},
          {"x", c.pulse.x},
          {"y", c.pulse.y},
          {"phi", c.pulse.phi}}},
        {"grid", {{"k", c.k}, {"samples_per_slice", c.samples_per_slice}}},
        {"oracle",
         {{"steps_per_cycle", c.oracle.steps_per_cycle},
          {"gauge", c.oracle.gauge == Gauge::symmetric ? "symmetric" : "ground_at_zero"}}},
        {"frequency_grid",
         {{"z_min", c.frequency_grid.z_min}, {"z_max", c.frequency_grid.z_max}, {"dz", c.frequency_grid.dz}}},
        {"outputs", outputs},
        {"analysis",
         {{"spectrum", spectrum_name(c.analysis.spectrum)},
          {"peak_threshold", c.analysis.peak_threshold},
          {"max_odd_harmonic", c.analysis.max_odd_harmonic}}},
        {"phase_scan",
         {{"points", c.phase_scan.points},
          {"z_target", c.phase_scan.z_target},
          {"window", c.phase_scan.window},
          {"spectrum", spectrum_name(c.phase_scan.spectrum)}}},
        {"convergence", {{"k_list", c.convergence.k_list}, {"include_swa", c.convergence.include_swa}}},
        {"variants", variants},
        {"plots", c.plots},
        {"output_dir", c.output_dir.generic_string()},
    };
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    Reader root(j, "");
    c.name = root.string("name", c.name);

    {
        Reader p = root.object("pulse");
        c.pulse.shape = shape_from_json(p.object("shape"));
        if (p.has("n_cycles")) {
            c.pulse.n_cycles = p.number("n_cycles");
        } else if (c.pulse.centered()) {
            c.pulse.n_cycles = default_window_cycles(c.pulse.shape);
        } else {
            throw ConfigError("pulse.n_cycles", "required for box and ramp pulses");
        }
        c.pulse.x = p.number("x");
        c.pulse.y = p.number("y");
        c.pulse.phi = p.number("phi", 0.0);
        p.finish();
    }
    if (root.has("grid")) {
        Reader g = root.object("grid");
        c.k = g.integer("k", c.k);
        c.samples_per_slice = g.integer("samples_per_slice", c.samples_per_slice);
        g.finish();
    }
    if (root.has("oracle")) {
        Reader o = root.object("oracle");
        c.oracle.steps_per_cycle = o.integer("steps_per_cycle", c.oracle.steps_per_cycle);
        const std::string gauge = o.string("gauge", "symmetric");
        if (gauge == "symmetric") c.oracle.gauge = Gauge::symmetric;
        else if (gauge == "ground_at_zero") c.oracle.gauge = Gauge::ground_at_zero;
        else throw ConfigError("oracle.gauge", "expected \"symmetric\" or \"ground_at_zero\"");
        o.finish();
    }
    if (root.has("frequency_grid")) {
        Reader f = root.object("frequency_grid");
        c.frequency_grid.z_min = f.number("z_min", c.frequency_grid.z_min);
        c.frequency_grid.z_max = f.number("z_max", c.frequency_grid.z_max);
        c.frequency_grid.dz = f.number("dz", c.frequency_grid.dz);
        f.finish();
    }
    if (root.has("outputs")) {
        const json& arr = root.raw("outputs");
        if (!arr.is_array()) throw ConfigError("outputs", "expected an array of names");
        c.outputs.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "outputs[" + std::to_string(i) + "]";
            if (!arr[i].is_string()) throw ConfigError(where, "expected a string");
            auto o = output_from_string(arr[i].get<std::string>());
            if (!o) throw ConfigError(where, "unknown output '" + arr[i].get<std::string>() + "'");
            c.outputs.push_back(*o);
        }
    }
    if (root.has("analysis")) {
        Reader a = root.object("analysis");
        c.analysis.spectrum = parse_spectrum_kind(a, "spectrum", c.analysis.spectrum);
        c.analysis.peak_threshold = a.number("peak_threshold", c.analysis.peak_threshold);
        c.analysis.max_odd_harmonic = a.integer("max_odd_harmonic", c.analysis.max_odd_harmonic);
        a.finish();
    }
    if (root.has("phase_scan")) {
        Reader s = root.object("phase_scan");
        c.phase_scan.points = s.integer("points", c.phase_scan.points);
        c.phase_scan.z_target = s.number("z_target", c.phase_scan.z_target);
        c.phase_scan.window = s.number("window", c.phase_scan.window);
        c.phase_scan.spectrum = parse_spectrum_kind(s, "spectrum", c.phase_scan.spectrum);
        s.finish();
    }
    if (root.has("convergence")) {
        Reader s = root.object("convergence");
        if (s.has("k_list")) {
            const json& arr = s.raw("k_list");
            if (!arr.is_array()) throw ConfigError("convergence.k_list", "expected an array of integers");
            c.convergence.k_list.clear();
            for (const json& e : arr) {
                if (!e.is_number_integer()) throw ConfigError("convergence.k_list", "expected integers");
                c.convergence.k_list.push_back(e.get<int>());
            }
        }
        c.convergence.include_swa = s.boolean("include_swa", c.convergence.include_swa);
        s.finish();
    }
    if (root.has("variants")) {
        const json& arr = root.raw("variants");
        if (!arr.is_array()) throw ConfigError("variants", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader v(arr[i], "variants[" + std::to_string(i) + "]");
            Variant var;
            var.label = v.string("label");
            if (v.has("x")) var.x = v.number("x");
            if (v.has("area")) var.area = v.number("area");
            if (v.has("y")) var.y = v.number("y");
            if (v.has("phi")) var.phi = v.number("phi");
            v.finish();
            c.variants.push_back(std::move(var));
        }
    }
    c.plots = root.boolean("plots", c.plots);
    c.output_dir = root.string("output_dir", c.output_dir.generic_string());
    root.finish();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1",  "fig2a", "fig2b", "fig3",  "fig4a", "fig4b",
                                                "fig5",  "fig6",  "fig7a", "fig7b", "fig7c"};
    return names;
}

ScenarioConfig preset(const std::string& name) {
    constexpr double cos_carrier = pi / 2.0;
    ScenarioConfig c;
    c.name = name;
    c.k = 100;
    c.plots = true;
    c.output_dir = std::filesystem::path("out") / name;

    auto box_cos = [&](double y, double x) {
        c.pulse = PulseSpec{BoxShape{}, 30.0, x, y, cos_carrier};
    };
    auto sech = [&](double n_fwhm, double y, double x, double phi) {
        c.pulse = PulseSpec{SechShape{n_fwhm}, 0.0, x, y, phi};
        c.pulse.n_cycles = default_window_cycles(c.pulse.shape);
    };

    if (name == "fig1") {
        c.pulse = PulseSpec{BoxShape{}, 2.0, 1.0, 1.0, 0.0};
        c.k = 10;
        c.outputs = {Output::inversion, Output::convergence};
        c.convergence = {{1, 2, 10}, true};
    } else if (name == "fig2a") {
        c.pulse = PulseSpec{GaussianRampFlatShape{10.0}, 30.0, 1.86, 1.1, cos_carrier};
        c.outputs = {Output::dipole_spectrum, Output::peaks};
        c.frequency_grid = {0.0, 8.0, 1e-3};
        c.analysis.peak_threshold = 1e-6;
    } else if (name == "fig2b") {
        box_cos(0.445, 1.9);
        c.outputs = {Output::dipole_spectrum, Output::peaks};
        c.frequency_grid = {0.0, 8.0, 1e-3};
        c.analysis.peak_threshold = 1e-6;
    } else if (name == "fig3") {
        box_cos(0.1, 14.5);
        c.outputs = {Output::dipole_spectrum, Output::harmonics};
        c.frequency_grid = {0.0, 30.0, 1e-3};
        c.analysis.max_odd_harmonic = 29;
        c.variants = {{"x14.5", 14.5, {}, {}, {}}, {"x15", 15.0, {}, {}, {}}};
    } else if (name == "fig4a") {
        box_cos(0.625, 1.25);
        c.outputs = {Output::dipole_spectrum, Output::peaks};
        c.frequency_grid = {0.0, 5.0, 1e-3};
    } else if (name == "fig4b") {
        box_cos(0.589, 1.178);
        c.outputs = {Output::dipole_spectrum, Output::peaks};
        c.frequency_grid = {0.0, 5.0, 1e-3};
    } else if (name == "fig5") {
        // Third-harmonic doublet formation: resonant sech cos-pulse, areas 2pi..10pi.
        sech(1.71, 1.0, 1.0, cos_carrier);
        c.outputs = {Output::field_spectrum, Output::peaks};
        c.analysis.spectrum = SpectrumKind::field;
        c.frequency_grid = {2.0, 4.0, 1e-3};
        for (int a : {2, 4, 6, 8, 10}) c.variants.push_back({"A" + std::to_string(a) + "pi", {}, a * pi, {}, {}});
    } else if (name == "fig6") {
        sech(1.72, 1.0, 1.0, 0.0);
        c.outputs = {Output::inversion};
        for (int a : {6, 8, 10, 12, 14}) {
            c.variants.push_back({"A" + std::to_string(a) + "pi_sin", {}, a * pi, {}, 0.0});
            c.variants.push_back({"A" + std::to_string(a) + "pi_cos", {}, a * pi, {}, cos_carrier});
        }
    } else if (name == "fig7a") {
        sech(1.72, 1.0, 1.31, 0.0);
        c.outputs = {Output::field_spectrum, Output::peaks};
        c.analysis.spectrum = SpectrumKind::field;
        c.frequency_grid = {0.0, 6.0, 1e-3};
    } else if (name == "fig7b" || name == "fig7c") {
        sech(1.72, 1.0, 1.31, 0.0);
        c.outputs = {Output::phase_scan};
        const double target = name == "fig7b" ? 2.0 : 1.5;
        c.phase_scan = {32, target, 0.1, SpectrumKind::field};
        c.frequency_grid = {target - 0.2, target + 0.2, 1e-3};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
    }
    c.validate();
    return c;
}

json RunMetadata::to_json() const {
    json files_json = json::array();
    for (const auto& f : files)
        files_json.push_back({{"path", f.path.generic_string()}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return {{"engine_version", engine_version},
            {"config", config},
            {"slice_count", slice_count},
            {"wall_seconds", wall_seconds},
            {"files", files_json}};
}

std::string engine_version() { return TWOLEVEL_VERSION; }

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 initialisation failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

namespace {

void require_finite(std::span<const double> values, const std::string& what) {
    for (double v : values)
        if (!std::isfinite(v)) throw NumericalError("non-finite value in " + what);
}

class RunWriter {
public:
    RunWriter(const ScenarioConfig& config) : config_(config) {}

    void table(const std::string& stem, const CsvTable& t) {
        for (const auto& row : t.rows) require_finite(row, stem);
        write_csv(config_.output_dir / (stem + ".csv"), t);
        written_.push_back(stem + ".csv");
    }

    void series(const std::string& stem, const TimeSeries& s, const std::string& title) {
        table(stem, to_table(s));
        if (config_.plots) svg(stem, emit_plot(s, PlotStyle{false, title, {}, {}}));
    }

    void spectrum(const std::string& stem, const SpectrumSeries& s, const std::string& title) {
        table(stem, to_table(s));
        if (config_.plots && std::any_of(s.intensity.begin(), s.intensity.end(), [](double v) { return v > 0.0; }))
            svg(stem, emit_plot(s, PlotStyle{true, title, {}, "|amplitude|^2"}));
    }

    std::vector<OutputFile> manifest() const {
        std::vector<OutputFile> files;
        for (const auto& name : written_) {
            const auto full = config_.output_dir / name;
            files.push_back({name, sha256_file(full), std::filesystem::file_size(full)});
        }
        std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        return files;
    }

private:
    void svg(const std::string& stem, const std::string& doc) {
        std::ofstream out(config_.output_dir / (stem + ".svg"), std::ios::binary);
        out << doc;
        if (!out) throw std::runtime_error("cannot write " + stem + ".svg");
        written_.push_back(stem + ".svg");
    }

    const ScenarioConfig& config_;
    std::vector<std::string> written_;
};

} // namespace

RunMetadata run(const ScenarioConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.output_dir);

    auto wants = [&](Output o) { return std::find(config.outputs.begin(), config.outputs.end(), o) != config.outputs.end(); };

    RunWriter writer(config);
    RunMetadata meta;
    meta.config = to_json(config);
    meta.engine_version = engine_version();

    std::vector<Variant> variants = config.variants;
    if (variants.empty()) variants.push_back({});

    for (const Variant& v : variants) {
        const PulseSpec spec = config.resolve(v);
        const std::string suffix = v.label.empty() ? "" : "_" + v.label;
        const std::string title = config.name + (v.label.empty() ? "" : " " + v.label);
        const SliceGrid grid(config.k, spec.n_cycles);
        const auto states = propagate(spec, grid);
        meta.slice_count += grid.slice_count();
        for (const auto& s : states)
            if (!std::isfinite(s.norm())) throw NumericalError("non-finite amplitude in " + title);

        if (wants(Output::inversion))
            writer.series("inversion" + suffix, inversion_series(states, spec, grid, config.samples_per_slice), title);
        if (wants(Output::dipole))
            writer.series("dipole" + suffix, dipole_series(states, spec, grid, config.samples_per_slice), title);
        if (wants(Output::field))
            writer.series("field" + suffix, emitted_field_series(states, spec, grid, config.samples_per_slice), title);

        std::map<SpectrumKind, SpectrumSeries> spectra;
        auto spectrum_of = [&](SpectrumKind kind) -> const SpectrumSeries& {
            auto it = spectra.find(kind);
            if (it == spectra.end()) {
                auto sp = kind == SpectrumKind::dipole ? dipole_spectrum(states, spec, grid, config.frequency_grid)
                                                       : field_spectrum(states, spec, grid, config.frequency_grid);
                it = spectra.emplace(kind, std::move(sp)).first;
            }
            return it->second;
        };
        if (wants(Output::dipole_spectrum))
            writer.spectrum("dipole_spectrum" + suffix, spectrum_of(SpectrumKind::dipole), title);
        if (wants(Output::field_spectrum))
            writer.spectrum("field_spectrum" + suffix, spectrum_of(SpectrumKind::field), title);
        if (wants(Output::peaks)) {
            CsvTable t{{"z", "height"}, {}};
            for (const Peak& p : find_peaks(spectrum_of(config.analysis.spectrum), config.analysis.peak_threshold))
                t.rows.push_back({p.z, p.height});
            writer.table("peaks" + suffix, t);
        }
        if (wants(Output::harmonics)) {
            std::vector<HarmonicHeight> heights;
            try {
                heights = harmonic_heights(spectrum_of(config.analysis.spectrum), config.analysis.max_odd_harmonic);
            } catch (const std::runtime_error& e) {
                throw NumericalError(title + ": " + e.what());
            }
            CsvTable t{{"n", "height"}, {}};
            for (const auto& h : heights) t.rows.push_back({static_cast<double>(h.order), h.height});
            writer.table("harmonics" + suffix, t);
        }
        if (wants(Output::phase_scan)) {
            std::vector<double> phis;
            for (int i = 0; i < config.phase_scan.points; ++i) phis.push_back(2.0 * pi * i / config.phase_scan.points);
            const auto heights = twolevel::phase_scan(spec, config.k, phis, config.frequency_grid,
                                                      config.phase_scan.z_target, config.phase_scan.window,
                                                      config.phase_scan.spectrum);
            CsvTable t{{"phi", "height"}, {}};
            for (std::size_t i = 0; i < phis.size(); ++i) t.rows.push_back({phis[i], heights[i]});
            writer.table("phase_scan" + suffix, t);
        }
        if (wants(Output::convergence)) {
            const auto reference = integrate_amplitudes(spec, config.oracle);
            writer.series("inversion_oracle" + suffix, reference.inversion, title + " oracle");
            CsvTable t{{"k", "swa", "max_abs_error", "rms_error"}, {}};
            for (int kk : config.convergence.k_list) {
                const SliceGrid g(kk, spec.n_cycles);
                const auto w = inversion_series(propagate(spec, g), spec, g, config.samples_per_slice);
                const auto err = compare_series(w, reference.inversion);
                writer.series("inversion_k" + std::to_string(kk) + suffix, w, title + " K=" + std::to_string(kk));
                t.rows.push_back({static_cast<double>(kk), 0.0, err.max_abs, err.rms});
            }
            if (config.convergence.include_swa) {
                const auto swa = swa_grid(spec);
                // One slice per half cycle; sample it as finely as K=10 would.
                const auto w = inversion_series(propagate(swa.spec, swa.grid), swa.spec, swa.grid,
                                                10 * config.samples_per_slice);
                const auto err = compare_series(w, reference.inversion);
                writer.series("inversion_swa" + suffix, w, title + " square-wave");
                t.rows.push_back({1.0, 1.0, err.max_abs, err.rms});
            }
            writer.table("convergence" + suffix, t);
        }
    }

    meta.files = writer.manifest();
    meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream out(config.output_dir / "metadata.json");
    out << std::setw(2) << meta.to_json() << '\n';
    if (!out) throw std::runtime_error("cannot write metadata.json");
    return meta;
}

} // namespace twolevel
