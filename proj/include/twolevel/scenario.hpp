#pragma once

#include "twolevel/oracle.hpp"
#include "twolevel/pulse.hpp"
#include "twolevel/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace twolevel {

enum class Output {
    inversion,
    dipole,
    field,
    dipole_spectrum,
    field_spectrum,
    peaks,
    harmonics,
    phase_scan,
    convergence,
};

const char* to_string(Output o);
std::optional<Output> output_from_string(const std::string& s);

struct AnalysisConfig {
    SpectrumKind spectrum = SpectrumKind::dipole;
    double peak_threshold = 1e-3;
    int max_odd_harmonic = 21;
    bool operator==(const AnalysisConfig&) const = default;
};

struct PhaseScanConfig {
    int points = 32;
    double z_target = 2.0;
    double window = 0.1;
    SpectrumKind spectrum = SpectrumKind::field;
    bool operator==(const PhaseScanConfig&) const = default;
};

struct ConvergenceConfig {
    std::vector<int> k_list{1, 2, 10};
    bool include_swa = false;
    bool operator==(const ConvergenceConfig&) const = default;
};

/// Per-run override of the base pulse. `area` (sech only) sets x through the
/// envelope-area relation and wins over `x`.
struct Variant {
    std::string label;
    std::optional<double> x;
    std::optional<double> area;
    std::optional<double> y;
    std::optional<double> phi;
    bool operator==(const Variant&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    PulseSpec pulse;
    int k = 10;
    int samples_per_slice = 8;
    OracleConfig oracle;
    FrequencyGrid frequency_grid;
    std::vector<Output> outputs{Output::inversion};
    AnalysisConfig analysis;
    PhaseScanConfig phase_scan;
    ConvergenceConfig convergence;
    std::vector<Variant> variants;
    bool plots = false;
    std::filesystem::path output_dir = "out";

    /// Validates every field; throws ConfigError with a dotted field path.
    void validate() const;
    /// The pulse with a variant's overrides applied.
    PulseSpec resolve(const Variant& v) const;

    bool operator==(const ScenarioConfig&) const = default;
};

nlohmann::json to_json(const ScenarioConfig& c);
/// Strict parse: unknown keys and wrong types are ConfigErrors.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// Reads a JSON config file. Syntax errors are reported with line and column.
ScenarioConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);

struct OutputFile {
    std::filesystem::path path; // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunMetadata {
    nlohmann::json config;
    long long slice_count = 0;
    double wall_seconds = 0.0;
    std::string engine_version;
    std::vector<OutputFile> files;

    nlohmann::json to_json() const;
};

std::string engine_version();
std::string sha256_file(const std::filesystem::path& path);

/// Runs every requested output for every variant, writes CSV (and SVG when
/// `plots` is set) plus metadata.json into output_dir.
RunMetadata run(const ScenarioConfig& config);

} // namespace twolevel
