#include "twolevel/csv.hpp"
#include "twolevel/errors.hpp"
#include "twolevel/plot.hpp"
#include "twolevel/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kIoError = 4;

void report(const twolevel::RunMetadata& meta, const twolevel::ScenarioConfig& cfg) {
    std::cout << "wrote " << meta.files.size() << " files to " << cfg.output_dir.string() << " ("
              << meta.slice_count << " slices, " << meta.wall_seconds << " s)\n";
}

int plot_csv(const std::string& csv, bool log_y, std::string out) {
    const auto table = twolevel::read_csv(csv);
    if (table.header.size() < 2) throw twolevel::ConfigError("plot", csv + " needs at least two columns");
    std::size_t ycol = 1;
    // Spectrum tables carry re/im before the intensity column.
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == "intensity") ycol = i;
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        x.push_back(row[0]);
        y.push_back(row[ycol]);
    }
    twolevel::PlotStyle style;
    style.log_y = log_y;
    style.title = std::filesystem::path(csv).filename().string();
    style.x_label = table.header[0];
    style.y_label = table.header[ycol];
    if (out.empty()) out = std::filesystem::path(csv).replace_extension(".svg").string();
    std::ofstream f(out, std::ios::binary);
    f << twolevel::emit_plot(x, y, style);
    if (!f) throw std::runtime_error("cannot write " + out);
    std::cout << "wrote " << out << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level atom in a few-cycle pulse: slice propagator, spectra and analysis"};
    app.set_version_flag("--version", twolevel::engine_version());
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name, csv_path, plot_out;
    int points = 0;
    std::vector<int> k_list;
    bool log_y = false;

    auto* simulate = app.add_subcommand("simulate", "run a scenario config");
    simulate->add_option("--config", config_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "output directory (overrides output_dir)");

    auto* preset = app.add_subcommand("preset", "run a built-in scenario");
    preset->add_option("name", preset_name, "preset name")->required();
    preset->add_option("--out", out_dir, "output directory");
    auto* list = app.add_subcommand("presets", "list built-in scenarios");

    auto* scan = app.add_subcommand("phase-scan", "peak height against carrier phase");
    scan->add_option("--config", config_path, "scenario JSON file")->required();
    scan->add_option("--points", points, "phases in [0, 2pi)")->required()->check(CLI::PositiveNumber);
    scan->add_option("--out", out_dir, "output directory");

    auto* conv = app.add_subcommand("convergence", "compare slice counts with the reference integrator");
    conv->add_option("--config", config_path, "scenario JSON file")->required();
    conv->add_option("--k-list", k_list, "slices per half cycle")->required()->delimiter(',');
    conv->add_option("--out", out_dir, "output directory");

    auto* plot = app.add_subcommand("plot", "render a CSV file as SVG");
    plot->add_option("csv", csv_path, "input CSV")->required()->check(CLI::ExistingFile);
    plot->add_flag("--log-y", log_y, "logarithmic ordinate");
    plot->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*list) {
            for (const auto& n : twolevel::preset_names()) std::cout << n << '\n';
            return kOk;
        }
        if (*plot) return plot_csv(csv_path, log_y, plot_out);

        twolevel::ScenarioConfig cfg =
            *preset ? twolevel::preset(preset_name) : twolevel::load_config(config_path);
        if (*scan) {
            cfg.outputs = {twolevel::Output::phase_scan};
            cfg.phase_scan.points = points;
        } else if (*conv) {
            cfg.outputs = {twolevel::Output::convergence};
            cfg.convergence.k_list = k_list;
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        const auto meta = twolevel::run(cfg);
        report(meta, cfg);
        return kOk;
    } catch (const twolevel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const twolevel::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
}
