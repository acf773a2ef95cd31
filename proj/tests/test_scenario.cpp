#include "twolevel/csv.hpp"
#include "twolevel/errors.hpp"
#include "twolevel/plot.hpp"
#include "twolevel/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

using namespace twolevel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "twolevel_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json minimal() {
    return json::parse(R"({"pulse": {"shape": {"type": "box"}, "n_cycles": 2, "x": 0, "y": 1},
                           "outputs": ["inversion"]})");
}

std::string error_field(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("output names round-trip") {
    for (const char* name : {"inversion", "dipole", "field", "dipole_spectrum", "field_spectrum", "peaks",
                             "harmonics", "phase_scan", "convergence"}) {
        const auto o = output_from_string(name);
        REQUIRE(o);
        CHECK(std::string(to_string(*o)) == name);
    }
    CHECK_FALSE(output_from_string("spectrum"));
}

TEST_CASE("every preset survives serialize and parse unchanged") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const ScenarioConfig c = preset(name);
        const ScenarioConfig back = config_from_json(json::parse(to_json(c).dump()));
        CHECK(back == c);
        CHECK(to_json(back).dump() == to_json(c).dump());
    }
}

TEST_CASE("preset parameters") {
    const auto b = preset("fig2b");
    CHECK(std::holds_alternative<BoxShape>(b.pulse.shape));
    CHECK(b.pulse.phi == doctest::Approx(pi / 2));
    CHECK(b.pulse.y == 0.445);
    CHECK(b.pulse.x == 1.9);
    CHECK(b.pulse.n_cycles == 30.0);
    CHECK(b.k == 100);

    const auto f4 = preset("fig4b");
    CHECK(f4.pulse.y == 0.589);
    CHECK(f4.pulse.x == 1.178);
    CHECK(f4.pulse.n_cycles == 30.0);
    CHECK(f4.k == 100);

    const auto a = preset("fig2a");
    CHECK(std::get<GaussianRampFlatShape>(a.pulse.shape).ramp_cycles == 10.0);

    const auto f6 = preset("fig6");
    CHECK(std::get<SechShape>(f6.pulse.shape).n_fwhm == 1.72);
    CHECK(f6.pulse.y == 1.0);
    REQUIRE(f6.variants.size() == 10);
    std::set<std::pair<double, double>> seen;
    for (const auto& v : f6.variants) {
        REQUIRE(v.area);
        REQUIRE(v.phi);
        seen.insert({std::round(*v.area / pi), *v.phi});
    }
    for (int a6 : {6, 8, 10, 12, 14})
        for (double phi : {0.0, pi / 2}) CHECK(seen.count({double(a6), phi}) == 1);
    CHECK(f6.resolve(f6.variants[2]).x == doctest::Approx(area_to_strength(8 * pi, 1.72)));

    const auto f1 = preset("fig1");
    CHECK(f1.k == 10);
    CHECK(f1.convergence.k_list == std::vector<int>{1, 2, 10});

    CHECK(preset("fig7b").phase_scan.points == 32);
    CHECK(preset("fig7c").phase_scan.z_target == 1.5);
    CHECK(preset("fig3").frequency_grid.z_max == 30.0);
    CHECK_THROWS_AS(preset("fig8"), ConfigError);
}

TEST_CASE("config parsing fills defaults") {
    const auto c = config_from_json(minimal());
    CHECK(c.k == 10);
    CHECK(c.samples_per_slice == 8);
    CHECK(c.oracle == OracleConfig{});
    CHECK(c.frequency_grid == FrequencyGrid{});
    CHECK(c.pulse.phi == 0.0);

    auto sech = json::parse(R"({"pulse": {"shape": {"type": "sech", "n_fwhm": 1.72}, "x": 1, "y": 1}})");
    CHECK(config_from_json(sech).pulse.n_cycles == 20.0);
}

TEST_CASE("config errors name the field") {
    auto j = minimal();
    j["bogus"] = 1;
    CHECK(error_field(j) == "bogus");

    j = minimal();
    j["pulse"]["y"] = -1;
    CHECK(error_field(j) == "pulse.y");

    j = minimal();
    j["pulse"]["x"] = "one";
    CHECK(error_field(j) == "pulse.x");

    j = minimal();
    j["pulse"].erase("n_cycles");
    CHECK(error_field(j) == "pulse.n_cycles");

    j = minimal();
    j["pulse"]["shape"]["type"] = "triangle";
    CHECK(error_field(j) == "pulse.shape.type");

    j = minimal();
    j["grid"] = {{"k", 0}};
    CHECK(error_field(j) == "grid.k");

    j = minimal();
    j["grid"] = {{"k", 2.5}};
    CHECK(error_field(j) == "grid.k");

    j = minimal();
    j["outputs"] = {"inversion", "sparkles"};
    CHECK(error_field(j) == "outputs[1]");

    j = minimal();
    j["outputs"] = {"inversion", "inversion"};
    CHECK(error_field(j) == "outputs");

    j = minimal();
    j["outputs"] = {"dipole_spectrum"};
    j["frequency_grid"] = {{"dz", 0.3}};
    CHECK(error_field(j) == "frequency_grid.dz");

    j = minimal();
    j["oracle"] = {{"steps_per_cycle", 50}};
    CHECK(error_field(j) == "oracle.steps_per_cycle");

    j = minimal();
    j["variants"] = {{{"label", "a"}, {"area", 6.0}}};
    CHECK(error_field(j) == "variants[0]");

    j = minimal();
    j["variants"] = {{{"label", "a"}}, {{"label", "a"}}};
    CHECK(error_field(j) == "variants[1].label");

    j = minimal();
    j["variants"] = {{{"label", "a b"}}};
    CHECK(error_field(j) == "variants[0].label");

    j = minimal();
    j["outputs"] = {"convergence"};
    j["convergence"] = {{"k_list", json::array()}};
    CHECK(error_field(j) == "convergence.k_list");

    j = minimal();
    j["outputs"] = {"harmonics"};
    CHECK(error_field(j) == "frequency_grid.z_max");

    j = minimal();
    j["analysis"] = {{"peak_threshold", 1.5}};
    CHECK(error_field(j) == "analysis.peak_threshold");

    CHECK(error_field(json::array()) == "<root>");
    CHECK(error_field(json::object()) == "pulse");
}

TEST_CASE("load_config reports parse positions") {
    const auto dir = scratch("load");
    std::ofstream(dir / "bad.json") << "{\n  \"pulse\": {\n    \"x\": 1,\n  }\n}\n";
    try {
        load_config(dir / "bad.json");
        FAIL("accepted malformed JSON");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);

    std::ofstream(dir / "good.json") << minimal().dump(2);
    CHECK(load_config(dir / "good.json").pulse.n_cycles == 2.0);
}

TEST_CASE("run: zero field writes a constant ground-state inversion") {
    auto c = config_from_json(minimal());
    c.output_dir = scratch("zero");
    const auto meta = run(c);
    REQUIRE(meta.files.size() == 1);
    CHECK(meta.slice_count == 40);
    const auto t = read_csv(c.output_dir / "inversion.csv");
    CHECK(t.header == std::vector<std::string>{"tau", "w"});
    CHECK(t.rows.size() == 321);
    for (const auto& row : t.rows) CHECK(row[1] == -1.0);
}

TEST_CASE("run: metadata manifest matches the files") {
    auto c = preset("fig1");
    c.output_dir = scratch("fig1");
    const auto meta = run(c);
    const auto j = json::parse(slurp(c.output_dir / "metadata.json"));
    CHECK(j["engine_version"] == engine_version());
    CHECK(j["slice_count"] == 40);
    CHECK(config_from_json(j["config"]) == c);
    REQUIRE(j["files"].size() == meta.files.size());
    std::set<std::string> names;
    for (const auto& f : j["files"]) {
        const auto path = c.output_dir / f["path"].get<std::string>();
        REQUIRE(fs::exists(path));
        CHECK(sha256_file(path) == f["sha256"]);
        CHECK(fs::file_size(path) == f["bytes"]);
        names.insert(f["path"]);
        if (path.extension() == ".csv") CHECK_NOTHROW(read_csv(path));
    }
    for (const char* n : {"inversion_k1.csv", "inversion_k2.csv", "inversion_k10.csv", "inversion_oracle.csv",
                          "inversion_swa.csv", "convergence.csv"})
        CHECK(names.count(n) == 1);

    const auto conv = read_csv(c.output_dir / "convergence.csv");
    CHECK(conv.header == std::vector<std::string>{"k", "swa", "max_abs_error", "rms_error"});
    REQUIRE(conv.rows.size() == 4);
    CHECK(conv.rows[0][2] > conv.rows[1][2]);
    CHECK(conv.rows[1][2] > conv.rows[2][2]);
    CHECK(conv.rows[3][1] == 1.0);
}

TEST_CASE("run: identical configs give byte-identical outputs") {
    auto c = preset("fig4a");
    c.frequency_grid = {1.5, 2.5, 1e-3};
    c.output_dir = scratch("det_a");
    const auto a = run(c);
    c.output_dir = scratch("det_b");
    const auto b = run(c);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].path == b.files[i].path);
        CHECK(a.files[i].sha256 == b.files[i].sha256);
    }
}

TEST_CASE("run: phase scan table") {
    auto c = preset("fig7b");
    c.output_dir = scratch("scan");
    run(c);
    const auto t = read_csv(c.output_dir / "phase_scan.csv");
    CHECK(t.header == std::vector<std::string>{"phi", "height"});
    REQUIRE(t.rows.size() == 32);
    double top = 0.0;
    for (const auto& r : t.rows) top = std::max(top, r[1]);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(t.rows[i][1] - t.rows[i + 16][1]) / top < 0.05);
}

TEST_CASE("run: variants get labelled files") {
    auto c = config_from_json(minimal());
    c.pulse.x = 0.5;
    c.outputs = {Output::dipole, Output::field_spectrum, Output::peaks};
    c.frequency_grid = {0.0, 4.0, 0.01};
    c.variants = {{"weak", 0.1, {}, {}, {}}, {"strong", 2.0, {}, {}, {}}};
    c.plots = true;
    c.output_dir = scratch("variants");
    run(c);
    for (const char* f : {"dipole_weak.csv", "dipole_strong.csv", "field_spectrum_weak.csv", "field_spectrum_weak.svg",
                          "peaks_strong.csv", "dipole_strong.svg", "metadata.json"})
        CHECK(fs::exists(c.output_dir / f));
    CHECK_FALSE(fs::exists(c.output_dir / "dipole.csv"));
    const auto spec = read_csv(c.output_dir / "field_spectrum_weak.csv");
    CHECK(spec.header == std::vector<std::string>{"z", "re", "im", "intensity"});
}

TEST_CASE("run: numerical guard raises NumericalError") {
    auto c = config_from_json(minimal());
    c.pulse.x = 20.0;
    c.oracle.steps_per_cycle = 100;
    c.outputs = {Output::convergence};
    c.output_dir = scratch("guard");
    CHECK_THROWS_AS(run(c), NumericalError);
}

TEST_CASE("csv formatting and parsing") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-1.0) == "-1");
    for (double v : {pi, 1e-300, -2.5e17, 0.0})
        CHECK(std::stod(format_number(v)) == v);

    const auto dir = scratch("csv");
    CsvTable t{{"a", "b"}, {{1.0, 2.5}, {pi, -0.0}}};
    write_csv(dir / "t.csv", t);
    CHECK(slurp(dir / "t.csv") == "a,b\n1,2.5\n3.1415926535897931,-0\n");
    const auto back = read_csv(dir / "t.csv");
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("b") == 1);
    CHECK_THROWS_AS(back.column("c"), std::out_of_range);

    std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3,x\n";
    try {
        read_csv(dir / "bad.csv");
        FAIL("accepted a bad number");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    std::ofstream(dir / "short.csv") << "a,b\n1\n";
    CHECK_THROWS(read_csv(dir / "short.csv"));
    CHECK(std::string(value_column(SeriesKind::emitted_field)) == "eps");
}

TEST_CASE("svg plots") {
    const std::vector<double> x{0.0, 1.0}, y{0.0, 1.0};
    const auto svg = emit_plot(x, y, PlotStyle{});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    const auto start = svg.find("class=\"trace\"");
    REQUIRE(start != std::string::npos);
    const auto d0 = svg.find("d=\"", start) + 3;
    const std::string path = svg.substr(d0, svg.find('"', d0) - d0);
    CHECK(std::count(path.begin(), path.end(), 'M') == 1);
    CHECK(std::count(path.begin(), path.end(), 'L') == 1);
    CHECK(svg.find("class=\"trace\"", start + 1) == std::string::npos);

    CHECK(emit_plot(x, y, PlotStyle{}) == svg);
    CHECK_THROWS_AS(emit_plot(std::vector<double>{}, std::vector<double>{}, PlotStyle{}), std::invalid_argument);
    CHECK_THROWS_AS(emit_plot(x, std::vector<double>{1.0}, PlotStyle{}), std::invalid_argument);

    PlotStyle log;
    log.log_y = true;
    CHECK_NOTHROW(emit_plot(x, std::vector<double>{1e-3, 10.0}, log));

    TimeSeries s{{0.0, 2 * pi}, {-1.0, 1.0}, SeriesKind::inversion};
    const auto ts = emit_plot(s, PlotStyle{});
    CHECK(ts.find("cycles") != std::string::npos);
}
