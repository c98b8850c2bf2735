#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

using namespace dynpolar;
using namespace dynpolar::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dynpolar_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    double at(std::size_t row, const std::string& col) const {
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (columns[j] == col) return rows.at(row)[j];
        FAIL("no column " << col);
        return 0.0;
    }
};

Csv read_csv(const fs::path& p) {
    Csv c;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, c.comment);
    std::getline(in, line);
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) c.columns.push_back(cell);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::stod(cell));
        c.rows.push_back(row);
    }
    return c;
}

int run(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "dynpolar");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

// report.txt is the printed report behind a "# config:" line.
std::string report_body(const fs::path& dir) {
    const std::string text = slurp(dir / "report.txt");
    CHECK(text.rfind("# config: ", 0) == 0);
    return text.substr(text.find('\n') + 1);
}

RunConfig config_from(const std::string& text) {
    LineMap lines;
    return build_config(with_defaults(parse_with_lines(text, lines)), lines);
}

std::string config_error(const std::string& text) {
    try {
        config_from(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config validation") {
    const RunConfig ok = config_from(R"({"field": {"kind": "planar_shear", "k": 2}, "x0": [0, 1], "t_end": 1})");
    CHECK(ok.field.k == 2.0);
    CHECK(ok.steps == 1000);
    CHECK(ok.sampler.resolution == std::vector<int>{16, 16});
    CHECK(ok.frame.kind == "planar_spin");

    const std::string unknown = config_error("{\n  \"field\": {\"kind\": \"planar_shear\"},\n  \"x0\": [0, 1],\n"
                                             "  \"t_end\": 1,\n  \"stepz\": 10\n}");
    CHECK(unknown.find("line 5") != std::string::npos);
    CHECK(unknown.find("stepz") != std::string::npos);

    const std::string nested =
        config_error("{\n  \"field\": {\n    \"kind\": \"planar_shear\",\n    \"alpha\": 1\n  },\n  \"x0\": [0, 1], "
                     "\"t_end\": 1\n}");
    CHECK(nested.find("line 4") != std::string::npos);
    CHECK(nested.find("alpha") != std::string::npos);

    const std::string syntax = config_error("{\n  \"x0\": [0, 1],\n  \"t_end\": ,\n}");
    CHECK(syntax.find("line 3") != std::string::npos);

    const std::string type = config_error(
        "{\"field\": {\"kind\": \"planar_shear\"},\n\"x0\": [0, \"one\"],\n\"t_end\": 1}");
    CHECK(type.find("line 2") != std::string::npos);
    CHECK(type.find("/x0/1") != std::string::npos);

    CHECK(config_error(R"({"field": {"kind": "shear3d"}, "x0": [0, 1], "t_end": 1})").find("3 numbers") !=
          std::string::npos);
    CHECK(config_error(R"({"field": {"kind": "spiral"}, "x0": [0, 1], "t_end": 1})").find("not one of") !=
          std::string::npos);
    CHECK(!config_error(R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 0})").empty());
    CHECK(!config_error(R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 1, "steps": 0})").empty());
    CHECK(!config_error(R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 1,
                            "frame": {"kind": "tumbling"}})")
               .empty());
    CHECK(!config_error(R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 1, "axis": [1, 0, 0]})").empty());

    const RunConfig lin = config_from(R"({"field": {"kind": "linear", "A": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]},
                                          "x0": [0, 0, 0], "t_end": 1, "axis": [0, 3, 4]})");
    CHECK(lin.dim() == 3);
    CHECK(std::abs(lin.axis[1] - 0.6) < 1e-15);
    CHECK(lin.resolved["axis"][2].get<double>() == doctest::Approx(0.8));
}

TEST_CASE("example shear") {
    const fs::path dir = scratch("shear");
    REQUIRE(run({"example", "shear", "--out", dir.string()}) == kOk);
    const Csv a = read_csv(dir / "angles.csv");
    CHECK(a.comment.rfind("# config: {", 0) == 0);
    CHECK(a.columns == std::vector<std::string>{"t", "polar_angle", "dynamic_angle", "relative_angle",
                                                "intrinsic_angle", "incremental_polar_n10", "incremental_polar_n100",
                                                "incremental_polar_n1000"});
    const std::size_t last = a.rows.size() - 1;
    CHECK(last == 4000);
    CHECK(a.at(last, "t") == 4.0);
    CHECK(std::abs(a.at(last, "dynamic_angle") + 2.0) < 1e-8);
    CHECK(std::abs(a.at(last, "polar_angle") + std::atan(2.0)) < 1e-8);
    for (int n : {10, 100, 1000})
        CHECK(std::abs(a.at(last, "incremental_polar_n" + std::to_string(n)) + n * std::atan(2.0 / n)) < 1e-10);

    const Csv f = read_csv(dir / "factors.csv");
    CHECK(f.columns.size() == 1 + 5 * 4);
    CHECK(f.columns[1] == "O11");
    CHECK(f.columns.back() == "U22");
    // O = Rot(-t/2), M = O^T F.
    CHECK(std::abs(f.at(last, "O21") + std::sin(2.0)) < 1e-10);
    CHECK(std::abs(f.at(last, "R11") - std::cos(std::atan(2.0))) < 1e-10);

    // Same configuration, different directory: identical bytes.
    const fs::path again = scratch("shear_again");
    REQUIRE(run({"example", "shear", "--out", again.string()}) == kOk);
    CHECK(slurp(dir / "angles.csv") == slurp(again / "angles.csv"));
    CHECK(slurp(dir / "factors.csv") == slurp(again / "factors.csv"));

    // Steps not divisible by the increment count leave that column as NaN.
    const fs::path odd = scratch("shear_odd");
    REQUIRE(run({"example", "shear", "--out", odd.string(), "--steps", "50"}) == kOk);
    const Csv o = read_csv(odd / "angles.csv");
    CHECK(std::isnan(o.at(50, "incremental_polar_n100")));
    CHECK(std::abs(o.at(50, "incremental_polar_n10") + 10.0 * std::atan(0.2)) < 1e-10);
}

TEST_CASE("example vortex and shear3d") {
    const fs::path dir = scratch("vortex");
    REQUIRE(run({"example", "vortex", "--out", dir.string()}) == kOk);
    const Csv a = read_csv(dir / "angles.csv");
    for (const auto& row : a.rows) {
        CHECK(std::abs(row[2]) < 1e-10);
        CHECK(std::abs(row[3]) < 1e-10);
        CHECK(std::abs(row[4]) < 1e-10);
    }
    CHECK(std::abs(a.rows.back()[1]) > 0.1);

    const fs::path d3 = scratch("shear3d");
    REQUIRE(run({"example", "shear3d", "--out", d3.string()}) == kOk);
    const Csv b = read_csv(d3 / "angles.csv");
    const std::size_t last = b.rows.size() - 1;
    // omega = (-c k, k, 0) is uniform: dynamic angle about e1 is -t/2, and the
    // intrinsic angle vanishes because the local and mean vorticity agree.
    CHECK(std::abs(b.at(last, "dynamic_angle") + 1.0) < 1e-10);
    CHECK(std::abs(b.at(last, "intrinsic_angle")) < 1e-12);
    CHECK(read_csv(d3 / "factors.csv").columns.size() == 1 + 5 * 9);
}

TEST_CASE("verify") {
    const fs::path dir = scratch("verify");
    std::string out;
    REQUIRE(run({"verify", "dpd", "--out", dir.string(), "--steps", "400"}, &out) == kOk);
    CHECK(out.find("dpd.process_residual") != std::string::npos);
    CHECK(out.find("dpd.spin_free_M") != std::string::npos);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(report_body(dir) == out);

    REQUIRE(run({"verify", "fibers", "--out", dir.string(), "--steps", "100"}, &out) == kOk);
    CHECK(out.find("fibers.random_samples") != std::string::npos);

    const fs::path cfg = write_config(dir, R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 2,
        "steps": 400, "sampler": {"lower": [-1, -1], "upper": [1, 1], "resolution": [4, 4]},
        "frame": {"kind": "planar_spin", "rate": 0.9}})");
    REQUIRE(run({"verify", "frames", "--config", cfg.string(), "--out", dir.string()}, &out) == kOk);
    CHECK(out.find("frames.phi_2d") != std::string::npos);

    const fs::path cfg3 = write_config(dir, R"({"field": {"kind": "shear3d", "k": 1, "c": 0.5, "w": 0.2},
        "x0": [0.1, 0.2, 0.3], "t_end": 1, "steps": 200,
        "sampler": {"lower": [-1, -1, -1], "upper": [1, 1, 1], "resolution": [3, 3, 3]}})");
    REQUIRE(run({"verify", "all", "--config", cfg3.string(), "--out", dir.string()}, &out) == kOk);
    CHECK(out.find("fibers.trajectory") != std::string::npos);

    // Area measure does not recover omega / 2: the suite fails.
    const fs::path area = write_config(dir, R"({"field": {"kind": "shear3d"}, "x0": [0, 0, 0], "t_end": 1,
        "steps": 10, "quadrature": {"measure": "area"}})");
    REQUIRE(run({"verify", "fibers", "--config", area.string(), "--out", dir.string()}, &out) == kVerifyFailed);
    CHECK(out.find("FAIL") != std::string::npos);
    CHECK(report_body(dir) == out);
}

TEST_CASE("fiber-average") {
    const fs::path dir = scratch("fiber");
    const fs::path rigid = write_config(dir, R"({"field": {"kind": "rigid_rotation", "omega": [0.2, -0.1, 1.0]},
        "x0": [1, 0, 0], "t_end": 1, "steps": 50})");
    std::string out;
    REQUIRE(run({"fiber-average", "--config", rigid.string(), "--out", dir.string()}, &out) == kOk);
    CHECK(out.find("half_omega") != std::string::npos);
    const Csv c = read_csv(dir / "nu.csv");
    CHECK(c.columns == std::vector<std::string>{"t", "nu1", "nu2", "nu3", "half_omega1", "half_omega2",
                                                "half_omega3", "residual"});
    CHECK(c.rows.size() == 51);
    for (const auto& row : c.rows) {
        CHECK(row[7] < 1e-8);
        CHECK(std::abs(row[3] - 1.0) < 1e-8);
    }

    REQUIRE(run({"fiber-average", "--out", dir.string(), "--steps", "20"}) == kOk);
    for (const auto& row : read_csv(dir / "nu.csv").rows) CHECK(row[7] < 1e-8);

    const fs::path strain = write_config(dir, R"({"field": {"kind": "linear",
        "A": [[1, 0, 0], [0, -0.3, 0], [0, 0, -0.7]]}, "x0": [0.5, 0.5, 0.5], "t_end": 1, "steps": 10})");
    REQUIRE(run({"fiber-average", "--config", strain.string(), "--out", dir.string()}) == kOk);
    for (const auto& row : read_csv(dir / "nu.csv").rows)
        for (int i = 1; i <= 3; ++i) CHECK(std::abs(row[static_cast<std::size_t>(i)]) < 1e-8);

    const fs::path mc = write_config(dir, R"({"field": {"kind": "shear3d"}, "x0": [0, 0, 0], "t_end": 1, "steps": 4,
        "quadrature": {"monte_carlo": 2000}, "seed": 7})");
    REQUIRE(run({"fiber-average", "--config", mc.string(), "--out", dir.string()}) == kOk);
    const std::string first = slurp(dir / "nu.csv");
    REQUIRE(run({"fiber-average", "--config", mc.string(), "--out", dir.string()}) == kOk);
    CHECK(slurp(dir / "nu.csv") == first);
    REQUIRE(run({"fiber-average", "--config", mc.string(), "--out", dir.string(), "--seed", "8"}) == kOk);
    CHECK(slurp(dir / "nu.csv") != first);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    std::string out, err;
    CHECK(run({"--help"}, &out) == kOk);
    CHECK(run({"frobnicate"}, &out, &err) == kConfigFailed);
    CHECK(run({"example", "spiral"}, &out, &err) == kConfigFailed);
    CHECK(run({"decompose", "--out", dir.string()}, &out, &err) == kConfigFailed);
    CHECK(err.find("field") != std::string::npos);

    const fs::path bad = write_config(dir, "{\n  \"field\": {\"kind\": \"planar_shear\"},\n  \"colour\": 1\n}");
    CHECK(run({"example", "shear", "--config", bad.string(), "--out", dir.string()}, &out, &err) == kConfigFailed);
    CHECK(err.find("line 3") != std::string::npos);
    CHECK(run({"verify", "--config", (dir / "missing.json").string()}, &out, &err) == kConfigFailed);

    const fs::path planar = write_config(dir, R"({"field": {"kind": "planar_shear"}, "x0": [0, 1], "t_end": 1})");
    CHECK(run({"fiber-average", "--config", planar.string(), "--out", dir.string()}, &out, &err) == kConfigFailed);

    const fs::path core = write_config(dir, R"({"field": {"kind": "irrotational_vortex"}, "x0": [0, 0], "t_end": 1,
        "steps": 10})");
    CHECK(run({"decompose", "--config", core.string(), "--out", dir.string()}, &out, &err) == kRuntimeFailed);
    CHECK(err.find("SingularPoint") != std::string::npos);

    const fs::path good = write_config(dir, R"({"field": {"kind": "linear", "A": [[0.1, 1], [0, -0.1]]},
        "x0": [0.3, 0.2], "t_end": 1, "steps": 100})");
    CHECK(run({"decompose", "--config", good.string(), "--out", dir.string()}, &out, &err) == kOk);
    CHECK(fs::exists(dir / "angles.csv"));
}
