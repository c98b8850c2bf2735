#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "CLI11.hpp"
#include "dynpolar/angles.hpp"
#include "dynpolar/dpd.hpp"
#include "dynpolar/polar.hpp"

namespace dynpolar::cli {

namespace {

constexpr int kIncrements[] = {10, 100, 1000};

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    const std::string path = (std::filesystem::path(cfg.out) / name).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    // The output directory is left out so relocated runs stay byte-identical.
    json echo = cfg.resolved;
    echo.erase("out");
    os << "# config: " << echo.dump() << '\n';
    return os;
}

void write_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
}

AxisField axis_field(const RunConfig& cfg) {
    return cfg.dim() == 2 ? AxisField::planar() : AxisField::constant(cfg.axis);
}

// Rotation angle of r about the unit axis g (planar: the signed angle).
double angle_about(const Mat& r, const Vec& g) {
    if (r.dim() == 2) return planar_angle(r);
    const AxisAngle aa = axis_angle_of(r);
    return aa.axis_undefined ? 0.0 : aa.angle * dot(aa.axis, g);
}

// Sum of polar angles of n equal sub-steps, plus the partial sub-step up to
// each node. NaN when n does not divide the step count.
std::vector<double> incremental_polar(const DeformationHistory& hist, std::size_t n, const Vec& g) {
    const std::size_t steps = hist.F.size() - 1;
    if (n > steps || steps % n != 0) return std::vector<double>(hist.F.size(), std::nan(""));
    if (hist.F.front().dim() == 2) return incremental_polar_angle(hist, steps / n);
    const std::size_t stride = steps / n;
    std::vector<double> out(hist.F.size(), 0.0);
    double total = 0.0;
    Mat restart_inv = hist.F[0].inverse();
    for (std::size_t k = 1; k < hist.F.size(); ++k) {
        const double partial = angle_about(polar_decompose(hist.F[k] * restart_inv).R, g);
        out[k] = total + partial;
        if (k % stride == 0) {
            total += partial;
            restart_inv = hist.F[k].inverse();
        }
    }
    return out;
}

std::string matrix_columns(char name, int n) {
    std::string s;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) s += std::string(",") + name + std::to_string(i) + std::to_string(j);
    return s;
}

void append(std::vector<double>& row, const Mat& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
}

double max_over(std::size_t n, const std::function<double(std::size_t)>& f) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::max(m, f(k));
    return m;
}

void dpd_checks(const RunConfig& cfg, const VelocityField& f, const Trajectory& traj, const DpdResult& r,
                const PolarHistory& p, Report& rep) {
    const auto& F = r.history.F;
    const std::size_t n = F.size();
    rep.checks.push_back({"dpd.process_residual", process_residual(f, traj, cfg.steps / 2 ? cfg.steps / 2 : 1), 1e-8});
    rep.checks.push_back({"dpd.rotation_defect",
                          max_over(n, [&](std::size_t k) { return orthogonality_defect(r.factors.O[k]); }), 1e-10});
    rep.checks.push_back({"dpd.factor_OM", max_over(n, [&](std::size_t k) {
                              return frobenius(r.factors.O[k] * r.factors.M[k] - F[k]) / frobenius(F[k]);
                          }), 1e-8});
    rep.checks.push_back({"dpd.factor_NO", max_over(n, [&](std::size_t k) {
                              return frobenius(r.factors.N[k] * r.factors.O[k] - F[k]) / frobenius(F[k]);
                          }), 1e-8});
    if (cfg.steps >= 2) rep.checks.push_back({"dpd.spin_free_M", spin_free_residual(r.factors.M, traj.grid), 1e-4});
    rep.checks.push_back(
        {"dpd.spectrum_match", stretch_spectrum_match(r.factors.M.back(), p.U.back()).value_gap, 1e-8});
    const auto m = integrate_M_ode(f, traj);
    rep.checks.push_back({"dpd.M_ode_gap", max_over(n, [&](std::size_t k) { return max_abs(m[k] - r.factors.M[k]); }),
                          1e-6});
}

void polar_checks(const VelocityField& f, const Trajectory& traj, const DpdResult& r, const PolarHistory& p,
                  Report& rep) {
    const auto& F = r.history.F;
    const std::size_t n = F.size();
    rep.checks.push_back({"polar.reconstruction", max_over(n, [&](std::size_t k) {
                              return frobenius(p.R[k] * p.U[k] - F[k]) / frobenius(F[k]);
                          }), 1e-9});
    rep.checks.push_back(
        {"polar.rotation_defect", max_over(n, [&](std::size_t k) { return orthogonality_defect(p.R[k]); }), 1e-10});
    const PolarHistory ode = polar_via_ode(f, traj);
    rep.checks.push_back({"polar.ode_gap", max_over(n, [&](std::size_t k) {
                              return std::max(max_abs(ode.R[k] - p.R[k]), max_abs(ode.U[k] - p.U[k]));
                          }), 1e-5});
}

void angle_checks(const RunConfig& cfg, const VelocityField& f, const Trajectory& traj, const MatrixOdeResult& o,
                  Report& rep) {
    const TimeGrid grid = cfg.make_grid();
    const BodySampler sampler = cfg.make_sampler();
    const AxisField g = axis_field(cfg);
    const MeanSpinHistory mean = mean_spin_history(f, sampler, grid);
    if (cfg.steps >= 2) {
        const double sigma = grid.node(cfg.steps / 2);
        const std::pair<const char*, AngleKind> kinds[] = {{"angles.additivity_dynamic", AngleKind::Dynamic},
                                                           {"angles.additivity_relative", AngleKind::Relative},
                                                           {"angles.additivity_intrinsic", AngleKind::Intrinsic}};
        for (const auto& [name, kind] : kinds)
            rep.checks.push_back({name,
                                  additivity_residual(kind, f, cfg.x0, cfg.tau, sigma, cfg.t_end, cfg.steps, g, &sampler),
                                  1e-12});
    }
    const AngleSeries phi = dynamic_angle(f, traj, g);
    const AngleSeries from_o = angle_from_rotation_history(o.Z, grid, g, traj);
    rep.checks.push_back({"angles.oracle_dynamic", max_over(phi.value.size(), [&](std::size_t k) {
                              return std::abs(phi.value[k] - from_o.value[k]);
                          }), 1e-4});
    const AngleSeries rel = relative_angle(f, traj, g, mean);
    const auto phi_rel = relative_rotation(f, traj, mean);
    const AngleSeries from_phi = angle_from_rotation_history(phi_rel.Z, grid, g, traj);
    rep.checks.push_back({"angles.oracle_relative", max_over(rel.value.size(), [&](std::size_t k) {
                              return std::abs(rel.value[k] - from_phi.value[k]);
                          }), 1e-4});
    const AngleSeries psi = intrinsic_angle(f, traj, mean);
    rep.checks.push_back({"angles.intrinsic_bound", max_over(psi.value.size(), [&](std::size_t k) {
                              return std::max(0.0, std::abs(rel.value[k]) - psi.value[k]);
                          }), 1e-12});
}

void fiber_checks(const RunConfig& cfg, const VelocityField& f, const Trajectory& traj, Report& rep) {
    const SphereQuadrature quad = cfg.make_quadrature();
    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_grad = [&](int n) {
        Mat a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = u(gen);
        return evaluate(VelocityField::linear(a), Vec(n), 0.0);
    };
    if (f.dim() == 3) {
        const std::size_t stride = std::max<std::size_t>(1, traj.grid.size() / 200);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.grid.size(); k += stride) {
            const FieldSample s = evaluate(f, traj.points[k], traj.grid.node(k));
            worst = std::max(worst, norm(fiber_averaged_angular_velocity(s, quad) - 0.5 * s.omega));
        }
        rep.checks.push_back({"fibers.trajectory", worst, 1e-8});
    } else {
        const std::size_t stride = std::max<std::size_t>(1, traj.grid.size() / 200);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.grid.size(); k += stride) {
            const FieldSample s = evaluate(f, traj.points[k], traj.grid.node(k));
            worst = std::max(worst, std::abs(circle_averaged_rate(s) - 0.5 * s.omega[2]));
        }
        rep.checks.push_back({"fibers.circle_trajectory", worst, 1e-10});
    }
    double worst3 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 100; ++i) {
        const FieldSample s = random_grad(3);
        worst3 = std::max(worst3, norm(fiber_averaged_angular_velocity(s, quad) - 0.5 * s.omega));
        const FieldSample p = random_grad(2);
        worst2 = std::max(worst2, std::abs(circle_averaged_rate(p) - 0.5 * p.omega[2]));
    }
    rep.checks.push_back({"fibers.random_samples", worst3, 1e-8});
    rep.checks.push_back({"fibers.circle_random", worst2, 1e-10});
    const Vec omega{0.3, -0.5, 0.8};
    const FieldSample rigid = evaluate(VelocityField::rigid_rotation(omega), Vec{1.0, 0.0, 0.0}, 0.0);
    rep.checks.push_back({"fibers.rigid", norm(fiber_averaged_angular_velocity(rigid, quad) - omega), 1e-8});
    const FieldSample strain = evaluate(VelocityField::linear(Mat::diag(Vec{1.0, -0.4, -0.6})), Vec(3), 0.0);
    rep.checks.push_back({"fibers.pure_strain", norm(fiber_averaged_angular_velocity(strain, quad)), 1e-8});
}

void frame_checks(const RunConfig& cfg, const VelocityField& f, const Trajectory& traj, Report& rep) {
    const TimeGrid grid = cfg.make_grid();
    const FrameChange fr = cfg.make_frame();
    const BodySampler sampler = cfg.make_sampler();
    const DpdObjectivity r = dpd_objectivity_residuals(f, cfg.x0, grid, fr);
    rep.checks.push_back({"frames.objectivity_N", r.rN, 1e-5});
    rep.checks.push_back({"frames.objectivity_M", r.rM, 1e-5});
    rep.checks.push_back({"frames.objectivity_O", r.rO, 1e-5});
    if (f.dim() == 2) rep.checks.push_back({"frames.phi_2d", phi_objectivity_2d(f, cfg.x0, grid, sampler, fr), 1e-5});
    rep.checks.push_back({"frames.psi_invariance", psi_invariance(f, cfg.x0, grid, sampler, fr), 1e-6});
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / 200);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); k += stride)
        worst = std::max(worst, vorticity_transfer_residual(f, traj.points[k], grid.node(k), fr));
    rep.checks.push_back({"frames.vorticity_transfer", worst, 1e-8});
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

std::string Report::text() const {
    std::string s;
    char buf[160];
    for (const Check& c : checks) {
        std::snprintf(buf, sizeof buf, "%s %.6e %c%.1e %s\n", c.name.c_str(), c.value, c.below ? '<' : '>',
                      c.tolerance, c.pass() ? "PASS" : "FAIL");
        s += buf;
    }
    return s;
}

void run_decompose(const RunConfig& cfg) {
    const VelocityField f = cfg.make_field();
    const TimeGrid grid = cfg.make_grid();
    const Trajectory traj = advect(f, cfg.x0, grid);
    const DpdResult r = dynamic_polar(f, traj);
    const PolarHistory p = polar_history(r.history);
    const MeanSpinHistory mean = mean_spin_history(f, cfg.make_sampler(), grid);
    const AxisField g = axis_field(cfg);
    const Vec gv = cfg.dim() == 2 ? Vec{0.0, 0.0, 1.0} : cfg.axis;

    const AngleSeries dyn = dynamic_angle(f, traj, g);
    const AngleSeries rel = relative_angle(f, traj, g, mean);
    const AngleSeries psi = intrinsic_angle(f, traj, mean);
    std::vector<std::vector<double>> inc;
    for (int n : kIncrements) inc.push_back(incremental_polar(r.history, static_cast<std::size_t>(n), gv));

    {
        std::ofstream os = open_output(cfg, "angles.csv");
        os << "t,polar_angle,dynamic_angle,relative_angle,intrinsic_angle,incremental_polar_n10,"
              "incremental_polar_n100,incremental_polar_n1000\n";
        for (std::size_t k = 0; k < grid.size(); ++k)
            write_row(os, {grid.node(k), angle_about(p.R[k], gv), dyn.value[k], rel.value[k], psi.value[k], inc[0][k],
                           inc[1][k], inc[2][k]});
        if (!os) fail(ErrorCode::IoError, "failed writing angles.csv");
    }
    {
        const int n = cfg.dim();
        std::ofstream os = open_output(cfg, "factors.csv");
        os << "t" << matrix_columns('O', n) << matrix_columns('M', n) << matrix_columns('N', n)
           << matrix_columns('R', n) << matrix_columns('U', n) << '\n';
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::vector<double> row{grid.node(k)};
            append(row, r.factors.O[k]);
            append(row, r.factors.M[k]);
            append(row, r.factors.N[k]);
            append(row, p.R[k]);
            append(row, p.U[k]);
            write_row(os, row);
        }
        if (!os) fail(ErrorCode::IoError, "failed writing factors.csv");
    }
}

double run_fiber_average(const RunConfig& cfg, std::ostream& out) {
    if (cfg.dim() != 3) throw ConfigError("fiber-average needs a 3D field");
    const VelocityField f = cfg.make_field();
    const TimeGrid grid = cfg.make_grid();
    const Trajectory traj = advect(f, cfg.x0, grid);
    const SphereQuadrature quad = cfg.make_quadrature();
    std::ofstream os = open_output(cfg, "nu.csv");
    os << "t,nu1,nu2,nu3,half_omega1,half_omega2,half_omega3,residual\n";
    double worst = 0.0;
    Vec nu, half;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const FieldSample s = evaluate(f, traj.points[k], grid.node(k));
        nu = fiber_averaged_angular_velocity(s, quad);
        half = 0.5 * s.omega;
        const double res = norm(nu - half);
        worst = std::max(worst, res);
        write_row(os, {grid.node(k), nu[0], nu[1], nu[2], half[0], half[1], half[2], res});
    }
    if (!os) fail(ErrorCode::IoError, "failed writing nu.csv");
    out << "t = " << format_double(grid.t_end()) << "\n";
    out << "nu         = " << format_double(nu[0]) << " " << format_double(nu[1]) << " " << format_double(nu[2])
        << "\n";
    out << "half_omega = " << format_double(half[0]) << " " << format_double(half[1]) << " "
        << format_double(half[2]) << "\n";
    out << "max residual = " << format_double(worst) << "\n";
    return worst;
}

Report run_verify(const std::string& suite, const RunConfig& cfg) {
    const VelocityField f = cfg.make_field();
    const Trajectory traj = advect(f, cfg.x0, cfg.make_grid());
    const DpdResult r = dynamic_polar(f, traj);
    const PolarHistory p = polar_history(r.history);
    const bool all = suite == "all";
    Report rep;
    if (all || suite == "dpd") dpd_checks(cfg, f, traj, r, p, rep);
    if (all || suite == "polar") polar_checks(f, traj, r, p, rep);
    if (all || suite == "angles") {
        const MatrixOdeResult o{r.factors.grid, r.factors.O, true};
        angle_checks(cfg, f, traj, o, rep);
    }
    if (all || suite == "fibers") fiber_checks(cfg, f, traj, rep);
    if (all || suite == "frames") frame_checks(cfg, f, traj, rep);

    std::ofstream os = open_output(cfg, "report.txt");
    os << rep.text();
    if (!os) fail(ErrorCode::IoError, "failed writing report.txt");
    return rep;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic polar decomposition of analytic flows"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
    auto* o_out = app.add_option("--out", out_dir, "Output directory");
    auto* o_steps = app.add_option("--steps", steps, "Number of time steps")->check(CLI::PositiveNumber);
    auto* o_seed = app.add_option("--seed", seed, "Seed for random checks and Monte Carlo quadrature");
    (void)o_config;

    std::string example_name, suite = "all";
    auto* example = app.add_subcommand("example", "Run a built-in example and write angles.csv, factors.csv");
    example->add_option("name", example_name, "shear, vortex or shear3d")
        ->required()
        ->check(CLI::IsMember({"shear", "vortex", "shear3d"}));
    auto* verify = app.add_subcommand("verify", "Run invariant checks and write report.txt");
    verify->add_option("suite", suite, "all, dpd, polar, angles, fibers or frames")
        ->check(CLI::IsMember({"all", "dpd", "polar", "angles", "fibers", "frames"}));
    auto* fiber = app.add_subcommand("fiber-average", "Fiber-averaged angular velocity along a trajectory");
    auto* decompose = app.add_subcommand("decompose", "Decompose the configured flow");
    for (auto* sub : {example, verify, fiber, decompose}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigFailed;
    }

    Overrides ov;
    if (o_out->count()) ov.out = out_dir;
    if (o_steps->count()) ov.steps = steps;
    if (o_seed->count()) ov.seed = seed;

    try {
        if (example->parsed()) {
            run_decompose(load_config(config_path, example_preset(example_name), ov));
            return kOk;
        }
        if (decompose->parsed()) {
            run_decompose(load_config(config_path, json::object(), ov));
            return kOk;
        }
        if (fiber->parsed()) {
            run_fiber_average(load_config(config_path, example_preset("shear3d"), ov), out);
            return kOk;
        }
        const Report rep = run_verify(suite, load_config(config_path, example_preset("shear"), ov));
        out << rep.text();
        return rep.all_pass() ? kOk : kVerifyFailed;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigFailed;
    } catch (const KinematicsError& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? kConfigFailed : kRuntimeFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailed;
    }
}

} // namespace dynpolar::cli
