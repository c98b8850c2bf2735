#include "dynpolar/angles.hpp"

#include <cmath>
#include <string>

#include "dynpolar/polar.hpp"

namespace dynpolar {

namespace {

Vec as3(const Vec& g) {
    if (g.dim() == 3) return g;
    return Vec{g[0], g[1], 0.0};
}

void check_unit(const Vec& g) {
    if (std::abs(norm(g) - 1.0) > 1e-10) fail(ErrorCode::NotUnit, "axis vector is not unit length");
}

AngleSeries trapezoid(const TimeGrid& grid, const std::vector<double>& integrand) {
    AngleSeries out{grid, std::vector<double>(integrand.size(), 0.0)};
    for (std::size_t k = 1; k < integrand.size(); ++k)
        out.value[k] = out.value[k - 1] + 0.5 * (grid.node(k) - grid.node(k - 1)) * (integrand[k - 1] + integrand[k]);
    return out;
}

Vec node_vorticity(const VelocityField& f, const Trajectory& traj, std::size_t k) {
    return vorticity_of(f.gradient(traj.points[k], traj.grid.node(k)));
}

void check_mean(const Trajectory& traj, const MeanSpinHistory& mean) {
    if (!(traj.grid == mean.grid)) fail(ErrorCode::GridMismatch, "trajectory and mean spin are on different grids");
}

} // namespace

AxisField AxisField::constant(const Vec& g) {
    const Vec g3 = as3(g);
    check_unit(g3);
    AxisField a;
    a.fn_ = [g3](const Vec&, double) { return g3; };
    return a;
}

AxisField AxisField::planar() { return constant(Vec{0.0, 0.0, 1.0}); }

AxisField AxisField::callable(Fn g) {
    AxisField a;
    a.fn_ = std::move(g);
    return a;
}

Vec AxisField::at(const Vec& x, double t) const {
    const Vec g = as3(fn_(x, t));
    check_unit(g);
    return g;
}

AngleSeries dynamic_angle(const VelocityField& f, const Trajectory& traj, const AxisField& g) {
    std::vector<double> integrand(traj.points.size());
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand[k] = 0.5 * dot(node_vorticity(f, traj, k), g.at(traj.points[k], traj.grid.node(k)));
    return trapezoid(traj.grid, integrand);
}

AngleSeries relative_angle(const VelocityField& f, const Trajectory& traj, const AxisField& g,
                           const MeanSpinHistory& mean) {
    check_mean(traj, mean);
    std::vector<double> integrand(traj.points.size());
    for (std::size_t k = 0; k < integrand.size(); ++k) {
        const Vec rel = node_vorticity(f, traj, k) - mean.omega_node[k];
        integrand[k] = 0.5 * dot(rel, g.at(traj.points[k], traj.grid.node(k)));
    }
    return trapezoid(traj.grid, integrand);
}

AngleSeries intrinsic_angle(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean) {
    check_mean(traj, mean);
    std::vector<double> integrand(traj.points.size());
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand[k] = 0.5 * norm(node_vorticity(f, traj, k) - mean.omega_node[k]);
    return trapezoid(traj.grid, integrand);
}

double additivity_residual(AngleKind kind, const VelocityField& f, const Vec& x0, double tau, double sigma, double t,
                           std::size_t steps, const AxisField& g, const BodySampler* sampler) {
    if (!(tau < sigma && sigma < t)) fail(ErrorCode::InvalidArgument, "need tau < sigma < t");
    const TimeGrid grid(tau, t, steps);
    const std::size_t ks = node_index(grid, sigma);
    const std::size_t kt = grid.steps();
    const Trajectory traj = advect(f, x0, grid);

    if (kind == AngleKind::Polar) {
        if (f.dim() != 2) fail(ErrorCode::DimensionMismatch, "polar angle additivity is planar only");
        const auto hist = deformation_gradient(f, traj);
        const Mat& f_s = hist.F[ks];
        const Mat& f_t = hist.F[kt];
        const double whole = planar_angle(polar_decompose(f_t).R);
        const double first = planar_angle(polar_decompose(f_s).R);
        const double second = planar_angle(polar_decompose(f_t * f_s.inverse()).R);
        return std::abs(whole - second - first);
    }

    auto angle = [&](const Trajectory& piece, const MeanSpinHistory* mean) {
        switch (kind) {
        case AngleKind::Dynamic: return dynamic_angle(f, piece, g).final_value();
        case AngleKind::Relative: return relative_angle(f, piece, g, *mean).final_value();
        default: return intrinsic_angle(f, piece, *mean).final_value();
        }
    };
    if (kind == AngleKind::Dynamic)
        return std::abs(angle(traj, nullptr) - angle(traj.slice(ks, kt), nullptr) - angle(traj.slice(0, ks), nullptr));
    if (sampler == nullptr) fail(ErrorCode::InvalidArgument, "relative and intrinsic angles need a sampler");
    const MeanSpinHistory mean = mean_spin_history(f, *sampler, grid);
    const MeanSpinHistory late = mean.slice(ks, kt), early = mean.slice(0, ks);
    return std::abs(angle(traj, &mean) - angle(traj.slice(ks, kt), &late) - angle(traj.slice(0, ks), &early));
}

AngleSeries angle_from_rotation_history(const std::vector<Mat>& q, const TimeGrid& grid, const AxisField& g,
                                        const Trajectory& traj) {
    if (q.size() != grid.size() || !(traj.grid == grid) || q.size() < 3)
        fail(ErrorCode::GridMismatch, "rotation history, grid and trajectory are not aligned");
    for (const Mat& r : q)
        if (!is_rotation(r, 1e-8)) fail(ErrorCode::NotRotation, "history entry is not a proper rotation");
    const std::size_t n = q.size();
    std::vector<double> integrand(n);
    for (std::size_t k = 0; k < n; ++k) {
        Mat qdot(q[k].dim());
        if (k == 0) {
            qdot = (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (grid.node(2) - grid.node(0));
        } else if (k == n - 1) {
            qdot = (3.0 * q[n - 1] - 4.0 * q[n - 2] + q[n - 3]) / (grid.node(n - 1) - grid.node(n - 3));
        } else {
            qdot = (q[k + 1] - q[k - 1]) / (grid.node(k + 1) - grid.node(k - 1));
        }
        const Vec rate = axial_vector(skew_part(qdot * q[k].transpose()));
        integrand[k] = dot(rate, g.at(traj.points[k], grid.node(k)));
    }
    return trapezoid(grid, integrand);
}

} // namespace dynpolar
