#include "dynpolar/integrate.hpp"

#include <cmath>
#include <string>

namespace dynpolar {

TimeGrid::TimeGrid(double tau, double t_end, std::size_t steps) : tau_(tau), t_end_(t_end), steps_(steps) {
    if (steps == 0) fail(ErrorCode::InvalidArgument, "time grid needs at least one step");
    if (!std::isfinite(tau) || !std::isfinite(t_end)) fail(ErrorCode::InvalidArgument, "non-finite time grid");
}

double TimeGrid::node(std::size_t k) const noexcept {
    if (k == steps_) return t_end_;
    return tau_ + static_cast<double>(k) * dt();
}

double TimeGrid::stage_time(std::size_t step, int stage) const noexcept {
    if (stage == 3) return node(step + 1);
    return node(step) + kStageOffset[static_cast<std::size_t>(stage)] * dt();
}

TimeGrid TimeGrid::sub(std::size_t first, std::size_t last) const {
    if (!(first < last && last <= steps_))
        fail(ErrorCode::NodeMismatch, "sub-grid [" + std::to_string(first) + ", " + std::to_string(last) + "] invalid");
    TimeGrid g = *this;
    g.tau_ = node(first);
    g.t_end_ = node(last);
    g.steps_ = last - first;
    return g;
}

Trajectory Trajectory::slice(std::size_t first, std::size_t last) const {
    Trajectory t;
    t.grid = grid.sub(first, last);
    t.points.assign(points.begin() + static_cast<std::ptrdiff_t>(first),
                    points.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    t.stages.assign(stages.begin() + static_cast<std::ptrdiff_t>(first),
                    stages.begin() + static_cast<std::ptrdiff_t>(last));
    return t;
}

Vec advect_step(const VelocityField& f, const TimeGrid& grid, std::size_t k, const Vec& x, std::array<Vec, 4>& st) {
    const double h = grid.dt();
    st[0] = x;
    const Vec k1 = f.velocity(st[0], grid.stage_time(k, 0));
    st[1] = x + (0.5 * h) * k1;
    const Vec k2 = f.velocity(st[1], grid.stage_time(k, 1));
    st[2] = x + (0.5 * h) * k2;
    const Vec k3 = f.velocity(st[2], grid.stage_time(k, 2));
    st[3] = x + h * k3;
    const Vec k4 = f.velocity(st[3], grid.stage_time(k, 3));
    Vec next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.is_finite()) fail(ErrorCode::SingularPoint, "trajectory left the finite domain");
    return next;
}

Trajectory advect(const VelocityField& f, const Vec& x0, const TimeGrid& grid) {
    require_same_dim(x0.dim(), f.dim(), "advect");
    Trajectory traj;
    traj.grid = grid;
    traj.points.reserve(grid.size());
    traj.stages.reserve(grid.steps());
    traj.points.push_back(x0);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        std::array<Vec, 4> st;
        Vec next = advect_step(f, grid, k, traj.points.back(), st);
        traj.stages.push_back(st);
        traj.points.push_back(std::move(next));
    }
    return traj;
}

MatrixOdeResult integrate_matrix_ode(const Generator& g, const TimeGrid& grid, bool reproject, int dim) {
    auto rhs = [&](const Stage& s, const std::array<Mat, 1>& z) {
        const Mat a = g(s);
        if (reproject) {
            const double sym = frobenius(sym_part(a));
            if (sym > 1e-8 * std::max(1.0, frobenius(a)))
                fail(ErrorCode::GeneratorNotSkew,
                     "generator symmetric part " + std::to_string(sym) + " at t = " + std::to_string(s.t));
        }
        return std::array<Mat, 1>{a * z[0]};
    };
    auto post = [reproject](std::array<Mat, 1>& z) {
        if (reproject) z[0] = nearest_rotation(z[0]);
    };
    const auto states = integrate_coupled<1>(grid, {Mat::identity(dim)}, rhs, post);
    MatrixOdeResult out{grid, {}, reproject};
    out.Z.reserve(states.size());
    for (const auto& s : states) out.Z.push_back(s[0]);
    return out;
}

Generator gradient_generator(const VelocityField& f, const Trajectory& traj) {
    return [&f, &traj](const Stage& s) { return f.gradient(traj.at(s), s.t); };
}

Generator spin_generator(const VelocityField& f, const Trajectory& traj) {
    return [&f, &traj](const Stage& s) { return skew_part(f.gradient(traj.at(s), s.t)); };
}

DeformationHistory deformation_gradient(const VelocityField& f, const Trajectory& traj) {
    require_same_dim(traj.start().dim(), f.dim(), "deformation_gradient");
    auto res = integrate_matrix_ode(gradient_generator(f, traj), traj.grid, false, f.dim());
    return DeformationHistory{traj, std::move(res.Z)};
}

} // namespace dynpolar
