#include "dynpolar/mean_rotation.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dynpolar {

BodySampler::BodySampler(std::vector<Vec> seeds, std::vector<double> weights)
    : seeds_(std::move(seeds)), weights_(std::move(weights)) {
    if (seeds_.empty()) fail(ErrorCode::InvalidArgument, "sampler needs at least one seed");
    const int dim = seeds_.front().dim();
    for (const Vec& s : seeds_) {
        if (s.dim() != dim) fail(ErrorCode::DimensionMismatch, "sampler seeds differ in dimension");
        if (!s.is_finite()) fail(ErrorCode::InvalidArgument, "sampler seed is not finite");
    }
    if (weights_.empty()) {
        weights_.assign(seeds_.size(), 1.0 / static_cast<double>(seeds_.size()));
        return;
    }
    if (weights_.size() != seeds_.size()) fail(ErrorCode::InvalidArgument, "one weight per seed required");
    for (double w : weights_)
        if (!(w >= 0.0)) fail(ErrorCode::InvalidArgument, "sampler weights must be nonnegative");
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        fail(ErrorCode::InvalidArgument, "sampler weights sum to " + std::to_string(total) + ", not 1");
}

BodySampler BodySampler::uniform_grid(const Vec& lower, const Vec& upper, const std::vector<int>& resolution) {
    const int dim = lower.dim();
    require_same_dim(dim, upper.dim(), "BodySampler::uniform_grid");
    if (static_cast<int>(resolution.size()) != dim)
        fail(ErrorCode::DimensionMismatch, "resolution needs one entry per axis");
    for (int i = 0; i < dim; ++i) {
        if (resolution[static_cast<std::size_t>(i)] < 1) fail(ErrorCode::InvalidArgument, "resolution must be >= 1");
        if (!(upper[i] >= lower[i])) fail(ErrorCode::InvalidArgument, "sampler box has upper < lower");
    }
    std::vector<Vec> seeds;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
        Vec p(dim);
        for (int i = 0; i < dim; ++i) {
            const int n = resolution[static_cast<std::size_t>(i)];
            p[i] = lower[i] + (upper[i] - lower[i]) * (idx[static_cast<std::size_t>(i)] + 0.5) / n;
        }
        seeds.push_back(p);
        int axis = 0;
        while (axis < dim && ++idx[static_cast<std::size_t>(axis)] == resolution[static_cast<std::size_t>(axis)]) {
            idx[static_cast<std::size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == dim) break;
    }
    return BodySampler(std::move(seeds));
}

MeanSpin mean_spin(const VelocityField& f, const std::vector<Vec>& positions, const std::vector<double>& weights,
                   double t) {
    if (positions.size() != weights.size() || positions.empty())
        fail(ErrorCode::InvalidArgument, "mean_spin needs one weight per position");
    Mat w(f.dim());
    for (std::size_t i = 0; i < positions.size(); ++i) w += weights[i] * skew_part(f.gradient(positions[i], t));
    w = skew_part(w);
    return {w, 2.0 * axial_vector(w)};
}

MeanSpinHistory MeanSpinHistory::slice(std::size_t first, std::size_t last) const {
    MeanSpinHistory out;
    out.grid = grid.sub(first, last);
    out.W_stage.assign(W_stage.begin() + static_cast<std::ptrdiff_t>(first),
                       W_stage.begin() + static_cast<std::ptrdiff_t>(last));
    out.W_node.assign(W_node.begin() + static_cast<std::ptrdiff_t>(first),
                      W_node.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    out.omega_node.assign(omega_node.begin() + static_cast<std::ptrdiff_t>(first),
                          omega_node.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return out;
}

MeanSpinHistory mean_spin_history(const VelocityField& f, const BodySampler& sampler, const TimeGrid& grid,
                                  Execution exec) {
    require_same_dim(f.dim(), sampler.dim(), "mean_spin_history");
    const auto& w = sampler.weights();
    const std::size_t m = w.size();
    const int n = f.dim();
    MeanSpinHistory out;
    out.grid = grid;
    out.W_stage.assign(grid.steps(), {Mat(n), Mat(n), Mat(n), Mat(n)});
    out.W_node.assign(grid.size(), Mat(n));
    out.omega_node.assign(grid.size(), Vec(3));

    // All seeds advance one step at a time; per-seed spins are computed in
    // parallel and summed in seed order.
    std::vector<Vec> x = sampler.seeds();
    std::vector<std::array<Mat, 4>> spin(m);
    auto ordered_mean = [&](int s) {
        Mat acc(n);
        for (std::size_t i = 0; i < m; ++i) acc += w[i] * spin[i][static_cast<std::size_t>(s)];
        return skew_part(acc);
    };
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        for_each_index(m, exec, [&](std::size_t i) {
            std::array<Vec, 4> st;
            const Vec next = advect_step(f, grid, k, x[i], st);
            for (int s = 0; s < 4; ++s)
                spin[i][static_cast<std::size_t>(s)] =
                    skew_part(f.gradient(st[static_cast<std::size_t>(s)], grid.stage_time(k, s)));
            x[i] = next;
        });
        for (int s = 0; s < 4; ++s) out.W_stage[k][static_cast<std::size_t>(s)] = ordered_mean(s);
        out.W_node[k] = out.W_stage[k][0];
    }
    for_each_index(m, exec, [&](std::size_t i) { spin[i][0] = skew_part(f.gradient(x[i], grid.t_end())); });
    out.W_node.back() = ordered_mean(0);
    for (std::size_t k = 0; k < grid.size(); ++k) out.omega_node[k] = 2.0 * axial_vector(out.W_node[k]);
    return out;
}

MatrixOdeResult relative_rotation(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean) {
    if (!(traj.grid == mean.grid)) fail(ErrorCode::GridMismatch, "trajectory and mean spin are on different grids");
    auto gen = [&f, &traj, &mean](const Stage& s) { return skew_part(f.gradient(traj.at(s), s.t)) - mean.at(s); };
    return integrate_matrix_ode(gen, traj.grid, true, f.dim());
}

RelativeFactors recover_theta_sigma(const MatrixOdeResult& o, const MatrixOdeResult& phi) {
    if (!(o.grid == phi.grid) || o.Z.size() != phi.Z.size())
        fail(ErrorCode::GridMismatch, "O and Phi histories are not aligned");
    RelativeFactors out{o.grid, phi.Z, {}, {}};
    for (std::size_t k = 0; k < o.Z.size(); ++k) {
        const Mat pt = phi.Z[k].transpose();
        out.Theta.push_back(pt * o.Z[k]);
        out.Sigma.push_back(o.Z[k] * pt);
    }
    return out;
}

std::vector<Mat> integrate_theta_ode(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean) {
    if (!(traj.grid == mean.grid)) fail(ErrorCode::GridMismatch, "trajectory and mean spin are on different grids");
    const int n = f.dim();
    auto rhs = [&](const Stage& s, const std::array<Mat, 2>& pt) {
        const Mat wbar = mean.at(s);
        const Mat g = skew_part(f.gradient(traj.at(s), s.t)) - wbar;
        return std::array<Mat, 2>{g * pt[0], pt[0].transpose() * wbar * pt[0] * pt[1]};
    };
    auto post = [](std::array<Mat, 2>& pt) {
        pt[0] = nearest_rotation(pt[0]);
        pt[1] = nearest_rotation(pt[1]);
    };
    const auto states = integrate_coupled<2>(traj.grid, {Mat::identity(n), Mat::identity(n)}, rhs, post);
    std::vector<Mat> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s[1]);
    return out;
}

std::vector<Mat> integrate_sigma_ode(const VelocityField& f, const Vec& x0, const BodySampler& sampler,
                                     const TimeGrid& grid, Execution exec) {
    const int n = f.dim();
    const TimeGrid back(grid.t_end(), grid.tau(), grid.steps());
    const Trajectory traj = advect(f, advect(f, x0, grid).end(), back);
    std::vector<Vec> ends;
    for (const Trajectory& t : advect_batch(f, sampler.seeds(), grid, exec)) ends.push_back(t.end());
    const MeanSpinHistory mean = mean_spin_history(f, BodySampler(ends, sampler.weights()), back, exec);
    // State: P = Phi_tau^t (dP/dtau = -P G) and Sigma_tau^t.
    auto rhs = [&](const Stage& s, const std::array<Mat, 2>& ps) {
        const Mat wbar = mean.at(s);
        const Mat g = skew_part(f.gradient(traj.at(s), s.t)) - wbar;
        return std::array<Mat, 2>{-1.0 * (ps[0] * g), -1.0 * (ps[1] * ps[0] * wbar * ps[0].transpose())};
    };
    auto post = [](std::array<Mat, 2>& ps) {
        ps[0] = nearest_rotation(ps[0]);
        ps[1] = nearest_rotation(ps[1]);
    };
    const auto states = integrate_coupled<2>(back, {Mat::identity(n), Mat::identity(n)}, rhs, post);
    std::vector<Mat> out(states.size(), Mat(n));
    for (std::size_t k = 0; k < states.size(); ++k) out[states.size() - 1 - k] = states[k][1];
    return out;
}

} // namespace dynpolar
