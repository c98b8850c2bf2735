#pragma once

// Fixed-step classical RK4 for trajectories, the equation of variations and
// generic linear matrix ODEs Zdot = G(t) Z.
//
// A trajectory stores the four RK4 stage positions of every step, so any
// matrix ODE driven by field quantities along it is integrated exactly as if
// (x, Z) had been advanced jointly.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/linalg.hpp"

namespace dynpolar {

inline constexpr std::array<double, 4> kStageOffset{0.0, 0.5, 0.5, 1.0};

class TimeGrid {
public:
    TimeGrid() = default;
    // Throws InvalidArgument for steps == 0 or non-finite endpoints.
    // tau == t_end is allowed and yields a degenerate grid with dt == 0.
    TimeGrid(double tau, double t_end, std::size_t steps);

    double tau() const noexcept { return tau_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_ + 1; }
    double dt() const noexcept { return (t_end_ - tau_) / static_cast<double>(steps_); }
    double node(std::size_t k) const noexcept;
    double stage_time(std::size_t step, int stage) const noexcept;

    // Grid restricted to nodes [first, last].
    TimeGrid sub(std::size_t first, std::size_t last) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double tau_ = 0.0;
    double t_end_ = 1.0;
    std::size_t steps_ = 1;
};

struct Stage {
    std::size_t step = 0;
    int index = 0; // 0..3
    double t = 0.0;
};

struct Trajectory {
    TimeGrid grid;
    std::vector<Vec> points;                 // one per node
    std::vector<std::array<Vec, 4>> stages;  // one set per step

    const Vec& at(const Stage& s) const { return stages[s.step][static_cast<std::size_t>(s.index)]; }
    const Vec& start() const { return points.front(); }
    const Vec& end() const { return points.back(); }
    // Nodes [first, last] with the same stage positions.
    Trajectory slice(std::size_t first, std::size_t last) const;
};

struct DeformationHistory {
    Trajectory trajectory;
    std::vector<Mat> F;
};

struct MatrixOdeResult {
    TimeGrid grid;
    std::vector<Mat> Z;
    bool reprojected = false;
};

using Generator = std::function<Mat(const Stage&)>;

Trajectory advect(const VelocityField& f, const Vec& x0, const TimeGrid& grid);

// Step k of advect from x; fills the four stage positions and returns the
// next node. Throws SingularPoint.
Vec advect_step(const VelocityField& f, const TimeGrid& grid, std::size_t k, const Vec& x, std::array<Vec, 4>& stages);

MatrixOdeResult integrate_matrix_ode(const Generator& g, const TimeGrid& grid, bool reproject,
                                     int dim);

DeformationHistory deformation_gradient(const VelocityField& f, const Trajectory& traj);

// Field quantities sampled at the stored stage positions of `traj`.
Generator gradient_generator(const VelocityField& f, const Trajectory& traj);
Generator spin_generator(const VelocityField& f, const Trajectory& traj);

// One RK4 step of a coupled system of N matrices.
// rhs(stage, state) -> state derivative.
template <std::size_t N, class Rhs>
std::array<Mat, N> rk4_step(const TimeGrid& grid, std::size_t step, const std::array<Mat, N>& y, Rhs&& rhs) {
    const double h = grid.dt();
    auto stage = [&](int i) { return Stage{step, i, grid.stage_time(step, i)}; };
    auto axpy = [](const std::array<Mat, N>& base, double a, const std::array<Mat, N>& d) {
        std::array<Mat, N> out = base;
        for (std::size_t i = 0; i < N; ++i) out[i] += a * d[i];
        return out;
    };
    const auto k1 = rhs(stage(0), y);
    const auto k2 = rhs(stage(1), axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(stage(2), axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(stage(3), axpy(y, h, k3));
    std::array<Mat, N> out = y;
    for (std::size_t i = 0; i < N; ++i) out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Integrates a coupled matrix system over the whole grid; `post` may modify
// the state after every step (e.g. reprojection onto SO(n)).
template <std::size_t N, class Rhs, class Post>
std::vector<std::array<Mat, N>> integrate_coupled(const TimeGrid& grid, const std::array<Mat, N>& init, Rhs&& rhs,
                                                  Post&& post) {
    std::vector<std::array<Mat, N>> out;
    out.reserve(grid.size());
    out.push_back(init);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        auto next = rk4_step<N>(grid, k, out.back(), rhs);
        post(next);
        out.push_back(std::move(next));
    }
    return out;
}

} // namespace dynpolar
