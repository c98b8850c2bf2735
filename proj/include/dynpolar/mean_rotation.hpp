#pragma once

// Body-mean spin and the factorization O = Phi Theta = Sigma Phi, where the
// relative rotation Phi is generated by W - mean(W).

#include <cstddef>
#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/linalg.hpp"
#include "dynpolar/parallel.hpp"

namespace dynpolar {

// Seed points (material points at the grid start) with quadrature weights.
class BodySampler {
public:
    // Equal weights when `weights` is empty; otherwise they must be
    // nonnegative and sum to 1 within 1e-12. Throws InvalidArgument.
    explicit BodySampler(std::vector<Vec> seeds, std::vector<double> weights = {});

    // Cell-centred uniform grid over the box [lower, upper] with
    // resolution[i] points along axis i, equal weights.
    static BodySampler uniform_grid(const Vec& lower, const Vec& upper, const std::vector<int>& resolution);

    const std::vector<Vec>& seeds() const noexcept { return seeds_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return seeds_.size(); }
    int dim() const noexcept { return seeds_.front().dim(); }

private:
    std::vector<Vec> seeds_;
    std::vector<double> weights_;
};

struct MeanSpin {
    Mat W;
    Vec omega; // 3-vector, (0, 0, w3) in 2D
};

// Weighted mean of W and omega over the given positions at time t.
MeanSpin mean_spin(const VelocityField& f, const std::vector<Vec>& positions, const std::vector<double>& weights,
                   double t);

// Mean spin along a grid, evaluated at every RK4 stage of every step and at
// every node, from seeds advected jointly on the same grid.
struct MeanSpinHistory {
    TimeGrid grid;
    std::vector<std::array<Mat, 4>> W_stage;
    std::vector<Mat> W_node;
    std::vector<Vec> omega_node;

    const Mat& at(const Stage& s) const { return W_stage[s.step][static_cast<std::size_t>(s.index)]; }
    // Nodes [first, last], consistent with Trajectory::slice.
    MeanSpinHistory slice(std::size_t first, std::size_t last) const;
};

MeanSpinHistory mean_spin_history(const VelocityField& f, const BodySampler& sampler, const TimeGrid& grid,
                                  Execution exec = Execution::Parallel);

// Phidot = [W(x(t), t) - Wbar(t)] Phi with reprojection. Throws GridMismatch
// when the histories are on different grids.
MatrixOdeResult relative_rotation(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean);

struct RelativeFactors {
    TimeGrid grid;
    std::vector<Mat> Phi;
    std::vector<Mat> Theta;
    std::vector<Mat> Sigma;
};

// Theta = Phi^T O and Sigma = O Phi^T per node. Throws GridMismatch.
RelativeFactors recover_theta_sigma(const MatrixOdeResult& o, const MatrixOdeResult& phi);

// Thetadot = [Phi^T Wbar Phi] Theta, integrated jointly with Phi.
std::vector<Mat> integrate_theta_ode(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean);

// d/dtau Sigma_tau^t = -Sigma_tau^t [Phi_tau^t Wbar(tau) Phi_t^tau], integrated
// backward in tau from grid.t_end(). Seeds and x0 are positions at grid.tau().
// Entry k holds Sigma_{t_k}^{t_end}.
std::vector<Mat> integrate_sigma_ode(const VelocityField& f, const Vec& x0, const BodySampler& sampler,
                                     const TimeGrid& grid, Execution exec = Execution::Parallel);

} // namespace dynpolar
