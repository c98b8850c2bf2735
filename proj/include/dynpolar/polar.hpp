#pragma once

// Classic polar decomposition F = R U = V R and the experiments showing that
// polar rotations are neither additive nor free of memory.

#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/linalg.hpp"

namespace dynpolar {

struct PolarFactors {
    Mat R;
    Mat U;
    Mat V;
};

// U = sqrt(F^T F), R = F U^{-1}, V = R U R^T. Throws SingularF if det F <= 1e-14.
PolarFactors polar_decompose(const Mat& F);

// Closed form for F = [[1, k*elapsed], [0, 1]].
PolarFactors dienes_shear_polar(double k, double elapsed);

// Polar factors of every node of a deformation history.
struct PolarHistory {
    TimeGrid grid;
    std::vector<Mat> R;
    std::vector<Mat> U;
};

PolarHistory polar_history(const DeformationHistory& hist);

// Rates of the polar factors for a given velocity gradient L at the current
// state: spin = Rdot R^T (skew) and Udot (symmetric), the unique solution of
// L F = Rdot U + R Udot with F = R U.
struct PolarRates {
    Mat spin;
    Mat Udot;
};

PolarRates polar_rates(const Mat& R, const Mat& U, const Mat& L);

// W - 1/2 R [Udot U^-1 - U^-1 Udot] R^T
Mat polar_rotation_rate(const Mat& W, const Mat& R, const Mat& U, const Mat& Udot);

// ||R_s^t R_tau^s - R_tau^t||_F along the trajectory from x0 at tau.
// s must be a node of the uniform grid over [tau, t] with `steps` steps.
double nonadditivity_residual(const VelocityField& f, const Vec& x0, double tau, double s, double t,
                              std::size_t steps);

// Cumulative sum of the planar polar angle of F_{t_k}^{t_{k+1}} over `grid`.
std::vector<double> incremental_polar_angle(const VelocityField& f, const Vec& x0, const TimeGrid& grid);

// Same, restarting every `stride` nodes of an existing history. Between
// restarts the value is the restart total plus the polar angle accumulated
// since the last restart, so the series is defined on every node.
std::vector<double> incremental_polar_angle(const DeformationHistory& hist, std::size_t stride);

// (R, U) integrated jointly as an implicit ODE pair with RK4.
// Throws StretchSingular if U degenerates.
PolarHistory polar_via_ode(const VelocityField& f, const Trajectory& traj);

// ||Rdot R^T|_{tau1} - Rdot R^T|_{tau2}||_F at the common endpoint (x(t), t).
// x0 is the position at min(tau1, tau2); the later start time must be a node
// of the grid over [min, t] with `steps` steps.
double polar_rate_memory_gap(const VelocityField& f, const Vec& x0, double tau1, double tau2, double t,
                             std::size_t steps);

// With Omega = R Xi and Delta = Xi^T U from polar_decompose(F), returns
// ||Delta^T Delta - F^T F||_F. Throws NotRotation for an improper Xi.
double nonunique_family_check(const Mat& F, const Mat& xi);

// Index of the node equal to `t` (within 1e-9 |dt|); throws NodeMismatch.
std::size_t node_index(const TimeGrid& grid, double t);

} // namespace dynpolar
