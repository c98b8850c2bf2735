#pragma once

// Dynamically consistent rotation angles along a trajectory:
//   dynamic   phi   = 1/2 int omega . g ds
//   relative  varphi = 1/2 int (omega - omega_bar) . g ds
//   intrinsic psi   = 1/2 int |omega - omega_bar| ds
// All integrals use the trapezoidal rule on the trajectory nodes, so they are
// exactly additive over node splits. The sign is that of the rotation angle
// of O (resp. Phi) about g.

#include <cstddef>
#include <functional>
#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/mean_rotation.hpp"

namespace dynpolar {

class AxisField {
public:
    using Fn = std::function<Vec(const Vec&, double)>;

    // Throws NotUnit unless |g| = 1 within 1e-10.
    static AxisField constant(const Vec& g);
    // e3, for planar fields.
    static AxisField planar();
    // g(x, t) is checked for unit length at every evaluation.
    static AxisField callable(Fn g);

    // Always a 3-vector. Throws NotUnit.
    Vec at(const Vec& x, double t) const;

private:
    Fn fn_;
};

struct AngleSeries {
    TimeGrid grid;
    std::vector<double> value;

    double final_value() const { return value.back(); }
};

AngleSeries dynamic_angle(const VelocityField& f, const Trajectory& traj, const AxisField& g);

// omega_bar is read from mean.omega_node. Throws GridMismatch.
AngleSeries relative_angle(const VelocityField& f, const Trajectory& traj, const AxisField& g,
                           const MeanSpinHistory& mean);

AngleSeries intrinsic_angle(const VelocityField& f, const Trajectory& traj, const MeanSpinHistory& mean);

enum class AngleKind { Dynamic, Relative, Intrinsic, Polar };

// |a(tau, t) - a(sigma, t) - a(tau, sigma)| with the three pieces computed
// separately on the nodes of the grid (tau, t, steps). Polar uses the one-shot
// planar polar angle of each piece. Relative and Intrinsic need a sampler.
// Throws NodeMismatch if sigma is not a grid node.
double additivity_residual(AngleKind kind, const VelocityField& f, const Vec& x0, double tau, double sigma, double t,
                           std::size_t steps, const AxisField& g = AxisField::planar(),
                           const BodySampler* sampler = nullptr);

// Angle generated by a rotation history: int qdot . g ds with qdot the axial
// vector of Qdot Q^T (central differences, one-sided at the ends) and g
// evaluated on traj. Throws NotRotation and GridMismatch.
AngleSeries angle_from_rotation_history(const std::vector<Mat>& q, const TimeGrid& grid, const AxisField& g,
                                        const Trajectory& traj);

} // namespace dynpolar
