#pragma once

// Analytic velocity fields v(x, t) with exact Jacobians.

#include <functional>
#include <string>

#include "dynpolar/linalg.hpp"

namespace dynpolar {

enum class FieldKind { PlanarShear, IrrotationalVortex, Shear3D, RigidRotation, Custom };

// Velocity, its gradient, and the spin / rate-of-strain split at one point.
// omega is always a 3-vector; planar fields carry (0, 0, omega_3).
struct FieldSample {
    Vec v;
    Mat grad_v;
    Mat W;
    Mat D;
    Vec omega;
};

class VelocityField {
public:
    using VelocityFn = std::function<Vec(const Vec&, double)>;
    using GradientFn = std::function<Mat(const Vec&, double)>;

    // v = (k x2, 0)
    static VelocityField planar_shear(double k);
    // v = alpha (-x2, x1) / |x|^2
    static VelocityField irrotational_vortex(double alpha);
    // v = (k x3, c k x3, w)
    static VelocityField shear3d(double k, double c, double w);
    // v = Omega x x
    static VelocityField rigid_rotation(const Vec& angular_velocity);
    // User callables must be re-entrant and return the exact gradient.
    static VelocityField custom(int dim, VelocityFn v, GradientFn grad, std::string name = "custom");
    // v = A x, a Custom field with constant gradient.
    static VelocityField linear(const Mat& a, std::string name = "linear");

    FieldKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    const std::string& name() const noexcept { return name_; }

    double k() const noexcept { return k_; }
    double alpha() const noexcept { return alpha_; }
    double c() const noexcept { return c_; }
    double w() const noexcept { return w_; }
    const Vec& angular_velocity() const noexcept { return omega_; }

    // Both throw DimensionMismatch on a wrong-size x and SingularPoint for the
    // vortex core.
    Vec velocity(const Vec& x, double t) const;
    Mat gradient(const Vec& x, double t) const;

private:
    VelocityField() = default;

    FieldKind kind_ = FieldKind::Custom;
    int dim_ = 2;
    std::string name_;
    double k_ = 0.0, alpha_ = 0.0, c_ = 0.0, w_ = 0.0;
    Vec omega_ = Vec(3);
    VelocityFn custom_v_;
    GradientFn custom_grad_;
};

// Vorticity vector (always 3 components) from a velocity gradient.
Vec vorticity_of(const Mat& grad_v);

FieldSample evaluate(const VelocityField& f, const Vec& x, double t);

struct FlowState {
    Vec x;
    Mat F;
};

// Closed-form flow map and deformation gradient from (x0, tau) to t.
// Throws Unsupported for Custom fields.
FlowState analytic_deformation(const VelocityField& f, const Vec& x0, double tau, double t);

} // namespace dynpolar
