#include "dynpolar/fields.hpp"

#include <cmath>
#include <utility>

namespace dynpolar {

namespace {

constexpr double kVortexCore = 1e-12;

double vortex_r2(const Vec& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (!(std::sqrt(r2) >= kVortexCore))
        fail(ErrorCode::SingularPoint, "irrotational vortex evaluated at the origin");
    return r2;
}

} // namespace

VelocityField VelocityField::planar_shear(double k) {
    VelocityField f;
    f.kind_ = FieldKind::PlanarShear;
    f.dim_ = 2;
    f.name_ = "planar_shear";
    f.k_ = k;
    return f;
}

VelocityField VelocityField::irrotational_vortex(double alpha) {
    VelocityField f;
    f.kind_ = FieldKind::IrrotationalVortex;
    f.dim_ = 2;
    f.name_ = "irrotational_vortex";
    f.alpha_ = alpha;
    return f;
}

VelocityField VelocityField::shear3d(double k, double c, double w) {
    VelocityField f;
    f.kind_ = FieldKind::Shear3D;
    f.dim_ = 3;
    f.name_ = "shear3d";
    f.k_ = k;
    f.c_ = c;
    f.w_ = w;
    return f;
}

VelocityField VelocityField::rigid_rotation(const Vec& angular_velocity) {
    if (angular_velocity.dim() != 3) fail(ErrorCode::DimensionMismatch, "rigid rotation needs a 3-vector");
    VelocityField f;
    f.kind_ = FieldKind::RigidRotation;
    f.dim_ = 3;
    f.name_ = "rigid_rotation";
    f.omega_ = angular_velocity;
    return f;
}

VelocityField VelocityField::custom(int dim, VelocityFn v, GradientFn grad, std::string name) {
    if (dim != 2 && dim != 3) fail(ErrorCode::DimensionMismatch, "custom field dimension must be 2 or 3");
    if (!v || !grad) fail(ErrorCode::InvalidArgument, "custom field needs velocity and gradient callables");
    VelocityField f;
    f.kind_ = FieldKind::Custom;
    f.dim_ = dim;
    f.name_ = std::move(name);
    f.custom_v_ = std::move(v);
    f.custom_grad_ = std::move(grad);
    return f;
}

VelocityField VelocityField::linear(const Mat& a, std::string name) {
    return custom(
        a.dim(), [a](const Vec& x, double) { return a * x; }, [a](const Vec&, double) { return a; },
        std::move(name));
}

Vec VelocityField::velocity(const Vec& x, double t) const {
    require_same_dim(x.dim(), dim_, "VelocityField::velocity");
    switch (kind_) {
    case FieldKind::PlanarShear: return Vec{k_ * x[1], 0.0};
    case FieldKind::IrrotationalVortex: {
        const double r2 = vortex_r2(x);
        return Vec{-alpha_ * x[1] / r2, alpha_ * x[0] / r2};
    }
    case FieldKind::Shear3D: return Vec{k_ * x[2], c_ * k_ * x[2], w_};
    case FieldKind::RigidRotation: return cross(omega_, x);
    case FieldKind::Custom: {
        Vec v = custom_v_(x, t);
        require_same_dim(v.dim(), dim_, "custom velocity");
        return v;
    }
    }
    fail(ErrorCode::Unsupported, "unknown field kind");
}

Mat VelocityField::gradient(const Vec& x, double t) const {
    require_same_dim(x.dim(), dim_, "VelocityField::gradient");
    switch (kind_) {
    case FieldKind::PlanarShear: return Mat{{0.0, k_}, {0.0, 0.0}};
    case FieldKind::IrrotationalVortex: {
        const double r2 = vortex_r2(x);
        const double r4 = r2 * r2;
        const double a = alpha_;
        // d/dx of (-a y / r2, a x / r2)
        return Mat{{2.0 * a * x[0] * x[1] / r4, -a * (x[0] * x[0] - x[1] * x[1]) / r4},
                   {a * (x[1] * x[1] - x[0] * x[0]) / r4, -2.0 * a * x[0] * x[1] / r4}};
    }
    case FieldKind::Shear3D: return Mat{{0.0, 0.0, k_}, {0.0, 0.0, c_ * k_}, {0.0, 0.0, 0.0}};
    case FieldKind::RigidRotation: return skew_from(omega_, 3);
    case FieldKind::Custom: {
        Mat g = custom_grad_(x, t);
        require_same_dim(g.dim(), dim_, "custom gradient");
        return g;
    }
    }
    fail(ErrorCode::Unsupported, "unknown field kind");
}

Vec vorticity_of(const Mat& grad_v) {
    const Mat& g = grad_v;
    if (g.dim() == 2) return Vec{0.0, 0.0, g(1, 0) - g(0, 1)};
    return Vec{g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
}

FieldSample evaluate(const VelocityField& f, const Vec& x, double t) {
    FieldSample s;
    s.v = f.velocity(x, t);
    s.grad_v = f.gradient(x, t);
    s.W = skew_part(s.grad_v);
    s.D = sym_part(s.grad_v);
    s.omega = vorticity_of(s.grad_v);
    return s;
}

FlowState analytic_deformation(const VelocityField& f, const Vec& x0, double tau, double t) {
    require_same_dim(x0.dim(), f.dim(), "analytic_deformation");
    const double s = t - tau;
    switch (f.kind()) {
    case FieldKind::PlanarShear:
        return {Vec{x0[0] + f.k() * x0[1] * s, x0[1]}, Mat{{1.0, f.k() * s}, {0.0, 1.0}}};
    case FieldKind::IrrotationalVortex: {
        const double r2 = vortex_r2(x0);
        const double theta = f.alpha() * s / r2;
        const Mat rot = planar_rotation(theta);
        const Vec x = rot * x0;
        // Angular rate alpha / |x0|^2 depends on the seed radius:
        // F = Rot(theta) + (J Rot x0) (d theta / d x0)^T.
        const Vec jx{-x[1], x[0]};
        const Vec dtheta = (-2.0 * f.alpha() * s / (r2 * r2)) * x0;
        return {x, rot + Mat::outer(jx, dtheta)};
    }
    case FieldKind::Shear3D: {
        const double k = f.k(), c = f.c(), w = f.w();
        const double drift = k * (x0[2] * s + 0.5 * w * s * s);
        return {Vec{x0[0] + drift, x0[1] + c * drift, x0[2] + w * s},
                Mat{{1.0, 0.0, k * s}, {0.0, 1.0, c * k * s}, {0.0, 0.0, 1.0}}};
    }
    case FieldKind::RigidRotation: {
        const Mat rot = rotation_from_vector(s * f.angular_velocity(), 3);
        return {rot * x0, rot};
    }
    case FieldKind::Custom: break;
    }
    fail(ErrorCode::Unsupported, "no closed-form deformation for custom field '" + f.name() + "'");
}

} // namespace dynpolar
