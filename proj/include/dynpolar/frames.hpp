#pragma once

// Euclidean observer changes x = Q(t) y + b(t) and the dual-frame residuals
// used to check objectivity claims. The transformed observer integrates its
// own velocity field from scratch rather than transforming histories.

#include <functional>

#include "dynpolar/fields.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/mean_rotation.hpp"

namespace dynpolar {

class FrameChange {
public:
    using MatFn = std::function<Mat(double)>;
    using VecFn = std::function<Vec(double)>;

    static FrameChange identity(int dim);
    // Q(t) = Rot(rate t).
    static FrameChange planar_spin(double rate);
    // Q(t) = exp(rate t [n]x) for a unit axis n.
    static FrameChange axis_spin(const Vec& n, double rate);
    // Q(t) = exp(rate3 t [e3]x) exp(rate1 t [e1]x); the angular velocity
    // changes direction over time.
    static FrameChange tumbling(double rate3, double rate1);
    // Q, Qdot, b, bdot supplied directly. Q must stay a proper rotation.
    static FrameChange custom(int dim, MatFn q, MatFn qdot, VecFn b, VecFn bdot);

    // Copy with b(t) = b0 + b1 t + b2 t^2.
    FrameChange with_translation(const Vec& b0, const Vec& b1, const Vec& b2) const;

    int dim() const noexcept { return dim_; }
    Mat Q(double t) const { return q_(t); }
    Mat Qdot(double t) const { return qdot_(t); }
    Vec b(double t) const { return b_(t); }
    Vec bdot(double t) const { return bdot_(t); }

    // y = Q^T (x - b)
    Vec to_frame(const Vec& x, double t) const;
    // Inverse observer change.
    FrameChange inverse() const;

private:
    int dim_ = 3;
    MatFn q_, qdot_;
    VecFn b_, bdot_;
};

// 2 axial(Qdot Q^T), a 3-vector.
Vec frame_angular_velocity(const FrameChange& fr, double t);

// Q^T(t) F Q(tau). Throws DimensionMismatch.
Mat transform_defgrad(const Mat& F, const FrameChange& fr, double tau, double t);

// W~ = Q^T W Q - Q^T Qdot, D~ = Q^T D Q. The velocity is transformed at the
// point x the sample was taken at.
FieldSample transform_sample(const FieldSample& s, const Vec& x, const FrameChange& fr, double t);

// v~(y, t) = Q^T [v(Q y + b, t) - Qdot y - bdot] with gradient
// Q^T grad v Q - Q^T Qdot. Returned as a Custom field holding copies of f and fr.
VelocityField transformed_field(const VelocityField& f, const FrameChange& fr);

// Seeds mapped into the frame at time tau.
BodySampler transform_sampler(const BodySampler& sampler, const FrameChange& fr, double tau);

struct DpdObjectivity {
    double rN = 0.0;      // max_k ||N~ - Q^T(t) N Q(t)||_F
    double rM = 0.0;      // max_k ||M~ - Q^T(tau) M Q(tau)||_F
    double rO = 0.0;      // max_k ||O~ - Q^T(t) O Q(tau)||_F
    double sv_gap = 0.0;  // max_k of the singular value gap between N~ and N
};

DpdObjectivity dpd_objectivity_residuals(const VelocityField& f, const Vec& x0, const TimeGrid& grid,
                                         const FrameChange& fr);

// max_k ||Phi~ - Q^T(t) Phi Q(t)||_F with Phi~ recomputed in the new frame over
// the transformed sampler. Valid in any dimension; only in 2D is it expected
// to vanish.
double phi_frame_residual(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                          const FrameChange& fr);

// phi_frame_residual restricted to planar fields. Throws DimensionMismatch.
double phi_objectivity_2d(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                          const FrameChange& fr);

// max_k |psi - psi~| of the intrinsic angle.
double psi_invariance(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                      const FrameChange& fr);

// |omega(x) - (Q omega~(y) + qdot)|.
double vorticity_transfer_residual(const VelocityField& f, const Vec& x, double t, const FrameChange& fr);

} // namespace dynpolar
