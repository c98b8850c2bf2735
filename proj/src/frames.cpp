#include "dynpolar/frames.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>

#include "dynpolar/angles.hpp"
#include "dynpolar/dpd.hpp"

namespace dynpolar {

namespace {

struct FrameAt {
    Mat q, qt, qdot;
    Vec b, bdot;
};

Vec zero_vec(int dim) { return Vec(dim); }

} // namespace

FrameChange FrameChange::custom(int dim, MatFn q, MatFn qdot, VecFn b, VecFn bdot) {
    if (dim != 2 && dim != 3) fail(ErrorCode::DimensionMismatch, "frame dimension must be 2 or 3");
    if (!q || !qdot || !b || !bdot) fail(ErrorCode::InvalidArgument, "frame change needs all four callables");
    FrameChange fr;
    fr.dim_ = dim;
    fr.q_ = std::move(q);
    fr.qdot_ = std::move(qdot);
    fr.b_ = std::move(b);
    fr.bdot_ = std::move(bdot);
    return fr;
}

FrameChange FrameChange::identity(int dim) {
    return custom(
        dim, [dim](double) { return Mat::identity(dim); }, [dim](double) { return Mat(dim); },
        [dim](double) { return zero_vec(dim); }, [dim](double) { return zero_vec(dim); });
}

FrameChange FrameChange::planar_spin(double rate) {
    return custom(
        2, [rate](double t) { return planar_rotation(rate * t); },
        [rate](double t) { return rate * skew_from_rate(1.0) * planar_rotation(rate * t); },
        [](double) { return zero_vec(2); }, [](double) { return zero_vec(2); });
}

FrameChange FrameChange::axis_spin(const Vec& n, double rate) {
    if (n.dim() != 3 || std::abs(norm(n) - 1.0) > 1e-10) fail(ErrorCode::NotUnit, "spin axis must be a unit 3-vector");
    const Mat k = skew_from(n, 3);
    return custom(
        3, [n, rate](double t) { return rotation_from_vector(rate * t * n, 3); },
        [n, k, rate](double t) { return rate * k * rotation_from_vector(rate * t * n, 3); },
        [](double) { return zero_vec(3); }, [](double) { return zero_vec(3); });
}

FrameChange FrameChange::tumbling(double rate3, double rate1) {
    const Vec e1 = Vec::unit(3, 0), e3 = Vec::unit(3, 2);
    auto a = [=](double t) { return rotation_from_vector(rate3 * t * e3, 3); };
    auto b = [=](double t) { return rotation_from_vector(rate1 * t * e1, 3); };
    return custom(
        3, [=](double t) { return a(t) * b(t); },
        [=](double t) {
            return rate3 * skew_from(e3, 3) * a(t) * b(t) + rate1 * a(t) * skew_from(e1, 3) * b(t);
        },
        [](double) { return zero_vec(3); }, [](double) { return zero_vec(3); });
}

FrameChange FrameChange::with_translation(const Vec& b0, const Vec& b1, const Vec& b2) const {
    require_same_dim(b0.dim(), dim_, "with_translation");
    require_same_dim(b1.dim(), dim_, "with_translation");
    require_same_dim(b2.dim(), dim_, "with_translation");
    FrameChange fr = *this;
    fr.b_ = [=](double t) { return b0 + t * b1 + (t * t) * b2; };
    fr.bdot_ = [=](double t) { return b1 + (2.0 * t) * b2; };
    return fr;
}

Vec FrameChange::to_frame(const Vec& x, double t) const { return Q(t).transpose() * (x - b(t)); }

FrameChange FrameChange::inverse() const {
    const FrameChange self = *this;
    return custom(
        dim_, [self](double t) { return self.Q(t).transpose(); }, [self](double t) { return self.Qdot(t).transpose(); },
        [self](double t) { return -1.0 * (self.Q(t).transpose() * self.b(t)); },
        [self](double t) {
            return -1.0 * (self.Qdot(t).transpose() * self.b(t) + self.Q(t).transpose() * self.bdot(t));
        });
}

Vec frame_angular_velocity(const FrameChange& fr, double t) {
    return 2.0 * axial_vector(skew_part(fr.Qdot(t) * fr.Q(t).transpose()));
}

Mat transform_defgrad(const Mat& F, const FrameChange& fr, double tau, double t) {
    require_same_dim(F.dim(), fr.dim(), "transform_defgrad");
    return fr.Q(t).transpose() * F * fr.Q(tau);
}

FieldSample transform_sample(const FieldSample& s, const Vec& x, const FrameChange& fr, double t) {
    require_same_dim(s.grad_v.dim(), fr.dim(), "transform_sample");
    const Mat q = fr.Q(t), qd = fr.Qdot(t), qt = q.transpose();
    const Vec y = qt * (x - fr.b(t));
    FieldSample out;
    out.v = qt * (s.v - qd * y - fr.bdot(t));
    out.grad_v = qt * s.grad_v * q - qt * qd;
    out.W = skew_part(out.grad_v);
    out.D = qt * s.D * q;
    out.omega = vorticity_of(out.grad_v);
    return out;
}

VelocityField transformed_field(const VelocityField& f, const FrameChange& fr) {
    require_same_dim(f.dim(), fr.dim(), "transformed_field");
    // Seeds are advanced together, so consecutive calls on one thread mostly
    // share t; the frame state is cached per thread and per field instance.
    static std::atomic<std::uint64_t> next_id{1};
    const std::uint64_t id = next_id++;
    auto state = [fr, id](double t) -> const FrameAt& {
        struct Slot {
            std::uint64_t key = 0;
            double t = 0.0;
            FrameAt at;
        };
        thread_local std::array<Slot, 4> cache;
        thread_local std::size_t next = 0;
        for (const Slot& s : cache)
            if (s.key == id && s.t == t) return s.at;
        Slot& s = cache[next];
        next = (next + 1) % cache.size();
        s.at.q = fr.Q(t);
        s.at.qt = s.at.q.transpose();
        s.at.qdot = fr.Qdot(t);
        s.at.b = fr.b(t);
        s.at.bdot = fr.bdot(t);
        s.key = id;
        s.t = t;
        return s.at;
    };
    auto v = [f, state](const Vec& y, double t) {
        const FrameAt& s = state(t);
        return s.qt * (f.velocity(s.q * y + s.b, t) - s.qdot * y - s.bdot);
    };
    auto grad = [f, state](const Vec& y, double t) {
        const FrameAt& s = state(t);
        return s.qt * f.gradient(s.q * y + s.b, t) * s.q - s.qt * s.qdot;
    };
    return VelocityField::custom(f.dim(), v, grad, f.name() + " (moving frame)");
}

BodySampler transform_sampler(const BodySampler& sampler, const FrameChange& fr, double tau) {
    std::vector<Vec> seeds;
    seeds.reserve(sampler.size());
    for (const Vec& s : sampler.seeds()) seeds.push_back(fr.to_frame(s, tau));
    return BodySampler(std::move(seeds), sampler.weights());
}

DpdObjectivity dpd_objectivity_residuals(const VelocityField& f, const Vec& x0, const TimeGrid& grid,
                                         const FrameChange& fr) {
    const VelocityField g = transformed_field(f, fr);
    const DpdResult a = dynamic_polar(f, advect(f, x0, grid));
    const DpdResult b = dynamic_polar(g, advect(g, fr.to_frame(x0, grid.tau()), grid));
    const Mat q0 = fr.Q(grid.tau());
    DpdObjectivity r;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat qt = fr.Q(grid.node(k));
        const Mat qtt = qt.transpose();
        r.rN = std::max(r.rN, frobenius(b.factors.N[k] - qtt * a.factors.N[k] * qt));
        r.rM = std::max(r.rM, frobenius(b.factors.M[k] - q0.transpose() * a.factors.M[k] * q0));
        r.rO = std::max(r.rO, frobenius(b.factors.O[k] - qtt * a.factors.O[k] * q0));
        r.sv_gap = std::max(r.sv_gap, norm(singular_values(b.factors.N[k]) - singular_values(a.factors.N[k])));
    }
    return r;
}

double phi_frame_residual(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                          const FrameChange& fr) {
    const VelocityField g = transformed_field(f, fr);
    const auto phi = relative_rotation(f, advect(f, x0, grid), mean_spin_history(f, sampler, grid));
    const BodySampler moved = transform_sampler(sampler, fr, grid.tau());
    const auto phi_t =
        relative_rotation(g, advect(g, fr.to_frame(x0, grid.tau()), grid), mean_spin_history(g, moved, grid));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat q = fr.Q(grid.node(k));
        worst = std::max(worst, frobenius(phi_t.Z[k] - q.transpose() * phi.Z[k] * q));
    }
    return worst;
}

double phi_objectivity_2d(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                          const FrameChange& fr) {
    if (f.dim() != 2) fail(ErrorCode::DimensionMismatch, "Phi is only objective for planar flows");
    return phi_frame_residual(f, x0, grid, sampler, fr);
}

double psi_invariance(const VelocityField& f, const Vec& x0, const TimeGrid& grid, const BodySampler& sampler,
                      const FrameChange& fr) {
    const VelocityField g = transformed_field(f, fr);
    const auto a = intrinsic_angle(f, advect(f, x0, grid), mean_spin_history(f, sampler, grid));
    const BodySampler moved = transform_sampler(sampler, fr, grid.tau());
    const auto b = intrinsic_angle(g, advect(g, fr.to_frame(x0, grid.tau()), grid), mean_spin_history(g, moved, grid));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(a.value[k] - b.value[k]));
    return worst;
}

double vorticity_transfer_residual(const VelocityField& f, const Vec& x, double t, const FrameChange& fr) {
    const Vec omega = vorticity_of(f.gradient(x, t));
    const Vec omega_t = vorticity_of(transformed_field(f, fr).gradient(fr.to_frame(x, t), t));
    const Vec qdot = frame_angular_velocity(fr, t);
    if (f.dim() == 2) return std::abs(omega[2] - omega_t[2] - qdot[2]);
    return norm(omega - (fr.Q(t) * omega_t + qdot));
}

} // namespace dynpolar
