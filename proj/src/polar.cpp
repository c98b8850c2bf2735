#include "dynpolar/polar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dynpolar {

PolarFactors polar_decompose(const Mat& F) {
    const double det = F.det();
    if (!(det > 1e-14)) fail(ErrorCode::SingularF, "polar decomposition needs det F > 0 (det = " + std::to_string(det) + ")");
    PolarFactors p;
    p.U = principal_sqrt_spd(F.transpose() * F);
    p.R = F * p.U.inverse();
    p.V = sym_part(p.R * p.U * p.R.transpose());
    return p;
}

PolarFactors dienes_shear_polar(double k, double elapsed) {
    const double gamma = k * elapsed;
    const double beta = std::atan(0.5 * gamma);
    const double c = std::cos(beta), s = std::sin(beta);
    PolarFactors p;
    p.R = planar_rotation(-beta);
    p.U = Mat{{c, s}, {s, gamma * s + c}};
    p.V = Mat{{(1.0 + s * s) / c, s}, {s, c}};
    return p;
}

PolarHistory polar_history(const DeformationHistory& hist) {
    PolarHistory out{hist.trajectory.grid, {}, {}};
    out.R.reserve(hist.F.size());
    out.U.reserve(hist.F.size());
    for (const Mat& F : hist.F) {
        PolarFactors p = polar_decompose(F);
        out.R.push_back(std::move(p.R));
        out.U.push_back(std::move(p.U));
    }
    return out;
}

PolarRates polar_rates(const Mat& R, const Mat& U, const Mat& L) {
    // In the rotated frame L' = R^T L R the skew rate Om' = R^T Rdot solves
    // Om' U + U Om' = L' U - U L'^T, after which Udot = (L' - Om') U.
    const int n = U.dim();
    const Mat lr = R.transpose() * L * R;
    const Mat rhs = lr * U - U * lr.transpose();
    Mat om(n);
    if (n == 2) {
        const double tr = U.trace();
        if (!(tr > 0.0)) fail(ErrorCode::StretchSingular, "stretch tensor has non-positive trace");
        om = skew_from_rate(rhs(1, 0) / tr);
    } else {
        // skew(w) U + U skew(w) = skew((tr U I - U) w) for symmetric U.
        const Mat a = U.trace() * Mat::identity(3) - U;
        const Vec c{0.5 * (rhs(2, 1) - rhs(1, 2)), 0.5 * (rhs(0, 2) - rhs(2, 0)), 0.5 * (rhs(1, 0) - rhs(0, 1))};
        om = skew_from(a.inverse() * c, 3);
    }
    PolarRates r;
    r.Udot = sym_part((lr - om) * U);
    r.spin = R * om * R.transpose();
    return r;
}

Mat polar_rotation_rate(const Mat& W, const Mat& R, const Mat& U, const Mat& Udot) {
    const Mat ui = U.inverse();
    return W - 0.5 * R * (Udot * ui - ui * Udot) * R.transpose();
}

std::size_t node_index(const TimeGrid& grid, double t) {
    const double dt = grid.dt();
    if (dt == 0.0) {
        if (t == grid.tau()) return 0;
        fail(ErrorCode::NodeMismatch, "degenerate grid has no node at " + std::to_string(t));
    }
    const double pos = (t - grid.tau()) / dt;
    const double k = std::round(pos);
    if (k < 0.0 || k > static_cast<double>(grid.steps()) || std::abs(pos - k) > 1e-9)
        fail(ErrorCode::NodeMismatch, "time " + std::to_string(t) + " is not a grid node");
    return static_cast<std::size_t>(k);
}

double nonadditivity_residual(const VelocityField& f, const Vec& x0, double tau, double s, double t,
                              std::size_t steps) {
    if (!(tau <= s && s <= t && tau < t)) fail(ErrorCode::InvalidArgument, "need tau <= s <= t with tau < t");
    const TimeGrid grid(tau, t, steps);
    const auto hist = deformation_gradient(f, advect(f, x0, grid));
    const std::size_t ks = node_index(grid, s);
    const Mat& f_ts = hist.F[ks];
    const Mat& f_tt = hist.F.back();
    const Mat r_full = polar_decompose(f_tt).R;
    const Mat r_first = polar_decompose(f_ts).R;
    const Mat r_second = polar_decompose(f_tt * f_ts.inverse()).R;
    return frobenius(r_second * r_first - r_full);
}

std::vector<double> incremental_polar_angle(const DeformationHistory& hist, std::size_t stride) {
    if (hist.F.empty() || hist.F.front().dim() != 2)
        fail(ErrorCode::DimensionMismatch, "incremental polar angle is defined for planar fields");
    if (stride == 0) fail(ErrorCode::InvalidArgument, "stride must be positive");
    std::vector<double> out(hist.F.size(), 0.0);
    double total = 0.0;
    std::size_t restart = 0;
    Mat restart_inv = hist.F[0].inverse();
    for (std::size_t k = 1; k < hist.F.size(); ++k) {
        const double partial = planar_angle(polar_decompose(hist.F[k] * restart_inv).R);
        out[k] = total + partial;
        if (k - restart == stride) {
            total += partial;
            restart = k;
            restart_inv = hist.F[k].inverse();
        }
    }
    return out;
}

std::vector<double> incremental_polar_angle(const VelocityField& f, const Vec& x0, const TimeGrid& grid) {
    if (f.dim() != 2) fail(ErrorCode::DimensionMismatch, "incremental polar angle is defined for planar fields");
    return incremental_polar_angle(deformation_gradient(f, advect(f, x0, grid)), 1);
}

PolarHistory polar_via_ode(const VelocityField& f, const Trajectory& traj) {
    const int n = f.dim();
    auto rhs = [&](const Stage& s, const std::array<Mat, 2>& ru) {
        const Mat L = f.gradient(traj.at(s), s.t);
        const PolarRates r = polar_rates(ru[0], ru[1], L);
        return std::array<Mat, 2>{r.spin * ru[0], r.Udot};
    };
    auto post = [](std::array<Mat, 2>& ru) {
        if (!(ru[1].det() > 1e-14) || !ru[1].is_finite())
            fail(ErrorCode::StretchSingular, "stretch tensor became singular during integration");
    };
    const auto states = integrate_coupled<2>(traj.grid, {Mat::identity(n), Mat::identity(n)}, rhs, post);
    PolarHistory out{traj.grid, {}, {}};
    for (const auto& s : states) {
        out.R.push_back(s[0]);
        out.U.push_back(s[1]);
    }
    return out;
}

double polar_rate_memory_gap(const VelocityField& f, const Vec& x0, double tau1, double tau2, double t,
                             std::size_t steps) {
    if (tau1 == tau2) return 0.0;
    const double lo = std::min(tau1, tau2), hi = std::max(tau1, tau2);
    if (!(hi < t)) fail(ErrorCode::InvalidArgument, "both start times must precede t");
    const TimeGrid grid(lo, t, steps);
    const auto hist = deformation_gradient(f, advect(f, x0, grid));
    const FieldSample end = evaluate(f, hist.trajectory.end(), t);
    const Mat& f_end = hist.F.back();
    auto rate = [&](const Mat& F) {
        const PolarFactors p = polar_decompose(F);
        const PolarRates r = polar_rates(p.R, p.U, end.grad_v);
        return polar_rotation_rate(end.W, p.R, p.U, r.Udot);
    };
    const Mat from_lo = rate(f_end);
    const Mat from_hi = rate(f_end * hist.F[node_index(grid, hi)].inverse());
    return frobenius(from_lo - from_hi);
}

double nonunique_family_check(const Mat& F, const Mat& xi) {
    if (!is_rotation(xi, 1e-10)) fail(ErrorCode::NotRotation, "Xi must be a proper rotation");
    const PolarFactors p = polar_decompose(F);
    const Mat delta = xi.transpose() * p.U;
    return frobenius(delta.transpose() * delta - F.transpose() * F);
}

} // namespace dynpolar
