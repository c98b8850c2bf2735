#include "dynpolar/dpd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynpolar/polar.hpp"

namespace dynpolar {

MatrixOdeResult dynamic_rotation(const VelocityField& f, const Trajectory& traj) {
    return integrate_matrix_ode(spin_generator(f, traj), traj.grid, true, f.dim());
}

DpdFactors dynamic_stretch_from_F(const DeformationHistory& hist, const MatrixOdeResult& o) {
    if (hist.F.size() != o.Z.size() || !(hist.trajectory.grid == o.grid))
        fail(ErrorCode::GridMismatch, "deformation and rotation histories are not aligned");
    DpdFactors out;
    out.grid = o.grid;
    out.O = o.Z;
    out.M.reserve(o.Z.size());
    out.N.reserve(o.Z.size());
    for (std::size_t k = 0; k < o.Z.size(); ++k) {
        const Mat ot = o.Z[k].transpose(); // O_t^tau by the process property
        out.M.push_back(ot * hist.F[k]);
        out.N.push_back(hist.F[k] * ot);
    }
    out.provenance = Provenance::AlgebraicFromO;
    return out;
}

DpdResult dynamic_polar(const VelocityField& f, const Trajectory& traj) {
    DpdResult r{deformation_gradient(f, traj), {}};
    r.factors = dynamic_stretch_from_F(r.history, dynamic_rotation(f, traj));
    return r;
}

std::vector<Mat> integrate_M_ode(const VelocityField& f, const Trajectory& traj) {
    const int n = f.dim();
    auto rhs = [&](const Stage& s, const std::array<Mat, 2>& om) {
        const Mat g = f.gradient(traj.at(s), s.t);
        const Mat w = skew_part(g), d = sym_part(g);
        return std::array<Mat, 2>{w * om[0], om[0].transpose() * d * om[0] * om[1]};
    };
    auto post = [](std::array<Mat, 2>& om) { om[0] = nearest_rotation(om[0]); };
    const auto states = integrate_coupled<2>(traj.grid, {Mat::identity(n), Mat::identity(n)}, rhs, post);
    std::vector<Mat> m;
    m.reserve(states.size());
    for (const auto& s : states) m.push_back(s[1]);
    return m;
}

std::vector<Mat> integrate_N_ode(const VelocityField& f, const Vec& x0, const TimeGrid& grid) {
    const int n = f.dim();
    const Vec x_end = advect(f, x0, grid).end();
    const TimeGrid back(grid.t_end(), grid.tau(), grid.steps());
    const Trajectory traj = advect(f, x_end, back);
    // State: P = O_t^tau (dP/dtau = W P) and Y = (N_tau^t)^T; O_tau^t = P^T.
    auto rhs = [&](const Stage& s, const std::array<Mat, 2>& py) {
        const Mat g = f.gradient(traj.at(s), s.t);
        const Mat w = skew_part(g), d = sym_part(g);
        return std::array<Mat, 2>{w * py[0], -1.0 * (py[0].transpose() * d * py[0] * py[1])};
    };
    auto post = [](std::array<Mat, 2>& py) { py[0] = nearest_rotation(py[0]); };
    const auto states = integrate_coupled<2>(back, {Mat::identity(n), Mat::identity(n)}, rhs, post);
    std::vector<Mat> out(states.size(), Mat(n));
    for (std::size_t k = 0; k < states.size(); ++k) out[states.size() - 1 - k] = states[k][1].transpose();
    return out;
}

DpdFactors closed_form_2d(const VelocityField& f, const Trajectory& traj, const DeformationHistory& hist) {
    if (f.dim() != 2) fail(ErrorCode::DimensionMismatch, "closed_form_2d needs a planar field");
    if (hist.F.size() != traj.points.size()) fail(ErrorCode::GridMismatch, "history and trajectory differ in length");
    const TimeGrid& g = traj.grid;
    DpdFactors out;
    out.grid = g;
    out.provenance = Provenance::ClosedForm2D;
    double integral = 0.0;
    double prev = vorticity_of(f.gradient(traj.points[0], g.node(0)))[2];
    for (std::size_t k = 0; k < traj.points.size(); ++k) {
        if (k > 0) {
            const double cur = vorticity_of(f.gradient(traj.points[k], g.node(k)))[2];
            integral += 0.5 * (g.node(k) - g.node(k - 1)) * (prev + cur);
            prev = cur;
        }
        const Mat o = planar_rotation(0.5 * integral);
        out.O.push_back(o);
        out.M.push_back(o.transpose() * hist.F[k]);
        out.N.push_back(hist.F[k] * o.transpose());
    }
    return out;
}

double restart_residual(const std::vector<Mat>& full, const std::vector<Mat>& from_s, std::size_t s_index) {
    if (s_index >= full.size() || from_s.size() != full.size() - s_index)
        fail(ErrorCode::GridMismatch, "restarted history does not match the full history");
    return frobenius(full.back() - from_s.back() * full[s_index]);
}

namespace {

void check_split(const Trajectory& traj, std::size_t s_index) {
    if (!(s_index > 0 && s_index < traj.grid.steps()))
        fail(ErrorCode::NodeMismatch, "split node must be interior");
}

} // namespace

double process_residual(const VelocityField& f, const Trajectory& traj, std::size_t s_index) {
    check_split(traj, s_index);
    const auto full = dynamic_rotation(f, traj);
    const Trajectory tail = traj.slice(s_index, traj.grid.steps());
    const auto restarted = dynamic_rotation(f, tail);
    return restart_residual(full.Z, restarted.Z, s_index);
}

double polar_process_residual(const VelocityField& f, const Trajectory& traj, std::size_t s_index) {
    check_split(traj, s_index);
    const auto full = deformation_gradient(f, traj);
    const auto tail = deformation_gradient(f, traj.slice(s_index, traj.grid.steps()));
    std::vector<Mat> r_full, r_tail;
    for (const Mat& F : full.F) r_full.push_back(polar_decompose(F).R);
    for (const Mat& F : tail.F) r_tail.push_back(polar_decompose(F).R);
    return restart_residual(r_full, r_tail, s_index);
}

double spin_free_residual(const std::vector<Mat>& stretch, const TimeGrid& grid) {
    if (stretch.size() < 3) fail(ErrorCode::InvalidArgument, "need at least three nodes");
    if (stretch.size() != grid.size()) fail(ErrorCode::GridMismatch, "history length does not match grid");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < stretch.size(); ++k) {
        if (!(std::abs(stretch[k].det()) > 1e-14)) fail(ErrorCode::StretchSingular, "stretch tensor is singular");
        const Mat rate = (stretch[k + 1] - stretch[k - 1]) / (grid.node(k + 1) - grid.node(k - 1));
        worst = std::max(worst, frobenius(skew_part(rate * stretch[k].inverse())));
    }
    return worst;
}

SpectrumMatch stretch_spectrum_match(const Mat& M, const Mat& U) {
    require_same_dim(M.dim(), U.dim(), "stretch_spectrum_match");
    if (!(M.det() > 0.0) || !(U.det() > 0.0)) fail(ErrorCode::SingularInput, "stretch tensors need det > 0");
    const SymEigen right = eig_sym(M.transpose() * M);
    const SymEigen u = eig_sym(sym_part(U));
    const int n = M.dim();
    SpectrumMatch out;
    for (int i = 0; i < n; ++i) {
        const double sv = std::sqrt(std::max(right.values[i], 0.0));
        out.value_gap = std::max(out.value_gap, std::abs(sv - u.values[i]) / std::abs(u.values[i]));
    }
    for (int i = 0; i < n; ++i) {
        // Axes are only defined for simple eigenvalues.
        bool simple = true;
        for (int j = 0; j < n; ++j)
            if (j != i && std::abs(u.values[i] - u.values[j]) < 1e-6 * std::abs(u.values[i])) simple = false;
        if (!simple) continue;
        const double c = std::min(1.0, std::abs(dot(right.vectors.column(i), u.vectors.column(i))));
        out.axis_gap = std::max(out.axis_gap, std::acos(c));
    }
    return out;
}

} // namespace dynpolar
