#pragma once

// Dynamic polar decomposition F = O M = N O.
//
// O solves Odot = W(x(t), t) O and is a rotational process; M and N are the
// spin-free stretch factors. The production path integrates O and forms
// M = O^T F, N = F O^T; the stretch ODEs are integrated separately as
// cross-checks.

#include <cstddef>
#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/linalg.hpp"

namespace dynpolar {

enum class Provenance { OdeIntegrated, ClosedForm2D, AlgebraicFromO };

struct DpdFactors {
    TimeGrid grid;
    std::vector<Mat> O;
    std::vector<Mat> M;
    std::vector<Mat> N;
    Provenance provenance = Provenance::AlgebraicFromO;
};

struct DpdResult {
    DeformationHistory history;
    DpdFactors factors;
};

// Odot = W O with reprojection onto SO(n) after every step.
MatrixOdeResult dynamic_rotation(const VelocityField& f, const Trajectory& traj);

// M = O^T F, N = F O^T per node. Throws GridMismatch for unaligned inputs.
DpdFactors dynamic_stretch_from_F(const DeformationHistory& hist, const MatrixOdeResult& o);

// F, O, M and N along one trajectory.
DpdResult dynamic_polar(const VelocityField& f, const Trajectory& traj);

// Mdot = [O^T D O] M integrated jointly with O.
std::vector<Mat> integrate_M_ode(const VelocityField& f, const Trajectory& traj);

// d/dtau N^T = -[O_tau^t D(x(tau), tau) O_t^tau] N^T integrated backward in tau
// from tau = grid.t_end(). x0 is the position at grid.tau(). Entry k holds
// N_{t_k}^{t_end} for the forward node t_k.
std::vector<Mat> integrate_N_ode(const VelocityField& f, const Vec& x0, const TimeGrid& grid);

// Planar closed form: O is the rotation by half the trapezoidal integral of
// omega_3 along the trajectory. Throws DimensionMismatch for 3D fields.
DpdFactors closed_form_2d(const VelocityField& f, const Trajectory& traj, const DeformationHistory& hist);

// ||T_tau^t - T_s^t T_tau^s||_F at the final node, given the full history and
// a history restarted at node s on the same grid.
double restart_residual(const std::vector<Mat>& full, const std::vector<Mat>& from_s, std::size_t s_index);

// Process residual of O: O_s^t is re-integrated from node s.
double process_residual(const VelocityField& f, const Trajectory& traj, std::size_t s_index);

// Same functional for the polar rotation R (F_s^t re-integrated from node s).
double polar_process_residual(const VelocityField& f, const Trajectory& traj, std::size_t s_index);

// max over interior nodes of ||skew(Sdot S^{-1})||_F with Sdot by central
// differences. Throws StretchSingular.
double spin_free_residual(const std::vector<Mat>& stretch, const TimeGrid& grid);

struct SpectrumMatch {
    double value_gap = 0.0; // max relative gap of sorted singular values vs eigenvalues
    double axis_gap = 0.0;  // max angle (rad) between matched principal axes
};

// Compares the singular values / right singular vectors of M with the
// eigen-decomposition of U. Throws SingularInput for det <= 0.
SpectrumMatch stretch_spectrum_match(const Mat& M, const Mat& U);

} // namespace dynpolar
