#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dynpolar/dpd.hpp"
#include "dynpolar/polar.hpp"
#include "support.hpp"

using namespace dynpolar;

namespace {

const Vec kShearSeed{0.0, 1.0};

Trajectory shear_traj(double t, std::size_t steps) {
    return advect(VelocityField::planar_shear(1.0), kShearSeed, TimeGrid(0.0, t, steps));
}

} // namespace

TEST_CASE("dynamic rotation of the worked examples") {
    const VelocityField vortex = VelocityField::irrotational_vortex(1.0);
    const Trajectory vt = advect(vortex, Vec{0.6, -0.8}, TimeGrid(0.0, 3.0, 3000));
    for (const Mat& o : dynamic_rotation(vortex, vt).Z) CHECK(max_abs(o - Mat::identity(2)) < 1e-10);

    const VelocityField shear = VelocityField::planar_shear(1.0);
    const auto o = dynamic_rotation(shear, shear_traj(3.0, 3000));
    for (std::size_t k = 0; k < o.Z.size(); k += 300)
        CHECK(max_abs(o.Z[k] - planar_rotation(-0.5 * o.grid.node(k))) < 1e-12);
    CHECK(max_abs(o.Z.front() - Mat::identity(2)) == 0.0);
}

TEST_CASE("dynamic stretch tensors of planar shear") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const DpdResult r = dynamic_polar(shear, shear_traj(2.0, 2000));
    for (std::size_t k = 0; k < r.factors.O.size(); k += 100) {
        const double t = r.factors.grid.node(k);
        const Mat F{{1.0, t}, {0.0, 1.0}};
        const Mat ot = planar_rotation(0.5 * t);
        CHECK(max_abs(r.factors.M[k] - ot * F) < 1e-8);
        CHECK(max_abs(r.factors.N[k] - F * ot) < 1e-8);
    }
}

TEST_CASE("vortex stretch tensors equal F") {
    const VelocityField vortex = VelocityField::irrotational_vortex(1.0);
    const DpdResult r = dynamic_polar(vortex, advect(vortex, Vec{1.0, 0.0}, TimeGrid(0.0, 2.0, 2000)));
    for (std::size_t k = 0; k < r.factors.O.size(); ++k) {
        CHECK(max_abs(r.factors.M[k] - r.history.F[k]) < 1e-8);
        CHECK(max_abs(r.factors.N[k] - r.history.F[k]) < 1e-8);
    }
}

TEST_CASE("rigid motion has identity stretch") {
    const VelocityField rigid = VelocityField::rigid_rotation(Vec{0.3, -0.2, 0.9});
    const DpdResult r = dynamic_polar(rigid, advect(rigid, Vec{1.0, 1.0, 0.0}, TimeGrid(0.0, 2.0, 1000)));
    for (std::size_t k = 0; k < r.factors.O.size(); ++k) {
        CHECK(max_abs(r.factors.M[k] - Mat::identity(3)) < 1e-10);
        CHECK(max_abs(r.factors.N[k] - Mat::identity(3)) < 1e-10);
    }
}

TEST_CASE("stretch ODEs agree with the algebraic factors") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory st = shear_traj(2.0, 2000);
    const DpdResult r = dynamic_polar(shear, st);
    const auto m = integrate_M_ode(shear, st);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(max_abs(m[k] - r.factors.M[k]) < 1e-6);

    const auto n = integrate_N_ode(shear, kShearSeed, st.grid);
    CHECK(max_abs(n.back() - Mat::identity(2)) == 0.0);
    CHECK(max_abs(n.front() - r.factors.N.back()) < 1e-6);

    const VelocityField vortex = VelocityField::irrotational_vortex(1.0);
    const Trajectory vt = advect(vortex, Vec{1.0, 0.0}, TimeGrid(0.0, 1.0, 1000));
    const auto mv = integrate_M_ode(vortex, vt);
    CHECK(max_abs(mv.back() - deformation_gradient(vortex, vt).F.back()) < 1e-6);

    const VelocityField rigid = VelocityField::rigid_rotation(Vec{0.0, 1.0, 1.0});
    const Trajectory rt = advect(rigid, Vec{1.0, 0.0, 0.0}, TimeGrid(0.0, 2.0, 200));
    for (const Mat& x : integrate_M_ode(rigid, rt)) CHECK(max_abs(x - Mat::identity(3)) < 1e-12);
    for (const Mat& x : integrate_N_ode(rigid, Vec{1.0, 0.0, 0.0}, rt.grid)) CHECK(max_abs(x - Mat::identity(3)) < 1e-12);

    // 3D field with time-dependent, non-uniform gradient.
    const VelocityField f = VelocityField::custom(
        3,
        [](const Vec& x, double t) {
            return Vec{0.4 * x[1] * x[2] + 0.1 * t, -0.3 * x[0] + 0.2 * x[2] * x[2], 0.5 * std::sin(x[0])};
        },
        [](const Vec& x, double) {
            return Mat{{0.0, 0.4 * x[2], 0.4 * x[1]}, {-0.3, 0.0, 0.4 * x[2]}, {0.5 * std::cos(x[0]), 0.0, 0.0}};
        });
    const Trajectory ft = advect(f, Vec{0.3, -0.5, 0.8}, TimeGrid(0.0, 2.0, 2000));
    const DpdResult fr = dynamic_polar(f, ft);
    const auto fm = integrate_M_ode(f, ft);
    for (std::size_t k = 0; k < fm.size(); k += 50) CHECK(max_abs(fm[k] - fr.factors.M[k]) < 1e-6);
    const auto fn = integrate_N_ode(f, Vec{0.3, -0.5, 0.8}, ft.grid);
    CHECK(max_abs(fn.front() - fr.factors.N.back()) < 1e-6);
}

TEST_CASE("N is the inverse of M with the time roles swapped") {
    const VelocityField f = VelocityField::shear3d(1.0, 0.7, 0.4);
    const Vec x0{0.2, -0.1, 0.5};
    const TimeGrid grid(0.0, 2.0, 2000);
    const Trajectory fwd = advect(f, x0, grid);
    const DpdResult r = dynamic_polar(f, fwd);
    const Trajectory back = advect(f, fwd.end(), TimeGrid(2.0, 0.0, 2000));
    const DpdResult b = dynamic_polar(f, back);
    CHECK(max_abs(r.factors.N.back() - b.factors.M.back().inverse()) < 1e-6);
    for (std::size_t k = 0; k < r.factors.O.size(); k += 100) {
        const Mat& o = r.factors.O[k];
        CHECK(max_abs(r.factors.M[k] - o.transpose() * r.factors.N[k] * o) < 1e-8);
    }
}

TEST_CASE("closed-form planar DPD") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory st = shear_traj(2.0, 2000);
    const DeformationHistory h = deformation_gradient(shear, st);
    const DpdFactors cf = closed_form_2d(shear, st, h);
    CHECK(cf.provenance == Provenance::ClosedForm2D);
    CHECK(planar_angle(cf.O.back()) == doctest::Approx(-1.0).epsilon(1e-14));
    const auto ode = dynamic_rotation(shear, st);
    for (std::size_t k = 0; k < cf.O.size(); ++k) CHECK(max_abs(cf.O[k] - ode.Z[k]) < 1e-8);

    const VelocityField vortex = VelocityField::irrotational_vortex(1.0);
    const Trajectory vt = advect(vortex, Vec{1.0, 0.0}, TimeGrid(0.0, 2.0, 200));
    for (const Mat& o : closed_form_2d(vortex, vt, deformation_gradient(vortex, vt)).O)
        CHECK(max_abs(o - Mat::identity(2)) < 1e-14);

    const VelocityField s3 = VelocityField::shear3d(1.0, 1.0, 0.0);
    const Trajectory t3 = advect(s3, Vec(3), TimeGrid(0.0, 1.0, 10));
    CHECK_THROWS_AS(closed_form_2d(s3, t3, deformation_gradient(s3, t3)), KinematicsError);
}

TEST_CASE("process property") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory st = shear_traj(4.0, 4000);
    CHECK(process_residual(shear, st, 2000) < 1e-8);
    CHECK(polar_process_residual(shear, st, 2000) > 0.05);

    const VelocityField rigid = VelocityField::rigid_rotation(Vec{1.0, 2.0, -0.5});
    const Trajectory rt = advect(rigid, Vec{1.0, 0.0, 0.0}, TimeGrid(0.0, 3.0, 3000));
    CHECK(process_residual(rigid, rt, 1234) < 1e-10);
    CHECK_THROWS_AS(process_residual(shear, st, 0), KinematicsError);
}

TEST_CASE("spin-free stretch") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory st = shear_traj(2.0, 2000);
    const DpdResult r = dynamic_polar(shear, st);
    CHECK(spin_free_residual(r.factors.M, st.grid) < 1e-4);
    CHECK(spin_free_residual(polar_history(r.history).U, st.grid) > 0.01);
    CHECK(spin_free_residual(std::vector<Mat>(st.grid.size(), Mat::identity(2)), st.grid) == 0.0);
    CHECK_THROWS_AS(spin_free_residual(std::vector<Mat>(2, Mat::identity(2)), TimeGrid(0.0, 1.0, 1)), KinematicsError);
}

TEST_CASE("spectrum of M matches U") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const DpdResult r = dynamic_polar(shear, shear_traj(2.0, 2000));
    const PolarFactors p = polar_decompose(r.history.F.back());
    const SpectrumMatch m = stretch_spectrum_match(r.factors.M.back(), p.U);
    CHECK(m.value_gap < 1e-8);
    CHECK(m.axis_gap < 1e-6);
    CHECK(singular_values(r.factors.M.back())[1] == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-8));

    const Mat u = Mat{{2.0, 0.3}, {0.3, 1.0}};
    CHECK(stretch_spectrum_match(u, u).value_gap < 1e-14);
    CHECK_THROWS_AS(stretch_spectrum_match(Mat::diag(Vec{1.0, -1.0}), u), KinematicsError);
}

TEST_CASE("short-time limits of O and M") {
    testing::Random rng(31);
    const VelocityField f = VelocityField::linear(rng.matrix(3));
    const Mat L = f.gradient(Vec(3), 0.0);
    auto err = [&](double h) {
        const DpdResult r = dynamic_polar(f, advect(f, Vec(3), TimeGrid(0.0, h, 4)));
        return std::array<double, 2>{frobenius((r.factors.O.back() - Mat::identity(3)) / h - skew_part(L)),
                                     frobenius((r.factors.M.back() - Mat::identity(3)) / h - sym_part(L))};
    };
    const auto a = err(1e-3), b = err(1e-4);
    for (int i = 0; i < 2; ++i) {
        CHECK(a[i] / b[i] > 8.0);
        CHECK(a[i] / b[i] < 12.0);
    }
}

TEST_CASE("grid mismatch is rejected") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const DeformationHistory h = deformation_gradient(shear, shear_traj(1.0, 10));
    const auto o = dynamic_rotation(shear, shear_traj(1.0, 20));
    CHECK_THROWS_AS(dynamic_stretch_from_F(h, o), KinematicsError);
}
