#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dynpolar/integrate.hpp"
#include "support.hpp"

using namespace dynpolar;

TEST_CASE("time grid") {
    const TimeGrid g(1.0, 3.0, 4);
    CHECK(g.dt() == 0.5);
    CHECK(g.node(0) == 1.0);
    CHECK(g.node(4) == 3.0);
    CHECK(g.stage_time(1, 1) == doctest::Approx(1.75));
    const TimeGrid back(3.0, 1.0, 4);
    CHECK(back.dt() == -0.5);
    const TimeGrid sub = g.sub(1, 3);
    CHECK(sub.tau() == 1.5);
    CHECK(sub.t_end() == 2.5);
    CHECK(sub.steps() == 2);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), KinematicsError);
}

TEST_CASE("advection") {
    const double pi = std::numbers::pi;
    const VelocityField rigid = VelocityField::rigid_rotation(Vec{0.0, 0.0, 1.0});
    const Trajectory circle = advect(rigid, Vec{1.0, 0.0, 0.0}, TimeGrid(0.0, pi, 3142));
    CHECK(norm(circle.end() - Vec{-1.0, 0.0, 0.0}) < 1e-9);

    const Trajectory line = advect(VelocityField::planar_shear(1.0), Vec{0.0, 1.0}, TimeGrid(0.0, 3.0, 30));
    CHECK(norm(line.end() - Vec{3.0, 1.0}) < 1e-14);

    const VelocityField zero = VelocityField::linear(Mat(2));
    const Trajectory still = advect(zero, Vec{0.4, -0.2}, TimeGrid(0.0, 2.0, 10));
    for (const Vec& p : still.points) CHECK(norm(p - Vec{0.4, -0.2}) == 0.0);

    CHECK_THROWS_AS(advect(VelocityField::irrotational_vortex(1.0), Vec{0.0, 0.0}, TimeGrid(0.0, 1.0, 10)),
                    KinematicsError);
    // A field that stops being finite mid-integration.
    const VelocityField ending = VelocityField::custom(
        2, [](const Vec&, double t) { return Vec{std::sqrt(1.0 - t), 0.0}; }, [](const Vec&, double) { return Mat(2); });
    try {
        (void)advect(ending, Vec{0.0, 0.0}, TimeGrid(0.0, 2.0, 10));
        FAIL("expected SingularPoint");
    } catch (const KinematicsError& e) {
        CHECK(e.code() == ErrorCode::SingularPoint);
    }
}

TEST_CASE("RK4 is fourth order") {
    const VelocityField rigid = VelocityField::rigid_rotation(Vec{0.0, 0.0, 1.0});
    auto error = [&](std::size_t steps) {
        const Trajectory t = advect(rigid, Vec{1.0, 0.0, 0.0}, TimeGrid(0.0, 5.0, steps));
        return norm(t.end() - Vec{std::cos(5.0), std::sin(5.0), 0.0});
    };
    const double ratio = error(50) / error(100);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("deformation gradient") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const DeformationHistory h = deformation_gradient(shear, advect(shear, Vec{0.0, 1.0}, TimeGrid(0.0, 2.0, 2000)));
    CHECK(max_abs(h.F.back() - Mat{{1.0, 2.0}, {0.0, 1.0}}) < 1e-9);
    CHECK(max_abs(h.F.front() - Mat::identity(2)) == 0.0);

    const DeformationHistory zero = deformation_gradient(shear, advect(shear, Vec{0.0, 1.0}, TimeGrid(1.0, 1.0, 1)));
    CHECK(max_abs(zero.F.back() - Mat::identity(2)) == 0.0);

    const double pi = std::numbers::pi;
    const VelocityField vortex = VelocityField::irrotational_vortex(1.0);
    const DeformationHistory v = deformation_gradient(vortex, advect(vortex, Vec{1.0, 0.0}, TimeGrid(0.0, pi / 2, 1571)));
    CHECK(max_abs(v.F.back() - Mat{{pi, -1.0}, {1.0, 0.0}}) < 1e-6);
    for (const Mat& F : v.F) CHECK(F.det() > 0.0);
}

TEST_CASE("deformation gradient matches finite differences of the flow map") {
    const VelocityField f = VelocityField::custom(
        2, [](const Vec& x, double t) { return Vec{std::sin(x[1]) + 0.3 * t, x[0] * x[1] * 0.2}; },
        [](const Vec& x, double) { return Mat{{0.0, std::cos(x[1])}, {0.2 * x[1], 0.2 * x[0]}}; });
    const TimeGrid grid(0.0, 1.5, 1500);
    const Vec x0{0.3, 0.8};
    const Mat F = deformation_gradient(f, advect(f, x0, grid)).F.back();
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
        Vec xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        const Vec col = (advect(f, xp, grid).end() - advect(f, xm, grid).end()) / (2.0 * h);
        for (int i = 0; i < 2; ++i) CHECK(std::abs(F(i, j) - col[i]) < 1e-7);
    }
}

TEST_CASE("deformation gradient is a process") {
    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory traj = advect(shear, Vec{0.0, 1.0}, TimeGrid(0.0, 4.0, 4000));
    const DeformationHistory full = deformation_gradient(shear, traj);
    const DeformationHistory tail = deformation_gradient(shear, traj.slice(1700, 4000));
    CHECK(frobenius(full.F.back() - tail.F.back() * full.F[1700]) < 1e-8);
}

TEST_CASE("matrix ODE") {
    const TimeGrid g(0.0, std::numbers::pi, 1000);
    const auto zero = integrate_matrix_ode([](const Stage&) { return Mat(2); }, g, true, 2);
    for (const Mat& z : zero.Z) CHECK(max_abs(z - Mat::identity(2)) == 0.0);

    const auto rot = integrate_matrix_ode([](const Stage&) { return skew_from_rate(0.5); }, g, true, 2);
    CHECK(rot.reprojected);
    CHECK(max_abs(rot.Z.back() - planar_rotation(std::numbers::pi / 2)) < 1e-10);

    const VelocityField shear = VelocityField::planar_shear(1.0);
    const Trajectory traj = advect(shear, Vec{0.0, 1.0}, TimeGrid(0.0, 2.0, 500));
    const auto z = integrate_matrix_ode(gradient_generator(shear, traj), traj.grid, false, 2);
    const DeformationHistory h = deformation_gradient(shear, traj);
    for (std::size_t k = 0; k < h.F.size(); ++k) CHECK(max_abs(z.Z[k] - h.F[k]) == 0.0);

    CHECK_THROWS_AS(integrate_matrix_ode(gradient_generator(shear, traj), traj.grid, true, 2), KinematicsError);

    // Reprojection keeps a long rotation history on SO(3).
    const VelocityField rigid = VelocityField::rigid_rotation(Vec{0.3, -1.0, 2.0});
    const Trajectory long_traj = advect(rigid, Vec{1.0, 0.0, 0.0}, TimeGrid(0.0, 50.0, 5000));
    const auto o = integrate_matrix_ode(spin_generator(rigid, long_traj), long_traj.grid, true, 3);
    for (const Mat& m : o.Z) CHECK(orthogonality_defect(m) < 1e-12);
}

TEST_CASE("backward integration") {
    const VelocityField f = VelocityField::shear3d(1.0, 0.5, 0.2);
    const TimeGrid fwd(0.0, 2.0, 2000), back(2.0, 0.0, 2000);
    const Trajectory a = advect(f, Vec{0.1, 0.2, 0.3}, fwd);
    const Trajectory b = advect(f, a.end(), back);
    CHECK(norm(b.end() - a.start()) < 1e-12);
    const DeformationHistory fa = deformation_gradient(f, a);
    const DeformationHistory fb = deformation_gradient(f, b);
    CHECK(max_abs(fb.F.back() * fa.F.back() - Mat::identity(3)) < 1e-12);
}
