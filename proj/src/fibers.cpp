#include "dynpolar/fibers.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dynpolar {

namespace {

Vec sphere_point(double psi, double phi) {
    return Vec{std::sin(psi) * std::cos(phi), std::sin(psi) * std::sin(phi), std::cos(psi)};
}

// Rotation whose third column is the unit vector a.
Mat frame_with_axis(const Vec& a) {
    const Vec helper = std::abs(a[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
    const Vec u = normalized(cross(helper, a));
    return Mat::from_columns(u, cross(a, u), a);
}

class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {}
    double uniform() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state_ >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

void require_3d(const FieldSample& s, const char* where) {
    if (s.grad_v.dim() != 3) fail(ErrorCode::DimensionMismatch, std::string(where) + " needs a 3D sample");
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

SphereQuadrature SphereQuadrature::gauss_product(int n_polar, int n_azimuth, SphereMeasure measure) {
    if (n_azimuth < 1) fail(ErrorCode::InvalidArgument, "azimuth node count must be >= 1");
    std::vector<double> x, w;
    gauss_legendre(n_polar, x, w);
    SphereQuadrature q;
    q.measure = measure;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double psi = measure == SphereMeasure::PolarAngle ? 0.5 * std::numbers::pi * (x[i] + 1.0) : std::acos(x[i]);
        for (int j = 0; j < n_azimuth; ++j) {
            q.nodes.push_back(sphere_point(psi, 2.0 * std::numbers::pi * j / n_azimuth));
            q.weights.push_back(0.5 * w[i] / n_azimuth);
        }
    }
    return q;
}

SphereQuadrature SphereQuadrature::monte_carlo(std::size_t n, std::uint64_t seed, SphereMeasure measure) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "Monte Carlo needs at least one node");
    Lcg rng(seed);
    SphereQuadrature q;
    q.measure = measure;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(), v = rng.uniform();
        const double psi = measure == SphereMeasure::PolarAngle ? std::numbers::pi * u : std::acos(1.0 - 2.0 * u);
        q.nodes.push_back(sphere_point(psi, 2.0 * std::numbers::pi * v));
        q.weights.push_back(1.0 / static_cast<double>(n));
    }
    return q;
}

Vec fiber_rate(const FieldSample& s, const Vec& e) {
    require_same_dim(s.grad_v.dim(), e.dim(), "fiber_rate");
    if (std::abs(norm(e) - 1.0) > 1e-10) fail(ErrorCode::NotUnit, "fiber direction is not unit length");
    const Vec de = s.D * e;
    return s.W * e + de - dot(e, de) * e;
}

Vec nu_min(const Vec& e, const Vec& edot) {
    if (std::abs(dot(e, edot)) > 1e-8) fail(ErrorCode::NotOrthogonal, "fiber rate is not orthogonal to the fiber");
    if (e.dim() == 2) return Vec{0.0, 0.0, e[0] * edot[1] - e[1] * edot[0]};
    return cross(e, edot);
}

Vec fiber_averaged_angular_velocity(const FieldSample& s, const SphereQuadrature& quad, Execution exec) {
    require_3d(s, "fiber_averaged_angular_velocity");
    auto weight = [&](std::size_t i) { return quad.weights[i]; };
    if (quad.measure == SphereMeasure::Area) {
        auto term = [&](std::size_t i) { return nu_min(quad.nodes[i], fiber_rate(s, quad.nodes[i])); };
        return 2.0 * weighted_vector_sum(quad.nodes.size(), weight, term, 3, exec);
    }
    const Vec omega = s.omega;
    const Mat spin_frame = norm(omega) > 0.0 ? frame_with_axis(normalized(omega)) : Mat::identity(3);
    const Mat strain_frame = eig_sym(s.D).vectors;
    auto term = [&](std::size_t i) {
        const Vec a = spin_frame * quad.nodes[i];
        const Vec b = strain_frame * quad.nodes[i];
        const Vec db = s.D * b;
        return cross(a, s.W * a) + cross(b, db - dot(b, db) * b);
    };
    return 2.0 * weighted_vector_sum(quad.nodes.size(), weight, term, 3, exec);
}

double circle_averaged_rate(const FieldSample& s, int n) {
    if (s.grad_v.dim() != 2) fail(ErrorCode::DimensionMismatch, "circle average needs a planar sample");
    if (n < 3) fail(ErrorCode::InvalidArgument, "circle average needs at least three directions");
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double a = 2.0 * std::numbers::pi * j / n;
        const Vec e{std::cos(a), std::sin(a)};
        sum += nu_min(e, fiber_rate(s, e))[2];
    }
    return sum / n;
}

} // namespace dynpolar
