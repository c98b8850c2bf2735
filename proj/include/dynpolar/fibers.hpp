#pragma once

// Material fiber rates, the minimal angular velocity e x edot, and its
// sphere average nu = 2 <e x edot>.

#include <cstdint>
#include <vector>

#include "dynpolar/fields.hpp"
#include "dynpolar/linalg.hpp"
#include "dynpolar/parallel.hpp"

namespace dynpolar {

// PolarAngle: uniform in the polar angle psi on [0, pi] and the azimuth on
// [0, 2 pi), i.e. the measure (1/pi) dpsi (1/2pi) dphi. Area: uniform surface
// measure. The two differ for terms quadratic in e; under PolarAngle the
// average of a rigid rotation gives nu = Omega, under Area it gives 4/3 Omega
// (2/3 of the vorticity 2 Omega).
enum class SphereMeasure { PolarAngle, Area };

struct SphereQuadrature {
    SphereMeasure measure = SphereMeasure::PolarAngle;
    std::vector<Vec> nodes; // unit vectors, polar axis e3
    std::vector<double> weights;

    // Gauss-Legendre in psi (PolarAngle) or cos psi (Area) times a uniform
    // trapezoid in the azimuth.
    static SphereQuadrature gauss_product(int n_polar = 24, int n_azimuth = 48,
                                          SphereMeasure measure = SphereMeasure::PolarAngle);
    // Pseudo-random nodes from a 64-bit LCG (Knuth's MMIX constants); the
    // top 53 bits of each state give a uniform double in [0, 1).
    static SphereQuadrature monte_carlo(std::size_t n, std::uint64_t seed,
                                        SphereMeasure measure = SphereMeasure::PolarAngle);
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// edot = [W + D - <e, D e> I] e for a 3D sample. Throws NotUnit and
// DimensionMismatch.
Vec fiber_rate(const FieldSample& s, const Vec& e);

// e x edot. Throws NotOrthogonal if |<e, edot>| > 1e-8.
Vec nu_min(const Vec& e, const Vec& edot);

// 2 sum_i w_i e_i x edot_i. For SphereMeasure::Area this is a plain sum over
// the nodes. PolarAngle is not rotation invariant, so the spin part is
// averaged with the polar axis along omega and the strain part in the
// principal frame of D. Throws DimensionMismatch for planar samples.
Vec fiber_averaged_angular_velocity(const FieldSample& s, const SphereQuadrature& quad,
                                    Execution exec = Execution::Parallel);

// Planar variant: <e x edot>_3 over n equally spaced unit vectors, which
// equals omega_3 / 2.
double circle_averaged_rate(const FieldSample& s, int n = 64);

} // namespace dynpolar
