#pragma once

// Independent reference computations and random generators for the tests.

#include <cmath>
#include <random>

#include "dynpolar/fields.hpp"
#include "dynpolar/linalg.hpp"

namespace testing {

using dynpolar::Mat;
using dynpolar::Vec;

// Denman-Beavers iteration for the principal square root of an SPD matrix.
inline Mat sqrt_denman_beavers(const Mat& a) {
    Mat y = a, z = Mat::identity(a.dim());
    for (int i = 0; i < 100; ++i) {
        const Mat yn = 0.5 * (y + z.inverse());
        const Mat zn = 0.5 * (z + y.inverse());
        const double change = dynpolar::frobenius(yn - y);
        y = yn;
        z = zn;
        if (change < 1e-15 * dynpolar::frobenius(y)) break;
    }
    return y;
}

// exp(A) by scaling and squaring of a truncated Taylor series.
inline Mat expm_taylor(const Mat& a) {
    int squarings = 0;
    double scale = dynpolar::frobenius(a);
    while (scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    const Mat s = a / std::pow(2.0, squarings);
    Mat term = Mat::identity(a.dim()), sum = Mat::identity(a.dim());
    for (int k = 1; k < 30; ++k) {
        term = term * s / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

// Central-difference Jacobian of the velocity.
inline Mat fd_gradient(const dynpolar::VelocityField& f, const Vec& x, double t, double h = 1e-6) {
    const int n = f.dim();
    Mat g(n);
    for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec d = (f.velocity(xp, t) - f.velocity(xm, t)) / (2.0 * h);
        for (int i = 0; i < n; ++i) g(i, j) = d[i];
    }
    return g;
}

class Random {
public:
    explicit Random(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

    Mat matrix(int n, double scale = 1.0) {
        Mat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = scale * uniform();
        return m;
    }

    Vec vector(int n, double scale = 1.0) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = scale * uniform();
        return v;
    }

    Vec unit(int n) {
        Vec v(n);
        do v = vector(n);
        while (dynpolar::norm(v) < 0.1);
        return dynpolar::normalized(v);
    }

    // det > 0 by construction: I + small perturbation, or a rotation times SPD.
    Mat positive_det(int n) {
        const Mat r = rotation(n);
        const Mat a = matrix(n, 0.5);
        return r * (Mat::identity(n) + a.transpose() * a);
    }

    Mat rotation(int n) {
        if (n == 2) return dynpolar::planar_rotation(uniform(-3.0, 3.0));
        return dynpolar::rotation_from_vector(vector(3, 1.5), 3);
    }

    Mat symmetric(int n, double scale = 1.0) { return dynpolar::sym_part(matrix(n, scale)); }

    Mat traceless(int n, double scale = 1.0) {
        Mat m = matrix(n, scale);
        const double tr = m.trace() / n;
        for (int i = 0; i < n; ++i) m(i, i) -= tr;
        return m;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace testing
