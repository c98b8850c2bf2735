#pragma once

// Fixed-dimension (2 or 3) dense linear algebra for kinematic tensors.
// Dimension is a run-time tag; mixing dimensions throws DimensionMismatch.

#include <array>
#include <initializer_list>
#include <iosfwd>

#include "dynpolar/errors.hpp"

namespace dynpolar {

[[noreturn]] void dimension_error(int a, int b, const char* where);
[[noreturn]] void invalid_dimension(int dim);

class Vec {
public:
    Vec() = default;
    explicit Vec(int dim) : dim_(dim) {
        if (dim != 2 && dim != 3) [[unlikely]]
            invalid_dimension(dim);
    }
    Vec(std::initializer_list<double> values);

    static Vec zero(int dim) { return Vec(dim); }
    static Vec unit(int dim, int axis);

    int dim() const noexcept { return dim_; }
    double operator[](int i) const noexcept { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) noexcept { return v_[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s) noexcept;

    bool is_finite() const noexcept;

private:
    int dim_ = 3;
    std::array<double, 3> v_{};
};

// Row-major with a fixed stride of 3; only the leading dim x dim block is used.
class Mat {
public:
    Mat() = default;
    explicit Mat(int dim) : dim_(dim) {
        if (dim != 2 && dim != 3) [[unlikely]]
            invalid_dimension(dim);
    }
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat zero(int dim) { return Mat(dim); }
    static Mat identity(int dim);
    static Mat diag(const Vec& d);
    static Mat outer(const Vec& a, const Vec& b);
    static Mat from_columns(const Vec& c0, const Vec& c1);
    static Mat from_columns(const Vec& c0, const Vec& c1, const Vec& c2);

    int dim() const noexcept { return dim_; }
    double operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(3 * i + j)]; }
    double& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(3 * i + j)]; }

    Vec column(int j) const;
    Vec row(int i) const;

    Mat transpose() const;
    double trace() const noexcept;
    double det() const noexcept;
    // Throws SingularInput when |det| <= tiny relative to the entries.
    Mat inverse() const;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s) noexcept;

    bool is_finite() const noexcept;

private:
    int dim_ = 3;
    std::array<double, 9> a_{};
};

inline void require_same_dim(int a, int b, const char* where) {
    if (a != b) [[unlikely]]
        dimension_error(a, b, where);
}

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(double s, Vec a);
Vec operator*(Vec a, double s);
Vec operator/(Vec a, double s);

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(const Mat& a);
Mat operator*(double s, Mat a);
Mat operator*(Mat a, double s);
Mat operator/(Mat a, double s);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

double dot(const Vec& a, const Vec& b);
Vec cross(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec normalized(const Vec& a);
double frobenius(const Mat& a);
double max_abs(const Mat& a);

std::ostream& operator<<(std::ostream& os, const Vec& v);
std::ostream& operator<<(std::ostream& os, const Mat& m);

// --- symmetric / skew structure -------------------------------------------

Mat sym_part(const Mat& a);
Mat skew_part(const Mat& a);

// Skew matrix W with W e = w x e (3D). In 2D only w[2] is used and
// W = [[0, -w3], [w3, 0]].
Mat skew_from(const Vec& w, int dim);
Mat skew_from_rate(double rate); // 2D shorthand for skew_from((0,0,rate), 2)

// Inverse of skew_from. Always returns a 3-vector; for 2D input the in-plane
// components are zero and the third component is the planar rotation rate W21.
// Throws NotSkew if the symmetric residual exceeds `tol`.
Vec axial_vector(const Mat& w, double tol = 1e-10);

// --- rotations ---------------------------------------------------------------

struct AxisAngle {
    int dim = 3;
    Vec axis = Vec::unit(3, 2); // always a 3-vector; e3 for planar rotations
    double angle = 0.0;
    bool axis_undefined = false; // set when angle == 0 and the axis is conventional
};

Mat rotation_exp(const AxisAngle& aa);
Mat planar_rotation(double angle);
// Rotation by angle |w| about w/|w| (3D) or by w[2] (2D): exp(skew_from(w)).
Mat rotation_from_vector(const Vec& w, int dim);

// Throws NotRotation when ||R^T R - I||_F or |det R - 1| exceeds `tol`.
AxisAngle axis_angle_of(const Mat& r, double tol = 1e-8);
// atan2(R21, R11); no rotation check.
double planar_angle(const Mat& r);

double orthogonality_defect(const Mat& r); // ||R^T R - I||_F
bool is_rotation(const Mat& r, double tol);

// --- symmetric eigenproblem and roots ---------------------------------------

struct SymEigen {
    Vec values;   // ascending
    Mat vectors;  // columns are unit eigenvectors, det = +1
};

// Closed form in 2D, cyclic Jacobi in 3D (off-diagonal norm < 1e-14 ||S||).
SymEigen eig_sym(const Mat& s);

// Principal square root of a symmetric positive definite matrix.
// Throws NotSPD for asymmetric input or an eigenvalue <= 1e-14 trace(S).
Mat principal_sqrt_spd(const Mat& s);
Mat inverse_sqrt_spd(const Mat& s);

// Closest rotation in Frobenius norm: Z (Z^T Z)^{-1/2}.
Mat nearest_rotation(const Mat& z);

// Singular values in ascending order.
Vec singular_values(const Mat& a);

} // namespace dynpolar
