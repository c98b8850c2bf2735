#include "dynpolar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace dynpolar {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::SingularF: return "SingularF";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::StretchSingular: return "StretchSingular";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::GeneratorNotSkew: return "GeneratorNotSkew";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NodeMismatch: return "NodeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

void check_dim(int dim) {
    if (dim != 2 && dim != 3) invalid_dimension(dim);
}

} // namespace

void dimension_error(int a, int b, const char* where) {
    fail(ErrorCode::DimensionMismatch, std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

void invalid_dimension(int dim) {
    fail(ErrorCode::DimensionMismatch, "dimension must be 2 or 3, got " + std::to_string(dim));
}

// --- Vec ---------------------------------------------------------------------

Vec::Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
    check_dim(dim_);
    std::copy(values.begin(), values.end(), v_.begin());
}

Vec Vec::unit(int dim, int axis) {
    Vec e(dim);
    e[axis] = 1.0;
    return e;
}

Vec& Vec::operator+=(const Vec& o) {
    require_same_dim(dim_, o.dim_, "Vec +=");
    for (int i = 0; i < dim_; ++i) (*this)[i] += o[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    require_same_dim(dim_, o.dim_, "Vec -=");
    for (int i = 0; i < dim_; ++i) (*this)[i] -= o[i];
    return *this;
}

Vec& Vec::operator*=(double s) noexcept {
    for (auto& x : v_) x *= s;
    return *this;
}

bool Vec::is_finite() const noexcept {
    for (int i = 0; i < dim_; ++i)
        if (!std::isfinite((*this)[i])) return false;
    return true;
}

// --- Mat ---------------------------------------------------------------------

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) : dim_(static_cast<int>(rows.size())) {
    check_dim(dim_);
    int i = 0;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != dim_) fail(ErrorCode::DimensionMismatch, "ragged matrix literal");
        int j = 0;
        for (double x : r) (*this)(i, j++) = x;
        ++i;
    }
}

Mat Mat::identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(d.dim());
    for (int i = 0; i < d.dim(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::outer(const Vec& a, const Vec& b) {
    require_same_dim(a.dim(), b.dim(), "outer");
    Mat m(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

Mat Mat::from_columns(const Vec& c0, const Vec& c1) {
    if (c0.dim() != 2 || c1.dim() != 2) fail(ErrorCode::DimensionMismatch, "from_columns expects 2-vectors");
    Mat m(2);
    for (int i = 0; i < 2; ++i) {
        m(i, 0) = c0[i];
        m(i, 1) = c1[i];
    }
    return m;
}

Mat Mat::from_columns(const Vec& c0, const Vec& c1, const Vec& c2) {
    if (c0.dim() != 3 || c1.dim() != 3 || c2.dim() != 3)
        fail(ErrorCode::DimensionMismatch, "from_columns expects 3-vectors");
    Mat m(3);
    for (int i = 0; i < 3; ++i) {
        m(i, 0) = c0[i];
        m(i, 1) = c1[i];
        m(i, 2) = c2[i];
    }
    return m;
}

Vec Mat::column(int j) const {
    Vec c(dim_);
    for (int i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
    return c;
}

Vec Mat::row(int i) const {
    Vec r(dim_);
    for (int j = 0; j < dim_; ++j) r[j] = (*this)(i, j);
    return r;
}

Mat Mat::transpose() const {
    Mat t(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::trace() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
}

double Mat::det() const noexcept {
    const Mat& a = *this;
    if (dim_ == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Mat Mat::inverse() const {
    const Mat& a = *this;
    const double d = det();
    const double scale = std::pow(std::max(max_abs(a), 1e-300), dim_);
    if (!(std::abs(d) > 1e-300 && std::abs(d) > 1e-15 * scale))
        fail(ErrorCode::SingularInput, "matrix is numerically singular (det = " + std::to_string(d) + ")");
    Mat inv(dim_);
    if (dim_ == 2) {
        inv(0, 0) = a(1, 1) / d;
        inv(0, 1) = -a(0, 1) / d;
        inv(1, 0) = -a(1, 0) / d;
        inv(1, 1) = a(0, 0) / d;
        return inv;
    }
    inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
    inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
    inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
    inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
    inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
    inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
    inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
    inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
    inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
    return inv;
}

Mat& Mat::operator+=(const Mat& o) {
    require_same_dim(dim_, o.dim_, "Mat +=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    require_same_dim(dim_, o.dim_, "Mat -=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Mat& Mat::operator*=(double s) noexcept {
    for (auto& x : a_) x *= s;
    return *this;
}

bool Mat::is_finite() const noexcept {
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (!std::isfinite((*this)(i, j))) return false;
    return true;
}

// --- free arithmetic ------------------------------------------------------------

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator-(Vec a) { return a *= -1.0; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator*(Vec a, double s) { return a *= s; }
Vec operator/(Vec a, double s) { return a *= 1.0 / s; }

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator-(const Mat& a) { return -1.0 * a; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator/(Mat a, double s) { return a *= 1.0 / s; }

Mat operator*(const Mat& a, const Mat& b) {
    require_same_dim(a.dim(), b.dim(), "Mat * Mat");
    const int n = a.dim();
    Mat c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    require_same_dim(a.dim(), x.dim(), "Mat * Vec");
    const int n = a.dim();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += a(i, k) * x[k];
        y[i] = s;
    }
    return y;
}

double dot(const Vec& a, const Vec& b) {
    require_same_dim(a.dim(), b.dim(), "dot");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

Vec cross(const Vec& a, const Vec& b) {
    if (a.dim() != 3 || b.dim() != 3) fail(ErrorCode::DimensionMismatch, "cross product needs 3-vectors");
    return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec normalized(const Vec& a) {
    const double n = norm(a);
    if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
    return a / n;
}

double frobenius(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
    return os << ')';
}

std::ostream& operator<<(std::ostream& os, const Mat& m) {
    os << '[';
    for (int i = 0; i < m.dim(); ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < m.dim(); ++j) os << (j ? ", " : "") << m(i, j);
        os << ']';
    }
    return os << ']';
}

// --- symmetric / skew -------------------------------------------------------------

Mat sym_part(const Mat& a) { return 0.5 * (a + a.transpose()); }
Mat skew_part(const Mat& a) { return 0.5 * (a - a.transpose()); }

Mat skew_from(const Vec& w, int dim) {
    if (w.dim() != 3) fail(ErrorCode::DimensionMismatch, "skew_from expects a 3-vector");
    Mat s(dim);
    if (dim == 2) {
        s(0, 1) = -w[2];
        s(1, 0) = w[2];
        return s;
    }
    s(0, 1) = -w[2];
    s(0, 2) = w[1];
    s(1, 0) = w[2];
    s(1, 2) = -w[0];
    s(2, 0) = -w[1];
    s(2, 1) = w[0];
    return s;
}

Mat skew_from_rate(double rate) { return skew_from(Vec{0.0, 0.0, rate}, 2); }

Vec axial_vector(const Mat& w, double tol) {
    const double residual = frobenius(sym_part(w));
    if (residual > tol * std::max(1.0, frobenius(w)))
        fail(ErrorCode::NotSkew, "symmetric residual " + std::to_string(residual));
    if (w.dim() == 2) return Vec{0.0, 0.0, 0.5 * (w(1, 0) - w(0, 1))};
    return Vec{0.5 * (w(2, 1) - w(1, 2)), 0.5 * (w(0, 2) - w(2, 0)), 0.5 * (w(1, 0) - w(0, 1))};
}

// --- rotations ----------------------------------------------------------------------

Mat planar_rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Mat{{c, -s}, {s, c}};
}

Mat rotation_exp(const AxisAngle& aa) {
    if (aa.dim == 2) return planar_rotation(aa.angle);
    if (aa.dim != 3) fail(ErrorCode::DimensionMismatch, "rotation_exp: bad dimension");
    const Vec n = normalized(aa.axis);
    const Mat k = skew_from(n, 3);
    // Rodrigues: I + sin(a) K + (1 - cos(a)) K^2
    return Mat::identity(3) + std::sin(aa.angle) * k + (1.0 - std::cos(aa.angle)) * (k * k);
}

Mat rotation_from_vector(const Vec& w, int dim) {
    if (dim == 2) return planar_rotation(w[2]);
    const double a = norm(w);
    if (a == 0.0) return Mat::identity(3);
    return rotation_exp(AxisAngle{3, w / a, a, false});
}

double planar_angle(const Mat& r) { return std::atan2(r(1, 0), r(0, 0)); }

double orthogonality_defect(const Mat& r) { return frobenius(r.transpose() * r - Mat::identity(r.dim())); }

bool is_rotation(const Mat& r, double tol) {
    return r.is_finite() && orthogonality_defect(r) <= tol && std::abs(r.det() - 1.0) <= tol;
}

AxisAngle axis_angle_of(const Mat& r, double tol) {
    if (!is_rotation(r, tol))
        fail(ErrorCode::NotRotation, "defect " + std::to_string(orthogonality_defect(r)) + ", det " +
                                         std::to_string(r.det()));
    AxisAngle out;
    out.dim = r.dim();
    if (r.dim() == 2) {
        out.angle = planar_angle(r);
        if (out.angle == -std::numbers::pi) out.angle = std::numbers::pi;
        out.axis_undefined = out.angle == 0.0;
        return out;
    }
    const Vec s{0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1))};
    const double sin_a = norm(s);
    const double cos_a = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double angle = std::atan2(sin_a, cos_a);
    if (angle == 0.0 || (sin_a < 1e-15 && cos_a > 0.0)) {
        out.angle = 0.0;
        out.axis = Vec::unit(3, 2);
        out.axis_undefined = true;
        return out;
    }
    if (cos_a > -0.5) {
        out.axis = s / sin_a;
        out.angle = angle;
        return out;
    }
    // Near pi: n n^T = (sym(R) - cos(a) I) / (1 - cos(a)); take the column of
    // the largest diagonal entry and fix the sign from the skew part.
    const Mat b = (sym_part(r) - cos_a * Mat::identity(3)) / (1.0 - cos_a);
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (b(i, i) > b(k, k)) k = i;
    Vec n = normalized(b.column(k));
    if (dot(n, s) < 0.0) n = -n;
    out.axis = n;
    out.angle = angle;
    return out;
}

// --- eigen / roots ----------------------------------------------------------------------

namespace {

void require_symmetric(const Mat& s, const char* where) {
    const double asym = frobenius(skew_part(s));
    if (asym > 1e-10 * std::max(1.0, frobenius(s)))
        fail(ErrorCode::NotSPD, std::string(where) + ": matrix not symmetric (residual " + std::to_string(asym) + ")");
}

SymEigen eig2(const Mat& s) {
    const double a = s(0, 0), b = 0.5 * (s(0, 1) + s(1, 0)), d = s(1, 1);
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    SymEigen e{Vec{mean - rad, mean + rad}, Mat::identity(2)};
    if (rad == 0.0) return e;
    // Rotation angle theta diagonalizing: tan(2 theta) = 2b / (a - d).
    const double theta = 0.5 * std::atan2(2.0 * b, a - d);
    const double c = std::cos(theta), sn = std::sin(theta);
    // (c, s) carries the larger eigenvalue; (s, -c) keeps det = +1.
    e.vectors = Mat{{sn, c}, {-c, sn}};
    return e;
}

SymEigen eig3(const Mat& s_in) {
    Mat a = sym_part(s_in);
    Mat v = Mat::identity(3);
    const double scale = frobenius(a);
    auto off = [&a] { return std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2))); };
    for (int sweep = 0; sweep < 100 && off() > 1e-14 * scale; ++sweep) {
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t), sn = t * c;
                Mat j = Mat::identity(3);
                j(p, p) = c;
                j(q, q) = c;
                j(p, q) = sn;
                j(q, p) = -sn;
                a = j.transpose() * a * j;
                a(p, q) = a(q, p) = 0.0;
                v = v * j;
            }
    }
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&a](int x, int y) { return a(x, x) < a(y, y); });
    SymEigen e{Vec(3), Mat(3)};
    for (int k = 0; k < 3; ++k) {
        e.values[k] = a(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k)]);
        for (int i = 0; i < 3; ++i) e.vectors(i, k) = v(i, idx[static_cast<std::size_t>(k)]);
    }
    if (e.vectors.det() < 0.0)
        for (int i = 0; i < 3; ++i) e.vectors(i, 0) = -e.vectors(i, 0);
    return e;
}

Mat spectral_map(const SymEigen& e, double (*fn)(double)) {
    const int n = e.values.dim();
    Mat out(n);
    for (int k = 0; k < n; ++k) {
        const Vec q = e.vectors.column(k);
        out += fn(e.values[k]) * Mat::outer(q, q);
    }
    return sym_part(out);
}

SymEigen checked_spd_eigen(const Mat& s, const char* where) {
    require_symmetric(s, where);
    SymEigen e = eig_sym(s);
    const double floor = 1e-14 * std::abs(s.trace());
    if (!(e.values[0] > floor))
        fail(ErrorCode::NotSPD, std::string(where) + ": eigenvalue " + std::to_string(e.values[0]) + " not positive");
    return e;
}

} // namespace

SymEigen eig_sym(const Mat& s) {
    if (!s.is_finite()) fail(ErrorCode::InvalidArgument, "eig_sym: non-finite input");
    return s.dim() == 2 ? eig2(s) : eig3(s);
}

Mat principal_sqrt_spd(const Mat& s) {
    return spectral_map(checked_spd_eigen(s, "principal_sqrt_spd"), [](double x) { return std::sqrt(x); });
}

Mat inverse_sqrt_spd(const Mat& s) {
    return spectral_map(checked_spd_eigen(s, "inverse_sqrt_spd"), [](double x) { return 1.0 / std::sqrt(x); });
}

Mat nearest_rotation(const Mat& z) { return z * inverse_sqrt_spd(z.transpose() * z); }

Vec singular_values(const Mat& a) {
    Vec ev = eig_sym(a.transpose() * a).values;
    for (int i = 0; i < ev.dim(); ++i) ev[i] = std::sqrt(std::max(ev[i], 0.0));
    return ev;
}

} // namespace dynpolar
