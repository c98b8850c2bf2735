#pragma once

// Run configuration for the dynpolar command-line tool.
//
// Schema (all keys optional unless noted; unknown keys are rejected):
//   field:      {kind: planar_shear|irrotational_vortex|shear3d|rigid_rotation|linear,
//                k, alpha, c, w, omega[3], A[n][n]}   (required for decompose)
//   x0:         [n]
//   tau, t_end: numbers
//   steps:      integer > 0
//   sampler:    {lower[n], upper[n], resolution[n]}
//   axis:       [3], normalized on load
//   frame:      {kind: identity|planar_spin|axis_spin|tumbling, rate, axis[3], rate3, rate1}
//   quadrature: {measure: polar_angle|area, polar, azimuth, monte_carlo}
//   seed:       unsigned integer
//   out:        output directory

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynpolar/fibers.hpp"
#include "dynpolar/frames.hpp"
#include "dynpolar/integrate.hpp"
#include "dynpolar/mean_rotation.hpp"
#include "json.hpp"

namespace dynpolar::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Line of every object key and array element in the source text, keyed by
// JSON pointer ("/field/k", "/x0/1").
using LineMap = std::map<std::string, int>;

struct FieldSpec {
    std::string kind;
    double k = 1.0, alpha = 1.0, c = 1.0, w = 0.0;
    Vec omega = Vec(3);
    Mat A = Mat(2);
};

struct SamplerSpec {
    Vec lower, upper;
    std::vector<int> resolution;
};

struct FrameSpec {
    std::string kind = "identity";
    double rate = 0.5;
    Vec axis = Vec{0.0, 0.0, 1.0};
    double rate3 = 0.8, rate1 = 0.5;
};

struct QuadratureSpec {
    std::string measure = "polar_angle";
    int polar = 24, azimuth = 48;
    std::size_t monte_carlo = 0;
};

struct RunConfig {
    FieldSpec field;
    Vec x0;
    double tau = 0.0, t_end = 1.0;
    std::size_t steps = 1000;
    SamplerSpec sampler;
    Vec axis = Vec{0.0, 0.0, 1.0};
    FrameSpec frame;
    QuadratureSpec quadrature;
    std::uint64_t seed = 1;
    std::string out = ".";
    json resolved; // echoed into CSV headers

    int dim() const { return x0.dim(); }
    VelocityField make_field() const;
    TimeGrid make_grid() const { return TimeGrid(tau, t_end, steps); }
    BodySampler make_sampler() const;
    FrameChange make_frame() const;
    SphereQuadrature make_quadrature() const;
};

// Parses text, recording key lines. Syntax errors become ConfigError with the
// offending line.
json parse_with_lines(const std::string& text, LineMap& lines);

// Built-in defaults for the example names shear, vortex, shear3d.
json example_preset(const std::string& name);

// Fills field-dependent defaults (sampler box, frame) into a merged document.
json with_defaults(json doc);

// Validates and converts. Errors quote the source line when the key came from
// the user's file.
RunConfig build_config(const json& doc, const LineMap& lines);

// Reads the file at path (empty for none), merges it over base and applies
// flag overrides.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::size_t> steps;
    std::optional<std::uint64_t> seed;
};
RunConfig load_config(const std::string& path, const json& base, const Overrides& ov);

} // namespace dynpolar::cli
