#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

namespace dynpolar::cli {

namespace {

// Character iterator that publishes how far the parser has read.
class TrackingIterator {
public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    TrackingIterator() = default;
    TrackingIterator(const std::string* s, std::size_t i, std::size_t* seen) : s_(s), i_(i), seen_(seen) {}
    const char& operator*() const {
        *seen_ = i_;
        return (*s_)[i_];
    }
    TrackingIterator& operator++() {
        ++i_;
        return *this;
    }
    TrackingIterator operator++(int) {
        TrackingIterator t = *this;
        ++i_;
        return t;
    }
    bool operator==(const TrackingIterator& o) const { return i_ == o.i_; }
    bool operator!=(const TrackingIterator& o) const { return i_ != o.i_; }

private:
    const std::string* s_ = nullptr;
    std::size_t i_ = 0;
    std::size_t* seen_ = nullptr;
};

int line_at(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class LineRecorder {
public:
    LineRecorder(const std::string& text, const std::size_t& seen, LineMap& lines)
        : text_(text), seen_(seen), lines_(lines) {}

    bool null() { return value(); }
    bool boolean(bool) { return value(); }
    bool number_integer(json::number_integer_t) { return value(); }
    bool number_unsigned(json::number_unsigned_t) { return value(); }
    bool number_float(json::number_float_t, const json::string_t&) { return value(); }
    bool string(json::string_t&) { return value(); }
    bool binary(json::binary_t&) { return value(); }
    bool start_object(std::size_t) {
        stack_.push_back({true, child(), {}, 0});
        return true;
    }
    bool key(json::string_t& k) {
        stack_.back().key = k;
        lines_[stack_.back().path + "/" + k] = line_at(text_, seen_);
        return true;
    }
    bool end_object() {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t) {
        stack_.push_back({false, child(), {}, 0});
        return true;
    }
    bool end_array() {
        stack_.pop_back();
        return true;
    }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) { return false; }

private:
    struct Frame {
        bool object;
        std::string path;
        std::string key;
        std::size_t index;
    };

    std::string child() {
        if (stack_.empty()) return "";
        Frame& f = stack_.back();
        if (f.object) return f.path + "/" + f.key;
        const std::string p = f.path + "/" + std::to_string(f.index++);
        lines_.emplace(p, line_at(text_, seen_));
        return p;
    }
    bool value() {
        child();
        return true;
    }

    const std::string& text_;
    const std::size_t& seen_;
    LineMap& lines_;
    std::vector<Frame> stack_;
};

class Reader {
public:
    Reader(const json& doc, const LineMap& lines) : doc_(doc), lines_(lines) {}

    [[noreturn]] void error(const std::string& path, const std::string& msg) const {
        std::string where = "config";
        const auto it = lines_.find(path);
        if (it != lines_.end()) where += " line " + std::to_string(it->second);
        throw ConfigError(where + ": " + (path.empty() ? "/" : path) + ": " + msg);
    }

    bool has(const std::string& path) const { return doc_.contains(json::json_pointer(path)); }
    const json& at(const std::string& path) const { return doc_.at(json::json_pointer(path)); }

    void keys(const std::string& path, const std::set<std::string>& allowed) const {
        const json& o = at(path);
        if (!o.is_object()) error(path, "expected an object");
        for (const auto& [k, v] : o.items())
            if (!allowed.count(k)) error(path + "/" + k, "unknown key '" + k + "'");
    }

    double number(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_number()) error(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) error(path, "expected a finite number");
        return x;
    }

    std::int64_t integer(const std::string& path, std::int64_t lo) const {
        const json& v = at(path);
        if (!v.is_number_integer()) error(path, "expected an integer");
        const std::int64_t x = v.get<std::int64_t>();
        if (x < lo) error(path, "must be >= " + std::to_string(lo));
        return x;
    }

    std::string string(const std::string& path, const std::set<std::string>& choices = {}) const {
        const json& v = at(path);
        if (!v.is_string()) error(path, "expected a string");
        const std::string s = v.get<std::string>();
        if (!choices.empty() && !choices.count(s)) {
            std::string list;
            for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
            error(path, "'" + s + "' is not one of " + list);
        }
        return s;
    }

    Vec vec(const std::string& path, int dim) const {
        const json& v = at(path);
        if (!v.is_array() || static_cast<int>(v.size()) != dim)
            error(path, "expected an array of " + std::to_string(dim) + " numbers");
        Vec out(dim);
        for (int i = 0; i < dim; ++i) out[i] = number(path + "/" + std::to_string(i));
        return out;
    }

    Mat mat(const std::string& path) const {
        const json& v = at(path);
        const int n = v.is_array() ? static_cast<int>(v.size()) : 0;
        if (n != 2 && n != 3) error(path, "expected a 2x2 or 3x3 array");
        Mat out(n);
        for (int i = 0; i < n; ++i) {
            const std::string row = path + "/" + std::to_string(i);
            const Vec r = vec(row, n);
            for (int j = 0; j < n; ++j) out(i, j) = r[j];
        }
        return out;
    }

private:
    const json& doc_;
    const LineMap& lines_;
};

int field_dim(const json& field) {
    const std::string kind = field.value("kind", "");
    if (kind == "planar_shear" || kind == "irrotational_vortex") return 2;
    if (kind == "shear3d" || kind == "rigid_rotation") return 3;
    if (kind == "linear" && field.contains("A") && field["A"].is_array()) return static_cast<int>(field["A"].size());
    return 0;
}

json filled(int dim, double v) { return json(std::vector<double>(static_cast<std::size_t>(dim), v)); }

} // namespace

json parse_with_lines(const std::string& text, LineMap& lines) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config line " + std::to_string(line_at(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": syntax error: " + e.what());
    }
    std::size_t seen = 0;
    LineRecorder rec(text, seen, lines);
    json::sax_parse(TrackingIterator(&text, 0, &seen), TrackingIterator(&text, text.size(), &seen), &rec);
    return doc;
}

json example_preset(const std::string& name) {
    if (name == "shear")
        return {{"field", {{"kind", "planar_shear"}, {"k", 1.0}}},
                {"x0", {0.0, 1.0}},
                {"tau", 0.0},
                {"t_end", 4.0},
                {"steps", 4000}};
    if (name == "vortex")
        return {{"field", {{"kind", "irrotational_vortex"}, {"alpha", 1.0}}},
                {"x0", {1.0, 0.0}},
                {"tau", 0.0},
                {"t_end", 2.0 * std::numbers::pi},
                {"steps", 4000}};
    if (name == "shear3d")
        return {{"field", {{"kind", "shear3d"}, {"k", 1.0}, {"c", 1.0}, {"w", 0.0}}},
                {"x0", {0.0, 0.0, 1.0}},
                {"tau", 0.0},
                {"t_end", 2.0},
                {"steps", 2000},
                {"axis", {1.0, 0.0, 0.0}}};
    throw ConfigError("unknown example '" + name + "' (expected shear, vortex or shear3d)");
}

json with_defaults(json doc) {
    if (!doc.is_object()) return doc;
    if (!doc.contains("tau")) doc["tau"] = 0.0;
    if (!doc.contains("steps")) doc["steps"] = 1000;
    if (!doc.contains("seed")) doc["seed"] = 1;
    if (!doc.contains("out")) doc["out"] = ".";
    if (!doc.contains("axis")) doc["axis"] = {0.0, 0.0, 1.0};
    json quad = {{"measure", "polar_angle"}, {"polar", 24}, {"azimuth", 48}, {"monte_carlo", 0}};
    if (doc.contains("quadrature") && doc["quadrature"].is_object()) quad.update(doc["quadrature"]);
    doc["quadrature"] = quad;

    const int dim = doc.contains("field") && doc["field"].is_object() ? field_dim(doc["field"]) : 0;
    if (dim == 2 || dim == 3) {
        if (!doc.contains("sampler")) {
            if (doc["field"].value("kind", "") == "irrotational_vortex")
                doc["sampler"] = {{"lower", {0.5, -0.5}}, {"upper", {1.5, 0.5}}, {"resolution", {16, 16}}};
            else if (dim == 2)
                doc["sampler"] = {{"lower", filled(2, -1.0)}, {"upper", filled(2, 1.0)}, {"resolution", {16, 16}}};
            else
                doc["sampler"] = {{"lower", filled(3, -1.0)}, {"upper", filled(3, 1.0)}, {"resolution", {8, 8, 8}}};
        }
        if (!doc.contains("frame")) {
            if (dim == 2)
                doc["frame"] = {{"kind", "planar_spin"}, {"rate", 0.5}};
            else
                doc["frame"] = {{"kind", "tumbling"}, {"rate3", 0.8}, {"rate1", 0.5}};
        }
    }
    return doc;
}

RunConfig build_config(const json& doc, const LineMap& lines) {
    const Reader r(doc, lines);
    r.keys("", {"field", "x0", "tau", "t_end", "steps", "sampler", "axis", "frame", "quadrature", "seed", "out"});
    RunConfig cfg;

    if (!r.has("/field")) r.error("", "missing required key 'field'");
    r.keys("/field", {"kind", "k", "alpha", "c", "w", "omega", "A"});
    if (!r.has("/field/kind")) r.error("/field", "missing required key 'kind'");
    FieldSpec& fs = cfg.field;
    fs.kind = r.string("/field/kind", {"planar_shear", "irrotational_vortex", "shear3d", "rigid_rotation", "linear"});
    const std::map<std::string, std::set<std::string>> params = {
        {"planar_shear", {"kind", "k"}},       {"irrotational_vortex", {"kind", "alpha"}},
        {"shear3d", {"kind", "k", "c", "w"}}, {"rigid_rotation", {"kind", "omega"}},
        {"linear", {"kind", "A"}}};
    r.keys("/field", params.at(fs.kind));
    if (r.has("/field/k")) fs.k = r.number("/field/k");
    if (r.has("/field/alpha")) fs.alpha = r.number("/field/alpha");
    if (r.has("/field/c")) fs.c = r.number("/field/c");
    if (r.has("/field/w")) fs.w = r.number("/field/w");
    if (fs.kind == "rigid_rotation") {
        if (!r.has("/field/omega")) r.error("/field", "rigid_rotation needs 'omega'");
        fs.omega = r.vec("/field/omega", 3);
    }
    if (fs.kind == "linear") {
        if (!r.has("/field/A")) r.error("/field", "linear needs 'A'");
        fs.A = r.mat("/field/A");
    }
    const int dim = fs.kind == "linear" ? fs.A.dim() : field_dim(r.at("/field"));

    if (!r.has("/x0")) r.error("", "missing required key 'x0'");
    cfg.x0 = r.vec("/x0", dim);
    if (r.has("/tau")) cfg.tau = r.number("/tau");
    if (!r.has("/t_end")) r.error("", "missing required key 't_end'");
    cfg.t_end = r.number("/t_end");
    if (cfg.t_end == cfg.tau) r.error("/t_end", "must differ from tau");
    if (r.has("/steps")) cfg.steps = static_cast<std::size_t>(r.integer("/steps", 1));

    if (r.has("/sampler")) {
        r.keys("/sampler", {"lower", "upper", "resolution"});
        for (const char* k : {"lower", "upper", "resolution"})
            if (!r.has(std::string("/sampler/") + k)) r.error("/sampler", std::string("missing key '") + k + "'");
        cfg.sampler.lower = r.vec("/sampler/lower", dim);
        cfg.sampler.upper = r.vec("/sampler/upper", dim);
        const json& res = r.at("/sampler/resolution");
        if (!res.is_array() || static_cast<int>(res.size()) != dim)
            r.error("/sampler/resolution", "expected " + std::to_string(dim) + " integers");
        for (int i = 0; i < dim; ++i) {
            cfg.sampler.resolution.push_back(
                static_cast<int>(r.integer("/sampler/resolution/" + std::to_string(i), 1)));
            if (!(cfg.sampler.lower[i] < cfg.sampler.upper[i])) r.error("/sampler", "lower must be below upper");
        }
    }

    if (r.has("/axis")) {
        const Vec a = r.vec("/axis", 3);
        if (norm(a) == 0.0) r.error("/axis", "must be nonzero");
        cfg.axis = normalized(a);
        if (dim == 2 && std::abs(std::abs(cfg.axis[2]) - 1.0) > 1e-12)
            r.error("/axis", "planar fields only admit the out-of-plane axis");
    }

    if (r.has("/frame")) {
        r.keys("/frame", {"kind", "rate", "axis", "rate3", "rate1"});
        if (!r.has("/frame/kind")) r.error("/frame", "missing required key 'kind'");
        FrameSpec& fr = cfg.frame;
        fr.kind = r.string("/frame/kind", {"identity", "planar_spin", "axis_spin", "tumbling"});
        const std::map<std::string, std::set<std::string>> fparams = {{"identity", {"kind"}},
                                                                      {"planar_spin", {"kind", "rate"}},
                                                                      {"axis_spin", {"kind", "axis", "rate"}},
                                                                      {"tumbling", {"kind", "rate3", "rate1"}}};
        r.keys("/frame", fparams.at(fr.kind));
        if (fr.kind == "planar_spin" && dim != 2) r.error("/frame/kind", "planar_spin needs a planar field");
        if ((fr.kind == "axis_spin" || fr.kind == "tumbling") && dim != 3)
            r.error("/frame/kind", fr.kind + " needs a 3D field");
        if (r.has("/frame/rate")) fr.rate = r.number("/frame/rate");
        if (r.has("/frame/rate3")) fr.rate3 = r.number("/frame/rate3");
        if (r.has("/frame/rate1")) fr.rate1 = r.number("/frame/rate1");
        if (r.has("/frame/axis")) {
            const Vec a = r.vec("/frame/axis", 3);
            if (norm(a) == 0.0) r.error("/frame/axis", "must be nonzero");
            fr.axis = normalized(a);
        }
    }

    if (r.has("/quadrature")) {
        r.keys("/quadrature", {"measure", "polar", "azimuth", "monte_carlo"});
        QuadratureSpec& q = cfg.quadrature;
        if (r.has("/quadrature/measure")) q.measure = r.string("/quadrature/measure", {"polar_angle", "area"});
        if (r.has("/quadrature/polar")) q.polar = static_cast<int>(r.integer("/quadrature/polar", 1));
        if (r.has("/quadrature/azimuth")) q.azimuth = static_cast<int>(r.integer("/quadrature/azimuth", 1));
        if (r.has("/quadrature/monte_carlo"))
            q.monte_carlo = static_cast<std::size_t>(r.integer("/quadrature/monte_carlo", 0));
    }

    if (r.has("/seed")) {
        const json& s = r.at("/seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
            r.error("/seed", "expected an unsigned integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (r.has("/out")) cfg.out = r.string("/out");

    cfg.resolved = doc;
    if (r.has("/axis")) cfg.resolved["axis"] = {cfg.axis[0], cfg.axis[1], cfg.axis[2]};
    return cfg;
}

RunConfig load_config(const std::string& path, const json& base, const Overrides& ov) {
    json doc = base.is_null() ? json::object() : base;
    LineMap lines;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const json user = parse_with_lines(ss.str(), lines);
        if (!user.is_object()) throw ConfigError("config line 1: top level must be an object");
        for (const auto& [k, v] : user.items()) doc[k] = v;
    }
    if (ov.out) doc["out"] = *ov.out;
    if (ov.steps) doc["steps"] = *ov.steps;
    if (ov.seed) doc["seed"] = *ov.seed;
    return build_config(with_defaults(doc), lines);
}

VelocityField RunConfig::make_field() const {
    if (field.kind == "planar_shear") return VelocityField::planar_shear(field.k);
    if (field.kind == "irrotational_vortex") return VelocityField::irrotational_vortex(field.alpha);
    if (field.kind == "shear3d") return VelocityField::shear3d(field.k, field.c, field.w);
    if (field.kind == "rigid_rotation") return VelocityField::rigid_rotation(field.omega);
    return VelocityField::linear(field.A);
}

BodySampler RunConfig::make_sampler() const {
    return BodySampler::uniform_grid(sampler.lower, sampler.upper, sampler.resolution);
}

FrameChange RunConfig::make_frame() const {
    if (frame.kind == "planar_spin") return FrameChange::planar_spin(frame.rate);
    if (frame.kind == "axis_spin") return FrameChange::axis_spin(frame.axis, frame.rate);
    if (frame.kind == "tumbling") return FrameChange::tumbling(frame.rate3, frame.rate1);
    return FrameChange::identity(dim());
}

SphereQuadrature RunConfig::make_quadrature() const {
    const SphereMeasure m = quadrature.measure == "area" ? SphereMeasure::Area : SphereMeasure::PolarAngle;
    if (quadrature.monte_carlo > 0) return SphereQuadrature::monte_carlo(quadrature.monte_carlo, seed, m);
    return SphereQuadrature::gauss_product(quadrature.polar, quadrature.azimuth, m);
}

} // namespace dynpolar::cli
