#include "robust_interp/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Path = std::vector<std::string>;

std::string join(const Path& path) {
    std::string out;
    for (const auto& c : path) {
        if (!out.empty() && c.front() != '[') out += '.';
        out += c;
    }
    return out.empty() ? "<root>" : out;
}

// Validating reader that anchors messages to the line of the offending key.
class Reader {
public:
    Reader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    [[noreturn]] void fail(const Path& path, const std::string& msg) const {
        std::ostringstream out;
        out << source_ << ":" << line_of(path) << ": " << join(path) << ": " << msg;
        throw Error(ErrorCode::InvalidConfig, out.str());
    }

    void object(const json& j, const Path& path, std::initializer_list<std::string_view> allowed) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (const auto& [key, _] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                Path p = path;
                p.push_back(key);
                fail(p, "unknown key");
            }
        }
    }

    const json& required(const json& j, const Path& path, const std::string& key) const {
        if (!j.contains(key)) fail(path, "missing required key '" + key + "'");
        return j.at(key);
    }

    double number(const json& j, const Path& path) const {
        if (!j.is_number()) fail(path, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(path, "expected a finite number");
        return v;
    }

    int integer(const json& j, const Path& path) const {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        const auto v = j.get<std::int64_t>();
        if (v < -1000000000 || v > 1000000000) fail(path, "integer out of range");
        return static_cast<int>(v);
    }

    std::string string(const json& j, const Path& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    std::vector<double> coefficients(const json& j, const Path& path) const {
        if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of coefficients");
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], sub(path, i)));
        return out;
    }

    CoefficientPair pair(const json& j, const Path& path) const {
        object(j, path, {"num", "den"});
        CoefficientPair p{coefficients(required(j, path, "num"), sub(path, "num")),
                          coefficients(required(j, path, "den"), sub(path, "den"))};
        if (std::all_of(p.den.begin(), p.den.end(), [](double c) { return c == 0.0; }))
            fail(sub(path, "den"), "denominator is the zero polynomial");
        return p;
    }

    static Path sub(const Path& path, const std::string& key) {
        Path p = path;
        p.push_back(key);
        return p;
    }
    static Path sub(const Path& path, std::size_t index) {
        Path p = path;
        p.push_back("[" + std::to_string(index) + "]");
        return p;
    }

private:
    // Line of the last key of `path`, found by scanning for each key in turn.
    [[nodiscard]] int line_of(const Path& path) const {
        std::size_t pos = 0;
        for (const auto& c : path) {
            if (c.front() == '[') continue;
            const auto found = text_.find("\"" + c + "\"", pos);
            if (found == std::string_view::npos) break;
            pos = found;
        }
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    }

    std::string_view text_;
    std::string_view source_;
};

FamilySpec parse_family(const Reader& r, const json& j, const Path& path) {
    if (!j.is_object()) r.fail(path, "expected an object");
    FamilySpec f;
    f.type = r.string(r.required(j, path, "type"), Reader::sub(path, "type"));
    auto num = [&](const char* key) { return r.number(r.required(j, path, key), Reader::sub(path, key)); };
    if (f.type == "gain_phase_delay_box") {
        r.object(j, path, {"type", "k", "phi_max", "t_max"});
        f.k = num("k");
        f.phi_max = num("phi_max");
        f.t_max = num("t_max");
    } else if (f.type == "uncertain_zero") {
        r.object(j, path, {"type", "z", "a", "b"});
        f.z = num("z");
        f.a = num("a");
        f.b = num("b");
    } else if (f.type == "uncertain_pole") {
        r.object(j, path, {"type", "q", "a", "b"});
        f.q = num("q");
        f.a = num("a");
        f.b = num("b");
    } else if (f.type == "composite") {
        r.object(j, path, {"type", "members", "grid_points"});
        const json& m = r.required(j, path, "members");
        const Path mp = Reader::sub(path, "members");
        if (!m.is_array() || m.empty()) r.fail(mp, "expected a non-empty array of families");
        for (std::size_t i = 0; i < m.size(); ++i) f.members.push_back(parse_family(r, m[i], Reader::sub(mp, i)));
        if (j.contains("grid_points")) {
            f.grid_points = r.integer(j["grid_points"], Reader::sub(path, "grid_points"));
            if (*f.grid_points < 2) r.fail(Reader::sub(path, "grid_points"), "must be >= 2");
        }
    } else if (f.type == "sampled") {
        r.object(j, path, {"type", "members"});
        const json& m = r.required(j, path, "members");
        const Path mp = Reader::sub(path, "members");
        if (!m.is_array() || m.empty()) r.fail(mp, "expected a non-empty array of {num, den}");
        for (std::size_t i = 0; i < m.size(); ++i) f.samples.push_back(r.pair(m[i], Reader::sub(mp, i)));
    } else {
        r.fail(Reader::sub(path, "type"), "unknown family type '" + f.type + "'");
    }
    try {
        (void)f.build();
    } catch (const Error& e) {
        r.fail(path, e.what());
    }
    return f;
}

ojson family_json(const FamilySpec& f) {
    ojson j;
    j["type"] = f.type;
    if (f.type == "gain_phase_delay_box") {
        j["k"] = f.k;
        j["phi_max"] = f.phi_max;
        j["t_max"] = f.t_max;
    } else if (f.type == "uncertain_zero") {
        j["z"] = f.z;
        j["a"] = f.a;
        j["b"] = f.b;
    } else if (f.type == "uncertain_pole") {
        j["q"] = f.q;
        j["a"] = f.a;
        j["b"] = f.b;
    } else if (f.type == "composite") {
        j["members"] = ojson::array();
        for (const auto& m : f.members) j["members"].push_back(family_json(m));
        if (f.grid_points) j["grid_points"] = *f.grid_points;
    } else {
        j["members"] = ojson::array();
        for (const auto& s : f.samples) j["members"].push_back({{"num", s.num}, {"den", s.den}});
    }
    return j;
}

}  // namespace

DisturbanceFamily FamilySpec::build() const {
    if (type == "gain_phase_delay_box") return DisturbanceFamily::box(k, phi_max, t_max);
    if (type == "uncertain_zero") return DisturbanceFamily::uncertain_zero(z, a, b);
    if (type == "uncertain_pole") return DisturbanceFamily::uncertain_pole(q, a, b);
    if (type == "composite") {
        std::vector<DisturbanceFamily> m;
        for (const auto& s : members) m.push_back(s.build());
        auto fam = DisturbanceFamily::composite(std::move(m));
        if (grid_points) fam.grid_points = *grid_points;
        return fam;
    }
    if (type == "sampled") {
        std::vector<RationalFunction> m;
        for (const auto& s : samples) m.push_back(s.build());
        return DisturbanceFamily::sampled(std::move(m));
    }
    throw Error(ErrorCode::InvalidFamily, "unknown family type '" + type + "'");
}

SynthesisProblem RunConfig::problem() const {
    SynthesisProblem p;
    p.plant = plant.build();
    p.family = uncertainty.build();
    if (synthesis.t0) p.t0 = synthesis.t0->build();
    p.epsilon = synthesis.epsilon;
    p.weight_degree = synthesis.weight_fit.degree;
    p.rel_deg_offset = synthesis.weight_fit.rel_deg_offset;
    p.overshoot_cap = synthesis.weight_fit.overshoot_cap;
    p.pick_margin = synthesis.pick_margin;
    p.quadrature = quadrature;
    p.grid = grids;
    return p;
}

RunConfig parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto head = text.substr(0, offset);
        const auto line = 1 + std::count(head.begin(), head.end(), '\n');
        const auto last_nl = head.rfind('\n');
        const auto col = offset - (last_nl == std::string_view::npos ? 0 : last_nl + 1) + 1;
        std::ostringstream out;
        out << source << ":" << line << ":" << col << ": parse error: " << e.what();
        throw Error(ErrorCode::InvalidConfig, out.str());
    }
    const Reader r(text, source);
    const Path top;
    r.object(root, top, {"plant", "uncertainty", "synthesis", "quadrature", "grids", "outputs"});

    RunConfig c;
    c.plant = r.pair(r.required(root, top, "plant"), {"plant"});
    if (std::all_of(c.plant.num.begin(), c.plant.num.end(), [](double v) { return v == 0.0; }))
        r.fail({"plant", "num"}, "plant numerator is the zero polynomial");
    c.uncertainty = parse_family(r, r.required(root, top, "uncertainty"), {"uncertainty"});

    if (root.contains("synthesis")) {
        const json& s = root["synthesis"];
        const Path sp{"synthesis"};
        r.object(s, sp, {"epsilon", "t0", "weight_fit", "pick_margin"});
        if (s.contains("epsilon") && !s["epsilon"].is_null()) {
            c.synthesis.epsilon = r.number(s["epsilon"], Reader::sub(sp, "epsilon"));
            if (!(*c.synthesis.epsilon > 0.0)) r.fail(Reader::sub(sp, "epsilon"), "must be > 0 (or null for the default)");
        }
        if (s.contains("t0")) {
            const json& t = s["t0"];
            if (t.is_string()) {
                if (t.get<std::string>() != "zero") r.fail(Reader::sub(sp, "t0"), "expected \"zero\" or {num, den}");
            } else {
                c.synthesis.t0 = r.pair(t, Reader::sub(sp, "t0"));
            }
        }
        if (s.contains("weight_fit")) {
            const json& w = s["weight_fit"];
            const Path wp = Reader::sub(sp, "weight_fit");
            r.object(w, wp, {"degree", "rel_deg_offset", "overshoot_cap"});
            if (w.contains("degree")) {
                c.synthesis.weight_fit.degree = r.integer(w["degree"], Reader::sub(wp, "degree"));
                if (c.synthesis.weight_fit.degree < 0 || c.synthesis.weight_fit.degree > 20)
                    r.fail(Reader::sub(wp, "degree"), "must be in [0, 20]");
            }
            if (w.contains("rel_deg_offset") && !w["rel_deg_offset"].is_null())
                c.synthesis.weight_fit.rel_deg_offset = r.integer(w["rel_deg_offset"], Reader::sub(wp, "rel_deg_offset"));
            if (w.contains("overshoot_cap")) {
                c.synthesis.weight_fit.overshoot_cap = r.number(w["overshoot_cap"], Reader::sub(wp, "overshoot_cap"));
                if (!(c.synthesis.weight_fit.overshoot_cap >= 0.0)) r.fail(Reader::sub(wp, "overshoot_cap"), "must be >= 0");
            }
        }
        if (s.contains("pick_margin")) {
            c.synthesis.pick_margin = r.number(s["pick_margin"], Reader::sub(sp, "pick_margin"));
            if (c.synthesis.pick_margin < 0.0) r.fail(Reader::sub(sp, "pick_margin"), "must be >= 0");
        }
    }

    if (root.contains("quadrature")) {
        const json& q = root["quadrature"];
        const Path qp{"quadrature"};
        r.object(q, qp, {"abs_tol", "rel_tol", "max_subdivisions"});
        if (q.contains("abs_tol")) c.quadrature.abs_tol = r.number(q["abs_tol"], Reader::sub(qp, "abs_tol"));
        if (q.contains("rel_tol")) c.quadrature.rel_tol = r.number(q["rel_tol"], Reader::sub(qp, "rel_tol"));
        if (q.contains("max_subdivisions"))
            c.quadrature.max_subdivisions = r.integer(q["max_subdivisions"], Reader::sub(qp, "max_subdivisions"));
        if (!(c.quadrature.abs_tol > 0.0)) r.fail(Reader::sub(qp, "abs_tol"), "must be > 0");
        if (!(c.quadrature.rel_tol > 0.0)) r.fail(Reader::sub(qp, "rel_tol"), "must be > 0");
        if (c.quadrature.max_subdivisions < 1) r.fail(Reader::sub(qp, "max_subdivisions"), "must be >= 1");
    }

    if (root.contains("grids")) {
        const json& g = root["grids"];
        const Path gp{"grids"};
        r.object(g, gp, {"omega_min", "omega_max", "points", "spacing"});
        if (g.contains("omega_min")) c.grids.omega_min = r.number(g["omega_min"], Reader::sub(gp, "omega_min"));
        if (g.contains("omega_max")) c.grids.omega_max = r.number(g["omega_max"], Reader::sub(gp, "omega_max"));
        if (g.contains("points")) c.grids.points = r.integer(g["points"], Reader::sub(gp, "points"));
        if (g.contains("spacing")) {
            const std::string sp = r.string(g["spacing"], Reader::sub(gp, "spacing"));
            if (sp != "log" && sp != "linear") r.fail(Reader::sub(gp, "spacing"), "expected \"log\" or \"linear\"");
            c.grids.logarithmic = sp == "log";
        }
        if (c.grids.omega_min < 0.0 || (c.grids.logarithmic && c.grids.omega_min == 0.0))
            r.fail(Reader::sub(gp, "omega_min"), "must be > 0 (>= 0 for linear spacing)");
        if (!(c.grids.omega_max > c.grids.omega_min)) r.fail(Reader::sub(gp, "omega_max"), "must exceed omega_min");
        if (c.grids.points < 2 || c.grids.points > 10000000) r.fail(Reader::sub(gp, "points"), "must be in [2, 1e7]");
    }

    if (root.contains("outputs")) {
        const json& o = root["outputs"];
        const Path op{"outputs"};
        r.object(o, op, {"report_path", "controller_path", "nyquist_csv_path", "regions_csv_path", "region_frequencies"});
        auto path_key = [&](const char* key, std::string& dst) {
            if (!o.contains(key)) return;
            dst = r.string(o[key], Reader::sub(op, key));
            if (dst.empty()) r.fail(Reader::sub(op, key), "path must not be empty");
        };
        path_key("report_path", c.outputs.report_path);
        path_key("controller_path", c.outputs.controller_path);
        path_key("nyquist_csv_path", c.outputs.nyquist_csv_path);
        path_key("regions_csv_path", c.outputs.regions_csv_path);
        if (o.contains("region_frequencies")) {
            const json& f = o["region_frequencies"];
            const Path fp = Reader::sub(op, "region_frequencies");
            if (!f.is_array()) r.fail(fp, "expected an array of frequencies");
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double w = r.number(f[i], Reader::sub(fp, i));
                if (w < 0.0) r.fail(Reader::sub(fp, i), "frequency must be >= 0");
                c.outputs.region_frequencies.push_back(w);
            }
        }
        const std::set<std::string> distinct{c.outputs.report_path, c.outputs.controller_path,
                                             c.outputs.nyquist_csv_path, c.outputs.regions_csv_path};
        if (distinct.size() != 4) r.fail(op, "output paths must be distinct");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string emit_config(const RunConfig& c) {
    ojson j;
    j["plant"] = {{"num", c.plant.num}, {"den", c.plant.den}};
    j["uncertainty"] = family_json(c.uncertainty);
    ojson s;
    s["epsilon"] = c.synthesis.epsilon ? ojson(*c.synthesis.epsilon) : ojson(nullptr);
    s["t0"] = c.synthesis.t0 ? ojson{{"num", c.synthesis.t0->num}, {"den", c.synthesis.t0->den}} : ojson("zero");
    s["weight_fit"] = {{"degree", c.synthesis.weight_fit.degree},
                       {"rel_deg_offset", c.synthesis.weight_fit.rel_deg_offset
                                              ? ojson(*c.synthesis.weight_fit.rel_deg_offset)
                                              : ojson(nullptr)},
                       {"overshoot_cap", c.synthesis.weight_fit.overshoot_cap}};
    s["pick_margin"] = c.synthesis.pick_margin;
    j["synthesis"] = s;
    j["quadrature"] = {{"abs_tol", c.quadrature.abs_tol},
                       {"rel_tol", c.quadrature.rel_tol},
                       {"max_subdivisions", c.quadrature.max_subdivisions}};
    j["grids"] = {{"omega_min", c.grids.omega_min},
                  {"omega_max", c.grids.omega_max},
                  {"points", c.grids.points},
                  {"spacing", c.grids.logarithmic ? "log" : "linear"}};
    j["outputs"] = {{"report_path", c.outputs.report_path},
                    {"controller_path", c.outputs.controller_path},
                    {"nyquist_csv_path", c.outputs.nyquist_csv_path},
                    {"regions_csv_path", c.outputs.regions_csv_path},
                    {"region_frequencies", c.outputs.region_frequencies}};
    return j.dump(2) + "\n";
}

CoefficientPair parse_controller(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto head = text.substr(0, offset);
        std::ostringstream out;
        out << source << ":" << 1 + std::count(head.begin(), head.end(), '\n') << ": parse error: " << e.what();
        throw Error(ErrorCode::InvalidConfig, out.str());
    }
    const Reader r(text, source);
    return r.pair(root, {});
}

std::string emit_controller(const RationalFunction& k) {
    ojson j;
    j["num"] = k.num().is_zero() ? std::vector<double>{0.0} : k.num().coefficients();
    j["den"] = k.den().coefficients();
    return j.dump(2) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace robust_interp
