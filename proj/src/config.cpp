#include "stemgrow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stemgrow {

namespace {

using nlohmann::json;

// Arc length of the parabola x = 1-(y-1)^2 from 0 to y.
double parabola_arc_length(double y) {
    const auto g = [](double w) { return 0.5 * (w * std::sqrt(1.0 + w * w) + std::asinh(w)); };
    return 0.5 * (g(2.0) - g(2.0 * (1.0 - y)));
}

// Inverts s = parabola_arc_length(y) by bisection + Newton polish.
double parabola_y_of_arc(double s) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (parabola_arc_length(mid) < s ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double speed = std::sqrt(1.0 + 4.0 * (1.0 - y) * (1.0 - y));
        y -= (parabola_arc_length(y) - s) / speed;
        y = std::clamp(y, 0.0, 1.0);
    }
    return y;
}

Vec3 parabola_tangent(double y) {
    return normalized(Vec3{2.0 * (1.0 - y), 1.0, 0.0});
}

StemState seed_from_tangents(std::vector<Vec3> tangents, double ds, const ElongationLaw& law) {
    StemState st;
    st.ds = ds;
    st.law = law;
    st.t0 = ds * static_cast<double>(tangents.size() - 1);
    st.t = st.t0;
    st.nodes.resize(tangents.size());
    for (std::size_t i = 0; i < tangents.size(); ++i) {
        st.nodes[i].s = ds * static_cast<double>(i);
        st.nodes[i].tangent = tangents[i];
    }
    return rebuild_positions(std::move(st));
}

json must_object(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing section: " + key, key);
    if (!j.at(key).is_object()) throw ConfigError("expected an object: " + key, key);
    return j.at(key);
}

double number_at(const json& j, const std::string& section, const std::string& key,
                 double fallback, bool required = false) {
    const std::string path = section + "." + key;
    if (!j.contains(key)) {
        if (required) throw ConfigError("missing key: " + path, path);
        return fallback;
    }
    if (!j.at(key).is_number()) throw ConfigError("expected a number: " + path, path);
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError("non-finite value: " + path, path);
    return v;
}

Vec3 vec_at(const json& arr, const std::string& path) {
    if (!arr.is_array() || (arr.size() != 2 && arr.size() != 3))
        throw ConfigError("expected [x,y] or [x,y,z]: " + path, path);
    Vec3 v;
    v.x = arr.at(0).get<double>();
    v.y = arr.at(1).get<double>();
    v.z = arr.size() == 3 ? arr.at(2).get<double>() : 0.0;
    if (!is_finite(v)) throw ConfigError("non-finite vector: " + path, path);
    return v;
}

}  // namespace

StemState build_initial_state(const CurveSpec& curve, double ds, const ElongationLaw& law,
                              const Vec3& up) {
    if (!(ds > 0.0)) throw ConfigError("ds must be > 0", "run.ds");
    std::vector<Vec3> tangents;
    switch (curve.type) {
        case CurveSpec::Type::ParabolaArc: {
            const double total = parabola_arc_length(1.0);
            const auto m = static_cast<std::size_t>(std::floor(total / ds + 1e-9));
            if (m == 0) throw ConfigError("ds too large for the parabola arc", "run.ds");
            tangents.reserve(m + 1);
            for (std::size_t i = 0; i <= m; ++i)
                tangents.push_back(parabola_tangent(parabola_y_of_arc(ds * static_cast<double>(i))));
            break;
        }
        case CurveSpec::Type::VerticalSegment: {
            if (!(curve.length > 0.0))
                throw ConfigError("vertical-segment length must be > 0", "initial_curve.length");
            const auto m = static_cast<std::size_t>(std::floor(curve.length / ds + 1e-9));
            if (m == 0)
                throw ConfigError("vertical-segment shorter than ds", "initial_curve.length");
            tangents.assign(m + 1, normalized(up));
            break;
        }
        case CurveSpec::Type::Polyline: {
            if (curve.points.size() < 2)
                throw ConfigError("polyline needs at least two points", "initial_curve.points");
            if (norm(curve.points.front()) > 1e-12)
                throw ConfigError("polyline must start at the origin", "initial_curve.points");
            std::vector<double> cum{0.0};
            for (std::size_t i = 1; i < curve.points.size(); ++i) {
                const double len = norm(curve.points[i] - curve.points[i - 1]);
                if (len <= 0.0)
                    throw ConfigError("polyline has a zero-length segment", "initial_curve.points");
                cum.push_back(cum.back() + len);
            }
            const auto m = static_cast<std::size_t>(std::floor(cum.back() / ds + 1e-9));
            if (m == 0) throw ConfigError("polyline shorter than ds", "initial_curve.points");
            tangents.reserve(m + 1);
            std::size_t seg = 1;
            for (std::size_t i = 0; i <= m; ++i) {
                const double s = std::min(ds * static_cast<double>(i), cum.back());
                while (seg + 1 < cum.size() && cum[seg] < s) ++seg;
                tangents.push_back(normalized(curve.points[seg] - curve.points[seg - 1]));
            }
            break;
        }
    }
    return seed_from_tangents(std::move(tangents), ds, law);
}

SimConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    SimConfig cfg;

    const json model = must_object(j, "model");
    if (model.contains("alpha")) {
        const json& a = model.at("alpha");
        if (a.is_string()) {
            if (a.get<std::string>() != "infinity")
                throw ConfigError("model.alpha must be a positive number or \"infinity\"",
                                  "model.alpha");
        } else if (a.is_number() && a.get<double>() > 0.0) {
            cfg.params.law.alpha = a.get<double>();
        } else {
            throw ConfigError("model.alpha must be a positive number or \"infinity\"",
                              "model.alpha");
        }
    }
    cfg.params.beta = number_at(model, "model", "beta", 0.0);
    cfg.params.kappa = number_at(model, "model", "kappa", 0.0);
    cfg.params.sensing.gamma = number_at(model, "model", "gamma", 0.0);
    cfg.params.sensing.delta0 = number_at(model, "model", "delta0", 0.05);
    cfg.weights.beta = cfg.params.beta;
    cfg.weights.c_twist = number_at(model, "model", "c_twist", 1.0);
    cfg.weights.c_bend = number_at(model, "model", "c_bend", 1.0);
    if (cfg.params.beta < 0.0) throw ConfigError("model.beta must be >= 0", "model.beta");
    if (cfg.params.kappa < 0.0) throw ConfigError("model.kappa must be >= 0", "model.kappa");
    if (cfg.params.sensing.gamma < 0.0)
        throw ConfigError("model.gamma must be >= 0", "model.gamma");
    if (!(cfg.params.sensing.delta0 > 0.0))
        throw ConfigError("model.delta0 must be > 0", "model.delta0");
    if (!(cfg.weights.c_twist > 0.0)) throw ConfigError("model.c_twist must be > 0", "model.c_twist");
    if (!(cfg.weights.c_bend > 0.0)) throw ConfigError("model.c_bend must be > 0", "model.c_bend");

    std::string up = "y";
    if (model.contains("up")) {
        if (!model.at("up").is_string()) throw ConfigError("model.up must be \"y\" or \"z\"",
                                                           "model.up");
        up = model.at("up").get<std::string>();
    }
    if (up == "y")
        cfg.params.up = Vec3{0.0, 1.0, 0.0};
    else if (up == "z")
        cfg.params.up = Vec3{0.0, 0.0, 1.0};
    else
        throw ConfigError("model.up must be \"y\" or \"z\"", "model.up");

    const json runj = must_object(j, "run");
    cfg.t_end = number_at(runj, "run", "t_end", 0.0, /*required=*/true);
    cfg.ds = number_at(runj, "run", "ds", 0.05, /*required=*/true);
    if (!(cfg.ds > 0.0)) throw ConfigError("run.ds must be > 0", "run.ds");
    cfg.push_tol = number_at(runj, "run", "push_tol", 1e-9);
    cfg.push_max_iter = static_cast<int>(number_at(runj, "run", "push_max_iter", 40.0));
    cfg.frame_stride = static_cast<int>(number_at(runj, "run", "frame_stride", 1.0));
    if (!(cfg.push_tol > 0.0)) throw ConfigError("run.push_tol must be > 0", "run.push_tol");
    if (cfg.push_max_iter < 1)
        throw ConfigError("run.push_max_iter must be >= 1", "run.push_max_iter");
    if (cfg.frame_stride < 1)
        throw ConfigError("run.frame_stride must be >= 1", "run.frame_stride");

    if (j.contains("obstacles")) {
        if (!j.at("obstacles").is_array())
            throw ConfigError("obstacles must be an array", "obstacles");
        std::size_t idx = 0;
        for (const json& oj : j.at("obstacles")) {
            const std::string path = "obstacles[" + std::to_string(idx) + "]";
            if (!oj.is_object() || !oj.contains("type"))
                throw ConfigError("obstacle needs a type", path + ".type");
            const std::string type = oj.at("type").get<std::string>();
            if (type == "circle" || type == "sphere") {
                if (!oj.contains("center") || !oj.contains("radius"))
                    throw ConfigError("circle needs center and radius", path);
                const double r = oj.at("radius").get<double>();
                if (!(r > 0.0)) throw ConfigError("radius must be > 0", path + ".radius");
                cfg.obstacles.obstacles.push_back(
                    Obstacle::sphere(vec_at(oj.at("center"), path + ".center"), r));
            } else if (type == "half-space") {
                if (!oj.contains("point") || !oj.contains("normal"))
                    throw ConfigError("half-space needs point and normal", path);
                cfg.obstacles.obstacles.push_back(
                    Obstacle::half_space(vec_at(oj.at("point"), path + ".point"),
                                         normalized(vec_at(oj.at("normal"), path + ".normal"))));
            } else {
                throw ConfigError("unknown obstacle type: " + type, path + ".type");
            }
            ++idx;
        }
    }

    const json curvej = must_object(j, "initial_curve");
    if (!curvej.contains("type"))
        throw ConfigError("initial_curve needs a type", "initial_curve.type");
    const std::string ctype = curvej.at("type").get<std::string>();
    if (ctype == "parabola-arc") {
        cfg.curve.type = CurveSpec::Type::ParabolaArc;
    } else if (ctype == "vertical-segment") {
        cfg.curve.type = CurveSpec::Type::VerticalSegment;
        cfg.curve.length = number_at(curvej, "initial_curve", "length", 0.0, /*required=*/true);
    } else if (ctype == "polyline") {
        cfg.curve.type = CurveSpec::Type::Polyline;
        if (!curvej.contains("points") || !curvej.at("points").is_array())
            throw ConfigError("polyline needs points", "initial_curve.points");
        std::size_t pi = 0;
        for (const json& pj : curvej.at("points")) {
            cfg.curve.points.push_back(
                vec_at(pj, "initial_curve.points[" + std::to_string(pi) + "]"));
            ++pi;
        }
    } else {
        throw ConfigError("unknown initial_curve type: " + ctype, "initial_curve.type");
    }

    cfg.initial_state = build_initial_state(cfg.curve, cfg.ds, cfg.params.law, cfg.params.up);

    if (runj.contains("t0")) {
        const double stated = number_at(runj, "run", "t0", 0.0);
        if (std::abs(stated - cfg.initial_state.t0) > 0.5 * cfg.ds)
            throw ConfigError("run.t0 does not match the seed arc length", "run.t0");
    }
    if (cfg.t_end < cfg.initial_state.t0 - 1e-12)
        throw ConfigError("run.t_end precedes t0", "run.t_end");

    if (penetration_depth(cfg.initial_state, cfg.obstacles) > 0.0)
        throw ConfigError("initial curve penetrates an obstacle", "initial_curve");

    return cfg;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const SimConfig& cfg) {
    json j;
    json model;
    if (cfg.params.law.infinite())
        model["alpha"] = "infinity";
    else
        model["alpha"] = cfg.params.law.alpha;
    model["beta"] = cfg.params.beta;
    model["kappa"] = cfg.params.kappa;
    model["gamma"] = cfg.params.sensing.gamma;
    model["delta0"] = cfg.params.sensing.delta0;
    model["c_twist"] = cfg.weights.c_twist;
    model["c_bend"] = cfg.weights.c_bend;
    model["up"] = cfg.params.up.y == 1.0 ? "y" : "z";
    j["model"] = model;

    json runj;
    runj["t0"] = cfg.initial_state.t0;
    runj["t_end"] = cfg.t_end;
    runj["ds"] = cfg.ds;
    runj["push_tol"] = cfg.push_tol;
    runj["push_max_iter"] = cfg.push_max_iter;
    runj["frame_stride"] = cfg.frame_stride;
    j["run"] = runj;

    json obstacles = json::array();
    for (const Obstacle& o : cfg.obstacles.obstacles) {
        json oj;
        if (o.shape == Obstacle::Shape::Sphere) {
            oj["type"] = "circle";
            oj["center"] = {o.center.x, o.center.y, o.center.z};
            oj["radius"] = o.radius;
        } else {
            oj["type"] = "half-space";
            oj["point"] = {o.point.x, o.point.y, o.point.z};
            oj["normal"] = {o.normal.x, o.normal.y, o.normal.z};
        }
        obstacles.push_back(oj);
    }
    j["obstacles"] = obstacles;

    json curve;
    switch (cfg.curve.type) {
        case CurveSpec::Type::ParabolaArc:
            curve["type"] = "parabola-arc";
            break;
        case CurveSpec::Type::VerticalSegment:
            curve["type"] = "vertical-segment";
            curve["length"] = cfg.curve.length;
            break;
        case CurveSpec::Type::Polyline: {
            curve["type"] = "polyline";
            json pts = json::array();
            for (const Vec3& p : cfg.curve.points) pts.push_back({p.x, p.y, p.z});
            curve["points"] = pts;
            break;
        }
    }
    j["initial_curve"] = curve;

    return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
    return {"sim1-left", "sim1-right", "sim2-gamma7", "sim2-gamma4", "sim2-gamma3"};
}

SimConfig make_preset(const std::string& name) {
    json j;
    j["model"] = {{"alpha", "infinity"}, {"beta", 0.5},  {"kappa", 1.0},   {"gamma", 0.0},
                  {"delta0", 0.05},      {"c_twist", 1.0}, {"c_bend", 1.0}, {"up", "y"}};
    j["run"] = {{"t_end", 6.0},        {"ds", 0.05},        {"push_tol", 1e-9},
                {"push_max_iter", 40}, {"frame_stride", 1}};
    j["initial_curve"] = {{"type", "parabola-arc"}};

    if (name == "sim1-left") {
        j["obstacles"] = {{{"type", "circle"}, {"center", {1.2, 1.5}}, {"radius", 0.5}}};
    } else if (name == "sim1-right") {
        j["obstacles"] = {{{"type", "circle"}, {"center", {1.25, 1.5}}, {"radius", 0.5}}};
    } else if (name == "sim2-gamma7" || name == "sim2-gamma4" || name == "sim2-gamma3") {
        const double gamma = name == "sim2-gamma7" ? 7.0 : (name == "sim2-gamma4" ? 4.0 : 3.0);
        j["model"]["beta"] = 2.0;
        j["model"]["gamma"] = gamma;
        j["run"]["t_end"] = 12.0;
        j["initial_curve"] = {{"type", "vertical-segment"}, {"length", 0.5}};
        j["obstacles"] = {{{"type", "circle"}, {"center", {0.1, 1.5}}, {"radius", 0.5}},
                          {{"type", "circle"}, {"center", {0.6, 4.0}}, {"radius", 1.0}}};
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return parse_config_text(j.dump());
}

}  // namespace stemgrow
