#include "flatlab/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace flatlab {

json mat_to_json(const Mat2& m) { return json::array({m.a11, m.a12, m.a21, m.a22}); }

Mat2 mat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("matrix JSON must be a row-major 4-array");
    Mat2 m{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (std::fabs(m.det() - 1) > 1e-9)
        throw std::invalid_argument("matrix JSON must have determinant 1");
    return m;
}

json holonomy_to_json(const Holonomy& h) { return json::array({h.x, h.y}); }

json polygon_to_json(const PolygonSpec& p) {
    json v = json::array(), a = json::array();
    for (const auto& x : p.vertices) v.push_back(json::array({x.x, x.y}));
    for (const auto& x : p.angles) a.push_back(json::array({x.p, x.q}));
    return json{{"vertices", v}, {"angles", a}};
}

PolygonSpec polygon_from_json(const json& j) {
    PolygonSpec p;
    for (const auto& v : j.at("vertices")) p.vertices.push_back({v.at(0), v.at(1)});
    for (const auto& a : j.at("angles"))
        p.angles.push_back({a.at(0).get<long long>(), a.at(1).get<long long>()});
    p.validate();
    return p;
}

json surface_to_json(const Surface& s) {
    json j;
    switch (s.kind) {
        case SurfaceKind::Torus: j["kind"] = "torus"; break;
        case SurfaceKind::SquareTiled: {
            j["kind"] = "square_tiled";
            j["n"] = s.n_squares;
            json r = json::array(), u = json::array();
            for (int x : s.perm_right) r.push_back(x + 1);
            for (int x : s.perm_up) u.push_back(x + 1);
            j["right"] = r;
            j["up"] = u;
            break;
        }
        case SurfaceKind::Unfolded:
            j["kind"] = "unfolded";
            j["polygon"] = polygon_to_json(s.polygon);
            break;
    }
    Mat2 id;
    if (s.frame.a11 != id.a11 || s.frame.a12 != id.a12 || s.frame.a21 != id.a21 ||
        s.frame.a22 != id.a22)
        j["frame"] = mat_to_json(s.frame);
    return j;
}

Surface surface_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    Surface s;
    if (kind == "torus") {
        s = make_torus();
    } else if (kind == "square_tiled") {
        int n = j.at("n").get<int>();
        std::vector<int> r, u;
        for (const auto& x : j.at("right")) r.push_back(x.get<int>() - 1);
        for (const auto& x : j.at("up")) u.push_back(x.get<int>() - 1);
        if (static_cast<int>(r.size()) != n || static_cast<int>(u.size()) != n)
            throw std::invalid_argument("square_tiled: permutation degree disagrees with n");
        s = make_square_tiled(r, u);
    } else if (kind == "unfolded") {
        s = unfold(polygon_from_json(j.at("polygon")));
    } else {
        throw std::invalid_argument("unknown surface kind: " + kind);
    }
    if (j.contains("frame")) s = s.transformed(mat_from_json(j.at("frame")));
    return s;
}

json saddleset_to_json(const SaddleSet& s) {
    json vecs = json::array();
    for (const auto& e : s.vectors)
        vecs.push_back(json{{"v", holonomy_to_json(e.v)}, {"mult", e.multiplicity}});
    return json{{"surface", s.surface}, {"cutoff", s.cutoff}, {"vectors", vecs}};
}

json cantor_params_to_json(const CantorParams& p) {
    return json{{"r", p.r},     {"eps", p.eps}, {"eps0", p.eps0}, {"rho0", p.rho0},
                {"eta", p.eta}, {"t1", p.t1},   {"N", p.N},       {"depth", p.depth}};
}

CantorParams cantor_params_from_json(const json& j) {
    CantorParams p;
    p.r = j.at("r");
    p.eps = j.at("eps");
    p.eps0 = j.at("eps0");
    p.rho0 = j.at("rho0");
    p.eta = j.at("eta");
    p.t1 = j.at("t1");
    p.N = j.at("N");
    p.depth = j.at("depth");
    return p;
}

json tree_to_json(const CantorTree& t) {
    json levels = json::array();
    for (const auto& lvl : t.levels) {
        json l{{"m", lvl.m}, {"count", lvl.count}};
        if (lvl.m <= 4 && !lvl.lows.empty()) {
            double width = t.params.r * std::pow(static_cast<double>(t.params.N), -lvl.m);
            json iv = json::array();
            for (double lo : lvl.lows) iv.push_back(json::array({lo, lo + width}));
            l["intervals"] = iv;
        }
        levels.push_back(l);
    }
    json mids = json::array();
    std::size_t cap = 100000;
    for (std::size_t i = 0; i < t.deepest_midpoints.size() && i < cap; ++i)
        mids.push_back(t.deepest_midpoints[i]);
    json j{{"surface", t.surface},
           {"params", cantor_params_to_json(t.params)},
           {"levels", levels},
           {"deepest_midpoints", mids},
           {"extinct", t.extinct}};
    if (t.deepest_midpoints.size() > cap) j["midpoints_truncated"] = true;
    if (t.extinct) j["extinct_level"] = t.extinct_level;
    return j;
}

CantorTree tree_from_json(const json& j) {
    CantorTree t;
    t.surface = j.value("surface", "");
    t.params = cantor_params_from_json(j.at("params"));
    for (const auto& l : j.at("levels")) {
        CantorLevel lvl;
        lvl.m = l.at("m");
        lvl.count = l.at("count");
        if (l.contains("intervals"))
            for (const auto& iv : l.at("intervals")) lvl.lows.push_back(iv.at(0).get<double>());
        t.levels.push_back(lvl);
    }
    for (const auto& m : j.at("deepest_midpoints")) t.deepest_midpoints.push_back(m.get<double>());
    t.extinct = j.value("extinct", false);
    t.extinct_level = j.value("extinct_level", -1);
    // reconstruct deepest interval lows from midpoints when they were trimmed
    if (!t.levels.empty() && t.levels.back().lows.empty() && !t.deepest_midpoints.empty()) {
        double width = t.params.r * std::pow(static_cast<double>(t.params.N), -t.levels.back().m);
        for (double mid : t.deepest_midpoints) t.levels.back().lows.push_back(mid - width / 2);
    }
    return t;
}

json decay_fit_to_json(const DecayFit& f) {
    return json{{"alpha_hat", f.alpha_hat}, {"C_hat", f.C_hat},   {"residual", f.residual},
                {"eps", f.eps},             {"measures", f.measures}, {"predicted", f.predicted}};
}

}  // namespace flatlab
