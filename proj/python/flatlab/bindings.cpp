#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flatlab/billiard.hpp"
#include "flatlab/cantor.hpp"
#include "flatlab/cf_oracle.hpp"
#include "flatlab/json_io.hpp"
#include "flatlab/nondiv.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/util.hpp"

namespace py = pybind11;
using namespace flatlab;

namespace {

Mat2 mat_from_tuple(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

std::array<double, 4> mat_to_tuple(const Mat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }

}  // namespace

PYBIND11_MODULE(_flatlab, m) {
    m.doc() = "saddle connections, bounded Teichmueller geodesics, rational billiards";

    py::register_exception<resource_error>(m, "ResourceError");
    py::register_exception<check_failure>(m, "CheckFailure");

    // matrices are passed as row-major 4-tuples (a11, a12, a21, a22)
    m.def("geodesic", [](double t) { return mat_to_tuple(geodesic(t)); }, py::arg("t"));
    m.def("horocycle", [](double s) { return mat_to_tuple(horocycle(s)); }, py::arg("s"));
    m.def("rotation", [](double theta) { return mat_to_tuple(rotation(theta)); }, py::arg("theta"));
    m.def("lower", [](double a, double b) { return mat_to_tuple(lower(a, b)); });
    m.def("matmul", [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
        return mat_to_tuple(mat_from_tuple(a) * mat_from_tuple(b));
    });
    m.def("act", [](const std::array<double, 4>& a, double x, double y) {
        Holonomy h = act(mat_from_tuple(a), {x, y});
        return std::make_pair(h.x, h.y);
    });
    m.def("factor_rotation", [](double theta) {
        auto [f, s] = factor_rotation(theta);
        return std::make_pair(mat_to_tuple(f), s);
    });
    m.def("conj_orbit_bound", [](const std::array<double, 4>& b, double t_max) {
        return conj_orbit_bound(mat_from_tuple(b), t_max);
    });

    py::class_<Surface>(m, "Surface")
        .def_readonly("name", &Surface::name)
        .def_readonly("area", &Surface::area)
        .def_readonly("genus", &Surface::genus)
        .def("describe", &Surface::describe)
        .def("transformed", [](const Surface& s, const std::array<double, 4>& a) {
            return s.transformed(mat_from_tuple(a));
        })
        .def("singularities", [](const Surface& s) {
            std::vector<std::tuple<int, long long, bool>> out;
            for (const auto& sg : s.singularities)
                out.push_back({sg.class_id, sg.cone_angle_over_pi, sg.marked});
            return out;
        })
        .def("to_json", [](const Surface& s) { return surface_to_json(s).dump(); });

    m.def("make_torus", &make_torus);
    m.def("make_square_tiled", &make_square_tiled, py::arg("right"), py::arg("up"),
          "0-based permutation images");
    m.def("unfold", [](const std::vector<std::pair<double, double>>& vertices,
                       const std::vector<std::pair<long long, long long>>& angles) {
        PolygonSpec p;
        for (auto [x, y] : vertices) p.vertices.push_back({x, y});
        for (auto [a, b] : angles) p.angles.push_back({a, b});
        return unfold(p);
    }, py::arg("vertices"), py::arg("angles"), "angles as (p, q) for p*pi/q");
    m.def("surface_from_json",
          [](const std::string& text) { return surface_from_json(json::parse(text)); });

    m.def("enumerate_saddles", [](const Surface& q, double L) {
        std::vector<std::tuple<double, double, long long>> out;
        for (const auto& e : enumerate_saddles(q, L).vectors)
            out.push_back({e.v.x, e.v.y, e.multiplicity});
        return out;
    }, py::arg("surface"), py::arg("cutoff"));
    m.def("systole", [](const Surface& q, const std::array<double, 4>& a) {
        Systole s = systole(q, mat_from_tuple(a));
        return py::make_tuple(s.value, py::make_tuple(s.witness.x, s.witness.y));
    }, py::arg("surface"), py::arg("matrix") = std::array<double, 4>{1, 0, 0, 1});
    m.def("systole_lower_bound_on_interval",
          [](const Surface& q, double t, double lo, double hi) {
              return systole_lower_bound_on_interval(q, t, lo, hi);
          });

    m.def("cf_expand", [](const std::string& literal, int depth) {
        CFExpansion e = cf_expand(parse_number(literal), depth);
        py::dict d;
        d["a0"] = e.a0;
        d["partial_quotients"] = e.partial_quotients;
        d["exact"] = e.exact;
        d["rational"] = e.rational_terminated;
        d["periodic"] = e.periodic;
        return d;
    }, py::arg("x"), py::arg("depth") = 40);
    m.def("is_badly_approximable", [](const std::string& literal, long long bound, int depth) {
        return is_badly_approximable(parse_number(literal), bound, depth);
    }, py::arg("x"), py::arg("bound"), py::arg("depth") = 40);
    m.def("shortest_vector", [](const std::array<double, 4>& a) {
        ShortestVector v = shortest_vector(Basis2::columns_of(mat_from_tuple(a)));
        return py::make_tuple(py::make_tuple(v.vector.x, v.vector.y), v.maxnorm, v.eucnorm);
    });

    m.def("check_hypothesis", [](const Surface& q, double lo, double hi, double rho) {
        return check_hypothesis(q, lo, hi, rho).ok;
    });
    m.def("bad_measure", [](const Surface& q, double lo, double hi, double eps, long long samples,
                            double post_geodesic) {
        return bad_measure(q, lo, hi, eps, samples, geodesic(post_geodesic));
    }, py::arg("surface"), py::arg("lo"), py::arg("hi"), py::arg("eps"),
       py::arg("samples") = 10000, py::arg("post_geodesic") = 0.0);

    m.def("derive_params", [](const Surface& q, double eps, double eta, double r, double rho0,
                              int depth) {
        CantorParams p = derive_params(q, eps, eta, r, rho0, depth);
        py::dict d;
        d["r"] = p.r;
        d["eps"] = p.eps;
        d["eps0"] = p.eps0;
        d["rho0"] = p.rho0;
        d["eta"] = p.eta;
        d["t1"] = p.t1;
        d["N"] = p.N;
        d["depth"] = p.depth;
        return d;
    }, py::arg("surface"), py::arg("eps"), py::arg("eta") = 0.5, py::arg("r") = 0.3,
       py::arg("rho0") = 0.1, py::arg("depth") = 6);
    m.def("cantor_construct", [](const Surface& q, double eps, double eta, double r, double rho0,
                                 int depth) {
        CantorParams p = derive_params(q, eps, eta, r, rho0, depth);
        CantorTree t = construct(q, p);
        py::dict d;
        d["N"] = p.N;
        d["t1"] = p.t1;
        d["extinct"] = t.extinct;
        std::vector<long long> counts;
        for (const auto& lvl : t.levels) counts.push_back(lvl.count);
        d["counts"] = counts;
        if (!t.extinct) {
            DimEstimate e = dim_estimate(t);
            d["mcmullen_bound"] = e.mcmullen_bound;
            d["box_dim_fit"] = e.box_dim_fit;
            d["eta_obs"] = e.eta_obs;
        }
        d["deepest_midpoints"] = t.deepest_midpoints;
        return d;
    }, py::arg("surface"), py::arg("eps"), py::arg("eta") = 0.5, py::arg("r") = 0.3,
       py::arg("rho0") = 0.1, py::arg("depth") = 4);
    m.def("bounded_direction_check", [](const Surface& q, double s, double T, double eps,
                                        const std::string& mode) {
        DirectionMode dm = DirectionMode::Horocycle;
        if (mode == "rotation") dm = DirectionMode::Rotation;
        else if (mode == "rotation_via_factorization") dm = DirectionMode::RotationViaFactorization;
        else if (mode != "horocycle") throw std::invalid_argument("unknown mode: " + mode);
        BoundedCheck b = bounded_direction_check(q, s, T, eps, dm);
        return py::make_tuple(b.bounded, b.min_systole);
    }, py::arg("surface"), py::arg("s"), py::arg("T"), py::arg("eps"),
       py::arg("mode") = "horocycle");
    m.def("rotation_angle_for_slope", &rotation_angle_for_slope);

    m.def("billiard_recurrence", [](const std::string& polygon_json, double x, double y,
                                    double theta, double T, bool ignore_sheets) {
        PolygonSpec P = polygon_from_json(json::parse(polygon_json));
        RecurrenceRecord r = recurrence_stat(P, {{x, y}, 0, 0}, theta, T, ignore_sheets);
        py::dict d;
        d["min_t_times_d"] = r.min_t_times_d;
        d["argmin_t"] = r.argmin_t;
        d["singular"] = r.singular;
        return d;
    }, py::arg("polygon_json"), py::arg("x"), py::arg("y"), py::arg("theta"), py::arg("T"),
       py::arg("ignore_sheets") = false);
    m.def("unit_square_json",
          [] { return polygon_to_json(PolygonSpec::unit_square()).dump(); });

    m.def("set_thread_budget", &set_thread_budget);
    m.attr("__version__") = "0.1.0";
}
