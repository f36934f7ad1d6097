#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "flatlab/billiard.hpp"
#include "flatlab/cantor.hpp"
#include "flatlab/cf_oracle.hpp"
#include "flatlab/json_io.hpp"
#include "flatlab/manifest.hpp"
#include "flatlab/nondiv.hpp"
#include "flatlab/saddles.hpp"
#include "flatlab/surface.hpp"
#include "flatlab/util.hpp"

using namespace flatlab;

namespace {

struct Global {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir;
    std::string format = "csv";
    RunManifest manifest;

    std::string path(const std::string& name) const {
        return out_dir.empty() ? name : out_dir + "/" + name;
    }
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void write_output(Global& g, const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
    out.close();
    g.manifest.add_output(path);
}

Surface load_surface(const std::string& path) { return surface_from_json(read_json_file(path)); }

PolygonSpec load_polygon(const std::string& path) {
    json j = read_json_file(path);
    if (j.contains("polygon")) return polygon_from_json(j.at("polygon"));
    return polygon_from_json(j);
}

double angle_from(const std::string& slope, double theta, bool have_theta) {
    if (have_theta) return theta;
    if (slope.empty()) throw std::invalid_argument("give --slope or --theta");
    return std::atan(parse_number(slope).value());
}

Mat2 compose_matrix(const std::string& mat_json, bool have_mat, double gt, double hs, double rot) {
    Mat2 A;
    if (have_mat) A = mat_from_json(json::parse(mat_json));
    if (gt != 0) A = A * geodesic(gt);
    if (hs != 0) A = A * horocycle(hs);
    if (rot != 0) A = A * rotation(rot);
    return A;
}

bool point_in_polygon(const PolygonSpec& P, Vec2 pt) {
    int n = static_cast<int>(P.vertices.size());
    int crossings = 0;
    for (int k = 0; k < n; ++k) {
        Vec2 A = P.vertices[k], B = P.vertices[(k + 1) % n];
        if ((A.y > pt.y) != (B.y > pt.y)) {
            double xc = A.x + (pt.y - A.y) * (B.x - A.x) / (B.y - A.y);
            if (xc > pt.x) ++crossings;
        }
    }
    return crossings % 2 == 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatlab: saddle connections, bounded Teichmueller geodesics, and rational billiards"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    if (const char* env = std::getenv("FLATLAB_OUT_DIR")) g.out_dir = env;
    app.add_option("--seed", g.seed, "run seed (default 0)");
    app.add_option("--threads", g.threads, "parallelism budget (default 1)");
    app.add_option("--out-dir", g.out_dir, "output directory (env FLATLAB_OUT_DIR)");
    app.add_option("--format", g.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    int rc = 0;
    std::function<void()> runner;

    // ---------------------------------------------------------------- surface
    auto* surface_cmd = app.add_subcommand("surface", "build, validate and describe surfaces");
    {
        auto file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto* build = surface_cmd->add_subcommand("build", "normalize a surface file");
        build->add_option("--file", *file, "surface JSON")->required();
        build->add_option("--out", *out, "output path (default surface.json)");
        build->callback([&, file, out] {
            runner = [&, file, out] {
                Surface s = load_surface(*file);
                std::string path = g.path(out->empty() ? "surface.json" : *out);
                write_output(g, path, surface_to_json(s).dump(2) + "\n");
                std::cout << s.describe();
            };
        });
        auto* validate = surface_cmd->add_subcommand("validate", "validate and print stratum data");
        validate->add_option("--file", *file, "surface JSON")->required();
        validate->callback([&, file] {
            runner = [&, file] { std::cout << load_surface(*file).describe(); };
        });
        auto* describe = surface_cmd->add_subcommand("describe", "print stratum data");
        describe->add_option("--file", *file, "surface JSON")->required();
        describe->callback([&, file] {
            runner = [&, file] { std::cout << load_surface(*file).describe(); };
        });
    }

    // ---------------------------------------------------------------- saddles
    auto* saddles_cmd = app.add_subcommand("saddles", "enumerate saddle connections and systoles");
    {
        auto surf = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto cutoff = std::make_shared<double>(10);
        auto budget = std::make_shared<std::uint64_t>(200000000ull);
        auto* en = saddles_cmd->add_subcommand("enumerate", "holonomies up to a length cutoff");
        en->add_option("--surface", *surf, "surface JSON")->required();
        en->add_option("--cutoff", *cutoff, "max-norm cutoff L")->required();
        en->add_option("--budget", *budget, "enumeration work budget");
        en->add_option("--out", *out, "output path");
        en->callback([&, surf, out, cutoff, budget] {
            runner = [&, surf, out, cutoff, budget] {
                Surface s = load_surface(*surf);
                EnumerateOptions opt;
                opt.budget = *budget;
                SaddleSet set = enumerate_saddles(s, *cutoff, opt);
                std::string path = g.path(
                    out->empty() ? (g.format == "json" ? "saddles.json" : "saddles.csv") : *out);
                write_output(g, path,
                             g.format == "json" ? saddleset_to_json(set).dump(2) + "\n"
                                                : saddle_csv(set));
                std::cout << set.vectors.size() << " saddle connections with length <= "
                          << format_double(*cutoff) << " -> " << path << "\n";
            };
        });

        auto mat = std::make_shared<std::string>();
        auto gt = std::make_shared<double>(0);
        auto hs = std::make_shared<double>(0);
        auto rot = std::make_shared<double>(0);
        auto* sy = saddles_cmd->add_subcommand("systole", "shortest saddle connection under A");
        sy->add_option("--surface", *surf, "surface JSON")->required();
        auto* matopt = sy->add_option("--matrix", *mat, "row-major 4-array JSON");
        sy->add_option("--gt", *gt, "compose geodesic(t)");
        sy->add_option("--hs", *hs, "compose horocycle(s)");
        sy->add_option("--rot", *rot, "compose rotation(theta)");
        sy->callback([&, surf, mat, gt, hs, rot, matopt] {
            runner = [&, surf, mat, gt, hs, rot, matopt] {
                Surface s = load_surface(*surf);
                Mat2 A = compose_matrix(*mat, matopt->count() > 0, *gt, *hs, *rot);
                Systole v = systole(s, A);
                json j{{"value", v.value},
                       {"witness", holonomy_to_json(v.witness)},
                       {"witness_base", holonomy_to_json(v.witness_base)}};
                std::cout << j.dump(2) << "\n";
            };
        });
    }

    // ---------------------------------------------------------------- nondiv
    auto* nondiv_cmd = app.add_subcommand("nondiv", "bad-measure sweeps and decay fits");
    {
        auto surf = std::make_shared<std::string>();
        auto sweep = std::make_shared<std::string>("0.1,0.05,0.02,0.01,0.005");
        auto interval = std::make_shared<std::string>("0,1");
        auto rho = std::make_shared<double>(0.1);
        auto rho0 = std::make_shared<double>(0.1);
        auto samples = std::make_shared<long long>(100000);
        auto postg = std::make_shared<double>(0);
        auto out = std::make_shared<std::string>();
        auto* sw = nondiv_cmd->add_subcommand("sweep", "measure bad measures and fit the decay");
        sw->add_option("--surface", *surf, "surface JSON")->required();
        sw->add_option("--eps-sweep", *sweep, "comma-separated eps values");
        sw->add_option("--interval", *interval, "s interval lo,hi");
        sw->add_option("--rho", *rho, "hypothesis rho");
        sw->add_option("--rho0", *rho0, "rho0");
        sw->add_option("--samples", *samples, "grid samples per measure");
        sw->add_option("--post-geodesic", *postg, "apply geodesic(T) after h_s");
        sw->add_option("--out", *out, "CSV output path");
        sw->callback([&, surf, sweep, interval, rho, rho0, samples, postg, out] {
            runner = [&, surf, sweep, interval, rho, rho0, samples, postg, out] {
                Surface s = load_surface(*surf);
                NondivParams p;
                p.eps_list = parse_double_list(*sweep);
                auto iv = parse_double_list(*interval);
                if (iv.size() != 2) throw std::invalid_argument("--interval expects lo,hi");
                p.s_lo = iv[0];
                p.s_hi = iv[1];
                p.rho = *rho;
                p.rho0 = *rho0;
                p.sample_count = *samples;
                p.post = geodesic(*postg);
                DecayFit f = fit_decay(s, p);
                std::string path = g.path(out->empty() ? "nondiv.csv" : *out);
                write_output(g, path, nondiv_csv(f));
                std::cout << "alpha_hat = " << format_double(f.alpha_hat)
                          << ", C_hat = " << format_double(f.C_hat)
                          << ", residual = " << format_double(f.residual) << " -> " << path << "\n";
            };
        });
    }

    // ---------------------------------------------------------------- cantor
    auto* cantor_cmd =
        app.add_subcommand("cantor", "interval subdivision construction of bounded directions");
    {
        auto surf = std::make_shared<std::string>();
        auto eps = std::make_shared<double>(0.1);
        auto eta = std::make_shared<double>(0.5);
        auto r = std::make_shared<double>(0.3);
        auto rho0 = std::make_shared<double>(0.1);
        auto depth = std::make_shared<int>(6);
        auto out = std::make_shared<std::string>();
        cantor_cmd->add_option("--surface", *surf, "surface JSON");
        cantor_cmd->add_option("--eps", *eps, "K' = K_eps");
        cantor_cmd->add_option("--eta", *eta, "target survival deficit");
        cantor_cmd->add_option("--r", *r, "initial interval length");
        cantor_cmd->add_option("--rho0", *rho0, "configured rho_0");
        cantor_cmd->add_option("--depth", *depth, "subdivision depth");
        cantor_cmd->add_option("--out", *out, "tree JSON output path");
        cantor_cmd->callback([&, surf, eps, eta, r, rho0, depth, out] {
            if (!cantor_cmd->get_subcommands().empty()) return;
            runner = [&, surf, eps, eta, r, rho0, depth, out] {
                if (surf->empty()) throw std::invalid_argument("cantor requires --surface");
                Surface s = load_surface(*surf);
                CantorParams p = derive_params(s, *eps, *eta, *r, *rho0, *depth);
                StretchCertificate c1 = certify_stretch(s, p.t1, p.r, p.rho0, p.eps0);
                std::cout << "params: N = " << p.N << ", t1 = " << format_double(p.t1)
                          << ", eps0 = " << format_double(p.eps0)
                          << ", stretch certificate: " << (c1.ok ? "pass" : "FAIL") << "\n";
                CantorTree tree = construct(s, p);
                std::string path = g.path(out->empty() ? "tree.json" : *out);
                write_output(g, path, tree_to_json(tree).dump(2) + "\n");
                for (const auto& lvl : tree.levels)
                    std::cout << "level " << lvl.m << ": " << lvl.count << " intervals\n";
                if (tree.extinct) {
                    std::cout << "extinct at level " << tree.extinct_level
                              << "; consider reducing --eps\n";
                    throw check_failure("construction went extinct");
                }
                DimEstimate d = dim_estimate(tree);
                std::cout << "eta_obs = " << format_double(d.eta_obs)
                          << ", mcmullen_bound = " << format_double(d.mcmullen_bound)
                          << ", box_dim_fit = " << format_double(d.box_dim_fit) << " -> " << path
                          << "\n";
            };
        });

        auto tree_file = std::make_shared<std::string>();
        auto* dims = cantor_cmd->add_subcommand("dims", "dimension estimates from a stored tree");
        dims->add_option("--tree", *tree_file, "tree JSON")->required();
        dims->callback([&, tree_file] {
            runner = [&, tree_file] {
                CantorTree tree = tree_from_json(read_json_file(*tree_file));
                DimEstimate d = dim_estimate(tree);
                json j{{"eta_obs", d.eta_obs},
                       {"mcmullen_bound", d.mcmullen_bound},
                       {"box_dim_fit", d.box_dim_fit}};
                std::cout << j.dump(2) << "\n";
            };
        });

        auto gf = std::make_shared<int>(10);
        auto* verify = cantor_cmd->add_subcommand("verify", "re-verification pass on a finer grid");
        verify->add_option("--tree", *tree_file, "tree JSON")->required();
        verify->add_option("--surface", *surf, "surface JSON")->required();
        verify->add_option("--grid-factor", *gf, "grid refinement factor");
        verify->callback([&, tree_file, surf, gf] {
            runner = [&, tree_file, surf, gf] {
                CantorTree tree = tree_from_json(read_json_file(*tree_file));
                Surface s = load_surface(*surf);
                VerifyReport rep = verify_tree(s, tree, *gf);
                std::cout << "checked " << rep.checked << " samples, violations " << rep.violations
                          << ", min systole seen " << format_double(rep.min_seen) << "\n";
                if (rep.violations > 0)
                    throw check_failure("certified intervals failed re-verification");
            };
        });
    }

    // ---------------------------------------------------------------- oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "continued fractions and lattice reduction");
    {
        auto x = std::make_shared<std::string>();
        auto depth = std::make_shared<int>(40);
        auto* cf = oracle_cmd->add_subcommand("cf", "continued fraction expansion");
        cf->add_option("--x", *x, "number literal: int, p/q, (p+q*sqrt d)/r, or decimal")->required();
        cf->add_option("--depth", *depth, "number of partial quotients");
        cf->callback([&, x, depth] {
            runner = [&, x, depth] {
                QuadNumber q = parse_number(*x);
                CFExpansion e = cf_expand(q, *depth);
                json j{{"a0", e.a0},
                       {"partial_quotients", e.partial_quotients},
                       {"exact", e.exact},
                       {"rational", e.rational_terminated},
                       {"periodic", e.periodic},
                       {"precision_exhausted", e.precision_exhausted}};
                if (e.periodic) {
                    j["period_start"] = e.period_start;
                    j["period_length"] = e.period_length;
                }
                std::cout << j.dump(2) << "\n";
            };
        });

        auto mat = std::make_shared<std::string>();
        auto* sv = oracle_cmd->add_subcommand("shortest-vector", "Lagrange-Gauss shortest vector");
        sv->add_option("--matrix", *mat, "basis as a row-major 4-array (columns are v1, v2)")
            ->required();
        sv->callback([&, mat] {
            runner = [&, mat] {
                Mat2 m = mat_from_json(json::parse(*mat));
                ShortestVector v = shortest_vector(Basis2::columns_of(m));
                json j{{"vector", holonomy_to_json(v.vector)},
                       {"maxnorm", v.maxnorm},
                       {"eucnorm", v.eucnorm}};
                std::cout << j.dump(2) << "\n";
            };
        });

        auto nq = std::make_shared<int>(100);
        auto nu = std::make_shared<int>(100);
        auto T = std::make_shared<double>(25);
        auto eps = std::make_shared<double>(0.17);
        auto bound = std::make_shared<long long>(20);
        auto cfd = std::make_shared<int>(40);
        auto min_agree = std::make_shared<double>(0);
        auto out = std::make_shared<std::string>();
        auto* panel = oracle_cmd->add_subcommand(
            "panel", "bounded-geodesic vs continued-fraction direction panel");
        panel->add_option("--quadratic", *nq, "number of quadratic irrationals");
        panel->add_option("--unbounded", *nu, "number of rationals/spike-quotient numbers");
        panel->add_option("--T", *T, "geodesic horizon");
        panel->add_option("--eps", *eps, "boundedness threshold");
        panel->add_option("--bound", *bound, "partial quotient bound");
        panel->add_option("--depth", *cfd, "cf expansion depth");
        panel->add_option("--min-agreement", *min_agree, "fail below this agreement");
        panel->add_option("--out", *out, "CSV output path");
        panel->callback([&, nq, nu, T, eps, bound, cfd, min_agree, out] {
            runner = [&, nq, nu, T, eps, bound, cfd, min_agree, out] {
                PanelResult pr = equivalence_panel(*nq, *nu, *T, *eps, *bound, *cfd, g.seed);
                std::ostringstream os;
                os << "label,slope,cf_bounded,geo_bounded\n";
                for (const auto& c : pr.cases)
                    os << c.label << "," << format_double(c.slope) << "," << c.cf_bounded << ","
                       << c.geo_bounded << "\n";
                std::string path = g.path(out->empty() ? "panel.csv" : *out);
                write_output(g, path, os.str());
                std::cout << "agreement " << format_double(pr.agreement) << " over "
                          << pr.cases.size() << " directions -> " << path << "\n";
                if (pr.agreement < *min_agree)
                    throw check_failure("panel agreement below the requested threshold");
            };
        });
    }

    // ---------------------------------------------------------------- billiard
    auto* billiard_cmd = app.add_subcommand("billiard", "rational billiard flow and recurrence");
    {
        auto poly = std::make_shared<std::string>();
        auto slope = std::make_shared<std::string>();
        auto theta = std::make_shared<double>(0);
        auto start = std::make_shared<std::string>("0.3,0.4");
        auto T = std::make_shared<double>(100);
        auto out = std::make_shared<std::string>();
        auto trials = std::make_shared<int>(50);
        auto ignore_sheets = std::make_shared<bool>(false);

        auto* flow = billiard_cmd->add_subcommand("flow", "trace one trajectory");
        flow->add_option("--polygon", *poly, "polygon JSON")->required();
        flow->add_option("--slope", *slope, "direction slope (number literal)");
        auto* flow_theta = flow->add_option("--theta", *theta, "direction angle in radians");
        flow->add_option("--start", *start, "start point x,y");
        flow->add_option("--T", *T, "flow time");
        flow->add_option("--out", *out, "CSV output path");
        flow->callback([&, poly, slope, theta, start, T, out, flow_theta] {
            runner = [&, poly, slope, theta, start, T, out, flow_theta] {
                PolygonSpec P = load_polygon(*poly);
                double ang = angle_from(*slope, *theta, flow_theta->count() > 0);
                auto st = parse_double_list(*start);
                if (st.size() != 2) throw std::invalid_argument("--start expects x,y");
                Trajectory tr = billiard_flow(P, {{st[0], st[1]}, 0, 0}, ang, *T);
                std::ostringstream os;
                os << "t,x,y,sheet,edge\n";
                for (const auto& ev : tr.events)
                    os << format_double(ev.time) << "," << format_double(ev.position.x) << ","
                       << format_double(ev.position.y) << "," << ev.sheet << "," << ev.edge << "\n";
                std::string path = g.path(out->empty() ? "flow.csv" : *out);
                write_output(g, path, os.str());
                std::cout << tr.events.size() << " events"
                          << (tr.singular ? " (singular trajectory)" : "") << " -> " << path << "\n";
                if (tr.singular)
                    throw check_failure("singular trajectory at t = " +
                                        format_double(tr.singular_time));
            };
        });

        auto* recur = billiard_cmd->add_subcommand("recur", "close-return statistics");
        recur->add_option("--polygon", *poly, "polygon JSON")->required();
        recur->add_option("--slope", *slope, "direction slope (number literal)");
        auto* recur_theta = recur->add_option("--theta", *theta, "direction angle in radians");
        recur->add_option("--T", *T, "time horizon");
        recur->add_option("--trials", *trials, "number of random start points");
        recur->add_flag("--ignore-sheets", *ignore_sheets, "compare positions across sheets");
        recur->add_option("--out", *out, "CSV output path");
        recur->callback([&, poly, slope, theta, T, trials, ignore_sheets, out, recur_theta] {
            runner = [&, poly, slope, theta, T, trials, ignore_sheets, out, recur_theta] {
                PolygonSpec P = load_polygon(*poly);
                double ang = angle_from(*slope, *theta, recur_theta->count() > 0);
                double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
                for (const auto& v : P.vertices) {
                    xlo = std::fmin(xlo, v.x);
                    xhi = std::fmax(xhi, v.x);
                    ylo = std::fmin(ylo, v.y);
                    yhi = std::fmax(yhi, v.y);
                }
                std::vector<RecurrenceRecord> recs(*trials);
                parallel_for(static_cast<std::size_t>(*trials), [&](std::size_t i) {
                    std::mt19937_64 rng(mix_seed(g.seed, i));
                    std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
                    for (int attempt = 0; attempt < 1000; ++attempt) {
                        Vec2 pt{ux(rng), uy(rng)};
                        if (!point_in_polygon(P, pt)) continue;
                        RecurrenceRecord rr = recurrence_stat(P, {pt, 0, 0}, ang, *T, *ignore_sheets);
                        if (rr.singular) continue;
                        recs[i] = std::move(rr);
                        return;
                    }
                    throw check_failure("could not sample a nonsingular start point");
                }, g.threads);
                std::ostringstream os;
                os << "trial,t,d,t_times_d,sheet\n";
                double overall = 1e300;
                for (int i = 0; i < *trials; ++i) {
                    for (const auto& ev : recs[i].samples)
                        os << i << "," << format_double(ev.t) << "," << format_double(ev.d) << ","
                           << format_double(ev.t_times_d) << "," << ev.sheet << "\n";
                    overall = std::fmin(overall, recs[i].min_t_times_d);
                }
                std::string path = g.path(out->empty() ? "rec.csv" : *out);
                write_output(g, path, os.str());
                std::cout << "min t*d over all trials: " << format_double(overall) << " -> " << path
                          << "\n";
            };
        });

        auto eps = std::make_shared<double>(0);
        auto c_override = std::make_shared<double>(0);
        auto force = std::make_shared<bool>(false);
        auto* coro = billiard_cmd->add_subcommand("corollary", "quantitative recurrence check");
        coro->add_option("--polygon", *poly, "polygon JSON")->required();
        coro->add_option("--slope", *slope, "direction slope (number literal)");
        auto* coro_theta = coro->add_option("--theta", *theta, "direction angle in radians");
        coro->add_option("--T", *T, "time horizon");
        coro->add_option("--trials", *trials, "number of random start points");
        coro->add_option("--eps", *eps, "certification eps (0 = derive automatically)");
        coro->add_option("--c-override", *c_override, "assert min t*d >= this instead of eps^2/2");
        coro->add_flag("--ignore-sheets", *ignore_sheets, "compare positions across sheets");
        coro->add_flag("--force-trials", *force, "run trials even when certification fails");
        coro->callback([&, poly, slope, theta, T, trials, eps, c_override, ignore_sheets, force,
                        coro_theta] {
            runner = [&, poly, slope, theta, T, trials, eps, c_override, ignore_sheets, force,
                      coro_theta] {
                PolygonSpec P = load_polygon(*poly);
                double ang = angle_from(*slope, *theta, coro_theta->count() > 0);
                double e = *eps;
                if (e == 0) {
                    Surface q = unfold(P);
                    double horizon = 2 * std::log(std::fmax(*T, 2.0)) + 6;
                    BoundedCheck cert = bounded_direction_check(
                        q, unfolding_rotation_angle(ang), horizon, 0.01, DirectionMode::Rotation);
                    e = std::fmax(1e-6, std::fmin(cert.min_systole * 0.999, 0.999));
                    std::cout << "derived eps = " << format_double(e) << "\n";
                }
                CorollaryReport rep = corollary_check(P, ang, e, *T, *trials, g.seed, *c_override,
                                                      *ignore_sheets, *force);
                json j{{"precondition_ok", rep.precondition_ok},
                       {"eps", rep.eps},
                       {"c", rep.c},
                       {"t0_max", rep.t0_max},
                       {"certified_min_systole", rep.certified_min_systole},
                       {"trials", rep.trials},
                       {"passed", rep.passed}};
                if (!rep.precondition_ok) {
                    j["short_vector"] = holonomy_to_json(rep.short_vector);
                    j["short_time"] = rep.short_time;
                }
                json viol = json::array();
                for (const auto& v : rep.violations)
                    viol.push_back(json{{"trial", v.trial},
                                        {"t", v.t},
                                        {"d", v.d},
                                        {"t0", v.t0},
                                        {"witness_found", v.witness_found},
                                        {"witness", holonomy_to_json(v.witness)},
                                        {"witness_length", v.witness_length},
                                        {"cross_sheet", v.cross_sheet},
                                        {"event_sheet", v.event_sheet}});
                j["violations"] = viol;
                std::cout << j.dump(2) << "\n";
                if (!rep.passed) throw check_failure("corollary check failed");
            };
        });

        auto ndirs = std::make_shared<int>(100);
        auto* hist = billiard_cmd->add_subcommand("histogram",
                                                  "min t*d for random directions (empirical only)");
        hist->add_option("--polygon", *poly, "polygon JSON")->required();
        hist->add_option("--directions", *ndirs, "number of random directions");
        hist->add_option("--T", *T, "time horizon");
        hist->add_option("--out", *out, "CSV output path");
        hist->callback([&, poly, ndirs, T, out] {
            runner = [&, poly, ndirs, T, out] {
                PolygonSpec P = load_polygon(*poly);
                std::vector<double> thetas(*ndirs), mins(*ndirs);
                std::mt19937_64 rng(mix_seed(g.seed, 0xb111a4d));
                std::uniform_real_distribution<double> ua(0.01, M_PI / 2 - 0.01);
                for (int i = 0; i < *ndirs; ++i) thetas[i] = ua(rng);
                parallel_for(static_cast<std::size_t>(*ndirs), [&](std::size_t i) {
                    RecurrenceRecord rr = recurrence_stat(P, {{0.31, 0.41}, 0, 0}, thetas[i], *T, false);
                    mins[i] = rr.singular ? -1 : rr.min_t_times_d;
                }, g.threads);
                std::ostringstream os;
                os << "theta,min_t_times_d\n";
                for (int i = 0; i < *ndirs; ++i)
                    os << format_double(thetas[i]) << "," << format_double(mins[i]) << "\n";
                std::string path = g.path(out->empty() ? "histogram.csv" : *out);
                write_output(g, path, os.str());
                std::cout << *ndirs << " directions -> " << path << "\n";
            };
        });
    }

    // ----------------------------------------------------------------
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    set_thread_budget(g.threads);
    g.manifest.started = iso8601_now();
    g.manifest.seed = g.seed;
    g.manifest.threads = g.threads;
    for (int i = 1; i < argc; ++i) g.manifest.args.push_back(argv[i]);
    std::string cmd;
    for (CLI::App* sub = &app; !sub->get_subcommands().empty();) {
        sub = sub->get_subcommands().front();
        cmd += (cmd.empty() ? "" : " ") + sub->get_name();
    }
    g.manifest.command = cmd;

    try {
        if (!runner) throw std::invalid_argument("no action selected");
        runner();
    } catch (const resource_error& e) {
        std::cerr << "resource budget exceeded: " << e.what() << "\n";
        rc = 3;
    } catch (const check_failure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        rc = 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        rc = 2;
    } catch (const std::domain_error& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        rc = 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 1;
    }

    try {
        write_manifest(g.out_dir, g.manifest);
    } catch (const std::exception& e) {
        std::cerr << "manifest: " << e.what() << "\n";
    }
    return rc;
}
