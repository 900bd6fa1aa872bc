/**
 * Command-line surface: builds divisor files for the example families and
 * computes minima, heights, sandwich diagnostics, smooth solves, and figures.
 *
 * Exit codes: 0 ok, 1 internal error, 2 parse error, 3 validation/builder
 * error, 4 precision exhausted.
 */

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "toric/builders.hpp"
#include "toric/io.hpp"
#include "toric/smoothsolve.hpp"

#include "plot.hpp"

using namespace toric;

namespace {

std::vector<Rat> parse_rat_list(const std::string& s, char sep = ',') {
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(parse_rat(item));
    return out;
}

std::vector<QVec> parse_point_list(const std::string& s) {
    std::vector<QVec> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(parse_rat_list(item));
    return out;
}

DivisorSpec load_spec(const std::string& path) {
    Json j;
    if (path == "-") {
        j = Json::parse(std::cin);
    } else {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        j = Json::parse(in);
    }
    return divisor_from_json(j);
}

void require_valid(const DivisorSpec& spec) {
    ValidationReport rep = validate(spec);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!rep.ok()) {
        for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
        throw AdelicError("validation failed");
    }
}

void print_minima_text(const MinimaReport& rep) {
    for (std::size_t i = 0; i < rep.mu.size(); ++i)
        std::cout << "mu^" << i + 1 << " = " << rep.mu[i].str() << "  (~" << rep.mu[i].approx()
                  << ")\n";
    std::cout << "essential minimum = " << rep.ess.str() << "\n";
    std::cout << "absolute minimum  = " << rep.abs.str() << "\n";
    std::cout << "face formula " << (rep.face_formula_certified ? "certified" : "formula value only")
              << " (semipositive and ample flags "
              << (rep.face_formula_certified ? "set" : "not both set") << ")\n";
    std::cout << "pseudo-effective: " << (rep.pseudo_effective ? "yes" : "no")
              << ", big: " << (rep.big ? "yes" : "no") << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"exact arithmetic invariants of toric metrized R-divisors"};
    app.require_subcommand(1);

    // ---- build ----------------------------------------------------------
    auto* build = app.add_subcommand("build", "emit a divisor file for an example family");
    build->require_subcommand(1);
    std::string vertices_arg, weights_arg, ell_arg, c_arg, exps_arg, coords_arg, mu_arg;
    std::string lambda_arg = "2", nu_arg;
    std::size_t bundle_n = 1;
    std::string bundle_a = "1";
    long hz_a0 = 1, hz_b = 0;
    bool unit_weights = false;

    auto* b_can = build->add_subcommand("canonical", "canonical metric on a polytope");
    b_can->add_option("--vertices", vertices_arg, "polytope vertices 'x,y;x,y;...'")->required();

    auto* b_lp = build->add_subcommand("lp", "weighted L^lambda metric");
    b_lp->add_option("--vertices", vertices_arg, "polytope vertices")->required();
    b_lp->add_option("--lambda", lambda_arg, "exponent Lambda (default 2)");
    b_lp->add_option("--weights", weights_arg, "weights 'x,y:w;...' on lattice points");
    b_lp->add_flag("--unit-weights", unit_weights, "weight 1 at every lattice point");

    auto* b_wps = build->add_subcommand("wps", "weighted projective space metric");
    b_wps->add_option("--ell", ell_arg, "facet data 'u1,u2:lambda;...'")->required();
    b_wps->add_option("--c", c_arg, "positive coefficients c_0,...,c_n")->required();

    auto* b_bundle = build->add_subcommand("bundle", "projective bundle over P^n");
    b_bundle->add_option("--n", bundle_n, "base dimension")->required();
    b_bundle->add_option("--a", bundle_a, "twists a_0,...,a_r (sorted)")->required();

    auto* b_hz = build->add_subcommand("hirzebruch", "Hirzebruch surface F_b");
    b_hz->add_option("--a0", hz_a0, "first twist (>= 1)")->required();
    b_hz->add_option("--b", hz_b, "parameter b >= 0")->required();

    auto* b_sub = build->add_subcommand("subtorus", "monomial subtorus translate, canonical metric");
    b_sub->add_option("--exponents", exps_arg, "exponents 'm1;m2;...'")->required();
    b_sub->add_option("--coords", coords_arg, "coordinates p_0,...,p_r")->required();

    auto* b_subfs = build->add_subcommand("subtorus-fs", "subtorus translate, Fubini-Study metric");
    b_subfs->add_option("--exponents", exps_arg, "exponents 'm1;m2;...'")->required();
    b_subfs->add_option("--coords", coords_arg, "coordinates p_0,...,p_r")->required();

    auto* b_pre = build->add_subcommand("prescribe", "prescribed minima and height on P^r");
    b_pre->add_option("--mu", mu_arg, "minima mu_1,...,mu_{r+1} (non-increasing)")->required();
    b_pre->add_option("--nu", nu_arg, "height nu")->required();

    // ---- compute commands -------------------------------------------------
    std::string file_arg, out_arg;
    bool as_json = false;
    int which_minimum = 0;
    double tol = 1e-10;

    auto* minima = app.add_subcommand("minima", "successive minima of a divisor file");
    minima->add_option("file", file_arg, "divisor file (or - for stdin)")->required();
    minima->add_flag("--json", as_json, "JSON output");
    minima->add_option("--i", which_minimum, "print only the i-th minimum");

    auto* zhang_cmd = app.add_subcommand("zhang", "height/minima sandwich report");
    zhang_cmd->add_option("file", file_arg)->required();
    zhang_cmd->add_flag("--json", as_json);

    auto* solve_cmd = app.add_subcommand("solve", "smooth Archimedean essential minimum");
    solve_cmd->add_option("file", file_arg)->required();
    solve_cmd->add_flag("--json", as_json);
    solve_cmd->add_option("--tol", tol, "certificate tolerance");

    auto* validate_cmd = app.add_subcommand("validate", "check a divisor file");
    validate_cmd->add_option("file", file_arg)->required();

    auto* plot_cmd = app.add_subcommand("plot", "emit an SVG figure or CSV samples");
    plot_cmd->add_option("file", file_arg)->required();
    plot_cmd->add_option("--out", out_arg, "output path (.svg or .csv)")->required();

    CLI11_PARSE(app, argc, argv);

    auto emit_spec = [&](const DivisorSpec& spec) {
        std::cout << divisor_to_json(spec).dump(2) << "\n";
    };
    auto note_minima = [&](const std::vector<LogValue>& mu) {
        for (std::size_t i = 0; i < mu.size(); ++i)
            std::cerr << "mu^" << i + 1 << " = " << mu[i].str() << "  (~" << mu[i].approx()
                      << ")\n";
    };

    if (build->parsed()) {
        if (b_can->parsed()) {
            auto pts = parse_point_list(vertices_arg);
            emit_spec(canonical(Polytope::hull(pts[0].size(), pts)));
        } else if (b_lp->parsed()) {
            auto pts = parse_point_list(vertices_arg);
            Polytope delta = Polytope::hull(pts[0].size(), pts);
            std::map<QVec, Rat, decltype(&lex_less)> alpha(&lex_less);
            if (unit_weights)
                for (const auto& m : delta.lattice_points()) alpha[m] = 1;
            std::stringstream ss(weights_arg);
            std::string entry;
            while (std::getline(ss, entry, ';')) {
                if (entry.empty()) continue;
                auto colon = entry.find(':');
                if (colon == std::string::npos) throw ParseError("weights want 'point:value'");
                alpha[parse_rat_list(entry.substr(0, colon))] = parse_rat(entry.substr(colon + 1));
            }
            LpResult res = lp_metric(delta, parse_rat(lambda_arg), alpha);
            note_minima(res.minima);
            emit_spec(res.spec);
        } else if (b_wps->parsed()) {
            std::vector<std::pair<QVec, Rat>> ell;
            std::stringstream ss(ell_arg);
            std::string entry;
            while (std::getline(ss, entry, ';')) {
                if (entry.empty()) continue;
                auto colon = entry.find(':');
                if (colon == std::string::npos) throw ParseError("ell wants 'normal:lambda'");
                ell.push_back({parse_rat_list(entry.substr(0, colon)), parse_rat(entry.substr(colon + 1))});
            }
            WpsResult res = wps_metric(ell, parse_rat_list(c_arg));
            note_minima(res.minima);
            std::cerr << "height = " << res.height.str() << "  (~" << res.height.approx()
                      << ")\n";
            emit_spec(res.spec);
        } else if (b_bundle->parsed()) {
            std::vector<long> a;
            for (const auto& q : parse_rat_list(bundle_a)) a.push_back(q.convert_to<long>());
            BundleResult res = toric_bundle(bundle_n, a);
            note_minima(res.minima_closed);
            emit_spec(res.spec);
        } else if (b_hz->parsed()) {
            BundleResult res = hirzebruch(hz_a0, hz_b);
            note_minima(res.minima_closed);
            emit_spec(res.spec);
        } else if (b_sub->parsed() || b_subfs->parsed()) {
            SubtorusData data;
            data.exponents = parse_point_list(exps_arg);
            data.coords = parse_rat_list(coords_arg);
            emit_spec((b_sub->parsed() ? subtorus_canonical(data) : subtorus_fs(data)).spec);
        } else if (b_pre->parsed()) {
            PrescribeResult res = prescribe(parse_rat_list(mu_arg), parse_rat(nu_arg));
            std::cerr << "t = " << res.t.str() << ", height = " << res.achieved_height.str()
                      << " (~" << res.achieved_height.approx() << ")\n";
            emit_spec(res.spec);
        }
        return 0;
    }

    if (minima->parsed()) {
        DivisorSpec spec = load_spec(file_arg);
        require_valid(spec);
        MinimaReport rep = successive_minima(spec);
        if (as_json) {
            std::cout << minima_report_to_json(rep).dump(2) << "\n";
        } else if (which_minimum > 0) {
            if (static_cast<std::size_t>(which_minimum) > rep.mu.size())
                throw AdelicError("index out of range");
            std::cout << "mu^" << which_minimum << " = " << rep.mu[which_minimum - 1].str()
                      << "  (~" << rep.mu[which_minimum - 1].approx() << ")\n";
        } else {
            print_minima_text(rep);
        }
        return 0;
    }

    if (zhang_cmd->parsed()) {
        DivisorSpec spec = load_spec(file_arg);
        require_valid(spec);
        ZhangReport rep = zhang(spec);
        if (as_json) {
            std::cout << zhang_report_to_json(rep).dump(2) << "\n";
            return 0;
        }
        std::cout << "sum of minima     = " << rep.sum_mu.str() << "  (~" << rep.sum_mu.approx()
                  << ")\n";
        std::cout << "height            = " << rep.height.str() << "  (~" << rep.height.approx()
                  << ")\n";
        std::cout << "degree            = " << rep.degree.str() << "\n";
        std::cout << "height/degree     = " << rep.height_over_degree.str() << "  (~"
                  << rep.height_over_degree.approx() << ")\n";
        std::cout << "(n+1) * ess       = " << rep.bound.str() << "  (~" << rep.bound.approx()
                  << ")\n";
        std::cout << "sum mu <= h/deg:  " << (rep.left_holds ? "holds" : "FAILS") << "\n";
        std::cout << "h/deg <= (n+1)e:  " << (rep.right_holds ? "holds" : "FAILS")
                  << (rep.right_equality ? " with equality" : "") << "\n";
        std::cout << "roof constant:    " << (rep.theta_constant ? "yes" : "no") << "\n";
        for (const auto& [place, affine] : rep.place_affine)
            std::cout << "  place " << place.str() << ": local roof "
                      << (affine ? "affine" : "not affine") << "\n";
        std::cout << "translated-canonical diagnosis: "
                  << (rep.gradients_zero_sum ? "yes (equality case)" : "no") << "\n";
        return 0;
    }

    if (solve_cmd->parsed()) {
        DivisorSpec spec = load_spec(file_arg);
        require_valid(spec);
        SmoothSolveResult res = solve_smooth(spec, tol);
        if (as_json) {
            std::cout << solve_result_to_json(res).dump(2) << "\n";
            return 0;
        }
        std::cout << "mu_ess ~ " << res.mu_ess << "\n";
        std::cout << "u0 ~ (";
        for (std::size_t c = 0; c < res.u0.size(); ++c)
            std::cout << (c ? ", " : "") << res.u0[c];
        std::cout << ")\n";
        std::cout << "residual " << res.optimality_residual << ", iterations " << res.iterations
                  << ", active pieces [" << res.cell_id << "]\n";
        return 0;
    }

    if (validate_cmd->parsed()) {
        DivisorSpec spec = load_spec(file_arg);
        ValidationReport rep = validate(spec);
        for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
        for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
        if (!rep.ok()) return 3;
        std::cout << "valid\n";
        return 0;
    }

    if (plot_cmd->parsed()) {
        DivisorSpec spec = load_spec(file_arg);
        require_valid(spec);
        if (spec.rank > 2) {
            std::cerr << "plots are available for rank 1 and 2 only (got rank " << spec.rank
                      << ")\n";
            return 3;
        }
        bool csv = out_arg.size() >= 4 && out_arg.substr(out_arg.size() - 4) == ".csv";
        bool as_subdiv_json = out_arg.size() >= 5 && out_arg.substr(out_arg.size() - 5) == ".json";
        std::vector<std::pair<std::string, RoofFn>> locals;
        for (const auto& e : spec.places) {
            if (std::holds_alternative<CanonicalMetric>(e.metric)) continue;
            if (std::holds_alternative<SmoothMetricData>(e.metric))
                throw AdelicError("plot works on the exact path; smooth entries not drawable");
            locals.emplace_back(e.place.str(), local_roof(spec, e));
        }
        RoofFn global = global_roof(spec);
        std::string payload;
        if (as_subdiv_json) {
            payload = subdivision_to_json(global).dump(2) + "\n";
        } else if (csv) {
            std::vector<std::pair<std::string, const RoofFn*>> roofs;
            for (const auto& [label, r] : locals) roofs.emplace_back(label, &r);
            roofs.emplace_back("global", &global);
            payload = toricmin::csv_samples(roofs);
        } else if (spec.rank == 1) {
            std::vector<toricmin::PlotSeries> series;
            auto sample = [&](const std::string& label, const RoofFn& r) {
                toricmin::PlotSeries s;
                s.label = label;
                for (const auto& v : r.subdivision().vertex_set)
                    s.points.emplace_back(rat_double(v[0]), r.value_in_domain(v).approx());
                std::sort(s.points.begin(), s.points.end());
                series.push_back(std::move(s));
            };
            sample("global", global);
            for (const auto& [label, r] : locals) sample(label, r);
            payload = toricmin::svg_rank1(series);
        } else {
            payload = toricmin::svg_rank2(global);
        }
        std::ofstream out(out_arg, std::ios::binary);
        if (!out) throw ParseError("cannot write " + out_arg);
        out << payload;
        std::cout << "wrote " << out_arg << "\n";
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const BuilderError& e) {
        std::cerr << "builder error: " << e.what() << "\n";
        return 3;
    } catch (const AdelicError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const SolveError& e) {
        std::cerr << "solve error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
