/**
 * JSON persistence for divisor files and reports.  Exact fields are rational
 * strings ("7/3") or LogValue objects {"const": "...", "logs": {"2": "7/3"}};
 * float images only ever appear in separate "_approx" output fields.  Parsing
 * is strict: unknown keys are rejected.
 */

#ifndef TORIC_IO_HPP
#define TORIC_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "toric/adelic.hpp"
#include "toric/minima.hpp"
#include "toric/smoothsolve.hpp"

namespace toric {

using Json = nlohmann::ordered_json;

namespace io {

inline void expect_keys(const Json& j, const std::vector<std::string>& required,
                        const std::vector<std::string>& optional = {}) {
    if (!j.is_object()) throw ParseError("expected a JSON object");
    for (const auto& k : required)
        if (!j.contains(k)) throw ParseError("missing field '" + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const auto& r : required) known |= k == r;
        for (const auto& o : optional) known |= k == o;
        if (!known) throw ParseError("unknown field '" + k + "'");
    }
}

inline Rat rat_from_json(const Json& j) {
    if (!j.is_string()) throw ParseError("rationals must be strings");
    return parse_rat(j.get<std::string>());
}

inline Json rat_to_json(const Rat& q) { return q.str(); }

inline QVec qvec_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected a coordinate array");
    QVec v;
    for (const auto& x : j) v.push_back(rat_from_json(x));
    return v;
}

inline Json qvec_to_json(const QVec& v) {
    Json j = Json::array();
    for (const auto& x : v) j.push_back(rat_to_json(x));
    return j;
}

inline LogValue logvalue_from_json(const Json& j) {
    expect_keys(j, {"const", "logs"});
    LogValueBuilder b;
    b.set_const(rat_from_json(j.at("const")));
    for (const auto& [k, v] : j.at("logs").items()) {
        std::uint64_t p = std::stoull(k);
        b.add_log(p, rat_from_json(v));
    }
    return b.take();
}

inline Json logvalue_to_json(const LogValue& v) {
    Json j;
    j["const"] = rat_to_json(v.const_term());
    Json logs = Json::object();
    for (const auto& [p, c] : v.log_coeffs()) logs[std::to_string(p)] = rat_to_json(c);
    j["logs"] = logs;
    return j;
}

inline Polytope polytope_from_json(const Json& j) {
    expect_keys(j, {"vertices"});
    std::vector<QVec> pts;
    for (const auto& v : j.at("vertices")) pts.push_back(qvec_from_json(v));
    if (pts.empty()) throw ParseError("polytope needs vertices");
    return Polytope::hull(pts[0].size(), pts);
}

inline Json polytope_to_json(const Polytope& p) {
    Json j;
    Json verts = Json::array();
    for (const auto& v : p.vertices()) verts.push_back(qvec_to_json(v));
    j["vertices"] = verts;
    return j;
}

inline RoofFn roof_from_json(const Json& j) {
    expect_keys(j, {"domain", "generators"});
    Polytope dom = polytope_from_json(j.at("domain"));
    std::vector<std::pair<QVec, LogValue>> gens;
    for (const auto& g : j.at("generators")) {
        if (!g.is_array() || g.size() != 2) throw ParseError("generator must be [point, value]");
        gens.emplace_back(qvec_from_json(g[0]), logvalue_from_json(g[1]));
    }
    return RoofFn(std::move(dom), std::move(gens));
}

inline Json roof_to_json(const RoofFn& r) {
    Json j;
    j["domain"] = polytope_to_json(r.domain());
    Json gens = Json::array();
    for (const auto& [p, t] : r.generators())
        gens.push_back(Json::array({qvec_to_json(p), logvalue_to_json(t)}));
    j["generators"] = gens;
    return j;
}

inline CellwisePA cellwise_from_json(const Json& j) {
    expect_keys(j, {"rank", "cells"});
    std::size_t rank = j.at("rank").get<std::size_t>();
    std::vector<PACell> cells;
    for (const auto& cj : j.at("cells")) {
        expect_keys(cj, {"ineqs", "gradient", "offset"});
        PACell c;
        for (const auto& hj : cj.at("ineqs")) {
            expect_keys(hj, {"normal", "offset"});
            c.ineqs.push_back(
                Halfspace::canonical(qvec_from_json(hj.at("normal")), rat_from_json(hj.at("offset"))));
        }
        c.gradient = qvec_from_json(cj.at("gradient"));
        c.offset = logvalue_from_json(cj.at("offset"));
        cells.push_back(std::move(c));
    }
    return CellwisePA(rank, std::move(cells));
}

inline Json cellwise_to_json(const CellwisePA& psi) {
    Json j;
    j["rank"] = psi.rank();
    Json cells = Json::array();
    for (const auto& c : psi.cells()) {
        Json cj;
        Json hs = Json::array();
        for (const auto& h : c.ineqs) {
            Json hj;
            hj["normal"] = qvec_to_json(h.normal);
            hj["offset"] = rat_to_json(h.offset);
            hs.push_back(hj);
        }
        cj["ineqs"] = hs;
        cj["gradient"] = qvec_to_json(c.gradient);
        cj["offset"] = logvalue_to_json(c.offset);
        cells.push_back(cj);
    }
    j["cells"] = cells;
    return j;
}

inline Place place_from_string(const std::string& s) {
    if (s == "inf") return Place::infinite();
    if (s.rfind("p:", 0) == 0) return Place::prime(std::stoull(s.substr(2)));
    throw ParseError("bad place '" + s + "' (want \"inf\" or \"p:<prime>\")");
}

inline SmoothMetricData smooth_from_json(const Json& j) {
    expect_keys(j, {"points", "weights"}, {"lambda"});
    SmoothMetricData s;
    for (const auto& p : j.at("points")) s.points.push_back(qvec_from_json(p));
    for (const auto& w : j.at("weights")) s.weights.push_back(rat_from_json(w));
    if (j.contains("lambda")) s.lambda = rat_from_json(j.at("lambda"));
    return s;
}

inline Json smooth_to_json(const SmoothMetricData& s) {
    Json j;
    Json pts = Json::array(), ws = Json::array();
    for (const auto& p : s.points) pts.push_back(qvec_to_json(p));
    for (const auto& w : s.weights) ws.push_back(rat_to_json(w));
    j["points"] = pts;
    j["weights"] = ws;
    if (s.lambda != 2) j["lambda"] = rat_to_json(s.lambda);
    return j;
}

}  // namespace io

inline DivisorSpec divisor_from_json(const Json& j) {
    io::expect_keys(j, {"schema_version", "rank", "polytope", "places", "flags"});
    if (j.at("schema_version").get<int>() != 1) throw ParseError("unsupported schema_version");
    DivisorSpec spec;
    spec.rank = j.at("rank").get<std::size_t>();
    spec.delta = io::polytope_from_json(j.at("polytope"));
    if (spec.delta.rank() != spec.rank) throw ParseError("polytope rank differs from 'rank'");
    for (const auto& pj : j.at("places")) {
        io::expect_keys(pj, {"place", "weight", "metric"});
        PlaceEntry e;
        e.place = io::place_from_string(pj.at("place").get<std::string>());
        e.weight = io::rat_from_json(pj.at("weight"));
        const Json& m = pj.at("metric");
        if (m.is_string()) {
            if (m.get<std::string>() != "canonical")
                throw ParseError("unknown metric '" + m.get<std::string>() + "'");
            e.metric = CanonicalMetric{};
        } else {
            io::expect_keys(m, {}, {"roof", "psi", "smooth_fs"});
            if (m.size() != 1) throw ParseError("metric object must have exactly one key");
            if (m.contains("roof"))
                e.metric = io::roof_from_json(m.at("roof"));
            else if (m.contains("psi"))
                e.metric = io::cellwise_from_json(m.at("psi"));
            else
                e.metric = io::smooth_from_json(m.at("smooth_fs"));
        }
        spec.places.push_back(std::move(e));
    }
    const Json& f = j.at("flags");
    io::expect_keys(f, {"semipositive", "ample"});
    spec.semipositive = f.at("semipositive").get<bool>();
    spec.ample = f.at("ample").get<bool>();
    return spec;
}

inline Json divisor_to_json(const DivisorSpec& spec) {
    Json j;
    j["schema_version"] = 1;
    j["rank"] = spec.rank;
    j["polytope"] = io::polytope_to_json(spec.delta);
    Json places = Json::array();
    for (const auto& e : spec.places) {
        Json pj;
        pj["place"] = e.place.str();
        pj["weight"] = io::rat_to_json(e.weight);
        if (std::holds_alternative<CanonicalMetric>(e.metric)) {
            pj["metric"] = "canonical";
        } else if (std::holds_alternative<RoofFn>(e.metric)) {
            pj["metric"] = Json{{"roof", io::roof_to_json(std::get<RoofFn>(e.metric))}};
        } else if (std::holds_alternative<CellwisePA>(e.metric)) {
            pj["metric"] = Json{{"psi", io::cellwise_to_json(std::get<CellwisePA>(e.metric))}};
        } else {
            pj["metric"] = Json{{"smooth_fs", io::smooth_to_json(std::get<SmoothMetricData>(e.metric))}};
        }
        places.push_back(pj);
    }
    j["places"] = places;
    j["flags"] = Json{{"semipositive", spec.semipositive}, {"ample", spec.ample}};
    return j;
}

inline Json logvalue_report(const LogValue& v) {
    Json j = io::logvalue_to_json(v);
    j["text"] = v.str();
    j["_approx"] = v.approx();
    return j;
}

inline Json minima_report_to_json(const MinimaReport& rep) {
    Json j;
    Json mu = Json::array();
    for (const auto& m : rep.mu) mu.push_back(logvalue_report(m));
    j["mu"] = mu;
    j["ess"] = logvalue_report(rep.ess);
    j["abs"] = logvalue_report(rep.abs);
    j["face_formula_certified"] = rep.face_formula_certified;
    j["pseudo_effective"] = rep.pseudo_effective;
    j["big"] = rep.big;
    Json ws = Json::array();
    for (const auto& w : rep.witnesses) {
        Json wj;
        Json fv = Json::array();
        for (const auto& v : w.face_vertices) fv.push_back(io::qvec_to_json(v));
        wj["face"] = fv;
        wj["argmax"] = io::qvec_to_json(w.argmax);
        ws.push_back(wj);
    }
    j["witnesses"] = ws;
    return j;
}

inline Json zhang_report_to_json(const ZhangReport& rep) {
    Json j;
    Json mu = Json::array();
    for (const auto& m : rep.mu) mu.push_back(logvalue_report(m));
    j["mu"] = mu;
    j["sum_mu"] = logvalue_report(rep.sum_mu);
    j["height"] = logvalue_report(rep.height);
    j["degree"] = io::rat_to_json(rep.degree);
    j["height_over_degree"] = logvalue_report(rep.height_over_degree);
    j["bound"] = logvalue_report(rep.bound);
    j["left_holds"] = rep.left_holds;
    j["right_holds"] = rep.right_holds;
    j["right_equality"] = rep.right_equality;
    j["theta_constant"] = rep.theta_constant;
    Json pa = Json::array();
    for (const auto& [place, affine] : rep.place_affine)
        pa.push_back(Json{{"place", place.str()}, {"affine", affine}});
    j["place_affine"] = pa;
    j["gradients_zero_sum"] = rep.gradients_zero_sum;
    return j;
}

/// Subdivision export: the cached refinement of a roof with its vertex values.
inline Json subdivision_to_json(const RoofFn& roof) {
    Json j;
    j["domain"] = io::polytope_to_json(roof.domain());
    Json cells = Json::array();
    for (const auto& c : roof.subdivision().cells) cells.push_back(io::polytope_to_json(c));
    j["cells"] = cells;
    Json vv = Json::array();
    for (const auto& [v, val] : roof.vertex_values())
        vv.push_back(Json{{"point", io::qvec_to_json(v)}, {"value", logvalue_report(val)}});
    j["vertex_values"] = vv;
    return j;
}

inline Json solve_result_to_json(const SmoothSolveResult& res) {
    Json j;
    Json u = Json::array();
    for (double x : res.u0) u.push_back(x);
    j["u0"] = u;
    j["mu_ess"] = res.mu_ess;
    j["optimality_residual"] = res.optimality_residual;
    j["cell"] = res.cell_id;
    j["iterations"] = res.iterations;
    return j;
}

}  // namespace toric

#endif  // TORIC_IO_HPP
