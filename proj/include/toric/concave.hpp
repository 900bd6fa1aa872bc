/**
 * Calculus of piecewise-affine concave functions on polytopes.
 *
 * Two representations are linked by Legendre-Fenchel duality:
 *   - RoofFn: concave function on a polytope in M_R, stored as generator
 *     points lifted to LogValue heights (the canonical form; sums and duals
 *     reduce to hulls of lifted points).
 *   - CellwisePA: piecewise-affine (not necessarily concave) function on a
 *     complete pointed polyhedral subdivision of N_R with rational cells,
 *     rational gradients and LogValue offsets.
 *
 * Within this class of inputs every construction stays exact: cell values of
 * a connected rational complex differ by rationals, so dual subdivisions and
 * concavifications have rational vertices again.
 */

#ifndef TORIC_CONCAVE_HPP
#define TORIC_CONCAVE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toric/geometry.hpp"
#include "toric/logvalue.hpp"

namespace toric {

class ConcaveError : public std::runtime_error {
public:
    explicit ConcaveError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonRationalCrossing : public ConcaveError {
public:
    explicit NonRationalCrossing(const std::string& msg) : ConcaveError(msg) {}
};

namespace detail {

/// a / b for LogValues when a = r*b with r rational; nullopt otherwise.
inline std::optional<Rat> lv_ratio(const LogValue& a, const LogValue& b) {
    if (b.is_zero()) return std::nullopt;
    Rat r;
    if (!b.log_coeffs().empty()) {
        auto [p, c] = *b.log_coeffs().begin();
        auto it = a.log_coeffs().find(p);
        if (it == a.log_coeffs().end()) {
            if (!a.is_zero()) return std::nullopt;
            r = 0;
        } else {
            r = it->second / c;
        }
    } else {
        if (!a.is_rational()) return std::nullopt;
        r = a.const_term() / b.const_term();
    }
    if (a == r * b) return r;
    return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RoofFn
// ---------------------------------------------------------------------------

class RoofFn {
public:
    /// Builds the concave upper envelope of the lifted generators.  The
    /// generator points must span the domain: conv(points) == domain.
    RoofFn(Polytope domain, std::vector<std::pair<QVec, LogValue>> generators)
        : domain_(std::move(domain)), generators_(std::move(generators)) {
        if (generators_.empty()) throw ConcaveError("roof function needs generators");
        for (const auto& [p, t] : generators_)
            if (!domain_.contains(p)) throw ConcaveError("generator point outside the domain");
        auto lifted = upper_hull_subdivision(domain_.rank(), generators_);
        if (!(lifted.sub.base == domain_))
            throw ConcaveError("generators do not span the domain polytope");
        sub_ = std::move(lifted.sub);
        cells_ = std::move(lifted.cell_data);
        for (const auto& v : sub_.vertex_set) vertex_values_.emplace_back(v, value_in_domain(v));
    }

    /// The zero function on a polytope (canonical-metric roof).
    static RoofFn zero(const Polytope& domain) {
        std::vector<std::pair<QVec, LogValue>> gens;
        for (const auto& v : domain.vertices()) gens.emplace_back(v, LogValue());
        return RoofFn(domain, std::move(gens));
    }

    /// Affine function x -> <x, slope> + c on a polytope.
    static RoofFn affine(const Polytope& domain, const QVec& slope, const LogValue& c) {
        std::vector<std::pair<QVec, LogValue>> gens;
        for (const auto& v : domain.vertices()) gens.emplace_back(v, LogValue(dot(slope, v)) + c);
        return RoofFn(domain, std::move(gens));
    }

    const Polytope& domain() const { return domain_; }
    const std::vector<std::pair<QVec, LogValue>>& generators() const { return generators_; }
    const Subdivision& subdivision() const { return sub_; }
    const std::vector<LiftedCell>& cells() const { return cells_; }
    const std::vector<std::pair<QVec, LogValue>>& vertex_values() const { return vertex_values_; }

    /// theta(x); -infinity outside the domain.
    ExtLogValue eval(const QVec& x) const {
        if (!domain_.contains(x)) return ExtLogValue::neg_infinity();
        return ExtLogValue(value_in_domain(x));
    }

    LogValue value_in_domain(const QVec& x) const {
        for (std::size_t i = 0; i < sub_.cells.size(); ++i)
            if (sub_.cells[i].contains(x)) return dot(x, cells_[i].gradient) + cells_[i].offset;
        throw ConcaveError("point not covered by the cached subdivision");
    }

    /// psi(u) = min_k (<x_k, u> - t_k), the Legendre-Fenchel dual evaluated
    /// exactly.  u may have LogValue coordinates.
    LogValue psi(const LogVec& u) const {
        LogValue best;
        bool first = true;
        for (const auto& [x, t] : generators_) {
            LogValue cand = dot(x, u) - t;
            if (first || lv_cmp(cand, best) < 0) {
                best = cand;
                first = false;
            }
        }
        return best;
    }
    LogValue psi(const QVec& u) const { return psi(to_logvec(u)); }

    /// Sup-differential of psi at u: conv{x_k attaining the minimum}.
    Polytope psi_subdifferential(const LogVec& u) const {
        LogValue m = psi(u);
        std::vector<QVec> pts;
        for (const auto& [x, t] : generators_)
            if ((dot(x, u) - t - m).is_zero()) pts.push_back(x);
        return Polytope::hull(domain_.rank(), pts);
    }
    Polytope psi_subdifferential(const QVec& u) const { return psi_subdifferential(to_logvec(u)); }

    /// Exact max over a face of the domain; concavity reduces it to the
    /// subdivision vertices lying on the face.
    LogValue max_over_face(const Polytope& face, QVec* witness = nullptr) const {
        require_face(face);
        LogValue best;
        bool first = true;
        for (const auto& [v, val] : vertex_values_) {
            if (!face.contains(v)) continue;
            if (first || lv_cmp(val, best) > 0) {
                best = val;
                if (witness) *witness = v;
                first = false;
            }
        }
        if (first) throw ConcaveError("face contains no subdivision vertex");
        return best;
    }

    LogValue max_over_domain(QVec* witness = nullptr) const { return max_over_face(domain_, witness); }

    /// Minimum over the domain; attained at a vertex by concavity.
    LogValue min_over_domain(QVec* witness = nullptr) const {
        LogValue best;
        bool first = true;
        for (const auto& v : domain_.vertices()) {
            LogValue val = value_in_domain(v);
            if (first || lv_cmp(val, best) < 0) {
                best = val;
                if (witness) *witness = v;
                first = false;
            }
        }
        return best;
    }

    /// Exact integral over the domain with respect to the lattice volume;
    /// zero when the domain is lower-dimensional.
    LogValue integral() const {
        if (domain_.dim() < domain_.rank()) return LogValue();
        LogValue acc;
        Rat inv_count(1, static_cast<long>(domain_.dim() + 1));
        for (std::size_t i = 0; i < sub_.cells.size(); ++i) {
            for (const auto& simplex : sub_.cells[i].triangulation()) {
                Rat vol = sub_.cells[i].simplex_volume(simplex);
                if (vol == 0) continue;
                LogValue mean;
                for (const auto& v : simplex) mean += dot(v, cells_[i].gradient) + cells_[i].offset;
                acc += (vol * inv_count) * mean;
            }
        }
        return acc;
    }

    /// Integral of max(0, theta), refining each cell by its exact zero level.
    /// Throws NonRationalCrossing when a zero crossing is not rational (the
    /// positive region is then not a rational polytope).
    LogValue positive_part_integral() const {
        if (domain_.dim() < domain_.rank()) return LogValue();
        LogValue acc;
        for (std::size_t i = 0; i < sub_.cells.size(); ++i) {
            const Polytope& cell = sub_.cells[i];
            auto value = [&](const QVec& x) { return dot(x, cells_[i].gradient) + cells_[i].offset; };
            std::vector<int> signs;
            bool has_pos = false, has_neg = false;
            for (const auto& v : cell.vertices()) {
                int s = value(v).sign();
                signs.push_back(s);
                has_pos |= s > 0;
                has_neg |= s < 0;
            }
            if (!has_pos && !has_neg) continue;  // identically zero on the cell
            std::vector<QVec> region;
            if (has_neg) {
                if (!has_pos) continue;
                for (std::size_t vi = 0; vi < cell.vertices().size(); ++vi)
                    if (signs[vi] >= 0) region.push_back(cell.vertices()[vi]);
                for (const auto& edge : cell.faces(1)) {
                    const QVec& a = edge.vertices()[0];
                    const QVec& b = edge.vertices()[1];
                    LogValue va = value(a), vb = value(b);
                    int sa = va.sign(), sb = vb.sign();
                    if (sa * sb >= 0) continue;
                    auto lambda = detail::lv_ratio(va, va - vb);
                    if (!lambda)
                        throw NonRationalCrossing(
                            "zero level of the roof crosses an edge at an irrational point");
                    region.push_back(vadd(a, vscale(*lambda, vsub(b, a))));
                }
            } else {
                region = cell.vertices();
            }
            Polytope pos = Polytope::hull(cell.rank(), std::move(region));
            if (pos.dim() < domain_.rank()) continue;
            Rat inv_count(1, static_cast<long>(pos.dim() + 1));
            for (const auto& simplex : pos.triangulation()) {
                Rat vol = pos.simplex_volume(simplex);
                if (vol == 0) continue;
                LogValue mean;
                for (const auto& v : simplex) mean += value(v);
                acc += (vol * inv_count) * mean;
            }
        }
        return acc;
    }

    bool is_affine() const { return sub_.cells.size() == 1; }

    bool is_constant() const {
        for (const auto& [v, val] : vertex_values_)
            if (val != vertex_values_.front().second) return false;
        return true;
    }

    /// For an affine roof: its (LogValue) gradient and offset.
    std::pair<LogVec, LogValue> affine_data() const {
        if (!is_affine()) throw ConcaveError("roof is not affine");
        return {cells_[0].gradient, cells_[0].offset};
    }

private:
    void require_face(const Polytope& face) const {
        if (face == domain_) return;
        // Closure test: the facets of the domain tight on all of `face` must
        // cut out exactly its vertex set.
        for (const auto& v : face.vertices()) {
            bool is_vertex = false;
            for (const auto& w : domain_.vertices()) is_vertex |= w == v;
            if (!is_vertex) throw ConcaveError("not a face of the domain");
        }
        std::vector<const Halfspace*> tight;
        for (const auto& h : domain_.facets()) {
            bool all = true;
            for (const auto& v : face.vertices()) all &= h.slack(v) == 0;
            if (all) tight.push_back(&h);
        }
        for (const auto& w : domain_.vertices()) {
            bool in_closure = true;
            for (const auto* h : tight) in_closure &= h->slack(w) == 0;
            bool in_face = false;
            for (const auto& v : face.vertices()) in_face |= v == w;
            if (in_closure && !in_face) throw ConcaveError("not a face of the domain");
        }
    }

    Polytope domain_;
    std::vector<std::pair<QVec, LogValue>> generators_;
    Subdivision sub_;
    std::vector<LiftedCell> cells_;
    std::vector<std::pair<QVec, LogValue>> vertex_values_;
};

/// Weighted sum via common refinement of the cached subdivisions.  Weights
/// must be positive.
inline RoofFn roof_weighted_sum(const std::vector<std::pair<Rat, const RoofFn*>>& terms) {
    if (terms.empty()) throw ConcaveError("weighted sum of no roof functions");
    const Polytope& dom = terms[0].second->domain();
    std::vector<Subdivision> subs;
    for (const auto& [w, r] : terms) {
        if (w <= 0) throw ConcaveError("weights in a roof sum must be positive");
        if (!(r->domain() == dom)) throw ConcaveError("roof sum: domain mismatch");
        subs.push_back(r->subdivision());
    }
    Subdivision ref = common_refinement(subs);
    std::vector<std::pair<QVec, LogValue>> gens;
    for (const auto& v : ref.vertex_set) {
        LogValue val;
        for (const auto& [w, r] : terms) val += w * r->value_in_domain(v);
        gens.emplace_back(v, val);
    }
    return RoofFn(dom, std::move(gens));
}

inline RoofFn roof_scale(const Rat& w, const RoofFn& r) { return roof_weighted_sum({{w, &r}}); }

// ---------------------------------------------------------------------------
// CellwisePA
// ---------------------------------------------------------------------------

struct PACell {
    std::vector<Halfspace> ineqs;  // rational H-rep of the (possibly unbounded) cell
    QVec gradient;                 // in M_R, rational
    LogValue offset;
};

class CellwisePA {
public:
    CellwisePA(std::size_t rank, std::vector<PACell> cells)
        : rank_(rank), cells_(std::move(cells)) {
        if (cells_.empty()) throw ConcaveError("cellwise function needs cells");
        for (auto& c : cells_) {
            if (c.gradient.size() != rank_) throw ConcaveError("cell gradient rank mismatch");
            geo_.push_back(polyhedron_from_hrep(rank_, c.ineqs, {}));
            const Polyhedron& g = geo_.back();
            if (g.empty()) throw ConcaveError("empty cell in subdivision");
            if (!g.pointed()) throw ConcaveError("non-pointed cell rejected");
            if (cell_dim(g) != rank_) throw ConcaveError("cell is not full-dimensional");
        }
        check_continuity();
    }

    std::size_t rank() const { return rank_; }
    const std::vector<PACell>& cells() const { return cells_; }
    const Polyhedron& cell_geometry(std::size_t i) const { return geo_[i]; }

    LogValue eval(const QVec& u) const {
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            bool inside = true;
            for (const auto& h : cells_[i].ineqs) inside &= h.slack(u) >= 0;
            if (inside) return LogValue(dot(cells_[i].gradient, u)) + cells_[i].offset;
        }
        throw ConcaveError("point not covered: cells do not form a complete subdivision");
    }

    /// Concavity test: each cell's affine function must be the pointwise
    /// minimum of all pieces on that cell.
    bool is_concave() const {
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            for (std::size_t j = 0; j < cells_.size(); ++j) {
                if (i == j) continue;
                QVec dg = vsub(cells_[j].gradient, cells_[i].gradient);
                LogValue doff = cells_[j].offset - cells_[i].offset;
                for (const auto& v : geo_[i].vertices)
                    if ((LogValue(dot(dg, v)) + doff).sign() < 0) return false;
                for (const auto& r : geo_[i].rays)
                    if (dot(dg, r) < 0) return false;
            }
        }
        return true;
    }

    /// The stability set {x : x - psi bounded below}, cut out by the
    /// recession rays of the unbounded cells.  Errors if empty or if the
    /// boundedness condition |psi - Psi_stab| fails.
    Polytope stability_set() const {
        std::vector<Halfspace> hs;
        bool any_ray = false;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            for (const auto& r : geo_[i].rays) {
                any_ray = true;
                hs.push_back(Halfspace::canonical(r, dot(cells_[i].gradient, r)));
            }
        }
        if (!any_ray) throw ConcaveError("subdivision of N_R must have unbounded cells");
        Polyhedron p = polyhedron_from_hrep(rank_, hs, {});
        if (p.empty()) throw ConcaveError("unbounded stability defect: empty stability set");
        if (!p.bounded()) throw ConcaveError("unbounded stability defect: stability set unbounded");
        Polytope stab = Polytope::hull(rank_, p.vertices);
        // Each recession constraint must be attained on the stability set,
        // otherwise |psi - Psi| is unbounded along that ray.
        for (const auto& h : hs) {
            Rat best = dot(h.normal, stab.vertices()[0]);
            for (const auto& v : stab.vertices()) best = std::min(best, dot(h.normal, v));
            if (best != h.offset)
                throw ConcaveError("unbounded stability defect: recession slope mismatch");
        }
        return stab;
    }

    /// Subdivision vertices with their values, deduplicated.
    std::vector<std::pair<QVec, LogValue>> vertex_values() const {
        std::map<QVec, LogValue, decltype(&lex_less)> vals(&lex_less);
        for (std::size_t i = 0; i < cells_.size(); ++i)
            for (const auto& v : geo_[i].vertices)
                vals.emplace(v, LogValue(dot(cells_[i].gradient, v)) + cells_[i].offset);
        return {vals.begin(), vals.end()};
    }

    /// Legendre-Fenchel dual theta = psi^vee as a roof function on the
    /// stability set.  Equals conc(psi)^vee for non-concave input.
    RoofFn dual_roof() const {
        Polytope stab = stability_set();
        auto vv = vertex_values();
        if (vv.empty()) throw ConcaveError("subdivision has no vertices");
        // Values of a connected rational complex differ by rationals; split
        // off the common transcendental part gamma.
        LogValue gamma = vv.front().second;
        std::vector<Rat> q(vv.size());
        for (std::size_t j = 0; j < vv.size(); ++j) {
            LogValue d = vv[j].second - gamma;
            if (!d.is_rational())
                throw ConcaveError("cell values are not rationally coherent; subdivision disconnected?");
            q[j] = d.as_rational();
        }
        // theta(x) = min_j <x, v_j> - c_j; its induced subdivision of stab is
        // rational because the c_j differences are.
        auto theta = [&](const QVec& x) {
            LogValue best = LogValue(dot(vv[0].first, x)) - vv[0].second;
            for (std::size_t j = 1; j < vv.size(); ++j) {
                LogValue cand = LogValue(dot(vv[j].first, x)) - vv[j].second;
                if (lv_cmp(cand, best) < 0) best = cand;
            }
            return best;
        };
        std::set<QVec, decltype(&lex_less)> gen_pts(&lex_less);
        for (const auto& v : stab.vertices()) gen_pts.insert(v);
        for (std::size_t j = 0; j < vv.size(); ++j) {
            std::vector<Halfspace> hs = stab.facets();
            std::vector<Equation> eqs = stab.equations();
            for (std::size_t l = 0; l < vv.size(); ++l) {
                if (l == j) continue;
                // piece j below piece l: <x, v_l - v_j> >= q_l - q_j
                hs.push_back(Halfspace::canonical(vsub(vv[l].first, vv[j].first), q[l] - q[j]));
            }
            Polyhedron region = polyhedron_from_hrep(rank_, hs, eqs);
            for (const auto& v : region.vertices) gen_pts.insert(v);
        }
        std::vector<std::pair<QVec, LogValue>> gens;
        for (const auto& v : gen_pts) gens.emplace_back(v, theta(v));
        return RoofFn(stab, std::move(gens));
    }

    /// Concavification via the double dual; same stability set.
    CellwisePA concavify() const {
        RoofFn theta = dual_roof();
        const auto& gens = theta.generators();
        // Split the common transcendental part of the heights.
        LogValue gamma = gens.front().second;
        std::vector<Rat> q(gens.size());
        for (std::size_t k = 0; k < gens.size(); ++k) {
            LogValue d = gens[k].second - gamma;
            if (!d.is_rational()) throw ConcaveError("concavification: incoherent heights");
            q[k] = d.as_rational();
        }
        std::vector<PACell> out;
        for (std::size_t k = 0; k < gens.size(); ++k) {
            std::vector<Halfspace> hs;
            for (std::size_t l = 0; l < gens.size(); ++l) {
                if (l == k) continue;
                // piece k minimal: <x_l - x_k, u> >= t_l - t_k
                hs.push_back(Halfspace::canonical(vsub(gens[l].first, gens[k].first), q[l] - q[k]));
            }
            Polyhedron region = polyhedron_from_hrep(rank_, hs, {});
            if (region.empty() || cell_dim(region) != rank_) continue;
            PACell c;
            c.ineqs = std::move(hs);
            c.gradient = gens[k].first;
            c.offset = -gens[k].second;
            out.push_back(std::move(c));
        }
        return CellwisePA(rank_, std::move(out));
    }

    /// Function equality via the common refinement of the two cell systems.
    bool same_function(const CellwisePA& o) const {
        if (rank_ != o.rank_) return false;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            for (std::size_t j = 0; j < o.cells_.size(); ++j) {
                std::vector<Halfspace> hs = cells_[i].ineqs;
                hs.insert(hs.end(), o.cells_[j].ineqs.begin(), o.cells_[j].ineqs.end());
                Polyhedron common = polyhedron_from_hrep(rank_, hs, {});
                if (common.empty()) continue;
                QVec dg = vsub(cells_[i].gradient, o.cells_[j].gradient);
                LogValue doff = cells_[i].offset - o.cells_[j].offset;
                for (const auto& v : common.vertices)
                    if (!(LogValue(dot(dg, v)) + doff).is_zero()) return false;
                for (const auto& r : common.rays)
                    if (dot(dg, r) != 0) return false;
                for (const auto& l : common.lineality)
                    if (dot(dg, l) != 0) return false;
            }
        }
        return true;
    }

private:
    static std::size_t cell_dim(const Polyhedron& g) {
        QMat dirs;
        if (g.vertices.empty()) return 0;
        for (std::size_t i = 1; i < g.vertices.size(); ++i)
            dirs.push_back(vsub(g.vertices[i], g.vertices[0]));
        for (const auto& r : g.rays) dirs.push_back(r);
        for (const auto& l : g.lineality) dirs.push_back(l);
        return mat_rank(std::move(dirs));
    }

    void check_continuity() const {
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            for (std::size_t j = i + 1; j < cells_.size(); ++j) {
                std::vector<Halfspace> hs = cells_[i].ineqs;
                hs.insert(hs.end(), cells_[j].ineqs.begin(), cells_[j].ineqs.end());
                Polyhedron common = polyhedron_from_hrep(rank_, hs, {});
                if (common.empty()) continue;
                QVec dg = vsub(cells_[i].gradient, cells_[j].gradient);
                LogValue doff = cells_[i].offset - cells_[j].offset;
                for (const auto& v : common.vertices)
                    if (!(LogValue(dot(dg, v)) + doff).is_zero())
                        throw ConcaveError("affine data disagree where cells overlap");
                for (const auto& r : common.rays)
                    if (dot(dg, r) != 0)
                        throw ConcaveError("affine data disagree along a shared ray");
            }
        }
    }

    std::size_t rank_;
    std::vector<PACell> cells_;
    std::vector<Polyhedron> geo_;
};

/// dual_cellwise_to_roof in operator form.
inline RoofFn dual_cellwise_to_roof(const CellwisePA& psi) { return psi.dual_roof(); }

/// The support-function data psi(u) = Psi(u - shift) - gamma of a polytope,
/// as a cellwise function on the (translated) normal fan.  The polytope must
/// be full-dimensional.
inline CellwisePA translated_support(const Polytope& delta, const QVec& shift,
                                     const LogValue& gamma) {
    if (delta.dim() != delta.rank())
        throw ConcaveError("translated support function needs a full-dimensional polytope");
    std::vector<PACell> cells;
    for (const auto& w : delta.vertices()) {
        PACell c;
        for (const auto& x : delta.vertices()) {
            if (x == w) continue;
            QVec n = vsub(x, w);
            c.ineqs.push_back(Halfspace::canonical(n, dot(n, shift)));
        }
        if (c.ineqs.empty()) throw ConcaveError("degenerate polytope");
        c.gradient = w;
        c.offset = LogValue(-dot(w, shift)) - gamma;
        cells.push_back(std::move(c));
    }
    return CellwisePA(delta.rank(), std::move(cells));
}

}  // namespace toric

#endif  // TORIC_CONCAVE_HPP
