/**
 * Exact rational polyhedral geometry: double-description conversion between
 * V- and H-representations, face lattices, lattice points, volumes, and
 * regular subdivisions induced by lifting points to LogValue heights.
 *
 * Everything is exact.  Hull orientation tests against lifted heights reduce
 * to signs of rational combinations of LogValues, so subdivision combinatorics
 * are never decided in floating point.  Intended for small ambient rank
 * (examples live in rank <= 4; the double description blows up past ~8).
 */

#ifndef TORIC_GEOMETRY_HPP
#define TORIC_GEOMETRY_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "toric/logvalue.hpp"
#include "toric/rational.hpp"

namespace toric {

class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// <normal, x> >= offset
struct Halfspace {
    QVec normal;
    Rat offset;

    Rat slack(const QVec& x) const { return dot(normal, x) - offset; }

    /// Joint positive scaling to a primitive integer form.
    static Halfspace canonical(QVec n, Rat off) {
        QVec joint = n;
        joint.push_back(off);
        joint = primitive(joint);
        Rat o = joint.back();
        joint.pop_back();
        return Halfspace{joint, o};
    }

    bool operator==(const Halfspace& o) const { return normal == o.normal && offset == o.offset; }
    bool operator<(const Halfspace& o) const {
        if (normal != o.normal) return lex_less(normal, o.normal);
        return offset < o.offset;
    }
};

/// <normal, x> = offset
struct Equation {
    QVec normal;
    Rat offset;

    bool holds(const QVec& x) const { return dot(normal, x) == offset; }

    static Equation canonical(QVec n, Rat off) {
        QVec joint = n;
        joint.push_back(off);
        joint = primitive_signed(joint);
        Rat o = joint.back();
        joint.pop_back();
        return Equation{joint, o};
    }

    bool operator<(const Equation& o) const {
        if (normal != o.normal) return lex_less(normal, o.normal);
        return offset < o.offset;
    }
};

// ---------------------------------------------------------------------------
// Double description for cones {y : <c,y> >= 0 forall ineqs, <c,y> = 0 forall eqs}
// ---------------------------------------------------------------------------

struct ConeRep {
    std::vector<QVec> rays;       // extreme rays (primitive, mod lineality reduced)
    std::vector<QVec> lineality;  // basis
};

namespace detail {

/// Orthogonal reduction of v modulo span(basis), exact over Q.
inline QVec reduce_mod_span(const QVec& v, const std::vector<QVec>& basis) {
    if (basis.empty()) return v;
    std::size_t k = basis.size();
    QMat gram(k, QVec(k));
    QVec rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) gram[i][j] = dot(basis[i], basis[j]);
        rhs[i] = dot(basis[i], v);
    }
    auto c = solve_linear(gram, rhs);
    if (!c) throw GeometryError("degenerate lineality basis");
    QVec r = v;
    for (std::size_t i = 0; i < k; ++i) r = vsub(r, vscale((*c)[i], basis[i]));
    return r;
}

}  // namespace detail

/// Incremental double description.  Maintains extreme rays plus a lineality
/// basis; adjacency of rays is decided by the rank test on common tight
/// constraints, and non-extreme rays are filtered with the same rank criterion
/// after every step.
inline ConeRep dd_cone(std::size_t dim, std::vector<QVec> ineqs, std::vector<QVec> eqs) {
    std::vector<QVec> lin;
    for (std::size_t i = 0; i < dim; ++i) {
        QVec e(dim, Rat(0));
        e[i] = 1;
        lin.push_back(e);
    }
    std::vector<QVec> rays;
    std::vector<QVec> processed;

    auto tight_of = [&](const QVec& r) {
        std::vector<std::size_t> t;
        for (std::size_t i = 0; i < processed.size(); ++i)
            if (dot(processed[i], r) == 0) t.push_back(i);
        return t;
    };
    auto rank_of_tight = [&](const std::vector<std::size_t>& idx) {
        QMat m;
        for (auto i : idx) m.push_back(processed[i]);
        return mat_rank(std::move(m));
    };
    auto dedupe_rays = [&]() {
        std::sort(rays.begin(), rays.end(), lex_less);
        rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
    };

    auto step = [&](const QVec& a, bool is_eq) {
        // Lineality reduction branch.
        std::size_t pick = lin.size();
        for (std::size_t i = 0; i < lin.size(); ++i)
            if (dot(a, lin[i]) != 0) {
                pick = i;
                break;
            }
        if (pick < lin.size()) {
            QVec l0 = lin[pick];
            Rat s0 = dot(a, l0);
            if (s0 < 0) {
                l0 = vscale(Rat(-1), l0);
                s0 = -s0;
            }
            std::vector<QVec> new_lin;
            for (std::size_t i = 0; i < lin.size(); ++i) {
                if (i == pick) continue;
                Rat s = dot(a, lin[i]);
                new_lin.push_back(s == 0 ? lin[i] : vsub(lin[i], vscale(s / s0, l0)));
            }
            lin = std::move(new_lin);
            std::vector<QVec> new_rays;
            for (const auto& r : rays) {
                Rat s = dot(a, r);
                QVec rp = s == 0 ? r : vsub(r, vscale(s / s0, l0));
                if (!is_zero(rp)) new_rays.push_back(primitive(rp));
            }
            if (!is_eq) new_rays.push_back(primitive(l0));
            rays = std::move(new_rays);
        } else {
            std::vector<std::size_t> pos, neg, zero;
            std::vector<Rat> val(rays.size());
            for (std::size_t i = 0; i < rays.size(); ++i) {
                val[i] = dot(a, rays[i]);
                (val[i] > 0 ? pos : val[i] < 0 ? neg : zero).push_back(i);
            }
            std::vector<QVec> out;
            for (auto i : zero) out.push_back(rays[i]);
            if (!is_eq)
                for (auto i : pos) out.push_back(rays[i]);
            std::size_t target = dim >= lin.size() + 2 ? dim - lin.size() - 2 : 0;
            for (auto ip : pos) {
                auto tp = tight_of(rays[ip]);
                for (auto in : neg) {
                    auto tn = tight_of(rays[in]);
                    std::vector<std::size_t> common;
                    std::set_intersection(tp.begin(), tp.end(), tn.begin(), tn.end(),
                                          std::back_inserter(common));
                    if (rank_of_tight(common) != target) continue;
                    QVec merged = vsub(vscale(val[ip], rays[in]), vscale(val[in], rays[ip]));
                    if (!is_zero(merged)) out.push_back(primitive(merged));
                }
            }
            rays = std::move(out);
        }
        processed.push_back(a);
        dedupe_rays();
        // Extremality filter: keep rays whose minimal face has dim |lin|+1.
        std::size_t want = dim >= lin.size() + 1 ? dim - lin.size() - 1 : 0;
        std::vector<QVec> kept;
        for (const auto& r : rays)
            if (rank_of_tight(tight_of(r)) == want) kept.push_back(r);
        rays = std::move(kept);
    };

    std::sort(eqs.begin(), eqs.end(), lex_less);
    std::sort(ineqs.begin(), ineqs.end(), lex_less);
    for (const auto& a : eqs) step(a, true);
    for (const auto& a : ineqs) step(a, false);

    // Canonical output: reduce rays modulo lineality, echelonize the lineality.
    ConeRep rep;
    if (!lin.empty()) {
        QMat m = lin;
        rref(m);
        for (auto& row : m)
            if (!is_zero(row)) rep.lineality.push_back(primitive_signed(row));
    }
    std::set<QVec, decltype(&lex_less)> uniq(&lex_less);
    for (const auto& r : rays) {
        QVec red = detail::reduce_mod_span(r, rep.lineality);
        if (!is_zero(red)) uniq.insert(primitive(red));
    }
    rep.rays.assign(uniq.begin(), uniq.end());
    return rep;
}

// ---------------------------------------------------------------------------
// General polyhedra (used for cells of complete subdivisions of N_R)
// ---------------------------------------------------------------------------

struct Polyhedron {
    std::size_t rank = 0;
    std::vector<QVec> vertices;
    std::vector<QVec> rays;
    std::vector<QVec> lineality;

    bool bounded() const { return rays.empty() && lineality.empty(); }
    bool pointed() const { return lineality.empty(); }
    bool empty() const { return vertices.empty(); }
};

/// Generator representation of {x : <a,x> >= b for ineqs, <a,x> = b for eqs}
/// via the homogenization cone {(t,x) : t >= 0, <a,x> - b t >= 0}.
inline Polyhedron polyhedron_from_hrep(std::size_t rank, const std::vector<Halfspace>& ineqs,
                                       const std::vector<Equation>& eqs) {
    std::vector<QVec> cone_ineqs, cone_eqs;
    auto lift = [&](const QVec& n, const Rat& off) {
        QVec c;
        c.reserve(rank + 1);
        c.push_back(-off);
        for (const auto& x : n) c.push_back(x);
        return c;
    };
    for (const auto& h : ineqs) cone_ineqs.push_back(lift(h.normal, h.offset));
    QVec t_pos(rank + 1, Rat(0));
    t_pos[0] = 1;
    cone_ineqs.push_back(t_pos);
    for (const auto& e : eqs) cone_eqs.push_back(lift(e.normal, e.offset));

    ConeRep rep = dd_cone(rank + 1, std::move(cone_ineqs), std::move(cone_eqs));
    Polyhedron p;
    p.rank = rank;
    for (const auto& r : rep.rays) {
        if (r[0] > 0) {
            QVec v(rank);
            for (std::size_t i = 0; i < rank; ++i) v[i] = r[i + 1] / r[0];
            p.vertices.push_back(std::move(v));
        } else {
            // r[0] < 0 cannot happen because of the t >= 0 constraint.
            QVec v(r.begin() + 1, r.end());
            if (!is_zero(v)) p.rays.push_back(primitive(v));
        }
    }
    for (const auto& l : rep.lineality) {
        QVec v(l.begin() + 1, l.end());
        if (!is_zero(v)) p.lineality.push_back(primitive_signed(v));
    }
    std::sort(p.vertices.begin(), p.vertices.end(), lex_less);
    std::sort(p.rays.begin(), p.rays.end(), lex_less);
    return p;
}

// ---------------------------------------------------------------------------
// Polytopes
// ---------------------------------------------------------------------------

class Polytope {
public:
    Polytope() = default;

    /// Convex hull of a nonempty point set.  Vertices are the extreme points;
    /// facets are irredundant; equations cut out the affine hull.
    static Polytope hull(std::size_t rank, std::vector<QVec> points) {
        if (points.empty()) throw GeometryError("hull of empty point set");
        for (const auto& p : points)
            if (p.size() != rank) throw GeometryError("hull: point rank mismatch");
        std::sort(points.begin(), points.end(), lex_less);
        points.erase(std::unique(points.begin(), points.end()), points.end());

        // Facets of conv(points) are the extreme rays of the cone
        // {(b, a) : b + <a, p> >= 0 for all p}; its lineality gives the
        // affine-hull equations.
        std::vector<QVec> cons;
        for (const auto& p : points) {
            QVec c;
            c.reserve(rank + 1);
            c.push_back(1);
            for (const auto& x : p) c.push_back(x);
            cons.push_back(std::move(c));
        }
        ConeRep rep = dd_cone(rank + 1, std::move(cons), {});

        Polytope poly;
        poly.rank_ = rank;
        for (const auto& r : rep.rays) {
            QVec n(r.begin() + 1, r.end());
            if (is_zero(n)) continue;  // trivial inequality 1 >= 0
            poly.facets_.push_back(Halfspace::canonical(n, -r[0]));
        }
        for (const auto& l : rep.lineality) {
            QVec n(l.begin() + 1, l.end());
            if (is_zero(n)) throw GeometryError("hull: degenerate lineality");
            poly.equations_.push_back(Equation::canonical(n, -l[0]));
        }
        std::sort(poly.facets_.begin(), poly.facets_.end());
        std::sort(poly.equations_.begin(), poly.equations_.end());
        poly.dim_ = rank - poly.equations_.size();

        // A point is a vertex iff its tight constraints pin it down uniquely.
        for (const auto& p : points) {
            QMat tight;
            for (const auto& e : poly.equations_) tight.push_back(e.normal);
            for (const auto& h : poly.facets_)
                if (h.slack(p) == 0) tight.push_back(h.normal);
            if (mat_rank(std::move(tight)) == rank) poly.vertices_.push_back(p);
        }
        if (poly.vertices_.empty()) throw GeometryError("hull: no vertices found");
        return poly;
    }

    /// Bounded intersection of halfspaces; throws if unbounded or empty.
    static Polytope from_hrep(std::size_t rank, const std::vector<Halfspace>& ineqs,
                              const std::vector<Equation>& eqs) {
        Polyhedron p = polyhedron_from_hrep(rank, ineqs, eqs);
        if (p.empty()) throw GeometryError("from_hrep: empty polytope");
        if (!p.bounded()) throw GeometryError("from_hrep: unbounded polyhedron");
        return hull(rank, p.vertices);
    }

    std::size_t rank() const { return rank_; }
    std::size_t dim() const { return dim_; }
    const std::vector<QVec>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& facets() const { return facets_; }
    const std::vector<Equation>& equations() const { return equations_; }

    bool contains(const QVec& x) const {
        for (const auto& e : equations_)
            if (!e.holds(x)) return false;
        for (const auto& h : facets_)
            if (h.slack(x) < 0) return false;
        return true;
    }

    bool operator==(const Polytope& o) const {
        return rank_ == o.rank_ && vertices_ == o.vertices_;
    }

    /// All faces of dimension d, each as a standalone polytope.
    std::vector<Polytope> faces(std::size_t d) const {
        if (d > dim_) throw GeometryError("faces: dimension out of range");
        auto sets = face_vertex_sets(d);
        std::vector<Polytope> out;
        out.reserve(sets.size());
        for (const auto& s : sets) {
            std::vector<QVec> pts;
            for (auto i : s) pts.push_back(vertices_[i]);
            out.push_back(hull(rank_, std::move(pts)));
        }
        return out;
    }

    /// Vertex-index sets of all faces of dimension d (used by the face BFS).
    std::vector<std::vector<std::size_t>> face_vertex_sets(std::size_t d) const {
        std::set<std::vector<std::size_t>> level;
        std::vector<std::size_t> all(vertices_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        level.insert(all);
        std::size_t cur = dim_;
        while (cur > d) {
            std::set<std::vector<std::size_t>> next;
            for (const auto& fs : level) {
                for (const auto& h : facets_) {
                    std::vector<std::size_t> sub;
                    for (auto i : fs)
                        if (h.slack(vertices_[i]) == 0) sub.push_back(i);
                    if (sub.empty() || sub.size() == fs.size()) continue;
                    if (affine_dim(sub) == cur - 1) next.insert(sub);
                }
            }
            level = std::move(next);
            --cur;
        }
        return {level.begin(), level.end()};
    }

    /// Integer points, by bounding-box scan filtered through the H-rep.
    std::vector<QVec> lattice_points() const {
        std::vector<Int> lo(rank_), hi(rank_);
        for (std::size_t c = 0; c < rank_; ++c) {
            Rat mn = vertices_[0][c], mx = vertices_[0][c];
            for (const auto& v : vertices_) {
                mn = std::min(mn, v[c]);
                mx = std::max(mx, v[c]);
            }
            // ceil(mn), floor(mx)
            Int num = Int(numerator(mn)), den = Int(denominator(mn));
            lo[c] = num >= 0 ? Int((num + den - 1) / den) : Int(-Int((-num) / den));
            num = Int(numerator(mx));
            den = Int(denominator(mx));
            hi[c] = num >= 0 ? Int(num / den) : Int(-Int(((-num) + den - 1) / den));
        }
        std::vector<QVec> out;
        QVec x(rank_);
        std::vector<Int> cur = lo;
        if (rank_ == 0) {
            out.push_back({});
            return out;
        }
        for (std::size_t c = 0; c < rank_; ++c)
            if (lo[c] > hi[c]) return out;
        while (true) {
            for (std::size_t c = 0; c < rank_; ++c) x[c] = Rat(cur[c]);
            if (contains(x)) out.push_back(x);
            std::size_t c = 0;
            while (c < rank_) {
                if (cur[c] < hi[c]) {
                    ++cur[c];
                    break;
                }
                cur[c] = lo[c];
                ++c;
            }
            if (c == rank_) break;
        }
        return out;
    }

    /// Lebesgue volume with the lattice unit cube normalized to 1.
    /// Zero when dim < rank.
    Rat volume() const {
        if (dim_ < rank_) return Rat(0);
        Rat total = 0;
        for (const auto& s : triangulation())
            total += simplex_volume(s);
        return total;
    }

    /// Pulling triangulation: cone each cell from its lex-smallest vertex over
    /// the recursively triangulated boundary.  Deterministic.
    std::vector<std::vector<QVec>> triangulation() const {
        std::vector<std::vector<QVec>> out;
        if (vertices_.size() == dim_ + 1) {
            out.push_back(vertices_);
            return out;
        }
        const QVec& apex = vertices_.front();  // vertices are lex sorted
        for (const auto& h : facets_) {
            if (h.slack(apex) == 0) continue;
            std::vector<QVec> fpts;
            for (const auto& v : vertices_)
                if (h.slack(v) == 0) fpts.push_back(v);
            Polytope facet = hull(rank_, std::move(fpts));
            for (auto s : facet.triangulation()) {
                s.push_back(apex);
                out.push_back(std::move(s));
            }
        }
        return out;
    }

    Rat simplex_volume(const std::vector<QVec>& simplex) const {
        if (simplex.size() != dim_ + 1) throw GeometryError("simplex_volume: not a simplex");
        if (dim_ < rank_) return Rat(0);
        QMat m;
        for (std::size_t i = 1; i < simplex.size(); ++i) m.push_back(vsub(simplex[i], simplex[0]));
        Rat d = mat_det(std::move(m));
        if (d < 0) d = -d;
        Rat fact = 1;
        for (std::size_t i = 2; i <= dim_; ++i) fact *= Rat(i);
        return d / fact;
    }

private:
    std::size_t affine_dim(const std::vector<std::size_t>& idx) const {
        if (idx.empty()) return 0;
        QMat m;
        for (std::size_t i = 1; i < idx.size(); ++i)
            m.push_back(vsub(vertices_[idx[i]], vertices_[idx[0]]));
        return mat_rank(std::move(m));
    }

    std::size_t rank_ = 0;
    std::size_t dim_ = 0;
    std::vector<QVec> vertices_;       // lex sorted, extreme
    std::vector<Halfspace> facets_;    // irredundant w.r.t. the affine hull
    std::vector<Equation> equations_;  // affine hull
};

/// Intersection of two polytopes; nullopt when empty.
inline std::optional<Polytope> intersect(const Polytope& a, const Polytope& b) {
    std::vector<Halfspace> ineqs = a.facets();
    ineqs.insert(ineqs.end(), b.facets().begin(), b.facets().end());
    std::vector<Equation> eqs = a.equations();
    eqs.insert(eqs.end(), b.equations().begin(), b.equations().end());
    Polyhedron p = polyhedron_from_hrep(a.rank(), ineqs, eqs);
    if (p.empty()) return std::nullopt;
    return Polytope::hull(a.rank(), p.vertices);
}

// ---------------------------------------------------------------------------
// Subdivisions
// ---------------------------------------------------------------------------

struct Subdivision {
    Polytope base;
    std::vector<Polytope> cells;
    std::vector<QVec> vertex_set;  // union of cell vertices, lex sorted

    void collect_vertex_set() {
        std::set<QVec, decltype(&lex_less)> s(&lex_less);
        for (const auto& c : cells)
            for (const auto& v : c.vertices()) s.insert(v);
        vertex_set.assign(s.begin(), s.end());
    }
};

/// Trivial subdivision whose only cell is the base itself.
inline Subdivision trivial_subdivision(const Polytope& base) {
    Subdivision s;
    s.base = base;
    s.cells = {base};
    s.collect_vertex_set();
    return s;
}

/// Regular subdivision of conv(points) induced by projecting the upper faces
/// of the lifted configuration {(x_k, h_k)}, together with the affine data of
/// each maximal cell.  Heights are LogValues; all orientation decisions route
/// through exact signs.
struct LiftedCell {
    std::vector<std::size_t> members;  // indices of lifted points on the cell
    LogVec gradient;                   // ambient-coordinates gradient
    LogValue offset;
};

struct LiftedSubdivision {
    Subdivision sub;
    std::vector<LiftedCell> cell_data;  // parallel to sub.cells
};

namespace detail {

/// Chooses coordinate positions that make the basis matrix invertible, so that
/// affine-hull coordinates can be computed by solving a k x k system.
struct AffineChart {
    QVec origin;
    std::vector<QVec> basis;              // k independent directions, ambient
    std::vector<std::size_t> coord_rows;  // k coordinate positions

    static AffineChart build(const std::vector<QVec>& points) {
        AffineChart ch;
        ch.origin = points.front();
        QMat collected;
        for (const auto& p : points) {
            QVec d = vsub(p, ch.origin);
            collected.push_back(d);
            if (mat_rank(collected) < collected.size())
                collected.pop_back();
            else
                ch.basis.push_back(d);
        }
        // Pivot columns of the basis matrix give usable coordinate rows.
        QMat bt = ch.basis;
        auto pivots = rref(bt);
        ch.coord_rows = {pivots.begin(), pivots.end()};
        return ch;
    }

    std::size_t k() const { return basis.size(); }

    QVec coords(const QVec& x) const {
        QMat m(k(), QVec(k()));
        QVec rhs(k());
        for (std::size_t i = 0; i < k(); ++i) {
            for (std::size_t j = 0; j < k(); ++j) m[i][j] = basis[j][coord_rows[i]];
            rhs[i] = x[coord_rows[i]] - origin[coord_rows[i]];
        }
        auto c = solve_linear(std::move(m), std::move(rhs));
        if (!c) throw GeometryError("affine chart: singular coordinate system");
        return *c;
    }
};

}  // namespace detail

inline LiftedSubdivision upper_hull_subdivision(std::size_t rank,
                                                std::vector<std::pair<QVec, LogValue>> lifted) {
    if (lifted.empty()) throw GeometryError("upper_hull_subdivision: no points");
    // Duplicate base points keep the larger height (envelope semantics).
    std::sort(lifted.begin(), lifted.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    std::vector<std::pair<QVec, LogValue>> pts;
    for (auto& pr : lifted) {
        if (!pts.empty() && pts.back().first == pr.first) {
            if (lv_cmp(pr.second, pts.back().second) > 0) pts.back().second = pr.second;
        } else {
            pts.push_back(std::move(pr));
        }
    }

    std::vector<QVec> base_pts;
    for (const auto& pr : pts) base_pts.push_back(pr.first);
    Polytope base = Polytope::hull(rank, base_pts);

    LiftedSubdivision result;
    result.sub.base = base;

    if (base.dim() == 0) {
        result.sub.cells = {base};
        result.sub.collect_vertex_set();
        LiftedCell c;
        c.members = {0};
        c.gradient = LogVec(rank, LogValue());
        c.offset = pts[0].second;
        result.cell_data.push_back(std::move(c));
        return result;
    }

    auto chart = detail::AffineChart::build(base_pts);
    std::size_t k = chart.k();
    std::vector<QVec> loc(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) loc[i] = chart.coords(pts[i].first);

    // Enumerate affine witnesses through k+1 affinely independent points and
    // keep those supporting the lifted set from above.  The equality set of a
    // valid witness is a maximal cell of the regular subdivision.
    std::set<std::vector<std::size_t>> seen;

    auto consider = [&](const std::vector<std::size_t>& sel) {
        QMat m;
        LogVec rhs;
        for (auto i : sel) {
            QVec row = loc[i];
            row.push_back(1);
            m.push_back(std::move(row));
            rhs.push_back(pts[i].second);
        }
        auto sol = solve_linear_lv(std::move(m), std::move(rhs));
        if (!sol) return;  // affinely dependent
        LogVec grad(sol->begin(), sol->begin() + k);
        LogValue off = (*sol)[k];
        std::vector<std::size_t> members;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            LogValue s = dot(loc[j], grad) + off - pts[j].second;
            if (s.is_zero()) {
                members.push_back(j);
            } else if (s.sign() < 0) {
                return;  // a point pokes above: not an upper face
            }
        }
        if (members.size() < k + 1) return;
        if (!seen.insert(members).second) return;

        std::vector<QVec> cell_pts;
        for (auto j : members) cell_pts.push_back(pts[j].first);
        Polytope cell = Polytope::hull(rank, std::move(cell_pts));
        if (cell.dim() != base.dim()) return;  // supporting a lower face only

        LiftedCell data;
        data.members = members;
        // Ambient gradient: any g with <g, basis_i> = grad_i.  Components off
        // the chart's pivot rows are pinned to zero, deterministically.
        LogVec g(rank, LogValue());
        {
            QMat m2(k, QVec(k));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) m2[i][j] = chart.basis[i][chart.coord_rows[j]];
            auto gsol = solve_linear_lv(std::move(m2), grad);
            if (!gsol) throw GeometryError("upper hull: chart inversion failed");
            for (std::size_t j = 0; j < k; ++j) g[chart.coord_rows[j]] = (*gsol)[j];
        }
        data.gradient = std::move(g);
        const auto& anchor = pts[members.front()];
        data.offset = anchor.second - dot(anchor.first, data.gradient);
        result.sub.cells.push_back(std::move(cell));
        result.cell_data.push_back(std::move(data));
    };

    if (k == 1) {
        // Monotone chain on the line: points are already sorted by their
        // (single) chart coordinate because the lex order sorted them by
        // ambient position along the segment.
        std::vector<std::size_t> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return loc[a][0] < loc[b][0]; });
        std::vector<std::size_t> stack;
        for (auto i : order) {
            while (stack.size() >= 2) {
                std::size_t j = stack[stack.size() - 1], h = stack[stack.size() - 2];
                // pop j when slope(h,j) <= slope(j,i)
                LogValue lhs = (loc[i][0] - loc[j][0]) * (pts[j].second - pts[h].second) -
                               (loc[j][0] - loc[h][0]) * (pts[i].second - pts[j].second);
                if (lhs.sign() <= 0)
                    stack.pop_back();
                else
                    break;
            }
            stack.push_back(i);
        }
        for (std::size_t s = 0; s + 1 < stack.size(); ++s)
            consider({stack[s], stack[s + 1]});
    } else if (pts.size() >= k + 1) {
        // Witness enumeration over all (k+1)-subsets.
        auto next_combination = [](std::vector<std::size_t>& c, std::size_t n) -> bool {
            std::size_t m = c.size(), i = m;
            while (i > 0) {
                --i;
                if (c[i] != i + n - m) {
                    ++c[i];
                    for (std::size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
                    return true;
                }
            }
            return false;
        };
        std::vector<std::size_t> idx(k + 1);
        for (std::size_t i = 0; i <= k; ++i) idx[i] = i;
        do {
            consider(idx);
        } while (next_combination(idx, pts.size()));
    }

    // Deterministic cell order.
    std::vector<std::size_t> order(result.sub.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.cell_data[a].members < result.cell_data[b].members;
    });
    LiftedSubdivision sorted;
    sorted.sub.base = result.sub.base;
    for (auto i : order) {
        sorted.sub.cells.push_back(result.sub.cells[i]);
        sorted.cell_data.push_back(result.cell_data[i]);
    }
    sorted.sub.collect_vertex_set();
    if (sorted.sub.cells.empty()) throw GeometryError("upper hull: no cells found");
    return sorted;
}

/// Common refinement: cells are the full-dimensional intersections of cells,
/// one from each input subdivision.
inline Subdivision common_refinement(const std::vector<Subdivision>& subs) {
    if (subs.empty()) throw GeometryError("common_refinement: no inputs");
    for (const auto& s : subs)
        if (!(s.base == subs[0].base)) throw GeometryError("common_refinement: base polytopes differ");
    Subdivision acc = subs[0];
    for (std::size_t si = 1; si < subs.size(); ++si) {
        std::vector<Polytope> cells;
        std::set<std::vector<QVec>> seen;
        for (const auto& a : acc.cells) {
            for (const auto& b : subs[si].cells) {
                auto c = intersect(a, b);
                if (!c || c->dim() != acc.base.dim()) continue;
                if (seen.insert(c->vertices()).second) cells.push_back(std::move(*c));
            }
        }
        acc.cells = std::move(cells);
    }
    std::sort(acc.cells.begin(), acc.cells.end(),
              [](const Polytope& a, const Polytope& b) { return a.vertices() < b.vertices(); });
    acc.collect_vertex_set();
    return acc;
}

/// Refines every cell into simplices by the pulling rule.  Introduces no new
/// vertices.
inline Subdivision triangulate(const Subdivision& s) {
    Subdivision out;
    out.base = s.base;
    for (const auto& cell : s.cells)
        for (const auto& simplex : cell.triangulation())
            out.cells.push_back(Polytope::hull(cell.rank(), simplex));
    std::sort(out.cells.begin(), out.cells.end(),
              [](const Polytope& a, const Polytope& b) { return a.vertices() < b.vertices(); });
    out.collect_vertex_set();
    return out;
}

}  // namespace toric

#endif  // TORIC_GEOMETRY_HPP
