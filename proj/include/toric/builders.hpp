/**
 * Constructors for the worked example families: canonical metrics, weighted
 * L^p metrics, weighted projective spaces, projective-space bundles,
 * monomial subtorus translates, and the prescribed-minima construction.
 * Builders emit a DivisorSpec plus, where a closed form is known, direct
 * evaluators used to cross-check the general machinery.
 */

#ifndef TORIC_BUILDERS_HPP
#define TORIC_BUILDERS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "toric/adelic.hpp"
#include "toric/minima.hpp"

namespace toric {

class BuilderError : public std::runtime_error {
public:
    explicit BuilderError(const std::string& msg) : std::runtime_error(msg) {}
};

inline Polytope standard_simplex(std::size_t n) {
    std::vector<QVec> pts{QVec(n, Rat(0))};
    for (std::size_t i = 0; i < n; ++i) {
        QVec e(n, Rat(0));
        e[i] = 1;
        pts.push_back(std::move(e));
    }
    return Polytope::hull(n, pts);
}

/// All-canonical divisor on the toric variety of the polytope.
inline DivisorSpec canonical(const Polytope& delta) {
    DivisorSpec spec;
    spec.rank = delta.rank();
    spec.delta = delta;
    spec.semipositive = true;
    spec.ample = delta.dim() == delta.rank();
    return spec;
}

// ---------------------------------------------------------------------------
// Weighted L^p metrics
// ---------------------------------------------------------------------------

struct LpResult {
    DivisorSpec spec;
    std::vector<LogValue> minima;  // face-formula values, exact
};

/// Weighted L^Lambda metric with weights alpha on the lattice points of the
/// polytope (zero where omitted; vertices must carry positive weight).  The
/// i-th minimum is min over faces F of codim i-1 of (1/Lambda) log sum of the
/// weights on F.
inline LpResult lp_metric(const Polytope& delta, const Rat& lambda,
                          const std::map<QVec, Rat, decltype(&lex_less)>& alpha) {
    if (lambda <= 0) throw BuilderError("lambda must be positive");
    if (delta.dim() != delta.rank()) throw BuilderError("lp metric needs a full-dimensional polytope");
    for (const auto& [m, a] : alpha) {
        if (a < 0) throw BuilderError("weights must be non-negative");
        if (!delta.contains(m)) throw BuilderError("weight at a point outside the polytope");
    }
    auto weight_of = [&](const QVec& m) {
        auto it = alpha.find(m);
        return it == alpha.end() ? Rat(0) : it->second;
    };
    for (const auto& v : delta.vertices())
        if (weight_of(v) <= 0) throw BuilderError("vertex with zero weight");

    LpResult res;
    res.spec.rank = delta.rank();
    res.spec.delta = delta;
    res.spec.semipositive = true;
    res.spec.ample = true;
    SmoothMetricData smooth;
    smooth.lambda = lambda;
    for (const auto& [m, a] : alpha) {
        if (a == 0) continue;
        smooth.points.push_back(m);
        smooth.weights.push_back(a);
    }
    res.spec.places.push_back({Place::infinite(), Rat(1), smooth});

    std::size_t n = delta.dim();
    for (std::size_t i = 1; i <= n + 1; ++i) {
        LogValue best;
        bool first = true;
        for (const auto& face : delta.faces(n - i + 1)) {
            Rat sum = 0;
            for (const auto& m : face.lattice_points()) sum += weight_of(m);
            if (sum <= 0) throw BuilderError("face carries no weight");
            LogValue cand = LogValue::log_of_rational(sum, Rat(1) / lambda);
            if (first || lv_cmp(cand, best) < 0) {
                best = cand;
                first = false;
            }
        }
        res.minima.push_back(best);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Weighted projective spaces
// ---------------------------------------------------------------------------

struct WpsResult {
    DivisorSpec spec;
    Polytope delta;
    Rat big_lambda;                 // Lambda = -1 / sum c_i lambda_i
    std::vector<LogValue> minima;   // subset closed form
    LogValue height;                // closed form
    LogValue height_by_integration; // independent exact integration route
};

/// Entropy-type metric on a full-dimensional simplex cut out by the affine
/// functions ell_i(x) = <u_i, x> - lambda_i >= 0, with positive coefficients
/// c_i satisfying sum c_i u_i = 0.  The roof is -sum c_i ell_i log(ell_i);
/// its Legendre dual is the weighted L^Lambda metric with vertex weights
/// Lambda*c_i.
inline WpsResult wps_metric(const std::vector<std::pair<QVec, Rat>>& ell,
                            const std::vector<Rat>& c) {
    if (ell.empty() || ell.size() != c.size()) throw BuilderError("need one weight per facet");
    std::size_t n = ell.size() - 1;
    for (const auto& ci : c)
        if (ci <= 0) throw BuilderError("coefficients must be positive");
    QVec usum(n, Rat(0));
    Rat lsum = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        if (ell[i].first.size() != n) throw BuilderError("normal rank mismatch");
        usum = vadd(usum, vscale(c[i], ell[i].first));
        lsum += c[i] * ell[i].second;
    }
    if (!is_zero(usum)) throw BuilderError("inward normals weighted by c must sum to zero");
    if (lsum >= 0) throw BuilderError("sign condition violated: sum c_i lambda_i must be negative");
    Rat big_lambda = Rat(-1) / lsum;

    std::vector<Halfspace> hs;
    for (const auto& [u, l] : ell) hs.push_back(Halfspace::canonical(u, l));
    Polytope delta = Polytope::from_hrep(n, hs, {});
    if (delta.dim() != n || delta.vertices().size() != n + 1)
        throw BuilderError("the ell-data must cut out a full-dimensional simplex");

    // Vertex m_i is the one off facet i.
    std::vector<QVec> m(n + 1);
    std::vector<Rat> ell_at_m(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        int found = -1;
        for (std::size_t v = 0; v < delta.vertices().size(); ++v) {
            Rat val = dot(ell[i].first, delta.vertices()[v]) - ell[i].second;
            if (val > 0) {
                if (found >= 0) throw BuilderError("facet data is not irredundant");
                found = static_cast<int>(v);
                ell_at_m[i] = val;
            }
        }
        if (found < 0) throw BuilderError("degenerate facet");
        m[i] = delta.vertices()[found];
    }

    WpsResult res;
    res.delta = delta;
    res.big_lambda = big_lambda;

    std::map<QVec, Rat, decltype(&lex_less)> alpha(&lex_less);
    for (std::size_t i = 0; i <= n; ++i) alpha[m[i]] += big_lambda * c[i];
    res.spec = lp_metric(delta, big_lambda, alpha).spec;

    // Subset closed form for the minima.
    for (std::size_t i = 1; i <= n + 1; ++i) {
        std::size_t size = n - i + 2;
        LogValue best;
        bool first = true;
        std::vector<std::size_t> idx(size);
        for (std::size_t j = 0; j < size; ++j) idx[j] = j;
        while (true) {
            Rat sum = 0;
            for (auto j : idx) sum += big_lambda * c[j];
            LogValue cand = LogValue::log_of_rational(sum, Rat(1) / big_lambda);
            if (first || lv_cmp(cand, best) < 0) {
                best = cand;
                first = false;
            }
            std::size_t k = size;
            bool done = true;
            while (k > 0) {
                --k;
                if (idx[k] != k + (n + 1) - size) {
                    ++idx[k];
                    for (std::size_t j = k + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
                    done = false;
                    break;
                }
            }
            if (done) break;
        }
        res.minima.push_back(best);
    }

    // Height closed form: h/deg = (n+1)/Lambda H_{n+1} + (1/Lambda) sum log(Lambda c_i),
    // H_{n+1} = sum_{j=2}^{n+1} 1/j.
    Rat deg = detail::factorial(n) * delta.volume();
    Rat harmonic = 0;
    for (std::size_t j = 2; j <= n + 1; ++j) harmonic += Rat(1, static_cast<long>(j));
    LogValue hd(Rat(static_cast<long>(n + 1)) / big_lambda * harmonic);
    for (std::size_t i = 0; i <= n; ++i)
        hd += LogValue::log_of_rational(big_lambda * c[i], Rat(1) / big_lambda);
    res.height = deg * hd;

    // Independent route: integrate -c_i ell_i log ell_i term by term over the
    // simplex via the barycentric substitution; only the raw ell-data, the
    // volume and the vertex evaluations enter.
    LogValue acc;
    for (std::size_t i = 0; i <= n; ++i) {
        Rat factor = c[i] * detail::factorial(n) * delta.volume() * ell_at_m[i];
        acc += LogValue(factor * harmonic) - LogValue::log_of_rational(ell_at_m[i], factor);
    }
    res.height_by_integration = acc;
    return res;
}

// ---------------------------------------------------------------------------
// Projective-space bundles
// ---------------------------------------------------------------------------

struct BundleResult {
    DivisorSpec spec;
    Polytope delta;
    std::vector<LogValue> minima_closed;  // the ell-minimization formula
    std::vector<LogValue> minima_lp;      // generic face enumeration
};

/// P(O(a_0) + ... + O(a_r)) over P^n with the Fubini-Study metric on each
/// summand; a_0 <= ... <= a_r, all >= 1.
inline BundleResult toric_bundle(std::size_t n, std::vector<long> a) {
    if (a.empty()) throw BuilderError("bundle needs at least one twist");
    for (std::size_t j = 0; j + 1 < a.size(); ++j)
        if (a[j] > a[j + 1]) throw BuilderError("twists must be sorted increasingly");
    if (a.front() < 1) throw BuilderError("twists must be >= 1");
    std::size_t r = a.size() - 1;
    std::size_t dim = n + r;
    if (dim == 0) throw BuilderError("bundle of dimension zero");

    // Polytope: x_i >= 0, y_j >= 0, sum y <= 1, sum x <= a_0 + sum (a_j - a_0) y_j.
    std::vector<Halfspace> hs;
    for (std::size_t i = 0; i < n; ++i) {
        QVec e(dim, Rat(0));
        e[i] = 1;
        hs.push_back(Halfspace::canonical(e, Rat(0)));
    }
    for (std::size_t j = 0; j < r; ++j) {
        QVec e(dim, Rat(0));
        e[n + j] = 1;
        hs.push_back(Halfspace::canonical(e, Rat(0)));
    }
    {
        QVec e(dim, Rat(0));
        for (std::size_t j = 0; j < r; ++j) e[n + j] = -1;
        hs.push_back(Halfspace::canonical(e, Rat(-1)));
    }
    {
        QVec e(dim, Rat(0));
        for (std::size_t i = 0; i < n; ++i) e[i] = -1;
        for (std::size_t j = 0; j < r; ++j) e[n + j] = a[j + 1] - a[0];
        hs.push_back(Halfspace::canonical(e, Rat(-a[0])));
    }
    Polytope delta = Polytope::from_hrep(dim, hs, {});

    // Weights from the multinomial expansion of sum_j w_j^2 (sum_i z_i^2)^{a_j}.
    std::map<QVec, Rat, decltype(&lex_less)> alpha(&lex_less);
    std::vector<long> comp(n + 1, 0);
    for (std::size_t j = 0; j <= r; ++j) {
        // Enumerate compositions k_0 + ... + k_n = a_j.
        std::vector<long> k(n + 1, 0);
        k[0] = a[j];
        while (true) {
            Rat coeff = detail::factorial(a[j]);
            for (auto ki : k) coeff /= detail::factorial(ki);
            QVec m(dim, Rat(0));
            for (std::size_t i = 0; i < n; ++i) m[i] = k[i + 1];
            if (j >= 1) m[n + j - 1] = 1;
            alpha[m] += coeff;
            // next composition
            if (n == 0) break;
            std::size_t i = 0;
            while (i < n && k[i] == 0) ++i;
            if (i == n) break;
            long v = k[i];
            k[i] = 0;
            k[0] = v - 1;
            k[i + 1] += 1;
        }
    }
    BundleResult res;
    res.delta = delta;
    LpResult lp = lp_metric(delta, Rat(2), alpha);
    res.spec = std::move(lp.spec);
    res.minima_lp = std::move(lp.minima);

    // Closed form: min over the count of z-coordinates set to zero.
    for (std::size_t i = 1; i <= dim + 1; ++i) {
        LogValue best;
        bool first = true;
        std::size_t lo = i >= r + 2 ? i - r - 1 : 0;
        std::size_t hi = std::min(i - 1, n);
        for (std::size_t l = lo; l <= hi; ++l) {
            Int sum = 0;
            for (std::size_t j = 0; j + i <= r + 1 + l && j <= r; ++j)
                sum += boost::multiprecision::pow(Int(n + 1 - l), static_cast<unsigned>(a[j]));
            LogValue cand = LogValue::log_of_rational(Rat(sum), Rat(1, 2));
            if (first || lv_cmp(cand, best) < 0) {
                best = cand;
                first = false;
            }
        }
        res.minima_closed.push_back(best);
    }
    return res;
}

inline BundleResult hirzebruch(long a0, long b) { return toric_bundle(1, {a0, a0 + b}); }

// ---------------------------------------------------------------------------
// Subtorus translates
// ---------------------------------------------------------------------------

struct SubtorusData {
    std::vector<QVec> exponents;  // m_1..m_r, integer coordinates; m_0 = 0 implicit
    std::vector<Rat> coords;      // p_0..p_r, nonzero
};

struct SubtorusResult {
    DivisorSpec spec;
    std::vector<QVec> points;  // images of m_0..m_r in the (possibly quotient) lattice
};

namespace detail {

/// Exponent vectors mapped into a basis of the saturated lattice they span.
inline std::vector<QVec> saturate_exponents(const std::vector<QVec>& exps, std::size_t rank) {
    std::vector<std::vector<Int>> rows;
    for (const auto& e : exps) {
        std::vector<Int> row;
        for (const auto& x : e) {
            if (denominator(x) != 1) throw BuilderError("exponents must be integral");
            row.push_back(Int(numerator(x)));
        }
        rows.push_back(std::move(row));
    }
    auto [k, w] = row_lattice_saturation(rows);
    if (k == rank) return exps;  // already spanning
    std::vector<QVec> mapped;
    for (const auto& e : exps) {
        QMat a(rank, QVec(k));
        for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t j = 0; j < k; ++j) a[i][j] = Rat(w[j][i]);
        // Solve e = coeff * W by least-squares-free elimination on the
        // consistent overdetermined system.
        QMat aug = a;
        for (std::size_t i = 0; i < rank; ++i) aug[i].push_back(e[i]);
        auto pivots = rref(aug);
        QVec coeff(k, Rat(0));
        for (std::size_t pi = 0; pi < pivots.size(); ++pi) {
            if (pivots[pi] == k) throw BuilderError("exponent outside the saturated lattice");
            coeff[pivots[pi]] = aug[pi][k];
        }
        for (const auto& ci : coeff)
            if (denominator(ci) != 1)
                throw BuilderError("internal: saturation produced a non-integral coordinate");
        mapped.push_back(std::move(coeff));
    }
    return mapped;
}

}  // namespace detail

/// Shared setup: polytope from the exponents and the per-place lifted heights
/// log|p_j|_v at the finitely many relevant places.
inline SubtorusResult subtorus_common(const SubtorusData& data, bool fubini_study) {
    if (data.coords.size() != data.exponents.size() + 1)
        throw BuilderError("need one coordinate per monomial (m_0 = 0 included)");
    for (const auto& p : data.coords)
        if (p == 0) throw BuilderError("zero coordinate");
    if (data.exponents.empty()) throw BuilderError("need at least one exponent");
    std::size_t ambient = data.exponents[0].size();

    std::vector<QVec> pts = detail::saturate_exponents(data.exponents, ambient);
    std::size_t rank = pts.empty() ? 0 : pts[0].size();
    pts.insert(pts.begin(), QVec(rank, Rat(0)));  // m_0 = 0
    {
        std::set<QVec, decltype(&lex_less)> uniq(&lex_less);
        for (const auto& m : pts)
            if (!uniq.insert(m).second) throw BuilderError("duplicate exponent vectors");
    }

    SubtorusResult res;
    res.points = pts;
    res.spec.rank = rank;
    res.spec.delta = Polytope::hull(rank, pts);
    res.spec.semipositive = true;
    res.spec.ample = true;

    // Prime support of the coordinates.
    std::set<std::uint64_t> support;
    std::vector<std::map<std::uint64_t, int>> num_fac, den_fac;
    for (const auto& p : data.coords) {
        Rat ap = p < 0 ? Rat(-p) : p;
        num_fac.push_back(factor_u64(Int(numerator(ap))));
        den_fac.push_back(factor_u64(Int(denominator(ap))));
        for (const auto& [q, e] : num_fac.back()) support.insert(q);
        for (const auto& [q, e] : den_fac.back()) support.insert(q);
    }

    // Archimedean place.
    if (fubini_study) {
        SmoothMetricData smooth;
        smooth.lambda = 2;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            smooth.points.push_back(pts[j]);
            smooth.weights.push_back(data.coords[j] * data.coords[j]);
        }
        res.spec.places.push_back({Place::infinite(), Rat(1), smooth});
    } else {
        std::vector<std::pair<QVec, LogValue>> gens;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            Rat ap = data.coords[j] < 0 ? Rat(-data.coords[j]) : data.coords[j];
            gens.emplace_back(pts[j], LogValue::log_of_rational(ap));
        }
        res.spec.places.push_back({Place::infinite(), Rat(1), RoofFn(res.spec.delta, gens)});
    }

    // Finite places with nontrivial heights.
    for (auto q : support) {
        std::vector<std::pair<QVec, LogValue>> gens;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            int ord = 0;
            auto it = num_fac[j].find(q);
            if (it != num_fac[j].end()) ord += it->second;
            it = den_fac[j].find(q);
            if (it != den_fac[j].end()) ord -= it->second;
            gens.emplace_back(pts[j], LogValue::log_prime(q, Rat(-ord)));
        }
        res.spec.places.push_back({Place::prime(q), Rat(1), RoofFn(res.spec.delta, gens)});
    }
    return res;
}

/// Pullback of the canonically metrized hyperplane divisor along the monomial
/// map t -> (p_0 chi^{m_0}(t) : ... : p_r chi^{m_r}(t)).
inline SubtorusResult subtorus_canonical(const SubtorusData& data) {
    return subtorus_common(data, false);
}

/// Same pullback with the Fubini-Study metric at the Archimedean place.
inline SubtorusResult subtorus_fs(const SubtorusData& data) {
    return subtorus_common(data, true);
}

// ---------------------------------------------------------------------------
// Prescribed minima and height
// ---------------------------------------------------------------------------

struct PrescribeResult {
    DivisorSpec spec;
    Rat t;                    // scaling of the inner flat region
    LogValue achieved_height; // exact height of the emitted spec
};

/// Semipositive metric on the hyperplane divisor of P^r realizing prescribed
/// successive minima mu_1 >= ... >= mu_{r+1} and height nu with
/// sum mu_i <= nu < (r+1) mu_1.  The boundary nu = (r+1) mu_1 forces a
/// constant roof and is accepted only in the all-equal case.
inline PrescribeResult prescribe(const std::vector<Rat>& mu, const Rat& nu,
                                 double tol = 1e-10) {
    if (mu.size() < 2) throw BuilderError("need at least two minima (r >= 1)");
    std::size_t r = mu.size() - 1;
    for (std::size_t i = 0; i + 1 < mu.size(); ++i)
        if (mu[i] < mu[i + 1]) throw BuilderError("minima must be non-increasing");
    Rat sum = 0;
    for (const auto& m : mu) sum += m;
    Rat top = Rat(static_cast<long>(r + 1)) * mu[0];
    if (nu < sum) throw BuilderError("constraint violated: nu >= sum of the minima required");
    if (nu > top) throw BuilderError("constraint violated: nu < (r+1) mu_1 required");
    bool all_equal = true;
    for (const auto& m : mu) all_equal &= m == mu[0];
    if (nu == top && !all_equal)
        throw BuilderError(
            "nu = (r+1) mu_1 forces a constant roof function (height/degree meets the upper "
            "bound only when all minima coincide); unattainable for these minima");

    Polytope delta = standard_simplex(r);
    Rat fact = detail::factorial(r + 1);

    auto build = [&](const Rat& t) {
        std::vector<std::pair<QVec, LogValue>> gens;
        gens.emplace_back(QVec(r, Rat(0)), LogValue(mu[0]));
        for (std::size_t i = 0; i < r; ++i) {
            QVec e(r, Rat(0));
            e[i] = 1;
            gens.emplace_back(vscale(t, e), LogValue(mu[0]));
            gens.emplace_back(e, LogValue(mu[i + 1]));
        }
        return RoofFn(delta, gens);
    };
    auto height_of = [&](const RoofFn& roof) { return fact * roof.integral(); };

    Rat lo = 0, hi = 1, t = 0;
    RoofFn roof = build(t);
    LogValue h = height_of(roof);
    if (!(h.as_rational() == nu)) {
        for (int iter = 0; iter < 200; ++iter) {
            t = (lo + hi) / 2;
            roof = build(t);
            h = height_of(roof);
            Rat diff = h.as_rational() - nu;
            if (diff == 0) break;
            double d = rat_double(diff);
            if (d < 0 ? -d <= tol : d <= tol) break;
            (diff < 0 ? lo : hi) = t;
        }
    }

    PrescribeResult res;
    res.t = t;
    res.achieved_height = h;
    res.spec.rank = r;
    res.spec.delta = delta;
    res.spec.semipositive = true;
    res.spec.ample = true;
    res.spec.places.push_back({Place::infinite(), Rat(1), roof});
    return res;
}

}  // namespace toric

#endif  // TORIC_BUILDERS_HPP
