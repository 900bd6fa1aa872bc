/**
 * Successive minima, heights, arithmetic volumes, and the height/minima
 * sandwich for toric metrized R-divisors given by their roof data.
 *
 * The essential minimum is the exact maximum of the global roof function.
 * The i-th minimum is computed by the face formula
 *     mu^i = min over faces F of dim n-i+1 of max over F,
 * which is an equality for semipositive metrics with ample underlying
 * divisor, and an upper-bound formula otherwise; reports carry a certified
 * flag so callers can tell the two apart.
 */

#ifndef TORIC_MINIMA_HPP
#define TORIC_MINIMA_HPP

#include <string>
#include <vector>

#include "toric/adelic.hpp"

namespace toric {

struct FaceWitness {
    std::vector<QVec> face_vertices;  // the minimizing face
    QVec argmax;                      // vertex attaining the max on it
};

struct MinimaReport {
    std::vector<LogValue> mu;  // mu[0] = first minimum = essential minimum
    LogValue ess;
    LogValue abs;
    std::vector<FaceWitness> witnesses;  // parallel to mu
    bool face_formula_certified = false; // semipositive and ample flags both set
    bool pseudo_effective = false;       // ess >= 0
    bool big = false;                    // full-dimensional polytope and ess > 0
};

struct ZhangReport {
    std::vector<LogValue> mu;
    LogValue sum_mu;
    LogValue height;
    Rat degree = 0;
    LogValue height_over_degree;
    LogValue bound;  // (n+1) * ess
    bool left_holds = false;   // sum mu <= h/deg
    bool right_holds = false;  // h/deg <= (n+1) ess
    bool right_equality = false;
    bool theta_constant = false;
    std::vector<std::pair<Place, bool>> place_affine;  // per non-canonical place
    bool gradients_zero_sum = false;
};

inline LogValue essential_minimum(const DivisorSpec& spec) {
    return global_roof(spec).max_over_domain();
}

inline MinimaReport successive_minima_of_roof(const RoofFn& theta, bool certified) {
    MinimaReport rep;
    rep.face_formula_certified = certified;
    const Polytope& delta = theta.domain();
    std::size_t d = delta.dim();
    for (std::size_t i = 1; i <= d + 1; ++i) {
        LogValue best;
        FaceWitness w;
        bool first = true;
        for (const auto& face : delta.faces(d - i + 1)) {
            QVec arg;
            LogValue m = theta.max_over_face(face, &arg);
            if (first || lv_cmp(m, best) < 0) {
                best = m;
                w.face_vertices = face.vertices();
                w.argmax = arg;
                first = false;
            }
        }
        rep.mu.push_back(best);
        rep.witnesses.push_back(std::move(w));
    }
    rep.ess = rep.mu.front();
    rep.abs = rep.mu.back();
    // Cross-check: the minimum of a concave function sits at a vertex.
    if (theta.min_over_domain() != rep.abs)
        throw AdelicError("internal: vertex minimum disagrees with the face formula");
    rep.pseudo_effective = rep.ess.sign() >= 0;
    rep.big = delta.dim() == delta.rank() && rep.ess.sign() > 0;
    return rep;
}

inline MinimaReport successive_minima(const DivisorSpec& spec) {
    return successive_minima_of_roof(global_roof(spec), spec.semipositive && spec.ample);
}

inline Rat degree(const DivisorSpec& spec) {
    Rat fact = 1;
    for (std::size_t i = 2; i <= spec.rank; ++i) fact *= Rat(i);
    return fact * spec.delta.volume();
}

namespace detail {
inline Rat factorial(std::size_t n) {
    Rat f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= Rat(i);
    return f;
}
}  // namespace detail

/// (n+1)! times the integral of the global roof.  This is the height for
/// semipositive metrics and the chi-arithmetic volume in general.
inline LogValue chi_volume(const DivisorSpec& spec) {
    return detail::factorial(spec.rank + 1) * global_roof(spec).integral();
}

inline LogValue height(const DivisorSpec& spec) { return chi_volume(spec); }

/// (n+1)! times the integral of max(0, theta).
inline LogValue arith_volume(const DivisorSpec& spec) {
    return detail::factorial(spec.rank + 1) * global_roof(spec).positive_part_integral();
}

inline ZhangReport zhang(const DivisorSpec& spec) {
    if (spec.delta.dim() < spec.rank)
        throw AdelicError("zhang: polytope is lower-dimensional (degree zero)");
    RoofFn theta = global_roof(spec);
    ZhangReport rep;
    MinimaReport minima = successive_minima_of_roof(theta, spec.semipositive && spec.ample);
    rep.mu = minima.mu;
    for (const auto& m : rep.mu) rep.sum_mu += m;
    rep.degree = degree(spec);
    rep.height = detail::factorial(spec.rank + 1) * theta.integral();
    rep.height_over_degree = (Rat(1) / rep.degree) * rep.height;
    rep.bound = Rat(static_cast<long>(spec.rank + 1)) * minima.ess;
    rep.left_holds = (rep.height_over_degree - rep.sum_mu).sign() >= 0;
    LogValue gap = rep.bound - rep.height_over_degree;
    rep.right_holds = gap.sign() >= 0;
    rep.right_equality = gap.is_zero();
    rep.theta_constant = theta.is_constant();

    // Equality diagnosis: per-place affine roofs whose gradients cancel
    // against the weights, i.e. every local metric is a translate-and-scale
    // of the canonical one.
    LogVec grad_sum(spec.rank, LogValue());
    bool all_affine = true;
    for (const auto& e : spec.places) {
        if (std::holds_alternative<CanonicalMetric>(e.metric)) continue;
        if (std::holds_alternative<SmoothMetricData>(e.metric))
            throw SmoothPathRequired("smooth Archimedean data: use smoothsolve");
        RoofFn local = local_roof(spec, e);
        bool affine = local.is_affine();
        rep.place_affine.emplace_back(e.place, affine);
        all_affine &= affine;
        if (affine) {
            auto [g, off] = local.affine_data();
            for (std::size_t c = 0; c < spec.rank; ++c) grad_sum[c] += e.weight * g[c];
        }
    }
    bool zero_sum = true;
    for (const auto& g : grad_sum) zero_sum &= g.is_zero();
    rep.gradients_zero_sum = all_affine && zero_sum;
    return rep;
}

}  // namespace toric

#endif  // TORIC_MINIMA_HPP
