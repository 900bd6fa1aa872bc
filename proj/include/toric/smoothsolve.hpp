/**
 * Numeric essential minimum when the Archimedean metric is smooth
 * (log-sum-exp type) and the finite places are piecewise affine: maximize
 * the concave function g(u) = psi_S(u) + n * psi_inf(-u/n), where psi_S is
 * realized exactly by the finite-part roof function.
 *
 * The maximizer sits on a face of the polyhedral complex of psi_S, and the
 * faces are in bijection with the faces of the cached regular subdivision of
 * the roof, so the search is finite: subgradient ascent ranks the candidate
 * faces, then damped Newton maximizes the smooth restriction on each face's
 * affine hull until the sup-differential certificate
 *     grad psi_inf(-u0/n)  in  conv{x_k active at u0}
 * holds with residual below tolerance.  Everything on this path is floating
 * point by design; results carry the residual.
 */

#ifndef TORIC_SMOOTHSOLVE_HPP
#define TORIC_SMOOTHSOLVE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "toric/adelic.hpp"

namespace toric {

class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SmoothSolveResult {
    std::vector<double> u0;
    double mu_ess = 0;
    double optimality_residual = 0;
    std::string cell_id;  // sorted indices of the active psi_S pieces
    int iterations = 0;
};

namespace smoothdetail {

using DVec = std::vector<double>;

inline double ddot(const DVec& a, const DVec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// psi(u) = (-1/L) log sum w_j exp(-L <m_j, u>), log-sum-exp stabilized.
struct SmoothEval {
    std::vector<DVec> points;
    DVec logw;
    double lambda = 2;

    static SmoothEval from(const SmoothMetricData& data) {
        SmoothEval e;
        e.lambda = rat_double(data.lambda);
        for (const auto& m : data.points) {
            DVec p;
            for (const auto& x : m) p.push_back(rat_double(x));
            e.points.push_back(std::move(p));
        }
        for (const auto& w : data.weights) e.logw.push_back(std::log(rat_double(w)));
        return e;
    }

    DVec scores(const DVec& u) const {
        DVec s(points.size());
        for (std::size_t j = 0; j < points.size(); ++j)
            s[j] = logw[j] - lambda * ddot(points[j], u);
        return s;
    }

    double value(const DVec& u) const {
        DVec s = scores(u);
        double m = *std::max_element(s.begin(), s.end());
        double acc = 0;
        for (double x : s) acc += std::exp(x - m);
        return (-1.0 / lambda) * (m + std::log(acc));
    }

    /// Gradient = softmax-weighted average of the points.
    DVec gradient(const DVec& u) const {
        DVec s = scores(u);
        double m = *std::max_element(s.begin(), s.end());
        double z = 0;
        for (double x : s) z += std::exp(x - m);
        DVec g(u.size(), 0.0);
        for (std::size_t j = 0; j < points.size(); ++j) {
            double pi = std::exp(s[j] - m) / z;
            for (std::size_t c = 0; c < u.size(); ++c) g[c] += pi * points[j][c];
        }
        return g;
    }

    /// Hessian = -lambda * covariance of the points under the softmax weights.
    std::vector<DVec> hessian(const DVec& u) const {
        DVec s = scores(u);
        double m = *std::max_element(s.begin(), s.end());
        double z = 0;
        for (double x : s) z += std::exp(x - m);
        DVec mean(u.size(), 0.0);
        std::vector<double> pi(points.size());
        for (std::size_t j = 0; j < points.size(); ++j) {
            pi[j] = std::exp(s[j] - m) / z;
            for (std::size_t c = 0; c < u.size(); ++c) mean[c] += pi[j] * points[j][c];
        }
        std::vector<DVec> h(u.size(), DVec(u.size(), 0.0));
        for (std::size_t j = 0; j < points.size(); ++j)
            for (std::size_t c = 0; c < u.size(); ++c)
                for (std::size_t d = 0; d < u.size(); ++d)
                    h[c][d] += pi[j] * (points[j][c] - mean[c]) * (points[j][d] - mean[d]);
        for (auto& row : h)
            for (auto& x : row) x *= -lambda;
        return h;
    }
};

/// Solve the small dense system h x = b; false on (near-)singularity.
inline bool solve_dense(std::vector<DVec> h, DVec b, DVec& out) {
    std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::fabs(h[i][c]) > std::fabs(h[piv][c])) piv = i;
        if (std::fabs(h[piv][c]) < 1e-13) return false;
        std::swap(h[c], h[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            double f = h[i][c] / h[c][c];
            for (std::size_t j = c; j < n; ++j) h[i][j] -= f * h[c][j];
            b[i] -= f * b[c];
        }
    }
    out.resize(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = b[c] / h[c][c];
    return true;
}

/// Distance from target to conv(pts) by least squares over every vertex
/// subset (the active sets are tiny).
inline double distance_to_hull(const std::vector<DVec>& pts, const DVec& target) {
    std::size_t n = target.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t count = pts.size();
    if (count == 0) return best;
    if (count > 20) count = 20;  // enough in practice; keeps the scan bounded
    for (std::size_t mask = 1; mask < (1u << count); ++mask) {
        std::vector<std::size_t> sel;
        for (std::size_t j = 0; j < count; ++j)
            if (mask & (1u << j)) sel.push_back(j);
        std::size_t k = sel.size();
        DVec lam(k, 1.0 / static_cast<double>(k));
        if (k > 1) {
            std::vector<DVec> gram(k - 1, DVec(k - 1, 0.0));
            DVec rhs(k - 1, 0.0);
            for (std::size_t a = 0; a + 1 < k; ++a) {
                DVec da(n);
                for (std::size_t c = 0; c < n; ++c) da[c] = pts[sel[a]][c] - pts[sel[k - 1]][c];
                for (std::size_t b = 0; b + 1 < k; ++b) {
                    DVec db(n);
                    for (std::size_t c = 0; c < n; ++c) db[c] = pts[sel[b]][c] - pts[sel[k - 1]][c];
                    gram[a][b] = ddot(da, db);
                }
                DVec dt(n);
                for (std::size_t c = 0; c < n; ++c) dt[c] = target[c] - pts[sel[k - 1]][c];
                rhs[a] = ddot(da, dt);
            }
            DVec sol;
            if (!solve_dense(gram, rhs, sol)) continue;
            double rest = 1.0;
            for (std::size_t a = 0; a + 1 < k; ++a) {
                lam[a] = sol[a];
                rest -= sol[a];
            }
            lam[k - 1] = rest;
            bool feasible = true;
            for (double l : lam) feasible &= l >= -1e-12;
            if (!feasible) continue;
        }
        DVec proj(n, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t c = 0; c < n; ++c) proj[c] += lam[a] * pts[sel[a]][c];
        double d2 = 0;
        for (std::size_t c = 0; c < n; ++c) d2 += (proj[c] - target[c]) * (proj[c] - target[c]);
        best = std::min(best, std::sqrt(d2));
    }
    return best;
}

}  // namespace smoothdetail

/// Value of the smooth metric function at u (exposed for tests and the CLI).
inline double fs_psi(const SmoothMetricData& data, const std::vector<double>& u) {
    return smoothdetail::SmoothEval::from(data).value(u);
}

inline std::vector<double> fs_grad(const SmoothMetricData& data, const std::vector<double>& u) {
    return smoothdetail::SmoothEval::from(data).gradient(u);
}

inline SmoothSolveResult solve_smooth(const DivisorSpec& spec, double tol = 1e-10,
                                      int max_iter = 100000) {
    using namespace smoothdetail;
    auto smooth = smooth_entry(spec);
    if (!smooth) throw SolveError("no smooth Archimedean entry; use the exact path");
    if (spec.delta.dim() != spec.rank)
        throw SolveError("smooth solve needs a full-dimensional polytope");
    double n_inf = rat_double(smooth->first);
    SmoothEval psi_inf = SmoothEval::from(smooth->second);

    RoofFn theta_s = finite_part_roof(spec);
    std::size_t dim = spec.rank;
    const auto& gens = theta_s.generators();
    std::vector<DVec> gen_pts;
    DVec gen_val;
    for (const auto& [x, t] : gens) {
        DVec p;
        for (const auto& c : x) p.push_back(rat_double(c));
        gen_pts.push_back(std::move(p));
        gen_val.push_back(t.approx());
    }

    auto psi_s = [&](const DVec& u) {
        double best = ddot(gen_pts[0], u) - gen_val[0];
        for (std::size_t k = 1; k < gen_pts.size(); ++k)
            best = std::min(best, ddot(gen_pts[k], u) - gen_val[k]);
        return best;
    };
    auto neg_scaled = [&](const DVec& u) {
        DVec v(dim);
        for (std::size_t c = 0; c < dim; ++c) v[c] = -u[c] / n_inf;
        return v;
    };
    auto g_of = [&](const DVec& u) { return psi_s(u) + n_inf * psi_inf.value(neg_scaled(u)); };
    auto active_at = [&](const DVec& u, double eps) {
        double m = psi_s(u);
        std::vector<std::size_t> act;
        for (std::size_t k = 0; k < gen_pts.size(); ++k)
            if (ddot(gen_pts[k], u) - gen_val[k] <= m + eps) act.push_back(k);
        return act;
    };

    int iter = 0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> final_act;
    auto certified = [&](const DVec& u) {
        double scale = 1 + std::fabs(psi_s(u));
        auto act = active_at(u, 1e-9 * scale);
        std::vector<DVec> hull;
        for (auto k : act) hull.push_back(gen_pts[k]);
        double r = distance_to_hull(hull, psi_inf.gradient(neg_scaled(u)));
        if (r < residual) {
            residual = r;
            final_act = act;
        }
        return r <= tol;
    };

    // Phase 1: subgradient ascent with diminishing steps, to rank the faces.
    DVec u(dim, 0.0), best_u = u;
    double best_g = g_of(u);
    for (int s = 0; s < 400 && iter < max_iter; ++s, ++iter) {
        auto act = active_at(u, 1e-12);
        DVec grad = psi_inf.gradient(neg_scaled(u));
        DVec dir(dim);
        for (std::size_t c = 0; c < dim; ++c) dir[c] = gen_pts[act[0]][c] - grad[c];
        double norm = std::sqrt(ddot(dir, dir));
        if (norm < 1e-15) break;
        double step = 1.0 / std::sqrt(static_cast<double>(s + 1));
        for (std::size_t c = 0; c < dim; ++c) u[c] += step * dir[c] / norm;
        if (g_of(u) > best_g) {
            best_g = g_of(u);
            best_u = u;
        }
    }
    u = best_u;

    // Candidate active sets = faces of the cached subdivision of theta_S.
    std::set<std::vector<std::size_t>> face_sets;
    auto index_of = [&](const QVec& p) -> std::size_t {
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (gens[k].first == p) return k;
        throw SolveError("internal: subdivision vertex is not a generator");
    };
    for (const auto& cell : theta_s.subdivision().cells) {
        for (std::size_t d = 0; d <= cell.dim(); ++d) {
            for (const auto& idxset : cell.face_vertex_sets(d)) {
                std::vector<std::size_t> members;
                for (auto vi : idxset) members.push_back(index_of(cell.vertices()[vi]));
                std::sort(members.begin(), members.end());
                face_sets.insert(members);
            }
        }
    }
    // Rank candidates by how nearly active they are at the phase-1 point.
    std::vector<std::vector<std::size_t>> candidates(face_sets.begin(), face_sets.end());
    auto slack_of = [&](const std::vector<std::size_t>& a) {
        double m = psi_s(u), worst = 0;
        for (auto k : a) worst = std::max(worst, ddot(gen_pts[k], u) - gen_val[k] - m);
        return worst;
    };
    std::sort(candidates.begin(), candidates.end(),
              [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
                  double sa = slack_of(a), sb = slack_of(b);
                  if (sa != sb) return sa < sb;
                  return a < b;
              });

    if (certified(u)) {
        SmoothSolveResult res;
        res.u0 = u;
        res.mu_ess = -g_of(u);
        res.optimality_residual = residual;
        res.iterations = iter;
        std::string id;
        for (auto k : final_act) id += (id.empty() ? "" : ",") + std::to_string(k);
        res.cell_id = id;
        return res;
    }

    // Phase 2: damped Newton on the affine hull of each candidate face.
    for (const auto& act : candidates) {
        if (iter >= max_iter) break;
        std::size_t a0 = act[0];
        // Affine hull {u : <x_k - x_a0, u> = t_k - t_a0}; exact kernel.
        QMat eqs;
        DVec rhs;
        for (std::size_t idx = 1; idx < act.size(); ++idx) {
            eqs.push_back(vsub(gens[act[idx]].first, gens[a0].first));
            rhs.push_back(gen_val[act[idx]] - gen_val[a0]);
        }
        std::vector<QVec> kernel;
        if (eqs.empty()) {
            for (std::size_t c = 0; c < dim; ++c) {
                QVec e(dim, Rat(0));
                e[c] = 1;
                kernel.push_back(e);
            }
        } else {
            kernel = nullspace(eqs);
        }
        std::vector<DVec> z;
        for (const auto& kv : kernel) {
            DVec row;
            for (const auto& x : kv) row.push_back(rat_double(x));
            z.push_back(std::move(row));
        }
        // Particular point: least-squares via the normal equations of the
        // (consistent) system, then shift toward the phase-1 point along the
        // kernel happens implicitly by starting Newton at that projection.
        DVec up(dim, 0.0);
        if (!eqs.empty()) {
            std::size_t m = eqs.size();
            std::vector<DVec> de(m, DVec(dim));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t c = 0; c < dim; ++c) de[i][c] = rat_double(eqs[i][c]);
            std::vector<DVec> gram(m, DVec(m, 0.0));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) gram[i][j] = ddot(de[i], de[j]);
            // Regularize duplicated rows away by dropping to an independent
            // subset: Tikhonov-free fallback to a tiny ridge.
            for (std::size_t i = 0; i < m; ++i) gram[i][i] += 1e-12;
            DVec coef;
            if (!solve_dense(gram, rhs, coef)) continue;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t c = 0; c < dim; ++c) up[c] += coef[i] * de[i][c];
        }
        // Project the phase-1 point onto the affine hull.
        DVec s0(z.size(), 0.0);
        if (!z.empty()) {
            std::vector<DVec> gram(z.size(), DVec(z.size(), 0.0));
            DVec rhs2(z.size(), 0.0);
            for (std::size_t i = 0; i < z.size(); ++i) {
                for (std::size_t j = 0; j < z.size(); ++j) gram[i][j] = ddot(z[i], z[j]);
                DVec d(dim);
                for (std::size_t c = 0; c < dim; ++c) d[c] = u[c] - up[c];
                rhs2[i] = ddot(z[i], d);
            }
            solve_dense(gram, rhs2, s0);
        }
        DVec cur = up;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t c = 0; c < dim; ++c) cur[c] += s0[i] * z[i][c];

        auto phi = [&](const DVec& w) {
            return ddot(gen_pts[a0], w) - gen_val[a0] + n_inf * psi_inf.value(neg_scaled(w));
        };
        for (int step = 0; step < 200 && iter < max_iter && !z.empty(); ++step, ++iter) {
            DVec sgrad = psi_inf.gradient(neg_scaled(cur));
            std::size_t kdim = z.size();
            DVec gz(kdim);
            for (std::size_t i = 0; i < kdim; ++i) {
                double gi = 0;
                for (std::size_t c = 0; c < dim; ++c) gi += z[i][c] * (gen_pts[a0][c] - sgrad[c]);
                gz[i] = gi;
            }
            double gn = std::sqrt(ddot(gz, gz));
            if (gn < 1e-14) break;
            auto hess = psi_inf.hessian(neg_scaled(cur));
            std::vector<DVec> hz(kdim, DVec(kdim, 0.0));
            for (std::size_t i = 0; i < kdim; ++i)
                for (std::size_t j = 0; j < kdim; ++j) {
                    double acc = 0;
                    for (std::size_t c = 0; c < dim; ++c)
                        for (std::size_t d = 0; d < dim; ++d)
                            acc += z[i][c] * hess[c][d] * z[j][d];
                    hz[i][j] = -acc / n_inf;  // positive semidefinite system
                }
            DVec dsn;
            bool have_newton = solve_dense(hz, gz, dsn);
            if (!have_newton) dsn = gz;  // gradient fallback
            auto stepped = [&](double scale) {
                DVec cand = cur;
                for (std::size_t i = 0; i < kdim; ++i)
                    for (std::size_t c = 0; c < dim; ++c) cand[c] += scale * dsn[i] * z[i][c];
                return cand;
            };
            auto grad_norm_at = [&](const DVec& w) {
                DVec sg = psi_inf.gradient(neg_scaled(w));
                double acc = 0;
                for (std::size_t i = 0; i < kdim; ++i) {
                    double gi = 0;
                    for (std::size_t c = 0; c < dim; ++c) gi += z[i][c] * (gen_pts[a0][c] - sg[c]);
                    acc += gi * gi;
                }
                return std::sqrt(acc);
            };
            double scale = 1.0, phi0 = phi(cur);
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt, scale *= 0.5) {
                DVec cand = stepped(scale);
                if (phi(cand) > phi0 + 1e-18) {
                    cur = cand;
                    moved = true;
                    break;
                }
            }
            if (!moved && have_newton) {
                // Near the maximum the objective improvement drops below the
                // double noise floor; a plain Newton step still contracts the
                // gradient quadratically.
                DVec cand = stepped(1.0);
                if (grad_norm_at(cand) < gn) {
                    cur = cand;
                    moved = true;
                }
            }
            if (!moved) break;
        }
        if (z.empty()) ++iter;
        // Accept if the face is genuinely active there and the sup-gradient
        // certificate holds.
        double feas = ddot(gen_pts[a0], cur) - gen_val[a0] - psi_s(cur);
        if (std::fabs(feas) > 1e-7 * (1 + std::fabs(psi_s(cur)))) continue;
        if (certified(cur)) {
            if (g_of(cur) > best_g) {
                best_g = g_of(cur);
                best_u = cur;
            }
            SmoothSolveResult res;
            res.u0 = cur;
            res.mu_ess = -g_of(cur);
            res.optimality_residual = residual;
            res.iterations = iter;
            std::string id;
            for (auto k : final_act) id += (id.empty() ? "" : ",") + std::to_string(k);
            res.cell_id = id;
            return res;
        }
    }
    std::string best_at = "(";
    for (std::size_t c = 0; c < dim; ++c)
        best_at += (c ? ", " : "") + std::to_string(best_u[c]);
    best_at += ")";
    throw SolveError("no certificate after " + std::to_string(iter) +
                     " iterations; best residual " + std::to_string(residual) +
                     ", best iterate " + best_at + " with value " + std::to_string(-best_g));
}

}  // namespace toric

#endif  // TORIC_SMOOTHSOLVE_HPP
