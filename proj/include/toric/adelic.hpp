/**
 * The divisor model: places of Q with rational weights, per-place local
 * metric data, validation, and assembly of the global roof function.
 */

#ifndef TORIC_ADELIC_HPP
#define TORIC_ADELIC_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "toric/concave.hpp"

namespace toric {

class AdelicError : public std::runtime_error {
public:
    explicit AdelicError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the exact path when a spec carries smooth Archimedean data.
class SmoothPathRequired : public AdelicError {
public:
    explicit SmoothPathRequired(const std::string& msg) : AdelicError(msg) {}
};

struct Place {
    bool archimedean = true;
    std::uint64_t p = 0;  // prime when finite

    static Place infinite() { return Place{true, 0}; }
    static Place prime(std::uint64_t q) {
        if (!is_prime_u64(q)) throw AdelicError("place " + std::to_string(q) + " is not prime");
        return Place{false, q};
    }

    bool operator==(const Place& o) const { return archimedean == o.archimedean && p == o.p; }
    bool operator<(const Place& o) const {
        if (archimedean != o.archimedean) return archimedean;  // infinity first
        return p < o.p;
    }
    std::string str() const { return archimedean ? "inf" : "p:" + std::to_string(p); }
};

struct CanonicalMetric {};

/// Smooth Archimedean metric psi(u) = (-1/L) log sum_j w_j e^{-L <m_j, u>}.
/// lambda = 2 is the (weighted) Fubini-Study case.
struct SmoothMetricData {
    std::vector<QVec> points;
    std::vector<Rat> weights;
    Rat lambda = 2;
};

using LocalMetric = std::variant<CanonicalMetric, RoofFn, CellwisePA, SmoothMetricData>;

struct PlaceEntry {
    Place place;
    Rat weight = 1;
    LocalMetric metric;
};

struct DivisorSpec {
    std::size_t rank = 0;
    Polytope delta;
    std::vector<PlaceEntry> places;  // finitely many; unlisted places are canonical
    bool semipositive = false;
    bool ample = false;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const DivisorSpec& spec) {
    ValidationReport rep;
    auto err = [&](const std::string& m) { rep.errors.push_back(m); };

    if (spec.delta.rank() != spec.rank) err("polytope rank differs from the divisor rank");
    int arch_count = 0;
    std::set<std::uint64_t> primes;
    for (const auto& e : spec.places) {
        std::string tag = "place " + e.place.str() + ": ";
        if (e.weight <= 0) err(tag + "weight must be positive");
        if (e.place.archimedean) {
            if (++arch_count > 1) err("more than one Archimedean place");
        } else if (!primes.insert(e.place.p).second) {
            err("duplicate finite place " + e.place.str());
        }
        if (std::holds_alternative<RoofFn>(e.metric)) {
            const auto& r = std::get<RoofFn>(e.metric);
            if (!(r.domain() == spec.delta)) err(tag + "domain mismatch");
        } else if (std::holds_alternative<CellwisePA>(e.metric)) {
            const auto& psi = std::get<CellwisePA>(e.metric);
            if (psi.rank() != spec.rank) {
                err(tag + "cellwise rank mismatch");
            } else {
                try {
                    if (!(psi.stability_set() == spec.delta))
                        err(tag + "stability set differs from the divisor polytope");
                    if (spec.semipositive && !psi.is_concave())
                        err(tag + "semipositive flag contradicts non-concave local data");
                } catch (const ConcaveError& ex) {
                    err(tag + ex.what());
                }
            }
        } else if (std::holds_alternative<SmoothMetricData>(e.metric)) {
            if (!e.place.archimedean) {
                err(tag + "smooth data only at the Archimedean place");
                continue;
            }
            const auto& s = std::get<SmoothMetricData>(e.metric);
            if (s.lambda <= 0) err(tag + "lambda must be positive");
            if (s.points.empty() || s.points.size() != s.weights.size()) {
                err(tag + "points/weights size mismatch");
                continue;
            }
            for (const auto& w : s.weights)
                if (w <= 0) err(tag + "smooth weights must be positive");
            try {
                if (!(Polytope::hull(spec.rank, s.points) == spec.delta))
                    err(tag + "smooth metric points must span the divisor polytope");
            } catch (const GeometryError& ex) {
                err(tag + ex.what());
            }
        }
    }
    if (spec.ample && spec.delta.dim() < spec.rank)
        rep.warnings.push_back("ample flag set but the polytope is lower-dimensional");
    return rep;
}

/// Local roof of one entry on the exact path (Canonical -> zero, Roof as is,
/// Psi -> Legendre dual).  Smooth entries are rejected.
inline RoofFn local_roof(const DivisorSpec& spec, const PlaceEntry& e) {
    if (std::holds_alternative<CanonicalMetric>(e.metric)) return RoofFn::zero(spec.delta);
    if (std::holds_alternative<RoofFn>(e.metric)) return std::get<RoofFn>(e.metric);
    if (std::holds_alternative<CellwisePA>(e.metric)) {
        RoofFn r = std::get<CellwisePA>(e.metric).dual_roof();
        if (!(r.domain() == spec.delta))
            throw AdelicError("place " + e.place.str() +
                              ": stability set differs from the divisor polytope");
        return r;
    }
    throw SmoothPathRequired("smooth Archimedean data: use smoothsolve");
}

/// Global roof: weighted sum of the non-canonical local roofs.
inline RoofFn global_roof(const DivisorSpec& spec) {
    std::vector<RoofFn> owned;
    std::vector<Rat> weights;
    for (const auto& e : spec.places) {
        if (std::holds_alternative<CanonicalMetric>(e.metric)) continue;  // contributes zero
        owned.push_back(local_roof(spec, e));
        weights.push_back(e.weight);
    }
    if (owned.empty()) return RoofFn::zero(spec.delta);
    std::vector<std::pair<Rat, const RoofFn*>> terms;
    for (std::size_t i = 0; i < owned.size(); ++i) terms.emplace_back(weights[i], &owned[i]);
    return roof_weighted_sum(terms);
}

/// theta_S = sum over the finite places of n_v theta_v; its psi/subdifferential
/// realize the sup-convolution of the finite-place data.  With no non-canonical
/// finite place this is the zero roof, whose psi is the support function.
inline RoofFn finite_part_roof(const DivisorSpec& spec) {
    std::vector<RoofFn> owned;
    std::vector<Rat> weights;
    for (const auto& e : spec.places) {
        if (e.place.archimedean) continue;
        if (std::holds_alternative<CanonicalMetric>(e.metric)) continue;
        owned.push_back(local_roof(spec, e));
        weights.push_back(e.weight);
    }
    if (owned.empty()) return RoofFn::zero(spec.delta);
    std::vector<std::pair<Rat, const RoofFn*>> terms;
    for (std::size_t i = 0; i < owned.size(); ++i) terms.emplace_back(weights[i], &owned[i]);
    return roof_weighted_sum(terms);
}

/// The smooth Archimedean entry, when present.
inline std::optional<std::pair<Rat, SmoothMetricData>> smooth_entry(const DivisorSpec& spec) {
    for (const auto& e : spec.places)
        if (e.place.archimedean && std::holds_alternative<SmoothMetricData>(e.metric))
            return std::make_pair(e.weight, std::get<SmoothMetricData>(e.metric));
    return std::nullopt;
}

}  // namespace toric

#endif  // TORIC_ADELIC_HPP
