#include <catch2/catch_amalgamated.hpp>

#include "toric/adelic.hpp"

using namespace toric;

namespace {

QVec qv(std::initializer_list<long> xs) {
    QVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

LogValue lg(std::uint64_t p, const Rat& c) { return LogValue::log_prime(p, c); }

Polytope seg03() { return Polytope::hull(1, {qv({0}), qv({3})}); }

RoofFn cubic_roof(std::uint64_t place) {
    Rat coords[4] = {Rat(1), Rat(4), Rat(1, 3), Rat(1, 2)};
    std::vector<std::pair<QVec, LogValue>> gens;
    for (long j = 0; j <= 3; ++j) {
        LogValue full = LogValue::log_of_rational(coords[j]);
        if (place == 0) {
            gens.emplace_back(qv({j}), full);
        } else {
            auto it = full.log_coeffs().find(place);
            LogValue h = it == full.log_coeffs().end() ? LogValue() : lg(place, -it->second);
            gens.emplace_back(qv({j}), h);
        }
    }
    return RoofFn(seg03(), std::move(gens));
}

DivisorSpec cubic_spec() {
    DivisorSpec spec;
    spec.rank = 1;
    spec.delta = seg03();
    spec.semipositive = true;
    spec.ample = true;
    spec.places.push_back({Place::infinite(), Rat(1), cubic_roof(0)});
    spec.places.push_back({Place::prime(2), Rat(1), cubic_roof(2)});
    spec.places.push_back({Place::prime(3), Rat(1), cubic_roof(3)});
    return spec;
}

}  // namespace

TEST_CASE("validation") {
    DivisorSpec ok;
    ok.rank = 1;
    ok.delta = seg03();
    CHECK(validate(ok).ok());

    // Roof over the wrong polytope.
    DivisorSpec bad = ok;
    bad.places.push_back(
        {Place::prime(2), Rat(1), RoofFn::zero(Polytope::hull(1, {qv({0}), qv({1})}))});
    auto rep = validate(bad);
    REQUIRE(!rep.ok());
    CHECK(rep.errors[0].find("domain mismatch") != std::string::npos);

    // Smooth data at a finite place.
    DivisorSpec bad2 = ok;
    SmoothMetricData s;
    s.points = {qv({0}), qv({3})};
    s.weights = {Rat(1), Rat(1)};
    bad2.places.push_back({Place::prime(2), Rat(1), s});
    rep = validate(bad2);
    REQUIRE(!rep.ok());
    CHECK(rep.errors[0].find("Archimedean") != std::string::npos);

    // Duplicate places, non-positive weights.
    DivisorSpec bad3 = ok;
    bad3.places.push_back({Place::prime(5), Rat(1), CanonicalMetric{}});
    bad3.places.push_back({Place::prime(5), Rat(1), CanonicalMetric{}});
    CHECK(!validate(bad3).ok());
    DivisorSpec bad4 = ok;
    bad4.places.push_back({Place::infinite(), Rat(0), CanonicalMetric{}});
    CHECK(!validate(bad4).ok());
}

TEST_CASE("global roof of the twisted cubic") {
    RoofFn theta = global_roof(cubic_spec());
    CHECK(theta.eval(qv({0})).value().is_zero());
    CHECK(theta.eval(qv({1})).value() == lg(2, Rat(7, 3)) + lg(3, Rat(1, 2)));
    CHECK(theta.eval(qv({2})).value() == lg(2, Rat(7, 6)) + lg(3, Rat(1)));
    CHECK(theta.eval(qv({3})).value().is_zero());
}

TEST_CASE("canonical spec gives the zero roof") {
    DivisorSpec spec;
    spec.rank = 1;
    spec.delta = seg03();
    spec.places.push_back({Place::infinite(), Rat(1), CanonicalMetric{}});
    RoofFn theta = global_roof(spec);
    CHECK(theta.is_constant());
    CHECK(theta.eval(qv({1})).value().is_zero());
}

TEST_CASE("smooth entries are rejected on the exact path") {
    DivisorSpec spec;
    spec.rank = 1;
    spec.delta = seg03();
    SmoothMetricData s;
    s.points = {qv({0}), qv({3})};
    s.weights = {Rat(1), Rat(1)};
    spec.places.push_back({Place::infinite(), Rat(1), s});
    CHECK_THROWS_AS(global_roof(spec), SmoothPathRequired);
}

TEST_CASE("finite-part roof realizes psi_S") {
    // Quadric curve data: place 2 carries heights (0, 2log2, log2) at 0,1,2.
    Polytope seg = Polytope::hull(1, {qv({0}), qv({2})});
    std::vector<std::pair<QVec, LogValue>> g2 = {
        {qv({0}), LogValue()}, {qv({1}), lg(2, Rat(2))}, {qv({2}), lg(2, Rat(1))}};
    DivisorSpec spec;
    spec.rank = 1;
    spec.delta = seg;
    spec.places.push_back({Place::prime(2), Rat(1), RoofFn(seg, g2)});
    RoofFn psiS = finite_part_roof(spec);

    // psi_S(u) = min(0, u - 2log2, 2u - log2): three sample points.
    CHECK(psiS.psi(qv({0})) == Rat(-2) * lg(2, Rat(1)));
    CHECK(psiS.psi(qv({10})).is_zero());
    CHECK(psiS.psi(qv({-10})) == LogValue(Rat(-20)) - lg(2, Rat(1)));

    // Sup-differential cases from its three-piece structure.
    LogVec below = {lg(2, Rat(-2))};  // u < -log2
    CHECK(psiS.psi_subdifferential(below).vertices() == std::vector<QVec>{qv({2})});
    LogVec at = {lg(2, Rat(-1))};  // u = -log2: [1,2]
    CHECK(psiS.psi_subdifferential(at).vertices() == std::vector<QVec>{qv({1}), qv({2})});
    LogVec mid = {LogValue()};  // -log2 < 0 < 2log2
    CHECK(psiS.psi_subdifferential(mid).vertices() == std::vector<QVec>{qv({1})});
    LogVec top = {lg(2, Rat(2))};  // u = 2log2: [0,1]
    CHECK(psiS.psi_subdifferential(top).vertices() == std::vector<QVec>{qv({0}), qv({1})});
    LogVec above = {lg(2, Rat(3))};
    CHECK(psiS.psi_subdifferential(above).vertices() == std::vector<QVec>{qv({0})});

    // With no non-canonical finite place, psi_S is the support function.
    DivisorSpec plain;
    plain.rank = 1;
    plain.delta = seg;
    RoofFn support = finite_part_roof(plain);
    CHECK(support.psi(qv({7})).is_zero());
    CHECK(support.psi(qv({-7})) == LogValue(Rat(-14)));
}

TEST_CASE("weight splitting leaves the global roof unchanged") {
    DivisorSpec spec = cubic_spec();
    DivisorSpec split = spec;
    split.places.clear();
    split.places.push_back(spec.places[0]);
    split.places.push_back({Place::prime(2), Rat(1, 3), cubic_roof(2)});
    // A second entry for the same prime is invalid as a *place* set, so model
    // the split as weight 1/3 + 2/3 through two specs instead:
    DivisorSpec split2 = spec;
    split2.places[1].weight = Rat(1, 3);
    RoofFn a = global_roof(split2);
    split2.places[1].weight = Rat(2, 3);
    RoofFn b = global_roof(split2);
    RoofFn whole = global_roof(spec);
    RoofFn zero = RoofFn::zero(spec.delta);
    // theta_{1/3} + theta_{2/3} - theta_whole should be the zero... compare
    // pointwise: theta_whole(x) = a(x) + b(x) - theta_can(x) where the
    // canonical parts cancel; check on the lattice.
    for (long j = 0; j <= 3; ++j) {
        LogValue lhs = a.eval(qv({j})).value() + b.eval(qv({j})).value();
        LogValue rhs = whole.eval(qv({j})).value() + cubic_roof(0).eval(qv({j})).value() +
                       cubic_roof(3).eval(qv({j})).value();
        CHECK(lhs == rhs);
    }

    // Adding a canonical entry never changes the global roof.
    DivisorSpec padded = spec;
    padded.places.push_back({Place::prime(11), Rat(7, 2), CanonicalMetric{}});
    RoofFn same = global_roof(padded);
    for (long j = 0; j <= 3; ++j) CHECK(same.eval(qv({j})) == whole.eval(qv({j})));
}

TEST_CASE("single non-canonical place: max of the roof is -n psi(0)") {
    // With one concave non-canonical place the roof maximum is -n psi(0).
    Polytope seg = Polytope::hull(1, {qv({0}), qv({2})});
    std::vector<std::pair<QVec, LogValue>> g = {
        {qv({0}), LogValue()}, {qv({1}), lg(2, Rat(2))}, {qv({2}), lg(2, Rat(1))}};
    RoofFn local(seg, g);
    for (Rat w : {Rat(1), Rat(3, 2), Rat(2, 5)}) {
        DivisorSpec spec;
        spec.rank = 1;
        spec.delta = seg;
        spec.places.push_back({Place::prime(2), w, local});
        LogValue maxv = global_roof(spec).max_over_domain();
        LogValue expect = (-w) * local.psi(qv({0}));
        CHECK(maxv == expect);
    }
}
