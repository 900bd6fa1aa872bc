#include <catch2/catch_amalgamated.hpp>

#include "toric/builders.hpp"
#include "toric/io.hpp"

using namespace toric;

namespace {

QVec qv(std::initializer_list<long> xs) {
    QVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

DivisorSpec cubic() {
    SubtorusData d;
    d.exponents = {qv({1}), qv({2}), qv({3})};
    d.coords = {Rat(1), Rat(4), Rat(1, 3), Rat(1, 2)};
    return subtorus_canonical(d).spec;
}

}  // namespace

TEST_CASE("logvalue json round trip is bit exact") {
    LogValue v = LogValue::log_prime(2, Rat(7, 3)) + LogValue::log_prime(3, Rat(-1, 2)) +
                 LogValue(Rat(-5, 7));
    Json j = io::logvalue_to_json(v);
    CHECK(io::logvalue_from_json(j) == v);
    CHECK(j.dump() == io::logvalue_to_json(io::logvalue_from_json(j)).dump());
}

TEST_CASE("divisor file round trip preserves the invariants") {
    DivisorSpec spec = cubic();
    Json j = divisor_to_json(spec);
    DivisorSpec back = divisor_from_json(j);
    CHECK(back.rank == spec.rank);
    CHECK(back.delta == spec.delta);
    CHECK(back.places.size() == spec.places.size());
    CHECK(divisor_to_json(back).dump() == j.dump());
    CHECK(essential_minimum(back) == essential_minimum(spec));
}

TEST_CASE("smooth and psi metrics round trip") {
    SubtorusData d;
    d.exponents = {qv({1}), qv({2})};
    d.coords = {Rat(1), Rat(1, 4), Rat(1, 2)};
    DivisorSpec spec = subtorus_fs(d).spec;
    Json j = divisor_to_json(spec);
    DivisorSpec back = divisor_from_json(j);
    CHECK(divisor_to_json(back).dump() == j.dump());
    CHECK(smooth_entry(back).has_value());

    // A psi entry with the non-concave example data.
    auto half = [](long lo, bool up) {
        return Halfspace::canonical({Rat(up ? 1 : -1)}, Rat(up ? lo : -lo));
    };
    std::vector<PACell> cells;
    cells.push_back({{half(0, false)}, qv({1}), LogValue()});
    cells.push_back({{half(0, true), half(99, false)}, qv({0}), LogValue()});
    cells.push_back({{half(99, true), half(100, false)}, qv({1}), LogValue(Rat(-99))});
    cells.push_back({{half(100, true), half(101, false)}, qv({-1}), LogValue(Rat(101))});
    cells.push_back({{half(101, true)}, qv({0}), LogValue()});
    DivisorSpec ex;
    ex.rank = 1;
    ex.delta = Polytope::hull(1, {qv({0}), qv({1})});
    ex.places.push_back({Place::infinite(), Rat(1), CellwisePA(1, cells)});
    Json ej = divisor_to_json(ex);
    DivisorSpec eback = divisor_from_json(ej);
    CHECK(divisor_to_json(eback).dump() == ej.dump());
    CHECK(essential_minimum(eback).is_zero());
    CHECK(validate(eback).ok());
}

TEST_CASE("unknown fields are rejected") {
    Json j = divisor_to_json(cubic());
    j["surprise"] = 1;
    CHECK_THROWS_AS(divisor_from_json(j), ParseError);

    Json j2 = divisor_to_json(cubic());
    j2["places"][0]["metric"] = Json{{"roof", io::roof_to_json(RoofFn::zero(cubic().delta))},
                                     {"psi", 1}};
    CHECK_THROWS_AS(divisor_from_json(j2), ParseError);

    Json j3 = divisor_to_json(cubic());
    j3["flags"].erase("ample");
    CHECK_THROWS_AS(divisor_from_json(j3), ParseError);

    Json j4 = divisor_to_json(cubic());
    j4["places"][0]["place"] = "q:2";
    CHECK_THROWS_AS(divisor_from_json(j4), ParseError);
}

TEST_CASE("rationals parse strictly from strings") {
    CHECK(io::rat_from_json(Json("7/3")) == Rat(7, 3));
    CHECK(io::rat_from_json(Json("-1/2")) == Rat(-1, 2));
    CHECK(io::rat_from_json(Json("0.25")) == Rat(1, 4));
    CHECK_THROWS_AS(io::rat_from_json(Json(0.25)), ParseError);
    CHECK_THROWS_AS(io::rat_from_json(Json("x")), ParseError);
}

TEST_CASE("reports serialize with float images in _approx fields") {
    MinimaReport rep = successive_minima(cubic());
    Json j = minima_report_to_json(rep);
    CHECK(j["mu"][0]["text"] == rep.mu[0].str());
    CHECK(std::abs(j["mu"][0]["_approx"].get<double>() - rep.mu[0].approx()) < 1e-15);
    CHECK(j["ess"]["logs"]["2"] == "7/3");
    CHECK(j["ess"]["logs"]["3"] == "1/2");
}
