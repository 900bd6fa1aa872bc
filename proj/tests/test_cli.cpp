#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "toric/builders.hpp"
#include "toric/io.hpp"

using namespace toric;

namespace {

QVec qv(std::initializer_list<long> xs) {
    QVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

#ifndef TORICMIN_BIN
#define TORICMIN_BIN "toricmin"
#endif

int run_cli(const std::string& args, const std::string& out_file = "/dev/null") {
    std::string cmd = std::string(TORICMIN_BIN) + " " + args + " > " + out_file + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<DivisorSpec> family_grid() {
    std::vector<DivisorSpec> specs;
    specs.push_back(canonical(standard_simplex(2)));
    {
        std::map<QVec, Rat, decltype(&lex_less)> alpha(&lex_less);
        for (const auto& m : standard_simplex(2).lattice_points()) alpha[m] = 1;
        specs.push_back(lp_metric(standard_simplex(2), Rat(2), alpha).spec);
        specs.push_back(lp_metric(standard_simplex(2), Rat(3), alpha).spec);
    }
    {
        std::vector<std::pair<QVec, Rat>> ell = {
            {qv({-1, -1}), Rat(-1)}, {qv({1, 0}), Rat(0)}, {qv({0, 1}), Rat(0)}};
        specs.push_back(wps_metric(ell, {Rat(1, 2), Rat(1, 2), Rat(1, 2)}).spec);
    }
    specs.push_back(toric_bundle(1, {1, 2}).spec);
    specs.push_back(hirzebruch(2, 1).spec);
    {
        SubtorusData d;
        d.exponents = {qv({1}), qv({2}), qv({3})};
        d.coords = {Rat(1), Rat(4), Rat(1, 3), Rat(1, 2)};
        specs.push_back(subtorus_canonical(d).spec);
        specs.push_back(subtorus_fs(d).spec);
    }
    specs.push_back(prescribe({Rat(2), Rat(1), Rat(0)}, Rat(4)).spec);
    return specs;
}

}  // namespace

TEST_CASE("every builder output parses and validates across the grid") {
    for (const auto& spec : family_grid()) {
        Json j = divisor_to_json(spec);
        DivisorSpec back = divisor_from_json(j);
        CHECK(validate(back).ok());
        CHECK(divisor_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("text and json outputs carry identical canonical forms") {
    SubtorusData d;
    d.exponents = {qv({1}), qv({2}), qv({3})};
    d.coords = {Rat(1), Rat(4), Rat(1, 3), Rat(1, 2)};
    MinimaReport rep = successive_minima(subtorus_canonical(d).spec);
    Json j = minima_report_to_json(rep);
    for (std::size_t i = 0; i < rep.mu.size(); ++i)
        CHECK(j["mu"][i]["text"].get<std::string>() == rep.mu[i].str());
}

TEST_CASE("cli binary: build then minima round trip") {
    int rc = run_cli("build subtorus --exponents \"1;2;3\" --coords \"1,4,1/3,1/2\"",
                     "/tmp/toricmin_test_cubic.json");
    REQUIRE(rc == 0);
    rc = run_cli("minima /tmp/toricmin_test_cubic.json", "/tmp/toricmin_test_minima.txt");
    REQUIRE(rc == 0);
    std::string out = slurp("/tmp/toricmin_test_minima.txt");
    CHECK(out.find("7/3\xc2\xb7log(2)+1/2\xc2\xb7log(3)") != std::string::npos);
}

TEST_CASE("cli binary: exit code contract") {
    {
        std::ofstream bad("/tmp/toricmin_test_bad.json");
        bad << "{ not json";
    }
    CHECK(run_cli("minima /tmp/toricmin_test_bad.json") == 2);

    {
        // Valid JSON, invalid spec: roof domain mismatch.
        DivisorSpec spec = canonical(standard_simplex(1));
        spec.places.push_back(
            {Place::prime(2), Rat(1), RoofFn::zero(Polytope::hull(1, {qv({0}), qv({2})}))});
        std::ofstream f("/tmp/toricmin_test_invalid.json");
        f << divisor_to_json(spec).dump();
    }
    CHECK(run_cli("minima /tmp/toricmin_test_invalid.json") == 3);
    CHECK(run_cli("validate /tmp/toricmin_test_invalid.json") == 3);

    // Smooth file on the exact path.
    CHECK(run_cli("build subtorus-fs --exponents \"1;2\" --coords \"1,1/4,1/2\"",
                  "/tmp/toricmin_test_fs.json") == 0);
    CHECK(run_cli("minima /tmp/toricmin_test_fs.json") == 3);
    CHECK(run_cli("solve /tmp/toricmin_test_fs.json") == 0);

    // Exact file on the smooth path.
    CHECK(run_cli("solve /tmp/toricmin_test_cubic.json") == 3);
}

TEST_CASE("cli binary: plots are deterministic byte for byte") {
    REQUIRE(run_cli("build subtorus --exponents \"1,0;0,1;1,1\" --coords \"1,2,4,1\"",
                    "/tmp/toricmin_test_quadric.json") == 0);
    REQUIRE(run_cli("plot /tmp/toricmin_test_quadric.json --out /tmp/toricmin_test_a.svg") == 0);
    REQUIRE(run_cli("plot /tmp/toricmin_test_quadric.json --out /tmp/toricmin_test_b.svg") == 0);
    std::string a = slurp("/tmp/toricmin_test_a.svg");
    CHECK(!a.empty());
    CHECK(a == slurp("/tmp/toricmin_test_b.svg"));
    CHECK(a.find("3/2\xc2\xb7log(2)") != std::string::npos);  // labeled refinement vertex

    REQUIRE(run_cli("plot /tmp/toricmin_test_cubic.json --out /tmp/toricmin_test.csv") == 0);
    std::string csv = slurp("/tmp/toricmin_test.csv");
    CHECK(csv.find("series,x1,value") != std::string::npos);
    CHECK(csv.find("global") != std::string::npos);

    // Rank above two is rejected with a clear message.
    {
        std::ofstream f("/tmp/toricmin_test_rank3.json");
        f << divisor_to_json(canonical(standard_simplex(3))).dump();
    }
    CHECK(run_cli("plot /tmp/toricmin_test_rank3.json --out /tmp/toricmin_test_r3.svg") == 3);
}
