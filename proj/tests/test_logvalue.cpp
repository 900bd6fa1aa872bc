#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "toric/logvalue.hpp"

using namespace toric;

TEST_CASE("log of rational distributes over prime factors") {
    CHECK(LogValue::log_of_rational(Rat(1), Rat(5)).is_zero());

    LogValue four = LogValue::log_of_rational(Rat(4));
    CHECK(four == LogValue::log_prime(2, Rat(2)));

    LogValue half = LogValue::log_of_rational(Rat(1, 2));
    CHECK(half == LogValue::log_prime(2, Rat(-1)));

    CHECK_THROWS_AS(LogValue::log_of_rational(Rat(0)), std::domain_error);
    CHECK_THROWS_AS(LogValue::log_of_rational(Rat(-3)), std::domain_error);
}

TEST_CASE("ring operations restore canonical form") {
    LogValue a = LogValue::log_prime(2, Rat(2)) + LogValue::log_prime(2, Rat(1, 3)) +
                 LogValue::log_prime(3, Rat(1, 2));
    LogValue expect = LogValue::log_prime(2, Rat(7, 3)) + LogValue::log_prime(3, Rat(1, 2));
    CHECK(a == expect);

    CHECK(a + LogValue() == a);
    CHECK((Rat(0) * a).is_zero());
    CHECK((a - a).is_zero());
    CHECK(lv_sign(a + Rat(-1) * a) == 0);
}

TEST_CASE("sign via interval evaluation") {
    LogValue x = LogValue::log_prime(2, Rat(7, 6)) - LogValue::log_prime(3, Rat(1, 2));
    CHECK(x.sign() == 1);

    LogValue y = LogValue::log_prime(3, Rat(1, 2)) - LogValue::log_prime(2, Rat(1));
    CHECK(y.sign() == -1);

    CHECK((LogValue::log_prime(2, Rat(1)) - LogValue::log_prime(2, Rat(1))).sign() == 0);

    // Nearly-cancelling combination: log(2^a 3^b ...) vs close rational.
    LogValue tight = LogValue::log_of_rational(Rat(1024)) - LogValue::log_of_rational(Rat(1023)) -
                     LogValue(Rat(1, 1023));
    // log(1024/1023) < 1/1023, so this is negative but tiny (~ 4.8e-7).
    CHECK(tight.sign() == -1);
}

TEST_CASE("interval evaluation encloses the value") {
    LogValue a = LogValue::log_prime(2, Rat(7, 3)) + LogValue::log_prime(3, Rat(1, 2));
    auto [lo, hi] = a.interval(64);
    CHECK(lo <= 2.1666495656405940);
    CHECK(hi >= 2.1666495656405939);
    CHECK(hi - lo < 1e-12);

    auto [zlo, zhi] = LogValue().interval(64);
    CHECK(zlo == 0.0);
    CHECK(zhi == 0.0);

    auto [llo, lhi] = LogValue::log_prime(2, Rat(1)).interval(64);
    CHECK(llo <= 0.6931471805599453);
    CHECK(lhi >= 0.6931471805599453);

    CHECK_THROWS_AS(a.interval(8), std::domain_error);
}

TEST_CASE("total order matches the real embedding on random values") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-12, 12);
    std::uniform_int_distribution<int> den(1, 9);
    auto rand_lv = [&]() {
        LogValue v(Rat(num(rng), den(rng)));
        for (std::uint64_t p : {2, 3, 5}) v += LogValue::log_prime(p, Rat(num(rng), den(rng)));
        return v;
    };
    for (int i = 0; i < 200; ++i) {
        LogValue a = rand_lv(), b = rand_lv();
        int c = lv_cmp(a, b);
        double da = a.approx(), db = b.approx();
        if (c < 0) CHECK(da < db + 1e-9);
        if (c > 0) CHECK(da > db - 1e-9);
        if (c == 0) CHECK(a == b);
    }
}

TEST_CASE("text round trip is the identity") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    for (int i = 0; i < 100; ++i) {
        LogValue v(Rat(num(rng), den(rng)));
        for (std::uint64_t p : {2, 3, 7}) v += LogValue::log_prime(p, Rat(num(rng), den(rng)));
        CHECK(LogValue::parse(v.str()) == v);
    }
    CHECK(LogValue::parse("0").is_zero());
    CHECK(LogValue::parse("7/3·log(2)+1/2·log(3)") ==
          LogValue::log_prime(2, Rat(7, 3)) + LogValue::log_prime(3, Rat(1, 2)));
    CHECK(LogValue::parse("-log(2)") == LogValue::log_prime(2, Rat(-1)));
}

TEST_CASE("extended values absorb -infinity") {
    ExtLogValue inf = ExtLogValue::neg_infinity();
    ExtLogValue one{LogValue(Rat(1))};
    CHECK(!(inf + one).finite());
    CHECK(inf.cmp(one) < 0);
    CHECK(one.cmp(inf) > 0);
    CHECK(inf.cmp(ExtLogValue::neg_infinity()) == 0);
}

TEST_CASE("sign determination escalates precision on near cancellations") {
    // q agrees with log 2 to 40 decimal digits; the difference needs ~133
    // bits, so the first two interval rounds straddle zero.
    Rat q(Int("6931471805599453094172321214581765680755"),
          boost::multiprecision::pow(Int(10), 40));
    LogValue diff = LogValue(q) - LogValue::log_prime(2, Rat(1));
    auto [lo, hi] = diff.interval(64);
    CHECK(lo < 0);
    CHECK(hi > 0);  // undecidable at 64 bits
    CHECK(diff.sign() == -1);

    // A ceiling below the starting precision reports rather than guessing.
    CHECK_THROWS_AS(diff.sign(32), PrecisionExhausted);
}

TEST_CASE("prime checks guard log coefficients") {
    CHECK_THROWS(LogValue::log_prime(4, Rat(1)));
    CHECK_THROWS(LogValue::log_prime(1, Rat(1)));
    CHECK_NOTHROW(LogValue::log_prime(1000003, Rat(1)));
}
