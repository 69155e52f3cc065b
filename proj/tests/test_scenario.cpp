#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "rmerton/scenario.hpp"

using namespace rmerton;

TEST_CASE("validate accepts the fixtures") {
    CHECK(validate(fixtures::borrow_to_buy()).ok());
    CHECK(validate(fixtures::shortsale()).ok());
    CHECK(validate(fixtures::correlated_interior()).ok());
    CHECK(validate(fixtures::log_base()).ok());
}

TEST_CASE("rate ordering") {
    Scenario s = fixtures::borrow_to_buy();
    s.rates = {0.02, 0.04};
    CHECK(validate(s).ok());
    s.rates = {0.04, 0.02};
    const auto res = validate(s);
    REQUIRE_FALSE(res.ok());
    CHECK(res.violations[0].field == "rates.R");
}

TEST_CASE("portfolio box must bracket [0, 1]") {
    Scenario s = fixtures::borrow_to_buy();
    s.constraints.pi_lo = 0.5;
    const auto res = validate(s);
    REQUIRE_FALSE(res.ok());
    CHECK(res.violations[0].field == "constraints.pi_lo");

    s = fixtures::borrow_to_buy();
    s.constraints.pi_hi = 0.5;
    CHECK_FALSE(validate(s).ok());
}

TEST_CASE("power exponent bounds") {
    Scenario s = fixtures::borrow_to_buy();
    for (double bad : {0.0, 1.0, 1.5}) {
        s.utility.p = bad;
        CHECK_FALSE(validate(s).ok());
    }
    for (double good : {-3.0, 0.3, 0.99}) {
        s.utility.p = good;
        CHECK(validate(s).ok());
    }
}

TEST_CASE("lambda = 0 needs a pinned consumption box") {
    Scenario s = fixtures::borrow_to_buy();
    s.utility.lambda = 0.0;
    CHECK_FALSE(validate(s).ok());
    s.constraints.c_lo = s.constraints.c_hi = 0.05;
    CHECK(validate(s).ok());
}

TEST_CASE("degenerate rect volatility is rejected") {
    Scenario s = fixtures::borrow_to_buy();
    s.uncertainty = RectUncertainty{0.1, 0.12, 0.0, 0.0};
    CHECK_FALSE(validate(s).ok());
}

TEST_CASE("load_scenario parses a minimal power document") {
    const char* doc = R"({
        "utility": {"kind": "power", "p": 0.5, "lambda": 1.0, "rho": 0.1},
        "rates": {"r": 0.02, "R": 0.04},
        "constraints": {"pi_lo": -1.0, "pi_hi": 2.0, "c_lo": 0.01, "c_hi": 0.8},
        "uncertainty": {"variant": "rect", "mu_lo": 0.10, "mu_hi": 0.12,
                        "sigma_lo": 0.1, "sigma_hi": 0.2},
        "T": 2.0, "x0": 1.0
    })";
    const Scenario s = load_scenario(doc);
    CHECK(s == fixtures::borrow_to_buy());
}

TEST_CASE("infinite bounds round-trip as tokens") {
    const char* doc = R"({
        "utility": {"kind": "log", "lambda": 1.0, "rho": 0.1},
        "rates": {"r": 0.02, "R": 0.04},
        "constraints": {"pi_lo": "-inf", "pi_hi": "inf", "c_lo": 0.0, "c_hi": "inf"},
        "uncertainty": {"variant": "rect", "mu_lo": 0.1, "mu_hi": 0.12,
                        "sigma_lo": 0.1, "sigma_hi": 0.2},
        "T": 1.0, "x0": 1.0
    })";
    const Scenario s = load_scenario(doc);
    CHECK(s.constraints.pi_hi == kInf);
    CHECK(s.constraints.pi_lo == -kInf);
    CHECK(s.constraints.c_hi == kInf);
    CHECK(load_scenario(save_scenario(s)) == s);
}

TEST_CASE("missing fields are named") {
    const char* doc = R"({
        "utility": {"kind": "power", "p": 0.5, "lambda": 1.0, "rho": 0.1},
        "rates": {"r": 0.02, "R": 0.04},
        "constraints": {"pi_lo": -1.0, "pi_hi": 2.0, "c_lo": 0.01, "c_hi": 0.8},
        "uncertainty": {"variant": "rect", "mu_lo": 0.10, "mu_hi": 0.12,
                        "sigma_lo": 0.1, "sigma_hi": 0.2},
        "x0": 1.0
    })";
    CHECK_THROWS_WITH_AS(load_scenario(doc), doctest::Contains("\"T\""), ParseError);
}

TEST_CASE("malformed JSON and invalid scenarios throw distinct errors") {
    CHECK_THROWS_AS(load_scenario("{ not json"), ParseError);
    Scenario s = fixtures::borrow_to_buy();
    s.rates = {0.05, 0.02};
    CHECK_THROWS_AS(load_scenario(save_scenario(s)), ValidationError);
}

TEST_CASE("save/load round trip is bit-exact on random scenarios") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Scenario s;
        const bool log_kind = unit(rng) < 0.3;
        s.utility.kind = log_kind ? UtilityKind::Log : UtilityKind::Power;
        // p is meaningful only for power; the document omits it for log
        if (!log_kind)
            s.utility.p = unit(rng) < 0.5 ? -3.0 * unit(rng) - 0.1 : 0.9 * unit(rng) + 0.05;
        s.utility.lambda = 2.0 * unit(rng);
        s.utility.rho = 0.2 * unit(rng);
        s.rates.r = 0.05 * unit(rng);
        s.rates.R = s.rates.r + 0.05 * unit(rng);
        s.constraints.pi_lo = unit(rng) < 0.2 ? -kInf : -2.0 * unit(rng);
        s.constraints.pi_hi = unit(rng) < 0.2 ? kInf : 1.0 + 2.0 * unit(rng);
        s.constraints.c_lo = 0.2 * unit(rng);
        s.constraints.c_hi = unit(rng) < 0.2 ? kInf : s.constraints.c_lo + unit(rng);
        if (unit(rng) < 0.3) {
            s.rates.R = s.rates.r;
            s.constraints.pi_lo = -kInf;
            s.constraints.pi_hi = kInf;
            s.uncertainty = CorrelatedUncertainty{0.1 * unit(rng), 0.3 * unit(rng),
                                                  0.5 + unit(rng), 0.1 + 0.8 * unit(rng),
                                                  0.5 * unit(rng)};
        } else {
            const double mu_lo = 0.2 * unit(rng) - 0.05;
            const double sigma_lo = 0.3 * unit(rng);
            s.uncertainty = RectUncertainty{mu_lo, mu_lo + 0.1 * unit(rng), sigma_lo,
                                            sigma_lo + 0.2 * unit(rng) + 0.01};
        }
        s.T = 0.5 + 10.0 * unit(rng);
        s.x0 = 0.5 + unit(rng);
        REQUIRE(validate(s).ok());
        CHECK(load_scenario(save_scenario(s)) == s);
    }
}
