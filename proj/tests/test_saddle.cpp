#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rmerton/saddle.hpp"

using namespace rmerton;

namespace {

// Brute 1-D maximization of f over [c_lo, min(c_hi, span)], frozen-step grid.
ConsumptionOptimum grid_max_f(double x_q, const Scenario& s, double step = 1e-6) {
    const double hi = std::isinf(s.constraints.c_hi)
                          ? std::max(4.0 * chat_unconstrained(x_q, s), 1.0)
                          : s.constraints.c_hi;
    double best_c = s.constraints.c_lo;
    double best_f = -kInf;
    for (double c = s.constraints.c_lo; c <= hi + 0.5 * step; c += step) {
        const double f = eval_f(x_q, std::min(c, hi), s);
        if (f > best_f) {
            best_f = f;
            best_c = std::min(c, hi);
        }
    }
    return {best_c, best_f, ClampSide::Interior};
}

Scenario rect_from(double p, double r, double R, double mu_lo, double mu_hi, double sigma_hi,
                   double pi_lo, double pi_hi) {
    Scenario s = fixtures::borrow_to_buy();
    s.utility.p = p;
    s.rates = {r, R};
    s.constraints.pi_lo = pi_lo;
    s.constraints.pi_hi = pi_hi;
    s.uncertainty = RectUncertainty{mu_lo, mu_hi, 0.5 * sigma_hi, sigma_hi};
    return s;
}

}  // namespace

TEST_CASE("eval_g closed form") {
    Scenario s = fixtures::borrow_to_buy();
    SUBCASE("pi = 0 earns the lending rate") { CHECK(eval_g(0.0, 0.3, 0.5, s) == s.rates.r); }
    SUBCASE("pi = 1 drops the bank terms") {
        const double p = s.utility.p;
        CHECK(eval_g(1.0, 0.1, 0.04, s) == doctest::Approx(0.1 + 0.5 * (p - 1.0) * 0.04).epsilon(1e-15));
    }
    SUBCASE("leveraged position pays the borrowing rate") {
        // 0.5*(-0.5)*0.04*4 + 0.2 + 0 - 0.04 = 0.12
        CHECK(eval_g(2.0, 0.10, 0.04, s) == doctest::Approx(0.12).epsilon(1e-15));
    }
}

TEST_CASE("saddle_rect: borrow-to-buy with binding cap") {
    const auto sp = saddle_rect(fixtures::borrow_to_buy());
    REQUIRE(sp.betas.has_value());
    CHECK((*sp.betas)[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(sp.regime == PortfolioRegime::BorrowToBuy);
    CHECK(sp.pi_star == 2.0);
    CHECK(sp.mu_star == 0.10);
    CHECK(sp.sigma_star == 0.2);
    CHECK_FALSE(sp.mu_star_is_interval);
    CHECK(sp.K == doctest::Approx(0.12).epsilon(1e-15));
}

TEST_CASE("saddle_rect: no-trading band") {
    const auto sp = saddle_rect(fixtures::no_trading());
    CHECK(sp.regime == PortfolioRegime::NoTrading);
    CHECK(sp.pi_star == 0.0);
    CHECK(sp.K == 0.02);
    CHECK(sp.mu_star_is_interval);
    CHECK(sp.mu_star == 0.02);  // canonical representative clamp(r, mu_lo, mu_hi)
}

TEST_CASE("saddle_rect: shortsale") {
    const auto sp = saddle_rect(fixtures::shortsale());
    REQUIRE(sp.betas.has_value());
    CHECK((*sp.betas)[2] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(sp.regime == PortfolioRegime::Shortsale);
    CHECK(sp.pi_star == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(sp.mu_star == 0.01);
    CHECK(sp.K == doctest::Approx(0.0225).epsilon(1e-13));
}

TEST_CASE("saddle_rect rejects a flat volatility band") {
    Scenario s = fixtures::borrow_to_buy();
    s.uncertainty = RectUncertainty{0.1, 0.12, 0.0, 0.0};
    CHECK_THROWS_AS(saddle_rect(s), std::invalid_argument);
}

TEST_CASE("saddle_correlated rejects a degenerate volatility set") {
    Scenario s = fixtures::correlated_interior();
    auto& u = std::get<CorrelatedUncertainty>(s.uncertainty);
    u.sigma_lo = 0.0;
    u.alpha_hi = 0.0;
    CHECK_THROWS_AS(saddle_correlated(s), std::invalid_argument);
}

TEST_CASE("saddle_rect: infinite pi_hi keeps the Merton point") {
    Scenario s = fixtures::borrow_to_buy();
    s.constraints.pi_hi = kInf;
    const auto sp = saddle_rect(s);
    CHECK(sp.regime == PortfolioRegime::BorrowToBuy);
    CHECK(sp.pi_star == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("K equals eval_g at the saddle across random scenarios") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double p = unit(rng) < 0.5 ? -2.0 * unit(rng) - 0.1 : 0.85 * unit(rng) + 0.05;
        const double r = 0.06 * unit(rng);
        const double R = r + 0.05 * unit(rng);
        const double mu_lo = -0.1 + 0.25 * unit(rng);
        const double mu_hi = mu_lo + 0.1 * unit(rng);
        const double sigma_hi = 0.05 + 0.4 * unit(rng);
        const double pi_lo = unit(rng) < 0.25 ? -kInf : -3.0 * unit(rng);
        const double pi_hi = unit(rng) < 0.25 ? kInf : 1.0 + 3.0 * unit(rng);
        Scenario s = rect_from(p, r, R, mu_lo, mu_hi, sigma_hi, pi_lo, pi_hi);
        REQUIRE(validate(s).ok());
        const auto sp = saddle_rect(s);
        REQUIRE(sp.betas.has_value());
        const auto& b = *sp.betas;
        CHECK(b[0] <= b[1]);
        CHECK(b[1] <= b[2]);
        CHECK(sp.sigma_star == sigma_hi);
        CHECK(sp.pi_star >= pi_lo);
        CHECK(sp.pi_star <= pi_hi);
        const double g = eval_g(sp.pi_star, sp.mu_star, sp.sigma2_star(), s);
        CHECK(std::abs(sp.K - g) <= 1e-13 * std::max(1.0, std::abs(sp.K)));
    }
}

TEST_CASE("pi* is nondecreasing when mu_lo sweeps upward") {
    // the staircase in beta1, beta2, beta3
    Scenario s = rect_from(0.5, 0.02, 0.05, 0.0, 0.3, 0.2, -1.0, 3.0);
    double prev = -kInf;
    for (int i = 0; i <= 300; ++i) {
        auto& u = std::get<RectUncertainty>(s.uncertainty);
        u.mu_lo = -0.05 + 0.35 * i / 300.0;
        if (u.mu_lo > u.mu_hi) break;
        const auto sp = saddle_rect(s);
        CHECK(sp.pi_star >= prev - 1e-12);
        prev = sp.pi_star;
    }
}

TEST_CASE("regime boundaries agree in value") {
    // beta2 = 1 (up to rounding of sigma_hi^2): full-position and lend-and-buy
    // formulas coincide, so the assignment is value-neutral
    const double s2 = 0.2 * 0.2;
    Scenario s = rect_from(0.5, 0.02, 0.05, 0.02 + 0.5 * s2, 0.1, 0.2, -1.0, 3.0);
    const auto sp = saddle_rect(s);
    CHECK(sp.pi_star == doctest::Approx(1.0).epsilon(1e-14));
    const double mu_lo = std::get<RectUncertainty>(s.uncertainty).mu_lo;
    const double k_full = mu_lo - 0.5 * 0.5 * s2;
    const double k_lend = 0.02 + (mu_lo - 0.02) * (mu_lo - 0.02) / (2.0 * 0.5 * s2);
    CHECK(k_full == doctest::Approx(k_lend).epsilon(1e-14));
    CHECK(sp.K == doctest::Approx(k_full).epsilon(1e-13));
}

TEST_CASE("maximize_f power examples") {
    Scenario s = fixtures::borrow_to_buy();
    s.utility = {UtilityKind::Power, 0.5, 1.0, 0.1};
    s.constraints.c_lo = 0.0;
    s.constraints.c_hi = kInf;
    SUBCASE("interior") {
        const auto m = maximize_f(0.0, s);
        CHECK(m.c_star == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.f_value == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.clamped == ClampSide::Interior);
    }
    SUBCASE("clamped at the cap, against a brute grid") {
        s.constraints.c_hi = 0.5;
        const auto m = maximize_f(0.0, s);
        CHECK(m.c_star == 0.5);
        CHECK(m.clamped == ClampSide::AtUpper);
        CHECK(m.f_value == doctest::Approx(2.0 * std::sqrt(0.5) - 0.5).epsilon(1e-14));
        const auto brute = grid_max_f(0.0, s);
        CHECK(m.f_value == doctest::Approx(brute.f_value).epsilon(1e-9));
        CHECK(m.c_star == doctest::Approx(brute.c_star).epsilon(2e-6));
    }
}

TEST_CASE("maximize_f log example") {
    Scenario s = fixtures::log_base();
    s.utility.lambda = 1.0;
    s.constraints.c_lo = 0.0;
    s.constraints.c_hi = kInf;
    const auto m = maximize_f(0.0, s);
    CHECK(m.c_star == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.f_value == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(m.clamped == ClampSide::Interior);
}

TEST_CASE("maximize_f matches the brute grid across q values") {
    Scenario s = fixtures::borrow_to_buy();
    for (double x_q : {-1.0, -0.25, 0.0, 0.4, 2.0}) {
        const auto m = maximize_f(x_q, s);
        const auto brute = grid_max_f(x_q, s);
        CHECK(m.f_value >= brute.f_value - 1e-12);
        CHECK(std::abs(m.f_value - brute.f_value) < 1e-9);
    }
}

TEST_CASE("zero consumption with diverging utility is rejected") {
    Scenario s = fixtures::borrow_to_buy();
    s.utility.p = -1.0;
    s.constraints.c_lo = 0.0;
    s.constraints.c_hi = 0.0;
    CHECK_THROWS_AS(maximize_f(0.0, s), std::invalid_argument);
    s.utility = {UtilityKind::Log, 0.0, 1.0, 0.1};
    CHECK_THROWS_AS(maximize_f(0.0, s), std::invalid_argument);
}

TEST_CASE("saddle_correlated: interior root") {
    const Scenario s = fixtures::correlated_interior();
    const auto sp = saddle_correlated(s);
    // h1(alpha) = 1.5 sqrt(alpha) - 0.05 / sqrt(alpha) = 0  =>  alpha0 = 1/30
    const double alpha0 = 1.0 / 30.0;
    CHECK(sp.regime == PortfolioRegime::CorrelatedInterior);
    CHECK(sp.mu_star == doctest::Approx(0.12 + alpha0).epsilon(1e-12));
    CHECK(sp.sigma2_star() == doctest::Approx(std::sqrt(alpha0)).epsilon(1e-12));
    CHECK(sp.pi_star ==
          doctest::Approx((sp.mu_star - 0.02) / (0.5 * sp.sigma2_star())).epsilon(1e-12));
    CHECK(sp.pi_star == doctest::Approx(1.46059).epsilon(1e-5));
    CHECK(std::abs(corr_h1(sp.mu_star - 0.12, s.correlated(), s.rates.r)) < 1e-12);
}

TEST_CASE("saddle_correlated: zero-drift branch") {
    Scenario s = fixtures::correlated_interior();
    std::get<CorrelatedUncertainty>(s.uncertainty).mu_lo = 0.01;  // mu_lo - r = -0.01
    const auto sp = saddle_correlated(s);
    CHECK(sp.pi_star == 0.0);
    CHECK(sp.mu_star == s.rates.r);
    const auto& u = s.correlated();
    CHECK(sp.sigma2_star() ==
          doctest::Approx(u.sigma_lo * u.sigma_lo + u.k * std::pow(0.01, u.q_exp)).epsilon(1e-14));
    CHECK(sp.regime == PortfolioRegime::CorrelatedInterior);
    CHECK(sp.K == s.rates.r);
}

TEST_CASE("saddle_correlated: cap branch when the drift edge is large") {
    Scenario s = fixtures::correlated_interior();
    auto& u = std::get<CorrelatedUncertainty>(s.uncertainty);
    u.mu_lo = 2.0;  // mu_lo - r = 1.98 >= alpha_hat = 1.5
    const auto sp = saddle_correlated(s);
    CHECK(sp.mu_star == doctest::Approx(u.mu_lo + u.alpha_hi).epsilon(1e-14));
    CHECK(sp.regime == PortfolioRegime::CorrelatedBoundary);
}

TEST_CASE("saddle_correlated: shortsale side takes the cap") {
    Scenario s = fixtures::correlated_interior();
    std::get<CorrelatedUncertainty>(s.uncertainty).mu_lo = -0.6;  // mu_lo - r <= -alpha_hi
    const auto sp = saddle_correlated(s);
    CHECK(sp.mu_star == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(sp.pi_star < 0.0);
    CHECK(sp.regime == PortfolioRegime::CorrelatedBoundary);
}

TEST_CASE("saddle_correlated enforces its preconditions") {
    Scenario s = fixtures::correlated_interior();
    s.rates.R = 0.03;
    CHECK_THROWS_AS(saddle_correlated(s), std::invalid_argument);
    s = fixtures::correlated_interior();
    s.constraints.pi_hi = 5.0;
    CHECK_THROWS_AS(saddle_correlated(s), std::invalid_argument);
}

TEST_CASE("h1 is strictly increasing on the bracket") {
    const Scenario s = fixtures::correlated_interior();
    const auto& u = s.correlated();
    double prev = -kInf;
    for (int i = 1; i <= 200; ++i) {
        const double a = u.alpha_hi * i / 200.0;
        const double h = corr_h1(a, u, s.rates.r);
        CHECK(h > prev);
        prev = h;
    }
}
