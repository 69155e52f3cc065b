#pragma once

#include <array>
#include <optional>
#include <string>

#include "rmerton/scenario.hpp"

namespace rmerton {

enum class PortfolioRegime {
    BorrowToBuy,
    FullPosition,
    LendAndBuy,
    NoTrading,
    Shortsale,
    CorrelatedInterior,
    CorrelatedBoundary,
};

const char* to_string(PortfolioRegime r);

// Saddle point of the investment part g over [pi_lo, pi_hi] x B:
// worst-case (mu*, sigma*), optimal pi*, and the constant K = g(pi*; mu*, sigma*^2).
struct PortfolioSaddle {
    double pi_star = 0.0;
    double mu_star = 0.0;
    double sigma_star = 0.0;  // volatility, > 0
    double K = 0.0;
    PortfolioRegime regime = PortfolioRegime::NoTrading;
    bool mu_star_is_interval = false;          // mu* may take any value in [mu_lo, mu_hi]
    std::optional<std::array<double, 3>> betas;  // (beta1, beta2, beta3), rect case only

    double sigma2_star() const { return sigma_star * sigma_star; }
};

enum class ClampSide { AtLower, Interior, AtUpper };

const char* to_string(ClampSide c);

// Maximum of the consumption part f_i over [c_lo, c_hi].
struct ConsumptionOptimum {
    double c_star = 0.0;
    double f_value = 0.0;
    ClampSide clamped = ClampSide::Interior;
};

// g(x_pi; x_mu, x_sigma2) = (p-1)/2 sigma2 pi^2 + mu pi + r(1-pi)^+ - R(1-pi)^-,
// with p taken as 0 for log utility.
double eval_g(double x_pi, double x_mu, double x_sigma2, const Scenario& s);

// f_P(x_q; x_c) = (lambda/p) e^{-x_q} x_c^p - x_c,
// f_L(x_q; x_c) = lambda e^{-x_q} ln x_c - x_c  (with 0*ln := 0 when lambda = 0).
double eval_f(double x_q, double x_c, const Scenario& s);

// Unconstrained maximizer of f_i: lambda^{1/(1-p)} e^{x_q/(p-1)} (power),
// lambda e^{-x_q} (log).
double chat_unconstrained(double x_q, const Scenario& s);

PortfolioSaddle saddle_rect(const Scenario& s);
PortfolioSaddle saddle_correlated(const Scenario& s);
PortfolioSaddle solve_saddle(const Scenario& s);  // dispatch on the uncertainty variant

ConsumptionOptimum maximize_f(double x_q, const Scenario& s);

// h1(alpha) = 2 sigma_lo^2 + k(2-q) alpha^q - k q (mu_lo - r) alpha^{q-1}.
// Its unique positive root selects the interior worst-case in the correlated case.
double corr_h1(double alpha, const CorrelatedUncertainty& u, double r);

}  // namespace rmerton
