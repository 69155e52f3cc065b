#include "rmerton/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmerton {

const char* to_string(PortfolioRegime r) {
    switch (r) {
        case PortfolioRegime::BorrowToBuy: return "borrow_to_buy";
        case PortfolioRegime::FullPosition: return "full_position";
        case PortfolioRegime::LendAndBuy: return "lend_and_buy";
        case PortfolioRegime::NoTrading: return "no_trading";
        case PortfolioRegime::Shortsale: return "shortsale";
        case PortfolioRegime::CorrelatedInterior: return "correlated_interior";
        case PortfolioRegime::CorrelatedBoundary: return "correlated_boundary";
    }
    return "?";
}

const char* to_string(ClampSide c) {
    switch (c) {
        case ClampSide::AtLower: return "at_lower";
        case ClampSide::Interior: return "interior";
        case ClampSide::AtUpper: return "at_upper";
    }
    return "?";
}

double eval_g(double x_pi, double x_mu, double x_sigma2, const Scenario& s) {
    const double p = s.utility.exponent();
    const double one_minus_pi = 1.0 - x_pi;
    const double pos = std::max(one_minus_pi, 0.0);
    const double neg = std::max(-one_minus_pi, 0.0);
    return 0.5 * (p - 1.0) * x_sigma2 * x_pi * x_pi + x_mu * x_pi + s.rates.r * pos -
           s.rates.R * neg;
}

double eval_f(double x_q, double x_c, const Scenario& s) {
    const double lambda = s.utility.lambda;
    if (s.utility.kind == UtilityKind::Power) {
        const double p = s.utility.p;
        if (lambda == 0.0) return -x_c;
        return lambda / p * std::exp(-x_q) * std::pow(x_c, p) - x_c;
    }
    if (lambda == 0.0) return -x_c;  // 0 * ln(c) := 0
    return lambda * std::exp(-x_q) * std::log(x_c) - x_c;
}

double chat_unconstrained(double x_q, const Scenario& s) {
    const double lambda = s.utility.lambda;
    if (s.utility.kind == UtilityKind::Power) {
        const double p = s.utility.p;
        return std::pow(lambda, 1.0 / (1.0 - p)) * std::exp(x_q / (p - 1.0));
    }
    return lambda * std::exp(-x_q);
}

ConsumptionOptimum maximize_f(double x_q, const Scenario& s) {
    const auto& box = s.constraints;
    const double lambda = s.utility.lambda;
    if (lambda == 0.0) {
        // Consumption is pinned to c_lo == c_hi by validation.
        return {box.c_lo, -box.c_lo, ClampSide::AtLower};
    }
    const bool needs_positive_c =
        s.utility.kind == UtilityKind::Log || (s.utility.kind == UtilityKind::Power && s.utility.p < 0.0);
    if (needs_positive_c && box.c_hi == 0.0)
        throw std::invalid_argument(
            "inconsistent constraints: c_hi = 0 forces zero consumption, where the utility "
            "diverges to -inf");

    const double chat = chat_unconstrained(x_q, s);
    ConsumptionOptimum out;
    if (chat <= box.c_lo) {
        out.c_star = box.c_lo;
        out.clamped = ClampSide::AtLower;
    } else if (chat >= box.c_hi) {
        out.c_star = box.c_hi;
        out.clamped = ClampSide::AtUpper;
    } else {
        out.c_star = chat;
        out.clamped = ClampSide::Interior;
    }
    if (out.clamped == ClampSide::Interior) {
        // Value at the interior maximizer, in the closed form.
        if (s.utility.kind == UtilityKind::Power) {
            const double p = s.utility.p;
            out.f_value = (1.0 - p) / p * std::pow(lambda, 1.0 / (1.0 - p)) *
                          std::exp(x_q / (p - 1.0));
        } else {
            out.f_value = lambda * std::exp(-x_q) * (std::log(lambda) - x_q - 1.0);
        }
    } else {
        out.f_value = eval_f(x_q, out.c_star, s);
    }
    return out;
}

PortfolioSaddle saddle_rect(const Scenario& s) {
    if (!s.is_rect()) throw std::invalid_argument("saddle_rect requires a rect uncertainty set");
    const auto& u = s.rect();
    if (!(u.sigma_hi > 0.0))
        throw std::invalid_argument("saddle_rect requires sigma_hi > 0");

    const double p = s.utility.exponent();
    const double r = s.rates.r;
    const double R = s.rates.R;
    const double s2 = u.sigma_hi * u.sigma_hi;
    const double denom = (1.0 - p) * s2;
    const double b1 = (u.mu_lo - R) / denom;
    const double b2 = (u.mu_lo - r) / denom;
    const double b3 = (u.mu_hi - r) / denom;
    const double pi_lo = s.constraints.pi_lo;
    const double pi_hi = s.constraints.pi_hi;

    PortfolioSaddle out;
    out.betas = {b1, b2, b3};
    out.sigma_star = u.sigma_hi;

    // Table boundaries go to the left-listed regime; adjacent formulas agree there.
    if (b1 >= 1.0) {
        out.regime = PortfolioRegime::BorrowToBuy;
        out.pi_star = std::min(b1, pi_hi);
        out.K = (b1 >= pi_hi) ? R + pi_hi * (u.mu_lo - R) - 0.5 * (1.0 - p) * s2 * pi_hi * pi_hi
                              : R + (u.mu_lo - R) * (u.mu_lo - R) / (2.0 * denom);
    } else if (b2 >= 1.0) {
        out.regime = PortfolioRegime::FullPosition;
        out.pi_star = 1.0;
        out.K = u.mu_lo - 0.5 * (1.0 - p) * s2;
    } else if (b2 >= 0.0) {
        out.regime = PortfolioRegime::LendAndBuy;
        out.pi_star = b2;
        out.K = r + (u.mu_lo - r) * (u.mu_lo - r) / (2.0 * denom);
    } else if (b3 >= 0.0) {
        out.regime = PortfolioRegime::NoTrading;
        out.pi_star = 0.0;
        out.K = r;
    } else {
        out.regime = PortfolioRegime::Shortsale;
        out.pi_star = std::max(b3, pi_lo);
        out.K = (b3 >= pi_lo) ? r + (u.mu_hi - r) * (u.mu_hi - r) / (2.0 * denom)
                              : r + pi_lo * (u.mu_hi - r) - 0.5 * (1.0 - p) * s2 * pi_lo * pi_lo;
    }

    if (u.mu_lo > r) {
        out.mu_star = u.mu_lo;
    } else if (u.mu_hi < r) {
        out.mu_star = u.mu_hi;
    } else {
        // Worst-case drift is the whole interval; pi* makes the choice
        // payoff-irrelevant, so report the canonical representative.
        out.mu_star = std::clamp(r, u.mu_lo, u.mu_hi);
        out.mu_star_is_interval = true;
    }
    return out;
}

double corr_h1(double alpha, const CorrelatedUncertainty& u, double r) {
    const double delta = u.mu_lo - r;
    return 2.0 * u.sigma_lo * u.sigma_lo + u.k * (2.0 - u.q_exp) * std::pow(alpha, u.q_exp) -
           u.k * u.q_exp * delta * std::pow(alpha, u.q_exp - 1.0);
}

namespace {

double corr_h1_deriv(double alpha, const CorrelatedUncertainty& u, double r) {
    const double delta = u.mu_lo - r;
    const double q = u.q_exp;
    return u.k * q * (2.0 - q) * std::pow(alpha, q - 1.0) +
           u.k * q * (1.0 - q) * delta * std::pow(alpha, q - 2.0);
}

// Root of h1 on (eps, alpha_hi] by bisection (h1 is strictly increasing for
// mu_lo > r), then a short Newton polish to push |h1| below 1e-13.
double solve_h1_root(const CorrelatedUncertainty& u, double r) {
    const double a_hi = u.alpha_hi;
    double lo = std::min(1e-14, a_hi * 1e-9);
    double hi = a_hi;
    double f_lo = corr_h1(lo, u, r);
    double f_hi = corr_h1(hi, u, r);
    if (!(f_lo < 0.0) || !(f_hi >= 0.0))
        throw std::runtime_error("h1 root not bracketed on (eps, alpha_hi]; h1 must have a "
                                 "unique zero crossing there");
    double mid = 0.5 * (lo + hi);
    while (hi - lo > 1e-15 * a_hi) {
        mid = 0.5 * (lo + hi);
        const double f_mid = corr_h1(mid, u, r);
        if (std::abs(f_mid) < 1e-13) break;
        if (f_mid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    for (int i = 0; i < 30 && std::abs(corr_h1(mid, u, r)) > 1e-13; ++i) {
        const double step = corr_h1(mid, u, r) / corr_h1_deriv(mid, u, r);
        const double next = mid - step;
        if (!(next > 0.0) || !(next <= a_hi)) break;
        mid = next;
    }
    return mid;
}

}  // namespace

PortfolioSaddle saddle_correlated(const Scenario& s) {
    if (s.is_rect())
        throw std::invalid_argument("saddle_correlated requires a correlated uncertainty set");
    const auto& u = s.correlated();
    if (s.rates.R != s.rates.r)
        throw std::invalid_argument("correlated uncertainty requires R == r");
    if (s.constraints.pi_lo != -kInf || s.constraints.pi_hi != kInf)
        throw std::invalid_argument("correlated uncertainty requires an unconstrained portfolio "
                                    "(pi_lo = -inf, pi_hi = +inf)");
    if (u.sigma_lo == 0.0 && u.alpha_hi == 0.0)
        throw std::invalid_argument("degenerate uncertainty set: sigma_lo = 0 and alpha_hi = 0 "
                                    "leave no positive-definite volatility");

    const double r = s.rates.r;
    const double p = s.utility.exponent();
    const double delta = u.mu_lo - r;
    const double q = u.q_exp;
    const double a_hi = u.alpha_hi;

    double alpha_star;
    bool zero_drift = false;  // mu* = r, pi* = 0
    if (delta > -a_hi && delta <= 0.0) {
        alpha_star = -delta;
        zero_drift = true;
    } else {
        const double alpha_hat =
            (2.0 * u.sigma_lo * u.sigma_lo * std::pow(a_hi, 1.0 - q) + u.k * (2.0 - q) * a_hi) /
            (u.k * q);
        if (delta > 0.0 && delta < alpha_hat)
            alpha_star = solve_h1_root(u, r);
        else
            alpha_star = a_hi;
    }

    PortfolioSaddle out;
    out.mu_star = zero_drift ? r : u.mu_lo + alpha_star;
    const double sigma2 = u.sigma_lo * u.sigma_lo + u.k * std::pow(alpha_star, q);
    out.sigma_star = std::sqrt(sigma2);
    out.pi_star = zero_drift ? 0.0 : (out.mu_star - r) / ((1.0 - p) * sigma2);
    out.K = eval_g(out.pi_star, out.mu_star, sigma2, s);
    out.regime = (alpha_star > 0.0 && alpha_star < a_hi) ? PortfolioRegime::CorrelatedInterior
                                                         : PortfolioRegime::CorrelatedBoundary;
    return out;
}

PortfolioSaddle solve_saddle(const Scenario& s) {
    return s.is_rect() ? saddle_rect(s) : saddle_correlated(s);
}

}  // namespace rmerton
