#pragma once

#include "rmerton/saddle.hpp"
#include "rmerton/scenario.hpp"

namespace rmerton {

// Grid sizes for the minimax oracle; every axis needs at least 11 points.
struct GridSpec {
    int n_pi = 201;
    int n_c = 201;
    int n_mu = 41;
    int n_sig = 41;
};

// Approximate saddle of F_i = f_i + g over the (pi, c) x (mu, sigma2) grid,
// built by compact exhaustion: unbounded axes are truncated and the radius
// doubled until the argmax settles.
struct GridSaddleResult {
    double pi = 0.0;
    double c = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double maxmin = 0.0;
    double minmax = 0.0;
    double gap = 0.0;
    int doublings = 0;
};

GridSaddleResult grid_minimax_oracle(double x_q, const Scenario& s, const GridSpec& grid,
                                     bool parallel = true);

// Portfolio-only oracle: saddle of g over the pi grid (spacing pi_resolution)
// against the (mu, sigma2) grid, with an optional golden-section polish of the
// max of min_B g around the grid argmax.
struct PortfolioOracleResult {
    double pi = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double value = 0.0;  // polished max-min of g
};

PortfolioOracleResult grid_portfolio_saddle(const Scenario& s, double pi_resolution,
                                            int n_mu, int n_sig, bool polish = true,
                                            bool parallel = true);

// Quantified saddle inequalities for a candidate point: worst_left is the most
// negative of F(pi*,c*; b) - F* over the B grid (should be >= -tol), worst_right
// the most positive of F(a; mu*,sigma2*) - F* over the A grid (should be <= tol).
struct SaddleInequalityCheck {
    double worst_left = 0.0;
    double worst_right = 0.0;
    bool ok(double tol) const { return worst_left >= -tol && worst_right <= tol; }
};

SaddleInequalityCheck check_saddle_inequalities(double x_q, const Scenario& s, double pi_star,
                                                double c_star, double mu_star, double sigma2_star,
                                                const GridSpec& grid, bool parallel = true);

}  // namespace rmerton
