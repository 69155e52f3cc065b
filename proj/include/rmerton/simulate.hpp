#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rmerton/consumption.hpp"
#include "rmerton/scenario.hpp"

namespace rmerton {

// Monte Carlo configuration. The scheme is exponential Euler on ln X, which
// keeps wealth strictly positive. Path i draws from a stream seeded with
// seed ^ splitmix64(i), so results are independent of execution order.
struct SimConfig {
    std::int64_t n_paths = 100000;
    int n_steps = 500;
    std::uint64_t seed = 1;
};

ValidationResult validate(const SimConfig& cfg);

using Schedule = std::function<double(double)>;

struct ControlSet {
    Schedule pi, c, mu, sigma;
};

ControlSet optimal_controls(const Scenario& s, const PortfolioSaddle& saddle,
                            const ConsumptionSchedule& schedule);

// Drift of ln X for one step: mu pi + r(1-pi)^+ - R(1-pi)^- - c - pi^2 sigma^2 / 2.
double log_wealth_drift(const Scenario& s, double pi, double c, double mu, double sigma);

// Full path ensemble X[path][step], step k at t_k = k T / n_steps. Memory is
// n_paths * (n_steps+1) doubles; meant for tests and diagnostics, not for the
// large production runs (mc_value streams instead).
std::vector<std::vector<double>> simulate_wealth(const Scenario& s, const ControlSet& u,
                                                 const SimConfig& cfg);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Sample mean and standard error of the discounted utility functional
// int_0^T lambda e^{-rho s} U(c_s X_s) ds + e^{-rho T} U(X_T), the time
// integral by trapezoid on the simulation grid.
McEstimate mc_value(const Scenario& s, const ControlSet& u, const SimConfig& cfg,
                    bool parallel = true);

// splitmix64, also used to derive per-path seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Portable deterministic standard-normal stream: splitmix64 counter ->
// uniforms in (0, 1] -> Box-Muller pair. One stream per path makes results
// independent of execution order and of the standard library.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}
    double next();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

std::uint64_t path_seed(const SimConfig& cfg, std::int64_t path);

// Deterministic pairwise summation (fixed association order).
double pairwise_sum(const std::vector<double>& v);

}  // namespace rmerton
