#pragma once

#include <string>
#include <vector>

#include "rmerton/consumption.hpp"
#include "rmerton/ode.hpp"
#include "rmerton/simulate.hpp"

namespace rmerton {

// One side of the saddle inequality, checked by Monte Carlo under common
// random numbers. Strategy perturbations replace (pi, c) and must come out
// below the closed-form value; parameter perturbations replace (mu, sigma)
// and must come out above it.
struct Perturbation {
    enum class Side { Strategy, Parameter };
    std::string description;
    Side side = Side::Strategy;
    Schedule a, b;  // Strategy: a = pi, b = c. Parameter: a = mu, b = sigma.
};

struct SaddleCheckRow {
    std::string description;
    double mc = 0.0;
    double se = 0.0;
    char expected_side = 'L';  // 'L': mc <= closed + 3 se, 'R': mc >= closed - 3 se
    bool pass = false;
};

struct VerificationReport {
    double mc_value = 0.0;
    double mc_stderr = 0.0;
    double closed_value = 0.0;
    bool value_pass = false;  // |mc - closed| <= 3 se
    std::vector<SaddleCheckRow> saddle_checks;
    bool all_pass() const;
};

VerificationReport check_saddle_mc(const Scenario& s, const std::vector<Perturbation>& perturbations,
                                   const SimConfig& cfg);

// Six admissible strategy perturbations and six parameter perturbations
// derived from the scenario's box and uncertainty set.
std::vector<Perturbation> default_perturbations(const Scenario& s, const Solved& sol);

// Comparative-statics sweep of one scenario parameter.
struct SweepRow {
    double param_value = 0.0;
    double mu_star = 0.0;
    double sigma_star = 0.0;
    double pi_star = 0.0;
    double c_star_t0 = 0.0;
    double c_star_T = 0.0;
};

enum class Direction { Up, Down, Flat, NonMonotone };

const char* to_string(Direction d);

// Rect-scenario parameters admissible in a sweep.
extern const std::vector<std::string> kSweepParams;

std::vector<SweepRow> sweep_comparative_statics(const Scenario& base, const std::string& param,
                                                const std::vector<double>& grid);

// Expected direction of each output (mu_star, sigma_star, pi_star, c_star)
// in each swept parameter, for the given utility kind.
Direction expected_direction(UtilityKind kind, const std::string& param, const std::string& output);

struct SweepJudgement {
    std::string output;
    Direction expected = Direction::Flat;
    bool pass = false;
    double worst_violation = 0.0;
};

// Judges a sweep against the expected directions at tolerance tol. c_star is
// checked pointwise in t at several sample times. NonMonotone cells are exempt.
std::vector<SweepJudgement> judge_sweep(const Scenario& base, const std::string& param,
                                        const std::vector<double>& grid, double tol = 1e-10);

// Monte Carlo increments of the discounted value process J_{P,t} along the
// optimal controls; each should be within 3 standard errors of zero.
struct IncrementStat {
    double t0 = 0.0, t1 = 0.0;
    double mean = 0.0, se = 0.0;
};

std::vector<IncrementStat> martingale_increments(const Scenario& s, const Solved& sol,
                                                 const SimConfig& cfg,
                                                 const std::vector<double>& sample_times);

}  // namespace rmerton
