#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rmerton/scenario.hpp"

namespace rmerton {

// Consumption regime of a q_P segment: Q1 <-> consumption capped at c_hi,
// Q2 <-> interior, Q3 <-> floored at c_lo.
enum class SegmentKind { Q1, Q2, Q3 };

const char* to_string(SegmentKind k);

struct QSegment {
    double t_lo = 0.0;
    double t_hi = 0.0;
    SegmentKind kind = SegmentKind::Q2;
    double A = 1.0;  // integration constant; q(t_hi) = ln(lambda) + ln(A)
};

// Piecewise closed-form solution of the power-utility opportunity ODE on [0, T],
// built backward from the terminal condition q(T) = 0.
class QSolution {
public:
    std::vector<QSegment> segments;  // ordered, contiguous, covering [0, T]
    std::string branch_label;        // "q_1", "q_12", ..., "q_321"
    std::vector<std::pair<std::string, double>> switching_times;
    double K = 0.0;

    // evaluation parameters, copied from the scenario
    double p = 0.5;
    double lambda = 1.0;
    double rho = 0.0;
    double c_lo = 0.0;
    double c_hi = kInf;
    double T = 1.0;

    double operator()(double t) const;
    double q0() const { return (*this)(0.0); }
};

// Closed-form q_L(t) = ln[e^{-rho(T-t)} + lambda (T-t) phi(rho (T-t))] with
// phi(x) = (1-e^{-x})/x, plus Q_L(0) by adaptive quadrature.
class LogQSolution {
public:
    double lambda = 1.0;
    double rho = 0.0;
    double T = 1.0;
    double K = 0.0;
    double Q_L0 = 0.0;
    double c_lo = 0.0;
    double c_hi = kInf;

    double operator()(double t) const;
    double q0() const { return (*this)(0.0); }
};

QSolution solve_qP(const Scenario& s, double K);

// Classical RK4 integrated backward from q(T) = 0 against the exact piecewise
// right-hand side; returns q sampled at t_i = i T / n_steps, i = 0..n_steps.
std::vector<double> solve_qP_oracle(const Scenario& s, double K, int n_steps);

LogQSolution solve_qL(const Scenario& s, double K);

// Q_L(t) by the same quadrature as Q_L0 (test and verification helper).
double log_Q(const LogQSolution& sol, const Scenario& s, double t);

double value_function(const Scenario& s, const QSolution& q);
double value_function(const Scenario& s, const LogQSolution& q);

}  // namespace rmerton
