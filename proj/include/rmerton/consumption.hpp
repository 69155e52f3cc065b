#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rmerton/ode.hpp"
#include "rmerton/saddle.hpp"
#include "rmerton/scenario.hpp"

namespace rmerton {

enum class Monotonicity { Nondecreasing, Nonincreasing, Constant };

const char* to_string(Monotonicity m);

struct SchedulePiece {
    double t_lo = 0.0;
    double t_hi = 0.0;
    ClampSide regime = ClampSide::Interior;
};

// Deterministic optimal consumption rate t -> c*(t), continuous on [0, T],
// clamped to [c_lo, c_hi], with its regime pattern and monotonicity class.
class ConsumptionSchedule {
public:
    std::vector<SchedulePiece> pattern;
    Monotonicity monotonicity = Monotonicity::Constant;
    std::vector<std::pair<std::string, double>> switching_times;

    double operator()(double t) const;
    ClampSide regime_at(double t) const;

    struct PowerEval {
        QSolution q;
        double lambda, p, c_lo, c_hi;
    };
    struct LogEval {
        double lambda, rho, T, c_lo, c_hi;
    };
    struct FixedEval {
        double c;
    };
    std::variant<PowerEval, LogEval, FixedEval> eval = FixedEval{0.0};
};

ConsumptionSchedule build_schedule_power(const QSolution& qsol, const Scenario& s);
ConsumptionSchedule build_schedule_log(const LogQSolution& lsol, const Scenario& s);

// Witness that c* is not monotone in the consumption cap: with caps ordered
// cap_big > cap_small (both below lambda^{1/(1-p)}), near T the big-cap
// schedule consumes strictly more, near 0 strictly less.
struct CapWitness {
    bool found = false;
    double t_near_0 = 0.0;
    double t_near_T = 0.0;
    double c_big_at_0 = 0.0, c_small_at_0 = 0.0;
    double c_big_at_T = 0.0, c_small_at_T = 0.0;
    std::string note;
};

CapWitness demo_cap_nonmonotonicity(const Scenario& base, double cap_a, double cap_b);

// Convenience pipeline: saddle -> q solution -> schedule.
struct Solved {
    PortfolioSaddle saddle;
    std::variant<QSolution, LogQSolution> q;
    ConsumptionSchedule schedule;

    double q_at(double t) const;
    double q0() const { return q_at(0.0); }
    double value(const Scenario& s) const;
};

Solved solve_all(const Scenario& s);

}  // namespace rmerton
