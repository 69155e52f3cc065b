#include "rmerton/consumption.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace rmerton {

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Nondecreasing: return "nondecreasing";
        case Monotonicity::Nonincreasing: return "nonincreasing";
        case Monotonicity::Constant: return "constant";
    }
    return "?";
}

double ConsumptionSchedule::operator()(double t) const {
    if (const auto* f = std::get_if<FixedEval>(&eval)) return f->c;
    if (const auto* pe = std::get_if<PowerEval>(&eval)) {
        const double chat =
            std::pow(pe->lambda, 1.0 / (1.0 - pe->p)) * std::exp(pe->q(t) / (pe->p - 1.0));
        return std::clamp(chat, pe->c_lo, pe->c_hi);
    }
    const auto& le = std::get<LogEval>(eval);
    LogQSolution q;
    q.lambda = le.lambda;
    q.rho = le.rho;
    q.T = le.T;
    const double chat = le.lambda * std::exp(-q(t));
    return std::clamp(chat, le.c_lo, le.c_hi);
}

ClampSide ConsumptionSchedule::regime_at(double t) const {
    for (const auto& piece : pattern)
        if (t <= piece.t_hi) return piece.regime;
    return pattern.back().regime;
}

ConsumptionSchedule build_schedule_power(const QSolution& qsol, const Scenario& s) {
    if (s.utility.kind != UtilityKind::Power)
        throw std::invalid_argument("build_schedule_power requires power utility");
    const double lambda = s.utility.lambda;
    const double p = s.utility.p;
    const double c_lo = s.constraints.c_lo;
    const double c_hi = s.constraints.c_hi;

    ConsumptionSchedule out;
    if (lambda == 0.0) {
        out.eval = ConsumptionSchedule::FixedEval{c_lo};
        out.pattern = {{0.0, s.T, ClampSide::AtLower}};
        out.monotonicity = Monotonicity::Constant;
        return out;
    }

    out.eval = ConsumptionSchedule::PowerEval{qsol, lambda, p, c_lo, c_hi};
    for (const auto& seg : qsol.segments) {
        ClampSide regime = ClampSide::Interior;
        if (seg.kind == SegmentKind::Q1) regime = ClampSide::AtUpper;
        if (seg.kind == SegmentKind::Q3) regime = ClampSide::AtLower;
        out.pattern.push_back({seg.t_lo, seg.t_hi, regime});
    }
    out.switching_times = qsol.switching_times;

    // Time-monotonicity class from the position of lambda^{1/(1-p)} relative
    // to the consumption box and of rho - pK relative to (1-p) lambda^{1/(1-p)}.
    const double merton_c = std::pow(lambda, 1.0 / (1.0 - p));
    if (c_lo == c_hi) {
        out.monotonicity = Monotonicity::Constant;
    } else if (c_hi < merton_c) {
        out.monotonicity = Monotonicity::Nondecreasing;
    } else if (c_lo > merton_c) {
        out.monotonicity = Monotonicity::Nonincreasing;
    } else {
        const double gap = (s.utility.rho - p * qsol.K) - (1.0 - p) * merton_c;
        if (gap < -1e-12)
            out.monotonicity = Monotonicity::Nondecreasing;
        else if (gap > 1e-12)
            out.monotonicity = Monotonicity::Nonincreasing;
        else
            out.monotonicity = Monotonicity::Constant;
    }
    return out;
}

namespace {

// t solving chat_L(t) = c_bound, i.e. q_L(t) = ln(lambda / c_bound), on the
// real line; the closed form inverts q_L directly. Used when well-posed.
std::optional<double> log_crossing_closed(double lambda, double rho, double T, double c_bound) {
    if (!(c_bound > 0.0) || !std::isfinite(c_bound)) return std::nullopt;
    const double v = lambda / c_bound;
    if (rho == 0.0) return T - (v - 1.0) / lambda;
    const double num = v - lambda / rho;
    const double den = 1.0 - lambda / rho;
    const double ratio = num / den;
    if (!(ratio > 0.0)) return std::nullopt;
    return T + std::log(ratio) / rho;
}

// Monotone bisection fallback on q_L(t) - ln(lambda / c_bound) over [0, T].
std::optional<double> log_crossing_bisect(const LogQSolution& q, double c_bound) {
    if (!(c_bound > 0.0) || !std::isfinite(c_bound)) return std::nullopt;
    const double target = std::log(q.lambda / c_bound);
    double f0 = q(0.0) - target;
    double f1 = q(q.T) - target;
    if (f0 == 0.0) return 0.0;
    if (f1 == 0.0) return q.T;
    if ((f0 < 0.0) == (f1 < 0.0)) return std::nullopt;
    double lo = 0.0, hi = q.T;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, q.T); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = q(mid) - target;
        if ((fm < 0.0) == (f0 < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ConsumptionSchedule build_schedule_log(const LogQSolution& lsol, const Scenario& s) {
    if (s.utility.kind != UtilityKind::Log)
        throw std::invalid_argument("build_schedule_log requires log utility");
    const double lambda = s.utility.lambda;
    const double rho = s.utility.rho;
    const double T = s.T;
    const double c_lo = s.constraints.c_lo;
    const double c_hi = s.constraints.c_hi;

    ConsumptionSchedule out;
    if (lambda == 0.0) {
        out.eval = ConsumptionSchedule::FixedEval{c_lo};
        out.pattern = {{0.0, T, ClampSide::AtLower}};
        out.monotonicity = Monotonicity::Constant;
        return out;
    }
    out.eval = ConsumptionSchedule::LogEval{lambda, rho, T, c_lo, c_hi};

    if (rho > lambda)
        out.monotonicity = Monotonicity::Nonincreasing;
    else if (rho < lambda)
        out.monotonicity = Monotonicity::Nondecreasing;
    else
        out.monotonicity = Monotonicity::Constant;
    if (c_lo == c_hi) out.monotonicity = Monotonicity::Constant;

    // Crossing times of chat with the box bounds. The closed form has
    // removable singularities at rho = 0 and rho = lambda; fall back to
    // monotone bisection on q_L near those.
    const bool closed_ok = rho > 0.0 && std::abs(rho - lambda) > 1e-12 * std::max(1.0, rho);
    auto crossing = [&](double c_bound) -> std::optional<double> {
        std::optional<double> t = closed_ok ? log_crossing_closed(lambda, rho, T, c_bound)
                                            : log_crossing_bisect(lsol, c_bound);
        if (t && (*t <= 0.0 || *t >= T)) return std::nullopt;
        return t;
    };
    const auto t_up = crossing(c_hi);   // chat = c_hi
    const auto t_low = crossing(c_lo);  // chat = c_lo

    if (t_up) out.switching_times.emplace_back("T_1", *t_up);
    if (t_low) out.switching_times.emplace_back("T_2", *t_low);

    std::vector<double> cuts;
    if (t_up) cuts.push_back(*t_up);
    if (t_low) cuts.push_back(*t_low);
    std::sort(cuts.begin(), cuts.end());
    double prev = 0.0;
    auto regime_of = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        LogQSolution q = lsol;
        const double chat = lambda * std::exp(-q(mid));
        if (chat >= c_hi) return ClampSide::AtUpper;
        if (chat <= c_lo) return ClampSide::AtLower;
        return ClampSide::Interior;
    };
    for (double cut : cuts) {
        out.pattern.push_back({prev, cut, regime_of(prev, cut)});
        prev = cut;
    }
    out.pattern.push_back({prev, T, regime_of(prev, T)});
    return out;
}

CapWitness demo_cap_nonmonotonicity(const Scenario& base, double cap_a, double cap_b) {
    if (base.utility.kind != UtilityKind::Power)
        throw std::invalid_argument("the cap witness targets power utility");
    const double cap_small = std::min(cap_a, cap_b);
    const double cap_big = std::max(cap_a, cap_b);
    const double p = base.utility.p;
    const double merton_c = std::pow(base.utility.lambda, 1.0 / (1.0 - p));

    CapWitness out;
    if (cap_small == cap_big) {
        out.found = false;
        out.note = "caps are equal; the two schedules coincide";
        return out;
    }
    if (!(base.constraints.c_lo < cap_small && cap_big < merton_c))
        throw std::invalid_argument(
            "cap witness requires c_lo < min cap < max cap < lambda^{1/(1-p)}");

    auto with_cap = [&](double cap) {
        Scenario s = base;
        s.constraints.c_hi = cap;
        return s;
    };
    const Scenario s_small = with_cap(cap_small);
    const Scenario s_big = with_cap(cap_big);
    const PortfolioSaddle saddle = solve_saddle(s_small);  // K does not depend on the cap
    const double span = base.utility.rho - p * saddle.K;
    if (!(span > (1.0 - p) * base.constraints.c_lo && span < (1.0 - p) * cap_small))
        throw std::invalid_argument(
            "cap witness requires rho - pK strictly between (1-p) c_lo and (1-p) min cap");

    const ConsumptionSchedule sched_small =
        build_schedule_power(solve_qP(s_small, saddle.K), s_small);
    const ConsumptionSchedule sched_big = build_schedule_power(solve_qP(s_big, saddle.K), s_big);

    // Scan from the ends for the two strict inequalities.
    const int n = 2000;
    bool got_T = false, got_0 = false;
    for (int i = 0; i <= n && !(got_T && got_0); ++i) {
        const double frac = static_cast<double>(i) / n;
        if (!got_T) {
            const double t = base.T * (1.0 - frac);
            if (sched_big(t) > sched_small(t)) {
                out.t_near_T = t;
                out.c_big_at_T = sched_big(t);
                out.c_small_at_T = sched_small(t);
                got_T = true;
            }
        }
        if (!got_0) {
            const double t = base.T * frac;
            if (sched_big(t) < sched_small(t)) {
                out.t_near_0 = t;
                out.c_big_at_0 = sched_big(t);
                out.c_small_at_0 = sched_small(t);
                got_0 = true;
            }
        }
    }
    out.found = got_T && got_0;
    if (!out.found) out.note = "no witness at this horizon";
    return out;
}

double Solved::q_at(double t) const {
    if (const auto* qp = std::get_if<QSolution>(&q)) return (*qp)(t);
    return std::get<LogQSolution>(q)(t);
}

double Solved::value(const Scenario& s) const {
    if (const auto* qp = std::get_if<QSolution>(&this->q)) return value_function(s, *qp);
    return value_function(s, std::get<LogQSolution>(this->q));
}

Solved solve_all(const Scenario& s) {
    Solved out;
    out.saddle = solve_saddle(s);
    if (s.utility.kind == UtilityKind::Power) {
        QSolution q = solve_qP(s, out.saddle.K);
        out.schedule = build_schedule_power(q, s);
        out.q = std::move(q);
    } else {
        LogQSolution q = solve_qL(s, out.saddle.K);
        out.schedule = build_schedule_log(q, s);
        out.q = std::move(q);
    }
    return out;
}

}  // namespace rmerton
