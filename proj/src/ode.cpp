#include "rmerton/ode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "rmerton/saddle.hpp"

namespace rmerton {

const char* to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::Q1: return "Q1";
        case SegmentKind::Q2: return "Q2";
        case SegmentKind::Q3: return "Q3";
    }
    return "?";
}

namespace {

// |rho - pK - (degenerate value)| below this switches to the affine sub-branch
// of the closed forms; the forms are continuous in the parameter there.
constexpr double kDegenerateTol = 1e-12;
// Width of the exact-equality band for threshold and direction comparisons.
constexpr double kTieTol = 1e-12;

struct OdeParams {
    double p, lambda, rho, c_lo, c_hi, T, K;
};

// Closed form of one segment, on [t_lo, t_hi] with value ln(lambda) + ln(A)
// at t_hi. c_bound is c_hi for Q1 and c_lo for Q3 and is unused for Q2.
double eval_segment(SegmentKind kind, double t, double t_hi, double A, const OdeParams& o) {
    // (A - B) e^{D(t - t_hi)} + B is written as A e^{Dd} - B expm1(Dd): both
    // terms are positive for every branch sign, so no cancellation.
    const double d = t - t_hi;
    if (kind == SegmentKind::Q2) {
        const double D = o.rho - o.p * o.K;
        const double Ar = std::pow(A, 1.0 / (1.0 - o.p));
        double w;
        if (std::abs(D) < kDegenerateTol) {
            w = Ar - d;
        } else {
            const double k = D / (1.0 - o.p);
            w = Ar * std::exp(k * d) - (1.0 - o.p) / D * std::expm1(k * d);
        }
        return std::log(o.lambda) + (1.0 - o.p) * std::log(w);
    }
    const double c = (kind == SegmentKind::Q1) ? o.c_hi : o.c_lo;
    const double cp = std::pow(c, o.p);
    const double D = o.rho + o.p * c - o.p * o.K;
    double w;
    if (std::abs(D) < kDegenerateTol) {
        w = A - cp * d;
    } else {
        w = A * std::exp(D * d) - cp / D * std::expm1(D * d);
    }
    return std::log(o.lambda) + std::log(w);
}

// Time t < t_hi at which the segment reaches the threshold with
// e^{theta} / lambda = V (Q1/Q3) or w = V_r (Q2); none if it never does.
std::optional<double> invert_segment(SegmentKind kind, double t_hi, double A, double target,
                                     const OdeParams& o) {
    double t;
    if (kind == SegmentKind::Q2) {
        const double D = o.rho - o.p * o.K;
        const double Ar = std::pow(A, 1.0 / (1.0 - o.p));
        if (std::abs(D) < kDegenerateTol) {
            t = t_hi - (target - Ar);
        } else {
            const double E = (1.0 - o.p) / D;
            const double ratio = (target - E) / (Ar - E);
            if (!(ratio > 0.0)) return std::nullopt;
            t = t_hi + (1.0 - o.p) / D * std::log(ratio);
        }
    } else {
        const double c = (kind == SegmentKind::Q1) ? o.c_hi : o.c_lo;
        const double cp = std::pow(c, o.p);
        const double D = o.rho + o.p * c - o.p * o.K;
        if (std::abs(D) < kDegenerateTol) {
            t = t_hi - (target - A) / cp;
        } else {
            const double B = cp / D;
            const double ratio = (target - B) / (A - B);
            if (!(ratio > 0.0)) return std::nullopt;
            t = t_hi + std::log(ratio) / D;
        }
    }
    if (!std::isfinite(t) || t >= t_hi - 1e-15 * std::max(1.0, t_hi)) return std::nullopt;
    return t;
}

char kind_digit(SegmentKind k) {
    switch (k) {
        case SegmentKind::Q1: return '1';
        case SegmentKind::Q2: return '2';
        case SegmentKind::Q3: return '3';
    }
    return '?';
}

}  // namespace

double QSolution::operator()(double t) const {
    if (lambda == 0.0) {
        // Pinned consumption c_lo == c_hi: the right-hand side is constant.
        return (p * (K - c_lo) - rho) * (T - t);
    }
    const OdeParams o{p, lambda, rho, c_lo, c_hi, T, K};
    const QSegment* seg = &segments.back();
    for (const auto& candidate : segments) {
        if (t <= candidate.t_hi) {
            seg = &candidate;
            break;
        }
    }
    return eval_segment(seg->kind, t, seg->t_hi, seg->A, o);
}

QSolution solve_qP(const Scenario& s, double K) {
    if (s.utility.kind != UtilityKind::Power)
        throw std::invalid_argument("solve_qP requires power utility");
    const double p = s.utility.p;
    const double lambda = s.utility.lambda;
    const double rho = s.utility.rho;
    const double c_lo = s.constraints.c_lo;
    const double c_hi = s.constraints.c_hi;
    const double T = s.T;

    QSolution sol;
    sol.K = K;
    sol.p = p;
    sol.lambda = lambda;
    sol.rho = rho;
    sol.c_lo = c_lo;
    sol.c_hi = c_hi;
    sol.T = T;

    if (lambda == 0.0) {
        sol.segments.push_back({0.0, T, SegmentKind::Q3, 1.0});
        sol.branch_label = "q_3";
        return sol;
    }

    if (c_lo == c_hi) {
        // Pinned box: c* == c_lo everywhere and the capped and floored forms
        // coincide, so the solution is one segment with no pasting.
        const double theta = (p - 1.0) * std::log(c_hi) + std::log(lambda);
        const SegmentKind kind = (0.0 <= theta + kTieTol) ? SegmentKind::Q1 : SegmentKind::Q3;
        sol.segments.push_back({0.0, T, kind, 1.0 / lambda});
        sol.branch_label = std::string("q_") + kind_digit(kind);
        return sol;
    }

    const OdeParams o{p, lambda, rho, c_lo, c_hi, T, K};
    // Regime thresholds of q; theta_up <= theta_lo. c_hi = +inf makes theta_up
    // -inf (the capped regime unreachable), c_lo = 0 makes theta_lo +inf.
    const double theta_up = (p - 1.0) * std::log(c_hi) + std::log(lambda);
    const double theta_lo = (p - 1.0) * std::log(c_lo) + std::log(lambda);

    // q' keeps one sign on [0, T]; its sign at T fixes the direction of the
    // whole backward sweep.
    const double slope_T = rho - p * (maximize_f(0.0, s).f_value + K);

    SegmentKind kind;
    if (std::abs(slope_T) < kTieTol) {
        // Constant solution q == q(T) = 0. Kind by position; exact-threshold
        // ties resolve to the clamped regime (chat at the bound).
        if (0.0 <= theta_up + kTieTol)
            kind = SegmentKind::Q1;
        else if (0.0 >= theta_lo - kTieTol)
            kind = SegmentKind::Q3;
        else
            kind = SegmentKind::Q2;
        sol.segments.push_back({0.0, T, kind, 1.0 / lambda});
        sol.branch_label = std::string("q_") + kind_digit(kind);
        return sol;
    }

    if (0.0 < theta_up - kTieTol) {
        kind = SegmentKind::Q1;
    } else if (0.0 > theta_lo + kTieTol) {
        kind = SegmentKind::Q3;
    } else if (std::abs(theta_up) <= kTieTol) {
        // Starting exactly on the upper threshold: the motion picks the regime.
        kind = slope_T > 0.0 ? SegmentKind::Q1 : SegmentKind::Q2;
    } else if (std::abs(theta_lo) <= kTieTol) {
        kind = slope_T > 0.0 ? SegmentKind::Q2 : SegmentKind::Q3;
    } else {
        kind = SegmentKind::Q2;
    }

    const bool rising_backward = slope_T < 0.0;  // q(t) > q(T) for t < T
    double t_hi = T;
    double A = 1.0 / lambda;
    std::vector<QSegment> backward;
    std::string digits;

    while (true) {
        digits += kind_digit(kind);
        // Next threshold in the direction of travel, if any.
        std::optional<double> t_switch;
        SegmentKind next = kind;
        if (rising_backward && kind == SegmentKind::Q1 && std::isfinite(theta_up)) {
            t_switch = invert_segment(kind, t_hi, A, std::pow(c_hi, p - 1.0), o);
            next = SegmentKind::Q2;
        } else if (rising_backward && kind == SegmentKind::Q2 && std::isfinite(theta_lo) &&
                   c_lo > 0.0) {
            t_switch = invert_segment(kind, t_hi, A, 1.0 / c_lo, o);
            next = SegmentKind::Q3;
        } else if (!rising_backward && kind == SegmentKind::Q3 && std::isfinite(theta_lo)) {
            t_switch = invert_segment(kind, t_hi, A, std::pow(c_lo, p - 1.0), o);
            next = SegmentKind::Q2;
        } else if (!rising_backward && kind == SegmentKind::Q2 && std::isfinite(theta_up) &&
                   c_hi > 0.0) {
            t_switch = invert_segment(kind, t_hi, A, 1.0 / c_hi, o);
            next = SegmentKind::Q1;
        }

        if (!t_switch || *t_switch <= 0.0) {
            backward.push_back({0.0, t_hi, kind, A});
            break;
        }
        backward.push_back({*t_switch, t_hi, kind, A});
        sol.switching_times.emplace_back("T_" + digits + kind_digit(next), *t_switch);
        t_hi = *t_switch;
        // Pasting constant e^{q(t_hi)} / lambda at the crossed threshold:
        // c_hi^{p-1} across theta_up (Q1 side), c_lo^{p-1} across theta_lo.
        A = (kind == SegmentKind::Q1 || next == SegmentKind::Q1) ? std::pow(c_hi, p - 1.0)
                                                                 : std::pow(c_lo, p - 1.0);
        kind = next;
        if (backward.size() > 3)
            throw std::runtime_error("segment pasting did not terminate; branch selection bug");
    }

    sol.segments.assign(backward.rbegin(), backward.rend());
    sol.branch_label = "q_" + digits;

    // Sanity guard on the closed forms: every segment log argument is positive.
    for (const auto& seg : sol.segments) {
        for (double t : {seg.t_lo, 0.5 * (seg.t_lo + seg.t_hi), seg.t_hi}) {
            const double q = eval_segment(seg.kind, t, seg.t_hi, seg.A, o);
            if (!std::isfinite(q))
                throw std::runtime_error("closed-form segment evaluated to a non-finite value; "
                                         "branch selection bug");
        }
    }
    return sol;
}

std::vector<double> solve_qP_oracle(const Scenario& s, double K, int n_steps) {
    if (n_steps < 100) throw std::invalid_argument("solve_qP_oracle needs n_steps >= 100");
    const double p = s.utility.p;
    const double rho = s.utility.rho;
    const double h = s.T / n_steps;
    auto rhs = [&](double q) { return rho - p * (maximize_f(q, s).f_value + K); };

    std::vector<double> q(static_cast<std::size_t>(n_steps) + 1);
    q[n_steps] = 0.0;
    for (int i = n_steps; i > 0; --i) {
        const double y = q[i];
        const double k1 = rhs(y);
        const double k2 = rhs(y - 0.5 * h * k1);
        const double k3 = rhs(y - 0.5 * h * k2);
        const double k4 = rhs(y - h * k3);
        q[i - 1] = y - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return q;
}

double LogQSolution::operator()(double t) const {
    const double tau = T - t;
    const double x = rho * tau;
    const double phi = (x == 0.0) ? 1.0 : -std::expm1(-x) / x;
    return std::log(std::exp(-x) + lambda * tau * phi);
}

namespace {

// Adaptive Simpson with absolute tolerance, recursing on the standard
// five-point error estimate.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) < 15.0 * tol) return left + right + err / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    return adaptive_simpson(f, a, b, fa, fm, fb, tol, 48);
}

// Times in (0, T) where chat_L crosses c_hi / c_lo; the integrand of Q_L has
// corners there. Closed-form inversion of q_L.
std::vector<double> log_breakpoints(const Scenario& s) {
    std::vector<double> out;
    const double lambda = s.utility.lambda;
    const double rho = s.utility.rho;
    const double T = s.T;
    if (lambda <= 0.0) return out;
    auto crossing = [&](double c_bound) -> std::optional<double> {
        if (!(c_bound > 0.0) || !std::isfinite(c_bound)) return std::nullopt;
        const double v = lambda / c_bound;  // e^{q_L} at the crossing
        double t;
        if (rho == 0.0) {
            t = T - (v - 1.0) / lambda;
        } else if (rho == lambda) {
            return std::nullopt;  // q_L constant
        } else {
            const double ratio = (v - lambda / rho) / (1.0 - lambda / rho);
            if (!(ratio > 0.0)) return std::nullopt;
            t = T + std::log(ratio) / rho;
        }
        if (t <= 0.0 || t >= T) return std::nullopt;
        return t;
    };
    if (auto t = crossing(s.constraints.c_hi)) out.push_back(*t);
    if (auto t = crossing(s.constraints.c_lo)) out.push_back(*t);
    std::sort(out.begin(), out.end());
    return out;
}

double log_Q_integral(const LogQSolution& sol, const Scenario& s, double t) {
    auto integrand = [&](double u) {
        const double q = sol(u);
        const double G = maximize_f(q, s).f_value + sol.K;
        return std::exp(q - s.utility.rho * u) * G;
    };
    std::vector<double> knots{t};
    for (double b : log_breakpoints(s))
        if (b > t) knots.push_back(b);
    knots.push_back(s.T);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        total += integrate(integrand, knots[i], knots[i + 1], 1e-12);
    return total;
}

}  // namespace

LogQSolution solve_qL(const Scenario& s, double K) {
    if (s.utility.kind != UtilityKind::Log)
        throw std::invalid_argument("solve_qL requires log utility");
    LogQSolution sol;
    sol.lambda = s.utility.lambda;
    sol.rho = s.utility.rho;
    sol.T = s.T;
    sol.K = K;
    sol.c_lo = s.constraints.c_lo;
    sol.c_hi = s.constraints.c_hi;
    sol.Q_L0 = log_Q_integral(sol, s, 0.0);
    return sol;
}

double log_Q(const LogQSolution& sol, const Scenario& s, double t) {
    return log_Q_integral(sol, s, t);
}

double value_function(const Scenario& s, const QSolution& q) {
    const double p = s.utility.p;
    return std::pow(s.x0, p) / p * std::exp(q.q0());
}

double value_function(const Scenario& s, const LogQSolution& q) {
    return std::exp(q.q0()) * std::log(s.x0) + q.Q_L0;
}

}  // namespace rmerton
