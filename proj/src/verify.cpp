#include "rmerton/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rmerton/threading.hpp"

namespace rmerton {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "nondecreasing";
        case Direction::Down: return "nonincreasing";
        case Direction::Flat: return "independent";
        case Direction::NonMonotone: return "non-monotone";
    }
    return "?";
}

bool VerificationReport::all_pass() const {
    if (!value_pass) return false;
    return std::all_of(saddle_checks.begin(), saddle_checks.end(),
                       [](const SaddleCheckRow& r) { return r.pass; });
}

namespace {

void check_admissible(const Scenario& s, const Perturbation& pert, int n_steps) {
    const double dt = s.T / n_steps;
    for (int k = 0; k <= n_steps; ++k) {
        const double t = std::min(k * dt, s.T);
        if (pert.side == Perturbation::Side::Strategy) {
            const double pi = pert.a(t);
            const double c = pert.b(t);
            if (pi < s.constraints.pi_lo || pi > s.constraints.pi_hi || c < s.constraints.c_lo ||
                c > s.constraints.c_hi)
                throw std::invalid_argument("inadmissible strategy perturbation \"" +
                                            pert.description + "\"");
        } else {
            const double mu = pert.a(t);
            const double sg = pert.b(t);
            const double s2 = sg * sg;
            bool ok;
            if (s.is_rect()) {
                const auto& u = s.rect();
                ok = mu >= u.mu_lo - 1e-12 && mu <= u.mu_hi + 1e-12 &&
                     s2 >= u.sigma_lo * u.sigma_lo - 1e-12 && s2 <= u.sigma_hi * u.sigma_hi + 1e-12;
            } else {
                const auto& u = s.correlated();
                const double alpha = mu - u.mu_lo;
                ok = alpha >= -1e-12 && alpha <= u.alpha_hi + 1e-12 &&
                     std::abs(s2 - (u.sigma_lo * u.sigma_lo + u.k * std::pow(std::max(alpha, 0.0),
                                                                             u.q_exp))) <=
                         1e-9 * std::max(1.0, s2);
            }
            if (!ok)
                throw std::invalid_argument("inadmissible parameter perturbation \"" +
                                            pert.description + "\"");
        }
    }
}

}  // namespace

VerificationReport check_saddle_mc(const Scenario& s, const std::vector<Perturbation>& perturbations,
                                   const SimConfig& cfg) {
    const auto cfg_check = validate(cfg);
    if (!cfg_check.ok()) throw std::invalid_argument("bad SimConfig: " + cfg_check.describe());
    const Solved sol = solve_all(s);
    const ControlSet optimal = optimal_controls(s, sol.saddle, sol.schedule);

    VerificationReport report;
    report.closed_value = sol.value(s);
    const McEstimate base = mc_value(s, optimal, cfg);
    report.mc_value = base.value;
    report.mc_stderr = base.stderr_;
    report.value_pass = std::abs(base.value - report.closed_value) <= 3.0 * base.stderr_;

    for (const auto& pert : perturbations) {
        check_admissible(s, pert, cfg.n_steps);
        ControlSet u = optimal;
        if (pert.side == Perturbation::Side::Strategy) {
            u.pi = pert.a;
            u.c = pert.b;
        } else {
            u.mu = pert.a;
            u.sigma = pert.b;
        }
        const McEstimate est = mc_value(s, u, cfg);  // same seeds: common random numbers
        SaddleCheckRow row;
        row.description = pert.description;
        row.mc = est.value;
        row.se = est.stderr_;
        row.expected_side = pert.side == Perturbation::Side::Strategy ? 'L' : 'R';
        row.pass = pert.side == Perturbation::Side::Strategy
                       ? est.value <= report.closed_value + 3.0 * est.stderr_
                       : est.value >= report.closed_value - 3.0 * est.stderr_;
        report.saddle_checks.push_back(std::move(row));
    }
    return report;
}

std::vector<Perturbation> default_perturbations(const Scenario& s, const Solved& sol) {
    const auto& box = s.constraints;
    const double pi_star = sol.saddle.pi_star;
    const ConsumptionSchedule sched = sol.schedule;
    auto clamp_pi = [&](double x) { return std::clamp(x, box.pi_lo, box.pi_hi); };
    auto clamp_c = [&](double x) { return std::clamp(x, box.c_lo, box.c_hi); };
    auto constant = [](double v) { return Schedule([v](double) { return v; }); };
    auto opt_c = Schedule([sched](double t) { return sched(t); });

    std::vector<Perturbation> out;
    using Side = Perturbation::Side;
    out.push_back({"pi = pi* - 0.15", Side::Strategy, constant(clamp_pi(pi_star - 0.15)), opt_c});
    double up = clamp_pi(pi_star + 0.15);
    if (up == pi_star) up = clamp_pi(pi_star - 0.3);
    out.push_back({"pi = pi* + 0.15 (clamped)", Side::Strategy, constant(up), opt_c});
    out.push_back({"c scaled toward c_lo", Side::Strategy, constant(pi_star),
                   Schedule([sched, clamp_c](double t) { return clamp_c(0.5 * (sched(t) + 0.0)); })});
    out.push_back({"c scaled up 25%", Side::Strategy, constant(pi_star),
                   Schedule([sched, clamp_c](double t) { return clamp_c(1.25 * sched(t) + 0.01); })});
    const double T_half = 0.5 * s.T;
    out.push_back({"pi piecewise: pi* then pi* - 0.25", Side::Strategy,
                   Schedule([pi_star, clamp_pi, T_half](double t) {
                       return t < T_half ? pi_star : clamp_pi(pi_star - 0.25);
                   }),
                   opt_c});
    out.push_back({"pi halved, c scaled 1.1x", Side::Strategy, constant(clamp_pi(0.5 * pi_star)),
                   Schedule([sched, clamp_c](double t) { return clamp_c(1.1 * sched(t)); })});

    if (s.is_rect()) {
        const auto& u = s.rect();
        auto pair = [&](const char* name, double mu, double sg) {
            out.push_back({name, Side::Parameter, constant(mu), constant(sg)});
        };
        pair("(mu_hi, sigma_hi)", u.mu_hi, u.sigma_hi);
        pair("(mu_lo, sigma_lo)", u.mu_lo, u.sigma_lo);
        pair("(mu_hi, sigma_lo)", u.mu_hi, u.sigma_lo);
        pair("(mid mu, sigma_hi)", 0.5 * (u.mu_lo + u.mu_hi), u.sigma_hi);
        pair("(mu_lo, mid sigma)", u.mu_lo, 0.5 * (u.sigma_lo + u.sigma_hi));
        out.push_back({"parameters switch at T/2", Side::Parameter,
                       Schedule([u, T_half](double t) { return t < T_half ? u.mu_hi : u.mu_lo; }),
                       Schedule([u, T_half](double t) {
                           return t < T_half ? u.sigma_lo : u.sigma_hi;
                       })});
    } else {
        const auto& u = s.correlated();
        auto at_alpha = [&](const char* name, double alpha) {
            const double sg = std::sqrt(u.sigma_lo * u.sigma_lo + u.k * std::pow(alpha, u.q_exp));
            out.push_back({name, Side::Parameter, constant(u.mu_lo + alpha), constant(sg)});
        };
        at_alpha("alpha = 0", 0.0);
        at_alpha("alpha = alpha_hi", u.alpha_hi);
        at_alpha("alpha = alpha_hi / 4", 0.25 * u.alpha_hi);
        at_alpha("alpha = alpha_hi / 2", 0.5 * u.alpha_hi);
        at_alpha("alpha = 3 alpha_hi / 4", 0.75 * u.alpha_hi);
        const double a0 = 0.1 * u.alpha_hi, a1 = 0.9 * u.alpha_hi;
        out.push_back({"alpha switches at T/2", Side::Parameter,
                       Schedule([u, T_half, a0, a1](double t) {
                           return u.mu_lo + (t < T_half ? a0 : a1);
                       }),
                       Schedule([u, T_half, a0, a1](double t) {
                           const double alpha = t < T_half ? a0 : a1;
                           return std::sqrt(u.sigma_lo * u.sigma_lo +
                                            u.k * std::pow(alpha, u.q_exp));
                       })});
    }
    return out;
}

const std::vector<std::string> kSweepParams = {"R",     "pi_lo", "pi_hi",  "c_lo",    "c_hi",
                                               "mu_lo", "mu_hi", "sigma_lo", "sigma_hi"};

namespace {

Scenario with_param(const Scenario& base, const std::string& param, double value) {
    Scenario s = base;
    if (!s.is_rect())
        throw std::invalid_argument("comparative-statics sweeps target rect scenarios");
    auto& u = std::get<RectUncertainty>(s.uncertainty);
    if (param == "R")
        s.rates.R = value;
    else if (param == "pi_lo")
        s.constraints.pi_lo = value;
    else if (param == "pi_hi")
        s.constraints.pi_hi = value;
    else if (param == "c_lo")
        s.constraints.c_lo = value;
    else if (param == "c_hi")
        s.constraints.c_hi = value;
    else if (param == "mu_lo")
        u.mu_lo = value;
    else if (param == "mu_hi")
        u.mu_hi = value;
    else if (param == "sigma_lo")
        u.sigma_lo = value;
    else if (param == "sigma_hi")
        u.sigma_hi = value;
    else
        throw std::invalid_argument("unknown sweep parameter \"" + param + "\"");
    const auto check = validate(s);
    if (!check.ok())
        throw std::invalid_argument("sweep value " + std::to_string(value) +
                                    " yields an invalid scenario: " + check.describe());
    return s;
}

}  // namespace

std::vector<SweepRow> sweep_comparative_statics(const Scenario& base, const std::string& param,
                                                const std::vector<double>& grid) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double v : grid) {
        const Scenario s = with_param(base, param, v);
        const Solved sol = solve_all(s);
        SweepRow row;
        row.param_value = v;
        row.mu_star = sol.saddle.mu_star;
        row.sigma_star = sol.saddle.sigma_star;
        row.pi_star = sol.saddle.pi_star;
        row.c_star_t0 = sol.schedule(0.0);
        row.c_star_T = sol.schedule(s.T);
        rows.push_back(row);
    }
    return rows;
}

Direction expected_direction(UtilityKind kind, const std::string& param, const std::string& output) {
    static const std::map<std::string, int> col{{"R", 0},     {"pi_lo", 1},    {"pi_hi", 2},
                                                {"c_lo", 3},  {"c_hi", 4},     {"mu_lo", 5},
                                                {"mu_hi", 6}, {"sigma_lo", 7}, {"sigma_hi", 8}};
    const auto it = col.find(param);
    if (it == col.end()) throw std::invalid_argument("unknown sweep parameter \"" + param + "\"");
    const int j = it->second;
    const auto U = Direction::Up, D = Direction::Down, F = Direction::Flat,
               N = Direction::NonMonotone;
    static const Direction mu_row[9] = {F, F, F, F, F, U, U, F, F};
    static const Direction sigma_row[9] = {F, F, F, F, F, F, F, F, U};
    static const Direction pi_row[9] = {D, U, U, F, F, U, U, F, D};
    static const Direction c_power[9] = {U, U, D, U, N, D, U, F, U};
    static const Direction c_log[9] = {F, F, F, U, U, F, F, F, F};
    if (output == "mu_star") return mu_row[j];
    if (output == "sigma_star") return sigma_row[j];
    if (output == "pi_star") return pi_row[j];
    if (output == "c_star") return kind == UtilityKind::Power ? c_power[j] : c_log[j];
    throw std::invalid_argument("unknown sweep output \"" + output + "\"");
}

namespace {

// Worst violation of the expected direction over a series; 0 means clean.
double direction_violation(const std::vector<double>& series, Direction d) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double diff = series[i + 1] - series[i];
        switch (d) {
            case Direction::Up: worst = std::max(worst, -diff); break;
            case Direction::Down: worst = std::max(worst, diff); break;
            case Direction::Flat: worst = std::max(worst, std::abs(diff)); break;
            case Direction::NonMonotone: break;
        }
    }
    return worst;
}

}  // namespace

std::vector<SweepJudgement> judge_sweep(const Scenario& base, const std::string& param,
                                        const std::vector<double>& grid, double tol) {
    std::vector<double> mu, sigma, pi;
    const std::vector<double> fracs{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::vector<double>> c_series(fracs.size());
    for (double v : grid) {
        const Scenario s = with_param(base, param, v);
        const Solved sol = solve_all(s);
        mu.push_back(sol.saddle.mu_star);
        sigma.push_back(sol.saddle.sigma_star);
        pi.push_back(sol.saddle.pi_star);
        for (std::size_t i = 0; i < fracs.size(); ++i)
            c_series[i].push_back(sol.schedule(fracs[i] * s.T));
    }
    const UtilityKind kind = base.utility.kind;
    std::vector<SweepJudgement> out;
    auto judge = [&](const std::string& output, const std::vector<double>& series) {
        SweepJudgement j;
        j.output = output;
        j.expected = expected_direction(kind, param, output);
        j.worst_violation = direction_violation(series, j.expected);
        j.pass = j.worst_violation <= tol;
        out.push_back(j);
    };
    judge("mu_star", mu);
    judge("sigma_star", sigma);
    judge("pi_star", pi);
    {
        SweepJudgement j;
        j.output = "c_star";
        j.expected = expected_direction(kind, param, "c_star");
        j.worst_violation = 0.0;
        for (const auto& series : c_series)
            j.worst_violation = std::max(j.worst_violation,
                                         direction_violation(series, j.expected));
        j.pass = j.worst_violation <= tol;
        out.push_back(j);
    }
    return out;
}

std::vector<IncrementStat> martingale_increments(const Scenario& s, const Solved& sol,
                                                 const SimConfig& cfg,
                                                 const std::vector<double>& sample_times) {
    if (s.utility.kind != UtilityKind::Power)
        throw std::invalid_argument("martingale_increments is implemented for power utility");
    const auto* qsol = std::get_if<QSolution>(&sol.q);
    if (!qsol) throw std::invalid_argument("martingale_increments needs a power QSolution");
    const ControlSet u = optimal_controls(s, sol.saddle, sol.schedule);

    const int n = cfg.n_steps;
    const double dt = s.T / n;
    std::vector<int> idx;
    for (double t : sample_times)
        idx.push_back(std::clamp(static_cast<int>(std::lround(t / dt)), 0, n));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

    const double p = s.utility.p;
    const double lambda = s.utility.lambda;
    const double rho = s.utility.rho;
    const double sqrt_dt = std::sqrt(dt);
    const std::int64_t n_paths = cfg.n_paths;
    std::vector<std::vector<double>> J(static_cast<std::size_t>(n_paths),
                                       std::vector<double>(idx.size()));

#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t path = 0; path < n_paths; ++path) {
        NormalStream z(path_seed(cfg, path));  // same stream as mc_value
        double lx = std::log(s.x0);
        double integral = 0.0;
        double prev = lambda * std::exp(-rho * 0.0) * std::pow(u.c(0.0) * s.x0, p) / p;
        std::size_t next_sample = 0;
        auto record = [&](int k, double lx_now, double integral_now) {
            while (next_sample < idx.size() && idx[next_sample] == k) {
                const double t = k * dt;
                J[static_cast<std::size_t>(path)][next_sample] =
                    integral_now +
                    std::exp((*qsol)(t) - rho * t) * std::pow(std::exp(lx_now), p) / p;
                ++next_sample;
            }
        };
        record(0, lx, integral);
        for (int k = 0; k < n; ++k) {
            const double t = k * dt;
            const double pi = u.pi(t);
            const double sg = u.sigma(t);
            lx += log_wealth_drift(s, pi, u.c(t), u.mu(t), sg) * dt + pi * sg * sqrt_dt * z.next();
            const double t1 = (k + 1) * dt;
            const double cur = lambda * std::exp(-rho * t1) * std::pow(u.c(t1) * std::exp(lx), p) / p;
            integral += 0.5 * dt * (prev + cur);
            prev = cur;
            record(k + 1, lx, integral);
        }
    }

    std::vector<IncrementStat> out;
    for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
        std::vector<double> diffs(static_cast<std::size_t>(n_paths));
        for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = J[i][j + 1] - J[i][j];
        const double mean = pairwise_sum(diffs) / static_cast<double>(n_paths);
        std::vector<double> sq(diffs.size());
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            const double d = diffs[i] - mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / (static_cast<double>(n_paths) - 1.0);
        IncrementStat st;
        st.t0 = idx[j] * dt;
        st.t1 = idx[j + 1] * dt;
        st.mean = mean;
        st.se = std::sqrt(var / static_cast<double>(n_paths));
        out.push_back(st);
    }
    return out;
}

}  // namespace rmerton
