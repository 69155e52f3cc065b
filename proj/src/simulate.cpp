#include "rmerton/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmerton/threading.hpp"

namespace rmerton {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ValidationResult validate(const SimConfig& cfg) {
    std::vector<Violation> v;
    if (cfg.n_paths < 1000) v.push_back({"n_paths", "n_paths >= 1000 required"});
    if (cfg.n_steps < 100) v.push_back({"n_steps", "n_steps >= 100 required"});
    return {std::move(v)};
}

double NormalStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    auto uniform01 = [this] {  // in (0, 1]
        state_ = splitmix64(state_);
        return (static_cast<double>(state_ >> 11) + 1.0) * 0x1.0p-53;
    };
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t path_seed(const SimConfig& cfg, std::int64_t path) {
    return cfg.seed ^ splitmix64(static_cast<std::uint64_t>(path));
}

double log_wealth_drift(const Scenario& s, double pi, double c, double mu, double sigma) {
    const double one_minus_pi = 1.0 - pi;
    const double pos = std::max(one_minus_pi, 0.0);
    const double neg = std::max(-one_minus_pi, 0.0);
    return mu * pi + s.rates.r * pos - s.rates.R * neg - c - 0.5 * pi * pi * sigma * sigma;
}

ControlSet optimal_controls(const Scenario&, const PortfolioSaddle& saddle,
                            const ConsumptionSchedule& schedule) {
    ControlSet u;
    u.pi = [pi = saddle.pi_star](double) { return pi; };
    u.c = [schedule](double t) { return schedule(t); };
    u.mu = [mu = saddle.mu_star](double) { return mu; };
    u.sigma = [sg = saddle.sigma_star](double) { return sg; };
    return u;
}

std::vector<std::vector<double>> simulate_wealth(const Scenario& s, const ControlSet& u,
                                                 const SimConfig& cfg) {
    const int n = cfg.n_steps;
    const double dt = s.T / n;
    const double sqrt_dt = std::sqrt(dt);
    std::vector<std::vector<double>> paths(static_cast<std::size_t>(cfg.n_paths));
    const std::int64_t n_paths = cfg.n_paths;
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t i = 0; i < n_paths; ++i) {
        NormalStream z(path_seed(cfg, i));
        auto& x = paths[static_cast<std::size_t>(i)];
        x.resize(static_cast<std::size_t>(n) + 1);
        double lx = std::log(s.x0);
        x[0] = s.x0;
        for (int k = 0; k < n; ++k) {
            const double t = k * dt;
            const double pi = u.pi(t);
            const double sg = u.sigma(t);
            lx += log_wealth_drift(s, pi, u.c(t), u.mu(t), sg) * dt + pi * sg * sqrt_dt * z.next();
            x[static_cast<std::size_t>(k) + 1] = std::exp(lx);
        }
    }
    return paths;
}

namespace {

double pairwise_sum_range(const double* v, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}

double utility(const Scenario& s, double x) {
    if (s.utility.kind == UtilityKind::Power) {
        const double p = s.utility.p;
        return std::pow(x, p) / p;
    }
    return std::log(x);
}

// Discounted utility of one path: trapezoid of lambda e^{-rho t} U(c_t X_t)
// on the simulation grid plus e^{-rho T} U(X_T).
double path_objective(const Scenario& s, const ControlSet& u, const SimConfig& cfg,
                      std::int64_t path) {
    const int n = cfg.n_steps;
    const double dt = s.T / n;
    const double sqrt_dt = std::sqrt(dt);
    const double lambda = s.utility.lambda;
    const double rho = s.utility.rho;
    NormalStream z(path_seed(cfg, path));
    double lx = std::log(s.x0);
    double integral = 0.0;
    double prev = 0.0;
    if (lambda > 0.0) prev = lambda * utility(s, u.c(0.0) * s.x0);
    for (int k = 0; k < n; ++k) {
        const double t = k * dt;
        const double pi = u.pi(t);
        const double sg = u.sigma(t);
        lx += log_wealth_drift(s, pi, u.c(t), u.mu(t), sg) * dt + pi * sg * sqrt_dt * z.next();
        if (lambda > 0.0) {
            const double t1 = (k + 1) * dt;
            const double cur = lambda * std::exp(-rho * t1) * utility(s, u.c(t1) * std::exp(lx));
            integral += 0.5 * dt * (prev + cur);
            prev = cur;
        }
    }
    return integral + std::exp(-rho * s.T) * utility(s, std::exp(lx));
}

}  // namespace

double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum_range(v.data(), v.size());
}

McEstimate mc_value(const Scenario& s, const ControlSet& u, const SimConfig& cfg, bool parallel) {
    const std::int64_t n_paths = cfg.n_paths;
    std::vector<double> obj(static_cast<std::size_t>(n_paths));
    if (parallel) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
        for (std::int64_t i = 0; i < n_paths; ++i)
            obj[static_cast<std::size_t>(i)] = path_objective(s, u, cfg, i);
    } else {
        for (std::int64_t i = 0; i < n_paths; ++i)
            obj[static_cast<std::size_t>(i)] = path_objective(s, u, cfg, i);
    }

    const double mean = pairwise_sum(obj) / static_cast<double>(n_paths);
    McEstimate out;
    out.value = mean;
    if (!std::isfinite(mean)) {
        out.stderr_ = kInf;  // e.g. power p < 0 with a zero-consumption interval
        return out;
    }
    std::vector<double> sq(obj.size());
    for (std::size_t i = 0; i < obj.size(); ++i) {
        const double d = obj[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (static_cast<double>(n_paths) - 1.0);
    out.stderr_ = std::sqrt(var / static_cast<double>(n_paths));
    return out;
}

}  // namespace rmerton
