#include "rmerton/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rmerton/threading.hpp"

namespace rmerton {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + i * step;
    out.back() = hi;  // endpoint exact
    return out;
}

struct BGrid {
    std::vector<double> mu;
    std::vector<double> sigma2;
};

BGrid make_b_grid(const Scenario& s, int n_mu, int n_sig) {
    BGrid b;
    if (s.is_rect()) {
        const auto& u = s.rect();
        const auto mus = linspace(u.mu_lo, u.mu_hi, n_mu);
        const auto sig2s = linspace(u.sigma_lo * u.sigma_lo, u.sigma_hi * u.sigma_hi, n_sig);
        b.mu.reserve(mus.size() * sig2s.size());
        b.sigma2.reserve(mus.size() * sig2s.size());
        for (double m : mus)
            for (double v : sig2s) {
                b.mu.push_back(m);
                b.sigma2.push_back(v);
            }
    } else {
        const auto& u = s.correlated();
        const auto alphas = linspace(0.0, u.alpha_hi, n_mu);
        for (double a : alphas) {
            b.mu.push_back(u.mu_lo + a);
            b.sigma2.push_back(u.sigma_lo * u.sigma_lo + u.k * std::pow(a, u.q_exp));
        }
    }
    return b;
}

struct ArgBest {
    double value;
    std::size_t index;
};

// Serial reference and OpenMP kernel compute identical results: each slot of
// the per-row buffers depends only on its own index, and the final argmax /
// argmin reduction runs serially with the lowest-index tie break.

void maxmin_rows_serial(const std::vector<double>& fs, const Scenario& s,
                        const std::vector<double>& pis, const BGrid& b,
                        std::vector<double>& row_val, std::vector<std::size_t>& row_arg) {
    for (std::size_t i = 0; i < pis.size(); ++i) {
        double worst_g = kInf;
        for (std::size_t k = 0; k < b.mu.size(); ++k)
            worst_g = std::min(worst_g, eval_g(pis[i], b.mu[k], b.sigma2[k], s));
        double best = -kInf;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < fs.size(); ++j) {
            const double v = fs[j] + worst_g;
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
        row_val[i] = best;
        row_arg[i] = best_j;
    }
}

void maxmin_rows_parallel(const std::vector<double>& fs, const Scenario& s,
                          const std::vector<double>& pis, const BGrid& b,
                          std::vector<double>& row_val, std::vector<std::size_t>& row_arg) {
    const std::int64_t n = static_cast<std::int64_t>(pis.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t ii = 0; ii < n; ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double worst_g = kInf;
        for (std::size_t k = 0; k < b.mu.size(); ++k)
            worst_g = std::min(worst_g, eval_g(pis[i], b.mu[k], b.sigma2[k], s));
        double best = -kInf;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < fs.size(); ++j) {
            const double v = fs[j] + worst_g;
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
        row_val[i] = best;
        row_arg[i] = best_j;
    }
}

void minmax_cols_serial(const std::vector<double>& fs, const Scenario& s,
                        const std::vector<double>& pis, const BGrid& b,
                        std::vector<double>& col_val) {
    double best_f = -kInf;
    for (double f : fs) best_f = std::max(best_f, f);
    for (std::size_t k = 0; k < b.mu.size(); ++k) {
        double best_g = -kInf;
        for (std::size_t i = 0; i < pis.size(); ++i)
            best_g = std::max(best_g, eval_g(pis[i], b.mu[k], b.sigma2[k], s));
        col_val[k] = best_f + best_g;
    }
}

void minmax_cols_parallel(const std::vector<double>& fs, const Scenario& s,
                          const std::vector<double>& pis, const BGrid& b,
                          std::vector<double>& col_val) {
    double best_f = -kInf;
    for (double f : fs) best_f = std::max(best_f, f);
    const std::int64_t n = static_cast<std::int64_t>(b.mu.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t kk = 0; kk < n; ++kk) {
        const std::size_t k = static_cast<std::size_t>(kk);
        double best_g = -kInf;
        for (std::size_t i = 0; i < pis.size(); ++i)
            best_g = std::max(best_g, eval_g(pis[i], b.mu[k], b.sigma2[k], s));
        col_val[k] = best_f + best_g;
    }
}

ArgBest argmax_lowest(const std::vector<double>& v) {
    ArgBest out{-kInf, 0};
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > out.value) {
            out.value = v[i];
            out.index = i;
        }
    return out;
}

ArgBest argmin_lowest(const std::vector<double>& v) {
    ArgBest out{kInf, 0};
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < out.value) {
            out.value = v[i];
            out.index = i;
        }
    return out;
}

}  // namespace

GridSaddleResult grid_minimax_oracle(double x_q, const Scenario& s, const GridSpec& grid,
                                     bool parallel) {
    if (grid.n_pi < 11 || grid.n_c < 11 || grid.n_mu < 11 || (s.is_rect() && grid.n_sig < 11))
        throw std::invalid_argument("grid_minimax_oracle needs at least 11 points per axis");

    const auto& box = s.constraints;
    const BGrid b = make_b_grid(s, grid.n_mu, grid.n_sig);
    const double chat = chat_unconstrained(x_q, s);

    const bool pi_lo_open = std::isinf(box.pi_lo);
    const bool pi_hi_open = std::isinf(box.pi_hi);
    const bool c_hi_open = std::isinf(box.c_hi);
    double radius_pi = 1.0;
    double radius_c = std::max(4.0 * chat, 1.0);

    GridSaddleResult out;
    bool have_prev = false;
    double prev_pi = 0.0, prev_c = 0.0;

    for (int doubling = 0;; ++doubling) {
        if (doubling > 20)
            throw std::runtime_error("grid oracle exhaustion did not converge in 20 doublings");

        const double pi_lo = pi_lo_open ? -radius_pi : box.pi_lo;
        const double pi_hi = pi_hi_open ? radius_pi : box.pi_hi;
        const double c_hi = c_hi_open ? radius_c : box.c_hi;
        const auto pis = linspace(pi_lo, pi_hi, grid.n_pi);
        const auto cs = linspace(box.c_lo, c_hi, grid.n_c);
        std::vector<double> fs(cs.size());
        for (std::size_t j = 0; j < cs.size(); ++j) fs[j] = eval_f(x_q, cs[j], s);

        std::vector<double> row_val(pis.size());
        std::vector<std::size_t> row_arg(pis.size());
        if (parallel)
            maxmin_rows_parallel(fs, s, pis, b, row_val, row_arg);
        else
            maxmin_rows_serial(fs, s, pis, b, row_val, row_arg);
        const ArgBest best_row = argmax_lowest(row_val);
        const double pi_hat = pis[best_row.index];
        const double c_hat = cs[row_arg[best_row.index]];

        std::vector<double> col_val(b.mu.size());
        if (parallel)
            minmax_cols_parallel(fs, s, pis, b, col_val);
        else
            minmax_cols_serial(fs, s, pis, b, col_val);
        const ArgBest best_col = argmin_lowest(col_val);

        out.pi = pi_hat;
        out.c = c_hat;
        out.mu = b.mu[best_col.index];
        out.sigma2 = b.sigma2[best_col.index];
        out.maxmin = best_row.value;
        out.minmax = best_col.value;
        out.gap = std::abs(out.minmax - out.maxmin);
        out.doublings = doubling;

        // Exhaustion: grow truncated axes until the argmax is interior and
        // moves by no more than one grid cell between passes.
        const double cell_pi = (pi_hi - pi_lo) / (grid.n_pi - 1);
        const double cell_c = (c_hi - box.c_lo) / (grid.n_c - 1);
        bool pinned = false;
        if (pi_lo_open && pi_hat <= pi_lo + cell_pi) pinned = true;
        if (pi_hi_open && pi_hat >= pi_hi - cell_pi) pinned = true;
        if (c_hi_open && c_hat >= c_hi - cell_c) pinned = true;
        const bool needs_growth = pi_lo_open || pi_hi_open || c_hi_open;
        const bool stable = have_prev && std::abs(pi_hat - prev_pi) <= cell_pi &&
                            std::abs(c_hat - prev_c) <= cell_c;
        if (!needs_growth || (!pinned && stable)) return out;
        have_prev = true;
        prev_pi = pi_hat;
        prev_c = c_hat;
        if (pinned || !stable) {
            radius_pi *= 2.0;
            radius_c *= 2.0;
        }
    }
}

namespace {

// Min of g over the B grid for fixed pi; exact for rect sets, whose minimum
// sits at a box corner contained in the grid.
double min_g_over_b(double pi, const Scenario& s, const BGrid& b) {
    double worst = kInf;
    for (std::size_t k = 0; k < b.mu.size(); ++k)
        worst = std::min(worst, eval_g(pi, b.mu[k], b.sigma2[k], s));
    return worst;
}

template <typename F>
double golden_max(F&& f, double lo, double hi, int iters = 120) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, bnd = hi;
    double c = bnd - invphi * (bnd - a);
    double d = a + invphi * (bnd - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && bnd - a > 1e-13 * std::max(1.0, std::abs(bnd)); ++i) {
        if (fc > fd) {
            bnd = d;
            d = c;
            fd = fc;
            c = bnd - invphi * (bnd - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (bnd - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + bnd);
}

}  // namespace

PortfolioOracleResult grid_portfolio_saddle(const Scenario& s, double pi_resolution, int n_mu,
                                            int n_sig, bool polish, bool parallel) {
    const auto& box = s.constraints;
    const BGrid b = make_b_grid(s, n_mu, n_sig);
    const bool pi_lo_open = std::isinf(box.pi_lo);
    const bool pi_hi_open = std::isinf(box.pi_hi);
    double radius = 1.0;

    for (int doubling = 0;; ++doubling) {
        if (doubling > 20)
            throw std::runtime_error("portfolio oracle exhaustion did not converge in 20 doublings");
        const double lo = pi_lo_open ? -radius : box.pi_lo;
        const double hi = pi_hi_open ? radius : box.pi_hi;
        const int n_pi = std::max(11, static_cast<int>(std::ceil((hi - lo) / pi_resolution)) + 1);
        const auto pis = linspace(lo, hi, n_pi);

        std::vector<double> m(pis.size());
        const std::int64_t n = static_cast<std::int64_t>(pis.size());
        if (parallel) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
            for (std::int64_t i = 0; i < n; ++i)
                m[static_cast<std::size_t>(i)] =
                    min_g_over_b(pis[static_cast<std::size_t>(i)], s, b);
        } else {
            for (std::int64_t i = 0; i < n; ++i)
                m[static_cast<std::size_t>(i)] =
                    min_g_over_b(pis[static_cast<std::size_t>(i)], s, b);
        }
        const ArgBest best = argmax_lowest(m);
        const double cell = (hi - lo) / (n_pi - 1);
        const double pi_hat = pis[best.index];

        const bool pinned = (pi_lo_open && pi_hat <= lo + cell) || (pi_hi_open && pi_hat >= hi - cell);
        if (pinned) {
            radius *= 2.0;
            continue;
        }

        PortfolioOracleResult out;
        out.pi = pi_hat;
        out.value = best.value;
        if (polish) {
            const double a = std::max(lo, pi_hat - 2.0 * cell);
            const double c = std::min(hi, pi_hat + 2.0 * cell);
            out.pi = golden_max([&](double x) { return min_g_over_b(x, s, b); }, a, c);
            out.value = min_g_over_b(out.pi, s, b);
        }

        // Adversary side: argmin over the B grid of the (polished) best response.
        double worst = kInf;
        std::size_t worst_k = 0;
        for (std::size_t k = 0; k < b.mu.size(); ++k) {
            auto g_k = [&](double x) { return eval_g(x, b.mu[k], b.sigma2[k], s); };
            double response = -kInf;
            for (double x : pis) response = std::max(response, g_k(x));
            if (polish) {
                // refine around the grid best response
                double x_best = pis[0];
                for (double x : pis)
                    if (g_k(x) > g_k(x_best)) x_best = x;
                const double a = std::max(lo, x_best - 2.0 * cell);
                const double c = std::min(hi, x_best + 2.0 * cell);
                const double x_ref = golden_max(g_k, a, c);
                response = std::max(response, g_k(x_ref));
            }
            if (response < worst) {
                worst = response;
                worst_k = k;
            }
        }
        out.mu = b.mu[worst_k];
        out.sigma2 = b.sigma2[worst_k];
        return out;
    }
}

SaddleInequalityCheck check_saddle_inequalities(double x_q, const Scenario& s, double pi_star,
                                                double c_star, double mu_star, double sigma2_star,
                                                const GridSpec& grid, bool parallel) {
    const auto& box = s.constraints;
    const double f_star = eval_f(x_q, c_star, s);
    const double F_star = f_star + eval_g(pi_star, mu_star, sigma2_star, s);

    const BGrid b = make_b_grid(s, grid.n_mu, grid.n_sig);
    SaddleInequalityCheck out;
    // Left: adversary cannot push the value below F* at the optimal strategy.
    double worst_left = kInf;
    for (std::size_t k = 0; k < b.mu.size(); ++k)
        worst_left = std::min(worst_left, f_star + eval_g(pi_star, b.mu[k], b.sigma2[k], s) - F_star);
    out.worst_left = worst_left;

    // Right: no admissible strategy beats F* against the worst-case parameters.
    const double pi_lo = std::isinf(box.pi_lo) ? std::min(-4.0 * std::abs(pi_star) - 2.0, -4.0)
                                               : box.pi_lo;
    const double pi_hi = std::isinf(box.pi_hi) ? std::max(4.0 * std::abs(pi_star) + 2.0, 4.0)
                                               : box.pi_hi;
    const double c_hi = std::isinf(box.c_hi)
                            ? std::max({4.0 * chat_unconstrained(x_q, s), 1.0, 2.0 * c_star})
                            : box.c_hi;
    const auto pis = linspace(pi_lo, pi_hi, grid.n_pi);
    const auto cs = linspace(box.c_lo, c_hi, grid.n_c);
    const std::int64_t n = static_cast<std::int64_t>(pis.size());
    std::vector<double> row_best(pis.size(), -kInf);
    if (parallel) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
        for (std::int64_t i = 0; i < n; ++i) {
            const double g = eval_g(pis[static_cast<std::size_t>(i)], mu_star, sigma2_star, s);
            double best = -kInf;
            for (double c : cs) best = std::max(best, eval_f(x_q, c, s) + g);
            row_best[static_cast<std::size_t>(i)] = best;
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            const double g = eval_g(pis[static_cast<std::size_t>(i)], mu_star, sigma2_star, s);
            double best = -kInf;
            for (double c : cs) best = std::max(best, eval_f(x_q, c, s) + g);
            row_best[static_cast<std::size_t>(i)] = best;
        }
    }
    out.worst_right = argmax_lowest(row_best).value - F_star;
    return out;
}

}  // namespace rmerton
