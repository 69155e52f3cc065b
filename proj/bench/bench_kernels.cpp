// Times the OpenMP kernels against their serial reference implementations:
// the grid minimax scan and the Monte Carlo path loop.

#include <chrono>
#include <cstdio>

#include "rmerton/consumption.hpp"
#include "rmerton/grid_oracle.hpp"
#include "rmerton/simulate.hpp"
#include "rmerton/threading.hpp"

using namespace rmerton;

namespace {

Scenario bench_scenario() {
    Scenario s;
    s.utility = {UtilityKind::Power, 0.5, 1.0, 0.1};
    s.rates = {0.02, 0.04};
    s.constraints = {-1.0, 2.0, 0.01, 0.8};
    s.uncertainty = RectUncertainty{0.10, 0.12, 0.1, 0.2};
    s.T = 2.0;
    s.x0 = 1.0;
    return s;
}

template <typename F>
double time_ms(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
    const Scenario s = bench_scenario();
    std::printf("workers: %d\n\n", worker_count());

    GridSpec grid{401, 201, 41, 41};
    GridSaddleResult r_serial, r_parallel;
    const double t_grid_serial = time_ms([&] { r_serial = grid_minimax_oracle(0.0, s, grid, false); });
    const double t_grid_parallel =
        time_ms([&] { r_parallel = grid_minimax_oracle(0.0, s, grid, true); });
    std::printf("grid minimax oracle (%dx%dx%dx%d)\n", grid.n_pi, grid.n_c, grid.n_mu, grid.n_sig);
    std::printf("  serial:   %8.1f ms  (maxmin %.12f)\n", t_grid_serial, r_serial.maxmin);
    std::printf("  parallel: %8.1f ms  (maxmin %.12f)\n", t_grid_parallel, r_parallel.maxmin);
    std::printf("  speedup:  %.2fx, bit-identical: %s\n\n", t_grid_serial / t_grid_parallel,
                (r_serial.maxmin == r_parallel.maxmin && r_serial.pi == r_parallel.pi) ? "yes"
                                                                                       : "NO");

    const Solved sol = solve_all(s);
    const ControlSet u = optimal_controls(s, sol.saddle, sol.schedule);
    SimConfig cfg{200000, 250, 42};
    McEstimate m_serial, m_parallel;
    const double t_mc_serial = time_ms([&] { m_serial = mc_value(s, u, cfg, false); });
    const double t_mc_parallel = time_ms([&] { m_parallel = mc_value(s, u, cfg, true); });
    std::printf("monte carlo value (%lld paths x %d steps)\n",
                static_cast<long long>(cfg.n_paths), cfg.n_steps);
    std::printf("  serial:   %8.1f ms  (value %.12f)\n", t_mc_serial, m_serial.value);
    std::printf("  parallel: %8.1f ms  (value %.12f)\n", t_mc_parallel, m_parallel.value);
    std::printf("  speedup:  %.2fx, bit-identical: %s\n", t_mc_serial / t_mc_parallel,
                (m_serial.value == m_parallel.value && m_serial.stderr_ == m_parallel.stderr_)
                    ? "yes"
                    : "NO");
    return 0;
}
