#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmerton/consumption.hpp"
#include "rmerton/grid_oracle.hpp"
#include "rmerton/ode.hpp"
#include "rmerton/saddle.hpp"
#include "rmerton/scenario.hpp"
#include "rmerton/simulate.hpp"
#include "rmerton/verify.hpp"

namespace rmerton {

namespace {

using nlohmann::json;

json encode(double x) {
    if (x == kInf) return json("inf");
    if (x == -kInf) return json("-inf");
    return json(x);
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
    if (output.empty() || output == "-") {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        return;
    }
    std::ofstream f(output);
    if (!f) throw std::runtime_error("cannot write output file \"" + output + "\"");
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

json saddle_json(const PortfolioSaddle& sp) {
    json j;
    j["regime"] = to_string(sp.regime);
    j["pi_star"] = encode(sp.pi_star);
    j["mu_star"] = encode(sp.mu_star);
    j["mu_star_is_interval"] = sp.mu_star_is_interval;
    j["sigma_star"] = encode(sp.sigma_star);
    j["K"] = encode(sp.K);
    if (sp.betas) j["betas"] = {encode((*sp.betas)[0]), encode((*sp.betas)[1]), encode((*sp.betas)[2])};
    return j;
}

json qsolution_json(const QSolution& q) {
    json j;
    j["utility"] = "power";
    j["branch_label"] = q.branch_label;
    j["K"] = encode(q.K);
    j["q0"] = encode(q.q0());
    j["segments"] = json::array();
    for (const auto& seg : q.segments)
        j["segments"].push_back({{"t_lo", encode(seg.t_lo)},
                                 {"t_hi", encode(seg.t_hi)},
                                 {"kind", to_string(seg.kind)},
                                 {"A", encode(seg.A)}});
    j["switching_times"] = json::object();
    for (const auto& [name, t] : q.switching_times) j["switching_times"][name] = encode(t);
    return j;
}

json log_solution_json(const LogQSolution& q) {
    json j;
    j["utility"] = "log";
    j["K"] = encode(q.K);
    j["q0"] = encode(q.q0());
    j["Q_L0"] = encode(q.Q_L0);
    return j;
}

json schedule_json(const ConsumptionSchedule& sched) {
    json j;
    j["monotonicity"] = to_string(sched.monotonicity);
    j["pattern"] = json::array();
    for (const auto& piece : sched.pattern)
        j["pattern"].push_back({{"t_lo", encode(piece.t_lo)},
                                {"t_hi", encode(piece.t_hi)},
                                {"regime", to_string(piece.regime)}});
    j["switching_times"] = json::object();
    for (const auto& [name, t] : sched.switching_times) j["switching_times"][name] = encode(t);
    return j;
}

std::string schedule_csv(const ConsumptionSchedule& sched, double T, int samples) {
    std::ostringstream os;
    os << "t,c_star,regime\n" << std::setprecision(17);
    for (int i = 0; i < samples; ++i) {
        const double t = samples == 1 ? 0.0 : T * i / (samples - 1);
        os << t << ',' << sched(t) << ',' << to_string(sched.regime_at(t)) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "param_value,mu_star,sigma_star,pi_star,c_star_t0,c_star_T\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.param_value << ',' << r.mu_star << ',' << r.sigma_star << ',' << r.pi_star << ','
           << r.c_star_t0 << ',' << r.c_star_T << '\n';
    return os.str();
}

json report_json(const VerificationReport& rep) {
    json j;
    j["closed_value"] = encode(rep.closed_value);
    j["mc_value"] = encode(rep.mc_value);
    j["mc_stderr"] = encode(rep.mc_stderr);
    j["value_pass"] = rep.value_pass;
    j["saddle_checks"] = json::array();
    for (const auto& row : rep.saddle_checks)
        j["saddle_checks"].push_back({{"description", row.description},
                                      {"mc", encode(row.mc)},
                                      {"stderr", encode(row.se)},
                                      {"expected_side", std::string(1, row.expected_side)},
                                      {"pass", row.pass}});
    j["all_pass"] = rep.all_pass();
    return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"closed-form robust consumption-investment solver with oracle verification"};
    app.require_subcommand(1);

    std::string scenario_path, output = "-", format = "json", param;
    int samples = 201, sweep_steps = 21, mc_steps = 500;
    double from = 0.0, to = 0.0, cap1 = 0.0, cap2 = 0.0;
    std::int64_t mc_paths = 100000;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario_path, "scenario JSON file")->required();
        sub->add_option("-o,--output", output, "output path or - for stdout");
    };
    auto* classify = app.add_subcommand("classify", "worst-case parameters and optimal portfolio");
    add_common(classify);
    auto* solve = app.add_subcommand("solve", "opportunity-exponent solution q(t)");
    add_common(solve);
    auto* consume = app.add_subcommand("consume", "optimal consumption schedule");
    add_common(consume);
    consume->add_option("--format", format, "json or csv (default csv)");
    consume->add_option("--samples", samples, "number of CSV sample rows")->check(CLI::PositiveNumber);
    auto* value = app.add_subcommand("value", "value function at x0");
    add_common(value);
    auto* verify = app.add_subcommand("verify", "Monte Carlo verification report");
    add_common(verify);
    verify->add_option("--paths", mc_paths, "number of Monte Carlo paths");
    verify->add_option("--steps", mc_steps, "time steps per path");
    verify->add_option("--seed", seed, "base RNG seed");
    auto* sweep = app.add_subcommand("sweep", "comparative-statics sweep (CSV)");
    add_common(sweep);
    sweep->add_option("--param", param, "parameter to sweep")->required();
    sweep->add_option("--from", from, "first grid value")->required();
    sweep->add_option("--to", to, "last grid value")->required();
    sweep->add_option("--steps", sweep_steps, "number of grid points")->check(CLI::PositiveNumber);
    auto* demo = app.add_subcommand("demo-nm", "witness non-monotonicity in the consumption cap");
    add_common(demo);
    demo->add_option("--cap1", cap1, "first consumption cap")->required();
    demo->add_option("--cap2", cap2, "second consumption cap")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (consume->parsed() && consume->count("--format") == 0) format = "csv";

    try {
        const Scenario s = load_scenario_file(scenario_path);

        if (classify->parsed()) {
            emit(saddle_json(solve_saddle(s)).dump(2), output, out);
        } else if (solve->parsed()) {
            const Solved sol = solve_all(s);
            const json j = s.utility.kind == UtilityKind::Power
                               ? qsolution_json(std::get<QSolution>(sol.q))
                               : log_solution_json(std::get<LogQSolution>(sol.q));
            emit(j.dump(2), output, out);
        } else if (consume->parsed()) {
            const Solved sol = solve_all(s);
            if (format == "csv")
                emit(schedule_csv(sol.schedule, s.T, samples), output, out);
            else
                emit(schedule_json(sol.schedule).dump(2), output, out);
        } else if (value->parsed()) {
            const Solved sol = solve_all(s);
            json j;
            j["value"] = encode(sol.value(s));
            j["q0"] = encode(sol.q0());
            if (const auto* lq = std::get_if<LogQSolution>(&sol.q)) j["Q_L0"] = encode(lq->Q_L0);
            emit(j.dump(2), output, out);
        } else if (verify->parsed()) {
            SimConfig cfg{mc_paths, mc_steps, seed};
            const auto cfg_check = validate(cfg);
            if (!cfg_check.ok()) {
                err << "invalid simulation config: " << cfg_check.describe() << '\n';
                return 1;
            }
            const Solved sol = solve_all(s);
            const VerificationReport rep = check_saddle_mc(s, default_perturbations(s, sol), cfg);
            emit(report_json(rep).dump(2), output, out);
            if (!rep.all_pass()) return 2;
        } else if (sweep->parsed()) {
            std::vector<double> grid;
            for (int i = 0; i < sweep_steps; ++i)
                grid.push_back(sweep_steps == 1 ? from
                                                : from + (to - from) * i / (sweep_steps - 1));
            emit(sweep_csv(sweep_comparative_statics(s, param, grid)), output, out);
        } else if (demo->parsed()) {
            const CapWitness w = demo_cap_nonmonotonicity(s, cap1, cap2);
            json j;
            j["found"] = w.found;
            j["t_near_0"] = encode(w.t_near_0);
            j["t_near_T"] = encode(w.t_near_T);
            j["c_big_at_0"] = encode(w.c_big_at_0);
            j["c_small_at_0"] = encode(w.c_small_at_0);
            j["c_big_at_T"] = encode(w.c_big_at_T);
            j["c_small_at_T"] = encode(w.c_small_at_T);
            j["note"] = w.note;
            emit(j.dump(2), output, out);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace rmerton
