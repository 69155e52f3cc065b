#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rmerton {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class UtilityKind { Power, Log };

// Utility of consumption and terminal wealth. Power: U(x) = x^p / p with
// p in (-inf,0) u (0,1). Log: U(x) = ln x (p is ignored and treated as 0
// wherever an exponent is needed).
struct UtilitySpec {
    UtilityKind kind = UtilityKind::Power;
    double p = 0.5;
    double lambda = 1.0;  // weight of intertemporal consumption
    double rho = 0.0;     // discount rate

    double exponent() const { return kind == UtilityKind::Power ? p : 0.0; }
    bool operator==(const UtilitySpec&) const = default;
};

// Lending rate r and borrowing rate R, per year. R >= r.
struct Rates {
    double r = 0.0;
    double R = 0.0;
    bool operator==(const Rates&) const = default;
};

// Box constraints on the strategy pair (pi, c). pi_lo and pi_hi may be
// -inf / +inf, c_hi may be +inf; these are IEEE infinities, never finite
// sentinels, and every arithmetic use is guarded at the call site.
struct ConstraintBox {
    double pi_lo = 0.0;
    double pi_hi = 1.0;
    double c_lo = 0.0;
    double c_hi = kInf;
    bool operator==(const ConstraintBox&) const = default;
};

// Rectangular uncertainty: (mu, sigma^2) in [mu_lo, mu_hi] x [sigma_lo^2, sigma_hi^2].
struct RectUncertainty {
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
    bool operator==(const RectUncertainty&) const = default;
};

// Correlated uncertainty: mu = mu_lo + alpha, sigma^2 = sigma_lo^2 + k alpha^q
// for alpha in [0, alpha_hi]. Requires r == R and an unconstrained portfolio.
struct CorrelatedUncertainty {
    double mu_lo = 0.0;
    double sigma_lo = 0.0;
    double k = 1.0;
    double q_exp = 0.5;
    double alpha_hi = 0.0;
    bool operator==(const CorrelatedUncertainty&) const = default;
};

using Uncertainty = std::variant<RectUncertainty, CorrelatedUncertainty>;

// A full problem instance. Immutable value object; safe to copy and share
// across threads.
struct Scenario {
    UtilitySpec utility;
    Rates rates;
    ConstraintBox constraints;
    Uncertainty uncertainty = RectUncertainty{};
    double T = 1.0;   // horizon, years
    double x0 = 1.0;  // initial wealth

    bool is_rect() const { return std::holds_alternative<RectUncertainty>(uncertainty); }
    const RectUncertainty& rect() const { return std::get<RectUncertainty>(uncertainty); }
    const CorrelatedUncertainty& correlated() const { return std::get<CorrelatedUncertainty>(uncertainty); }
    bool operator==(const Scenario&) const = default;
};

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

// Pure, total check of every type invariant. Violations are data, not errors.
// Only structural bounds are checked; the uniform-integrability admissibility
// requirement on the utility of wealth is a modeling caveat that no validator
// can decide and is not represented here.
ValidationResult validate(const Scenario& s);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON round trip. Infinite bounds are the string tokens "inf" / "-inf";
// numbers survive load(save(s)) bit-exactly. load_scenario throws ParseError
// on malformed or incomplete documents and ValidationError when the parsed
// scenario fails validate().
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
std::string save_scenario(const Scenario& s);

const char* to_string(UtilityKind k);

}  // namespace rmerton
