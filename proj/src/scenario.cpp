#include "rmerton/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rmerton {

using nlohmann::json;

const char* to_string(UtilityKind k) {
    return k == UtilityKind::Power ? "power" : "log";
}

std::string ValidationResult::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].field << ": " << violations[i].message;
    }
    return os.str();
}

namespace {

bool finite(double x) { return std::isfinite(x); }

void require(std::vector<Violation>& out, bool cond, const char* field, const char* msg) {
    if (!cond) out.push_back({field, msg});
}

}  // namespace

ValidationResult validate(const Scenario& s) {
    std::vector<Violation> v;
    const auto& u = s.utility;
    if (u.kind == UtilityKind::Power) {
        require(v, finite(u.p) && u.p < 1.0 && u.p != 0.0, "utility.p",
                "power exponent must lie in (-inf, 0) u (0, 1)");
    }
    require(v, finite(u.lambda) && u.lambda >= 0.0, "utility.lambda", "lambda >= 0 required");
    require(v, finite(u.rho) && u.rho >= 0.0, "utility.rho", "rho >= 0 required");

    require(v, finite(s.rates.r), "rates.r", "lending rate must be finite");
    require(v, finite(s.rates.R), "rates.R", "borrowing rate must be finite");
    if (finite(s.rates.r) && finite(s.rates.R))
        require(v, s.rates.R >= s.rates.r, "rates.R", "R >= r required");

    const auto& b = s.constraints;
    require(v, !std::isnan(b.pi_lo) && b.pi_lo <= 0.0, "constraints.pi_lo", "pi_lo <= 0 required");
    require(v, !std::isnan(b.pi_hi) && b.pi_hi >= 1.0, "constraints.pi_hi", "pi_hi >= 1 required");
    require(v, finite(b.c_lo) && b.c_lo >= 0.0, "constraints.c_lo", "c_lo must be finite and >= 0");
    require(v, !std::isnan(b.c_hi) && b.c_hi >= b.c_lo, "constraints.c_hi", "c_hi >= c_lo required");
    if (u.lambda == 0.0)
        require(v, b.c_lo == b.c_hi, "utility.lambda",
                "lambda = 0 is supported only with c_lo == c_hi (consumption pinned)");

    if (s.is_rect()) {
        const auto& r = s.rect();
        require(v, finite(r.mu_lo) && finite(r.mu_hi) && r.mu_lo <= r.mu_hi, "uncertainty.mu_lo",
                "mu_lo <= mu_hi required, both finite");
        require(v, finite(r.sigma_lo) && r.sigma_lo >= 0.0, "uncertainty.sigma_lo",
                "sigma_lo >= 0 required");
        require(v, finite(r.sigma_hi) && r.sigma_hi >= r.sigma_lo, "uncertainty.sigma_hi",
                "sigma_hi >= sigma_lo required");
        require(v, r.sigma_hi > 0.0, "uncertainty.sigma_hi", "sigma_hi > 0 required");
    } else {
        const auto& c = s.correlated();
        require(v, finite(c.mu_lo), "uncertainty.mu_lo", "mu_lo must be finite");
        require(v, finite(c.sigma_lo) && c.sigma_lo >= 0.0, "uncertainty.sigma_lo",
                "sigma_lo >= 0 required");
        require(v, finite(c.k) && c.k > 0.0, "uncertainty.k", "k > 0 required");
        require(v, finite(c.q_exp) && c.q_exp > 0.0 && c.q_exp < 1.0, "uncertainty.q_exp",
                "q must lie in (0, 1)");
        require(v, finite(c.alpha_hi) && c.alpha_hi >= 0.0, "uncertainty.alpha_hi",
                "alpha_hi >= 0 required");
    }

    require(v, finite(s.T) && s.T > 0.0, "T", "horizon T must be finite and > 0");
    require(v, finite(s.x0) && s.x0 > 0.0, "x0", "initial wealth must be finite and > 0");
    return {std::move(v)};
}

namespace {

double number_field(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field \"" + path + key + "\"");
    const json& x = j.at(key);
    if (x.is_number()) return x.get<double>();
    if (x.is_string()) {
        const auto& s = x.get_ref<const std::string&>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ParseError("field \"" + path + key + "\": expected a number or \"inf\"/\"-inf\"");
    }
    throw ParseError("field \"" + path + key + "\": expected a number");
}

std::string string_field(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field \"" + path + key + "\"");
    const json& x = j.at(key);
    if (!x.is_string()) throw ParseError("field \"" + path + key + "\": expected a string");
    return x.get<std::string>();
}

const json& object_field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing field \"" + key + "\"");
    const json& x = j.at(key);
    if (!x.is_object()) throw ParseError("field \"" + key + "\": expected an object");
    return x;
}

json encode_number(double x) {
    if (x == kInf) return json("inf");
    if (x == -kInf) return json("-inf");
    return json(x);
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario document must be a JSON object");

    Scenario s;
    const json& ju = object_field(j, "utility");
    const std::string kind = string_field(ju, "utility.", "kind");
    if (kind == "power")
        s.utility.kind = UtilityKind::Power;
    else if (kind == "log")
        s.utility.kind = UtilityKind::Log;
    else
        throw ParseError("field \"utility.kind\": expected \"power\" or \"log\"");
    if (s.utility.kind == UtilityKind::Power) s.utility.p = number_field(ju, "utility.", "p");
    s.utility.lambda = number_field(ju, "utility.", "lambda");
    s.utility.rho = number_field(ju, "utility.", "rho");

    const json& jr = object_field(j, "rates");
    s.rates.r = number_field(jr, "rates.", "r");
    s.rates.R = number_field(jr, "rates.", "R");

    const json& jc = object_field(j, "constraints");
    s.constraints.pi_lo = number_field(jc, "constraints.", "pi_lo");
    s.constraints.pi_hi = number_field(jc, "constraints.", "pi_hi");
    s.constraints.c_lo = number_field(jc, "constraints.", "c_lo");
    s.constraints.c_hi = number_field(jc, "constraints.", "c_hi");

    const json& jb = object_field(j, "uncertainty");
    const std::string variant = string_field(jb, "uncertainty.", "variant");
    if (variant == "rect") {
        RectUncertainty r;
        r.mu_lo = number_field(jb, "uncertainty.", "mu_lo");
        r.mu_hi = number_field(jb, "uncertainty.", "mu_hi");
        r.sigma_lo = number_field(jb, "uncertainty.", "sigma_lo");
        r.sigma_hi = number_field(jb, "uncertainty.", "sigma_hi");
        s.uncertainty = r;
    } else if (variant == "correlated") {
        CorrelatedUncertainty c;
        c.mu_lo = number_field(jb, "uncertainty.", "mu_lo");
        c.sigma_lo = number_field(jb, "uncertainty.", "sigma_lo");
        c.k = number_field(jb, "uncertainty.", "k");
        c.q_exp = number_field(jb, "uncertainty.", "q_exp");
        c.alpha_hi = number_field(jb, "uncertainty.", "alpha_hi");
        s.uncertainty = c;
    } else {
        throw ParseError("field \"uncertainty.variant\": expected \"rect\" or \"correlated\"");
    }

    s.T = number_field(j, "", "T");
    s.x0 = number_field(j, "", "x0");

    auto result = validate(s);
    if (!result.ok()) throw ValidationError("invalid scenario: " + result.describe());
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read scenario file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string save_scenario(const Scenario& s) {
    json j;
    j["utility"]["kind"] = to_string(s.utility.kind);
    if (s.utility.kind == UtilityKind::Power) j["utility"]["p"] = encode_number(s.utility.p);
    j["utility"]["lambda"] = encode_number(s.utility.lambda);
    j["utility"]["rho"] = encode_number(s.utility.rho);
    j["rates"]["r"] = encode_number(s.rates.r);
    j["rates"]["R"] = encode_number(s.rates.R);
    j["constraints"]["pi_lo"] = encode_number(s.constraints.pi_lo);
    j["constraints"]["pi_hi"] = encode_number(s.constraints.pi_hi);
    j["constraints"]["c_lo"] = encode_number(s.constraints.c_lo);
    j["constraints"]["c_hi"] = encode_number(s.constraints.c_hi);
    if (s.is_rect()) {
        const auto& r = s.rect();
        j["uncertainty"] = {{"variant", "rect"},
                            {"mu_lo", encode_number(r.mu_lo)},
                            {"mu_hi", encode_number(r.mu_hi)},
                            {"sigma_lo", encode_number(r.sigma_lo)},
                            {"sigma_hi", encode_number(r.sigma_hi)}};
    } else {
        const auto& c = s.correlated();
        j["uncertainty"] = {{"variant", "correlated"},
                            {"mu_lo", encode_number(c.mu_lo)},
                            {"sigma_lo", encode_number(c.sigma_lo)},
                            {"k", encode_number(c.k)},
                            {"q_exp", encode_number(c.q_exp)},
                            {"alpha_hi", encode_number(c.alpha_hi)}};
    }
    j["T"] = encode_number(s.T);
    j["x0"] = encode_number(s.x0);
    return j.dump(2);
}

}  // namespace rmerton
