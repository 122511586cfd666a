// bergman_norm: command-line front end for the bnorm library.
//
//   bergman_norm constant --n 1 --alpha 0
//   bergman_norm verify --suite jct --n 2 --alpha 0
//   bergman_norm scan --n 2 --alpha 0 --grid-points 25 --format csv
//   bergman_norm appendix
//
// Exit codes: 0 pass, 2 invalid input, 3 numerical failure, 4 verification failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnorm/bnorm.hpp"

namespace {

using nlohmann::json;
using namespace bnorm;

constexpr int kExitPass = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct RunConfig {
    std::string command;
    int n = 2;
    double alpha = 0.0;
    std::uint64_t seed = 42;
    std::size_t samples = 1'000'000;
    std::size_t chunks = 64;
    int grid_points = 25;
    std::string format = "json";
    std::string suite = "all";
    std::vector<double> t;
    std::string out;
    Tolerances tol;

    QuadratureSpec spec() const {
        QuadratureSpec s;
        s.seed = seed;
        s.samples = samples;
        s.chunks = chunks;
        return s;
    }
};

class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v, int digits = 10) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

json estimate_json(const IntegralEstimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}, {"method", std::string(to_string(e.method))}};
}

json closed_json(double v, const char* route = "closed-form") { return {{"value", v}, {"route", route}}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check_json(const CheckLine& c) {
    return {{"name", c.name},          {"lhs", c.lhs},   {"rhs", c.rhs},
            {"sigma", c.sigma},        {"sigma_distance", number_or_null(c.sigma_distance)},
            {"rule", c.rule},          {"pass", c.pass}};
}

json config_json(const RunConfig& cfg) {
    return {{"n", cfg.n},           {"alpha", cfg.alpha},   {"seed", cfg.seed},
            {"samples", cfg.samples}, {"chunks", cfg.chunks}, {"grid_points", cfg.grid_points}};
}

std::string checks_table(const std::vector<CheckLine>& lines) {
    std::ostringstream os;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-58s %16s %16s %12s %8s  %s\n", "check", "lhs", "rhs", "sigma", "dist", "pass");
    os << buf;
    for (const auto& c : lines) {
        std::snprintf(buf, sizeof buf, "%-58s %16s %16s %12s %8s  %s\n", c.name.c_str(), num(c.lhs).c_str(),
                      num(c.rhs).c_str(), num(c.sigma, 4).c_str(), num(c.sigma_distance, 3).c_str(),
                      c.pass ? "PASS" : "FAIL");
        os << buf;
    }
    return os.str();
}

std::string checks_csv(const std::vector<CheckLine>& lines) {
    std::ostringstream os;
    os << "name,lhs,rhs,sigma,sigma_distance,pass\n";
    for (const auto& c : lines) {
        os << '"' << c.name << "\"," << num(c.lhs, 17) << ',' << num(c.rhs, 17) << ',' << num(c.sigma, 17) << ','
           << num(c.sigma_distance, 17) << ',' << (c.pass ? "true" : "false") << '\n';
    }
    return os.str();
}

struct Output {
    std::string text;
    int code = kExitPass;
};

// ---------------------------------------------------------------------------

Output cmd_constant(const RunConfig& cfg) {
    const Params p(cfg.n, cfg.alpha);
    const auto b = norm_bounds(p);
    Output out;
    if (cfg.format == "json") {
        json j{{"command", "constant"},
               {"config", {{"n", cfg.n}, {"alpha", cfg.alpha}}},
               {"value", C_const(p)},
               {"C", closed_json(C_const(p))},
               {"c_alpha", closed_json(p.c_alpha())},
               {"theta", closed_json(p.theta())},
               {"theta_prime", closed_json(p.theta_prime())},
               {"norm_bounds",
                {{"bloch", {{"lower", closed_json(b.bloch_lower)}, {"upper", closed_json(b.bloch_upper)}}},
                 {"invariant", {{"lower", closed_json(b.invariant_lower)}, {"upper", closed_json(b.invariant_upper)}}}}}};
        out.text = j.dump(2) + "\n";
        return out;
    }
    const std::vector<std::pair<std::string, double>> rows{
        {"C", C_const(p)},           {"c_alpha", p.c_alpha()},
        {"theta", p.theta()},        {"theta_prime", p.theta_prime()},
        {"bloch_lower", b.bloch_lower}, {"bloch_upper", b.bloch_upper},
        {"invariant_lower", b.invariant_lower}, {"invariant_upper", b.invariant_upper}};
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << "quantity,value\n";
        for (const auto& [k, v] : rows) os << k << ',' << num(v, 17) << '\n';
    } else {
        char buf[128];
        for (const auto& [k, v] : rows) {
            std::snprintf(buf, sizeof buf, "%-16s %s\n", k.c_str(), num(v, 12).c_str());
            os << buf;
        }
    }
    out.text = os.str();
    return out;
}

Output cmd_verify(const RunConfig& cfg) {
    const Params p(cfg.n, cfg.alpha);
    std::vector<std::string> suites;
    if (cfg.suite == "all") {
        suites = suite_names();
    } else {
        suites.push_back(cfg.suite);
    }
    std::vector<CheckLine> all;
    json jsuites = json::array();
    for (const auto& s : suites) {
        const auto lines = run_suite(s, p, cfg.spec(), cfg.tol);
        json jl = json::array();
        for (const auto& c : lines) jl.push_back(check_json(c));
        jsuites.push_back({{"suite", s}, {"checks", jl}, {"pass", all_pass(lines)}});
        all.insert(all.end(), lines.begin(), lines.end());
    }
    Output out;
    out.code = all_pass(all) ? kExitPass : kExitVerification;
    if (cfg.format == "json") {
        json j{{"command", "verify"}, {"config", config_json(cfg)}, {"suites", jsuites}, {"pass", all_pass(all)}};
        out.text = j.dump(2) + "\n";
    } else if (cfg.format == "csv") {
        out.text = checks_csv(all);
    } else {
        out.text = checks_table(all);
    }
    return out;
}

std::vector<CheckLine> scan_checks(const ScanResult& r) {
    return {
        {"endpoint rows vs closed forms (3 sigma)", r.endpoints_match ? 1.0 : 0.0, 1.0, 0.0, 0.0, "flag", r.endpoints_match},
        {"every row <= cos t l(0) + sin t l(pi/2) + 3 sigma", r.pointwise_upper_ok ? 1.0 : 0.0, 1.0, 0.0, 0.0, "flag",
         r.pointwise_upper_ok},
        {"every row >= max(cos t l(0), sin t l(pi/2)) - 3 sigma", r.pointwise_lower_ok ? 1.0 : 0.0, 1.0, 0.0, 0.0,
         "flag", r.pointwise_lower_ok},
        check_upper("max l <= sqrt(pi^2+4)/2 C", r.max_value, r.esti2_bound, r.max_std_error),
        {"max l >= (pi/2) C - 2 sigma", r.max_value, r.conjectured_value, r.max_std_error,
         sigma_distance(r.max_value, r.conjectured_value, r.max_std_error), "lhs >= rhs - 2 sigma",
         r.max_above_half_pi_c},
    };
}

Output cmd_scan(const RunConfig& cfg) {
    const Params p(cfg.n, cfg.alpha);
    if (p.n() < 2) throw InvalidInput("scan needs n >= 2");
    const ScanResult r = cfg.t.empty() ? ell_scan(p, cfg.grid_points, cfg.spec()) : ell_scan_points(p, cfg.t, cfg.spec());
    const auto checks = scan_checks(r);
    Output out;
    // Bound and endpoint checks gate the exit code; the verdict never does.
    out.code = all_pass(checks) ? kExitPass : kExitVerification;
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& row : r.rows) {
            rows.push_back({{"t", row.t},
                            {"estimate", estimate_json(row.estimate)},
                            {"gap_to_half_pi", estimate_json(row.gap_to_half_pi)},
                            {"lower_bound", closed_json(row.lower_bound)},
                            {"upper_bound", closed_json(row.upper_bound)}});
        }
        json jc = json::array();
        for (const auto& c : checks) jc.push_back(check_json(c));
        json summary{{"argmax_t", r.argmax_t},
                     {"max", {{"value", r.max_value}, {"std_error", r.max_std_error}}},
                     {"ell0", closed_json(r.endpoints.ell0)},
                     {"ell_half_pi", closed_json(r.endpoints.ell_half_pi)},
                     {"ell_half_pi_series", closed_json(r.endpoints.ell_half_pi_series, "gauss-summation")},
                     {"esti2_bound", closed_json(r.esti2_bound)},
                     {"conjectured_value", closed_json(r.conjectured_value)},
                     {"checks", jc},
                     {"verdict", r.conjecture_holds}};
        json j{{"command", "scan"}, {"config", config_json(cfg)}, {"rows", rows}, {"summary", summary}};
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << "t,estimate,std_error,lower_bound,upper_bound\n";
        for (const auto& row : r.rows) {
            os << num(row.t, 17) << ',' << num(row.estimate.value, 17) << ',' << num(row.estimate.std_error, 17) << ','
               << num(row.lower_bound, 17) << ',' << num(row.upper_bound, 17) << '\n';
        }
        os << "# argmax_t=" << num(r.argmax_t, 17) << " max=" << num(r.max_value, 17)
           << " max_std_error=" << num(r.max_std_error, 17) << '\n';
        os << "# ell0=" << num(r.endpoints.ell0, 17) << " ell_half_pi=" << num(r.endpoints.ell_half_pi, 17)
           << " esti2_bound=" << num(r.esti2_bound, 17) << '\n';
        for (const auto& c : checks) os << "# check " << c.name << ": " << (c.pass ? "pass" : "fail") << '\n';
        os << "# verdict=" << (r.conjecture_holds ? "true" : "false") << '\n';
    } else {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%10s %14s %12s %14s %14s\n", "t", "estimate", "std_error", "lower_bound",
                      "upper_bound");
        os << buf;
        for (const auto& row : r.rows) {
            std::snprintf(buf, sizeof buf, "%10s %14s %12s %14s %14s\n", num(row.t, 6).c_str(),
                          num(row.estimate.value, 10).c_str(), num(row.estimate.std_error, 4).c_str(),
                          num(row.lower_bound, 10).c_str(), num(row.upper_bound, 10).c_str());
            os << buf;
        }
        os << "\nargmax t = " << num(r.argmax_t, 8) << ", max = " << num(r.max_value) << " +- "
           << num(r.max_std_error, 4) << "\nconjectured value (pi/2) C = " << num(r.conjectured_value)
           << "\nverdict: " << (r.conjecture_holds ? "max at pi/2 within error" : "some t exceeds l(pi/2)")
           << "\n\n"
           << checks_table(checks);
    }
    out.text = os.str();
    return out;
}

Output cmd_appendix(const RunConfig& cfg) {
    const QuadratureSpec spec = cfg.spec();
    const std::vector<double> ts = cfg.t.empty() ? uniform_quarter_grid(cfg.grid_points) : cfg.t;
    const auto grid = I_of_t_grid(ts, spec);
    const auto st = stationarity_report(spec);
    const auto hc = h_consistency();
    std::vector<CheckLine> checks{
        check_sigma("I(0) vs 2", st.I0.value, 2.0, st.I0.std_error, cfg.tol.sigma),
        check_sigma("I(pi/2) vs pi", st.I_half_pi.value, std::numbers::pi, st.I_half_pi.std_error, cfg.tol.sigma),
        check_sigma("slope of I at 0", st.slope_at_0.value, 0.0, st.slope_at_0.std_error, cfg.tol.sigma),
        check_sigma("slope of I at pi/2", st.slope_at_half_pi.value, 0.0, st.slope_at_half_pi.std_error,
                    cfg.tol.sigma),
        check_absolute("max |h_closed - h_direct| on 20x20 grid", hc.max_closed_vs_direct, 0.0, 1e-9),
    };
    Output out;
    out.code = all_pass(checks) ? kExitPass : kExitVerification;
    if (cfg.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < ts.size(); ++i) rows.push_back({{"t", ts[i]}, {"I", estimate_json(grid[i])}});
        auto slopes = [](const std::vector<SlopeEstimate>& v) {
            json a = json::array();
            for (const auto& s : v) a.push_back({{"step", s.step}, {"slope", estimate_json(s.slope)}});
            return a;
        };
        json jc = json::array();
        for (const auto& c : checks) jc.push_back(check_json(c));
        json j{{"command", "appendix"},
               {"config", config_json(cfg)},
               {"I_grid", rows},
               {"stationarity",
                {{"I0", estimate_json(st.I0)},
                 {"I_half_pi", estimate_json(st.I_half_pi)},
                 {"raw_slopes_at_0", slopes(st.raw_slopes_at_0)},
                 {"raw_slopes_at_half_pi", slopes(st.raw_slopes_at_half_pi)},
                 {"slope_at_0", estimate_json(st.slope_at_0)},
                 {"slope_at_half_pi", estimate_json(st.slope_at_half_pi)},
                 {"second_difference_at_half_pi", estimate_json(st.second_difference_at_half_pi)},
                 {"h_prime_near_0", st.h_prime_near_0},
                 {"h_prime_near_half_pi", st.h_prime_near_half_pi}}},
               {"h_consistency",
                {{"max_closed_vs_direct", hc.max_closed_vs_direct},
                 {"max_prime_vs_finite_difference", hc.max_prime_vs_fd},
                 {"points", hc.points}}},
               {"checks", jc},
               {"pass", all_pass(checks)}};
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << "t,estimate,std_error\n";
        for (std::size_t i = 0; i < ts.size(); ++i) {
            os << num(ts[i], 17) << ',' << num(grid[i].value, 17) << ',' << num(grid[i].std_error, 17) << '\n';
        }
        os << "# slope_at_0=" << num(st.slope_at_0.value, 17) << " std_error=" << num(st.slope_at_0.std_error, 17)
           << '\n';
        os << "# slope_at_half_pi=" << num(st.slope_at_half_pi.value, 17)
           << " std_error=" << num(st.slope_at_half_pi.std_error, 17) << '\n';
        os << "# second_difference_at_half_pi=" << num(st.second_difference_at_half_pi.value, 17)
           << " std_error=" << num(st.second_difference_at_half_pi.std_error, 17) << '\n';
        os << "# h_closed_vs_direct=" << num(hc.max_closed_vs_direct, 17)
           << " h_prime_vs_fd=" << num(hc.max_prime_vs_fd, 17) << '\n';
    } else {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%10s %14s %12s\n", "t", "I(t)", "std_error");
        os << buf;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%10s %14s %12s\n", num(ts[i], 6).c_str(), num(grid[i].value).c_str(),
                          num(grid[i].std_error, 4).c_str());
            os << buf;
        }
        os << "\nsecond difference at pi/2: " << num(st.second_difference_at_half_pi.value) << " +- "
           << num(st.second_difference_at_half_pi.std_error, 4) << "\nh' vs finite differences: "
           << num(hc.max_prime_vs_fd, 4) << "\n|h'| at t = 1e-4: " << num(st.h_prime_near_0, 4)
           << ", at t = pi/2 - 1e-4: " << num(st.h_prime_near_half_pi, 4) << "\n\n"
           << checks_table(checks);
    }
    out.text = os.str();
    return out;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("BERGMAN_NORM_SEED");
    if (!env || !*env) return 42;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(env, &pos, 0);
        if (pos != std::string(env).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(std::string("BERGMAN_NORM_SEED is not an unsigned integer: ") + env);
    }
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--n", cfg.n, "complex dimension")->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "weight exponent (> -1)")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed (default 42 or $BERGMAN_NORM_SEED)");
    sub->add_option("--samples", cfg.samples, "Monte Carlo samples per integral")->capture_default_str();
    sub->add_option("--chunks", cfg.chunks, "independent random streams")->capture_default_str();
    sub->add_option("--grid-points", cfg.grid_points, "points of the t grid")->capture_default_str();
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "write output to this file instead of stdout");
    sub->add_option("--sigma", cfg.tol.sigma, "sigma multiple for statistical checks")->capture_default_str();
    sub->add_option("--limit-tolerance", cfg.tol.limit_relative, "relative band for boundary-limit surrogates")
        ->capture_default_str();
    sub->add_option("--limit-sigma", cfg.tol.limit_sigma, "sigma multiple added to the limit band")
        ->capture_default_str();
}

int run(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Numerical verification of Bloch-norm constants of the weighted Bergman projection"};
    app.require_subcommand(1);
    auto* c_constant = app.add_subcommand("constant", "closed-form constants and norm bounds");
    auto* c_verify = app.add_subcommand("verify", "run verification suites");
    auto* c_scan = app.add_subcommand("scan", "scan l(t) over [0, pi/2]");
    auto* c_appendix = app.add_subcommand("appendix", "stationarity analysis of I(t) at n = 2, alpha = 0");
    for (auto* s : {c_constant, c_verify, c_scan, c_appendix}) add_common(s, cfg);
    std::vector<std::string> suites = suite_names();
    suites.push_back("all");
    c_verify->add_option("--suite", cfg.suite, "suite to run")->check(CLI::IsMember(suites))->capture_default_str();
    c_scan->add_option("--t", cfg.t, "evaluate at these t instead of the uniform grid")->delimiter(',');
    c_appendix->add_option("--t", cfg.t, "evaluate I at these t instead of the uniform grid")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        bool seed_given = false;
        for (auto* s : {c_constant, c_verify, c_scan, c_appendix}) {
            if (s->parsed()) {
                cfg.command = s->get_name();
                seed_given = s->count("--seed") > 0;
            }
        }
        if (!seed_given) cfg.seed = default_seed();
        cfg.spec().validate();
        if (cfg.grid_points < 2) throw InvalidInput("--grid-points must be >= 2");
        if (!(cfg.tol.sigma > 0.0 && cfg.tol.limit_sigma >= 0.0 && cfg.tol.limit_relative >= 0.0)) {
            throw InvalidInput("tolerances must be non-negative");
        }

        Output out;
        if (cfg.command == "constant") out = cmd_constant(cfg);
        if (cfg.command == "verify") out = cmd_verify(cfg);
        if (cfg.command == "scan") out = cmd_scan(cfg);
        if (cfg.command == "appendix") out = cmd_appendix(cfg);

        if (cfg.out.empty()) {
            std::cout << out.text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw InvalidInput("cannot open --out file " + cfg.out);
            f << out.text;
        }
        return out.code;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const IntegrationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
