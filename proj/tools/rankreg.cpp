// rankreg command-line front end. Talks to the library through rankreg.h only.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankreg/rankreg.h"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RANKREG_LOG: quiet (errors only), info (default, one summary line), debug
// (adds one key=value line per outer iteration).
enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
    const char* v = std::getenv("RANKREG_LOG");
    if (!v || !*v) return LogLevel::Info;
    const std::string s(v);
    if (s == "quiet" || s == "0" || s == "off") return LogLevel::Quiet;
    if (s == "debug" || s == "2" || s == "trace") return LogLevel::Debug;
    return LogLevel::Info;
}

void check(rr_status st, const std::string& what) {
    if (st != RR_OK && st != RR_NOT_CONVERGED) {
        const char* msg = rr_last_error();
        throw CliError(what + ": " + (msg && *msg ? msg : "failed"));
    }
}

struct ProblemDeleter {
    void operator()(rr_problem* p) const { rr_problem_free(p); }
};
struct SolutionDeleter {
    void operator()(rr_solution* s) const { rr_solution_free(s); }
};
using ProblemPtr = std::unique_ptr<rr_problem, ProblemDeleter>;
using SolutionPtr = std::unique_ptr<rr_solution, SolutionDeleter>;

std::string fmt(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw CliError(path.string() + ": cannot open for writing");
    return out;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out = open_out(path);
    out << text;
    if (!out) throw CliError(path + ": write error");
}

rr_weight_rule parse_rule(const std::string& s) {
    if (s == "one") return RR_WEIGHTS_ONE;
    if (s == "sqrt") return RR_WEIGHTS_SQRT;
    if (s == "invsqrt") return RR_WEIGHTS_INVSQRT;
    throw CliError("unknown weight rule '" + s + "'");
}

rr_strategy parse_strategy(const std::string& s) {
    if (s == "auto") return RR_STRATEGY_AUTO;
    if (s == "direct") return RR_STRATEGY_DIRECT;
    if (s == "cg") return RR_STRATEGY_CG;
    if (s == "woodbury") return RR_STRATEGY_WOODBURY;
    throw CliError("unknown Newton strategy '" + s + "'");
}

// --lambda is "auto" or a positive number; returns 0 for auto.
double parse_lambda(const std::string& s) {
    if (s == "auto") return 0.0;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0.0))
        throw CliError("--lambda must be 'auto' or a positive number, got '" + s + "'");
    return v;
}

std::vector<int64_t> parse_grid(const std::string& s) {
    std::vector<int64_t> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || v < 1)
            throw CliError("bad grid entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CliError("empty grid");
    return out;
}

// ---- shared option groups ----

struct DataArgs {
    std::string data, response, groups, weights = "sqrt";
    int poly = 1;
    bool center = false;

    void add(CLI::App* app) {
        app->add_option("--data", data, "design matrix CSV (n rows, p columns)")->required();
        app->add_option("--response", response, "response CSV (one column)")->required();
        app->add_option("--groups", groups,
                        "group JSON with 1-based column indices, or 'singleton'")->required();
        app->add_option("--weights", weights, "group weights when the file has none")
            ->check(CLI::IsMember({"one", "sqrt", "invsqrt"}));
        app->add_option("--poly", poly, "polynomial expansion order of X")->check(CLI::Range(1, 10));
        app->add_flag("--center", center, "center the columns of X");
    }

    ProblemPtr load() const {
        rr_problem* p = nullptr;
        check(rr_problem_load(data.c_str(), response.c_str(), groups.c_str(), parse_rule(weights), poly,
                              center ? 1 : 0, &p),
              "loading data");
        return ProblemPtr(p);
    }

    json to_json() const {
        return {{"data", data}, {"response", response}, {"groups", groups},
                {"weights", weights}, {"poly", poly},   {"center", center}};
    }
};

struct LambdaArgs {
    rr_lambda_config cfg{};
    LambdaArgs() { rr_lambda_config_default(&cfg); }

    void add(CLI::App* app, const std::string& reps_flag) {
        app->add_option("--c0", cfg.c0, "safety factor c0 > 1");
        app->add_option("--alpha0", cfg.alpha0, "quantile level alpha0");
        app->add_option(reps_flag, cfg.reps, "number of simulated permutations K");
        app->add_option("--seed", cfg.seed, "random seed");
    }

    json to_json() const {
        return {{"c0", cfg.c0}, {"alpha0", cfg.alpha0}, {"reps", cfg.reps}, {"seed", cfg.seed}};
    }
};

struct SolverArgs {
    rr_options opts{};
    std::string strategy = "auto";
    SolverArgs() { rr_options_default(&opts); }

    void add(CLI::App* app) {
        app->add_option("--tol", opts.tol, "KKT tolerance");
        app->add_option("--sigma0", opts.sigma0, "initial penalty parameter");
        app->add_option("--tau", opts.tau, "primal proximal weight");
        app->add_option("--max-outer", opts.max_outer, "outer iteration limit");
        app->add_option("--strategy", strategy, "Newton system solver")
            ->check(CLI::IsMember({"auto", "direct", "cg", "woodbury"}));
    }

    rr_options resolved() const {
        rr_options o = opts;
        o.strategy = parse_strategy(strategy);
        return o;
    }

    json to_json() const {
        return {{"tol", opts.tol},         {"sigma0", opts.sigma0},         {"tau", opts.tau},
                {"max_outer", opts.max_outer}, {"strategy", strategy},
                {"max_inner", opts.max_inner}, {"cg_max_iters", opts.cg_max_iters}};
    }
};

struct ScenarioArgs {
    std::string design = "C1", signal = "S1", noise = "E2", weights = "sqrt";
    int64_t n = 200, p = 2000, group_size = 20;
    double active_fraction = 0.01;

    void add(CLI::App* app) {
        app->add_option("--design", design)->check(CLI::IsMember({"C1", "C2", "C3"}));
        app->add_option("--signal", signal)->check(CLI::IsMember({"S1", "S2", "S3", "S4"}));
        app->add_option("--noise", noise)->check(CLI::IsMember({"E1", "E2", "E3", "E4", "E5", "E6"}));
        app->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);
        app->add_option("--p", p, "number of columns")->check(CLI::PositiveNumber);
        app->add_option("--group-size", group_size)->check(CLI::PositiveNumber);
        app->add_option("--active-fraction", active_fraction, "share of active groups");
        app->add_option("--weights", weights)->check(CLI::IsMember({"one", "sqrt", "invsqrt"}));
    }

    rr_scenario resolved() const {
        rr_scenario sc;
        rr_scenario_default(&sc);
        sc.design = design.c_str();
        sc.signal = signal.c_str();
        sc.noise = noise.c_str();
        sc.n = n;
        sc.p = p;
        sc.group_size = group_size;
        sc.active_fraction = active_fraction;
        sc.weights = parse_rule(weights);
        return sc;
    }

    json to_json() const {
        return {{"design", design}, {"signal", signal}, {"noise", noise},
                {"n", n},           {"p", p},           {"group_size", group_size},
                {"active_fraction", active_fraction},   {"weights", weights}};
    }
};

void print_config(bool enabled, const json& cfg) {
    if (enabled) std::cerr << "config=" << cfg.dump() << '\n';
}

void progress_line(const rr_iteration* it, void*) {
    std::fprintf(stderr,
                 "iter k=%d sigma=%.6g eta_p=%.3e eta_d=%.3e eta_kkt=%.3e pobj=%.12g dobj=%.12g "
                 "relgap=%.3e ssn_iters=%d\n",
                 it->k, it->sigma, it->eta_p, it->eta_d, it->eta_kkt, it->pobj, it->dobj, it->relgap,
                 it->newton_iters);
}

std::vector<double> solution_vector(rr_status (*get)(const rr_solution*, double*, int64_t),
                                    const rr_solution* sol, int64_t len) {
    std::vector<double> v(static_cast<std::size_t>(len));
    check(get(sol, v.data(), len), "reading solution");
    return v;
}

// ---- commands ----

struct SolveCmd {
    DataArgs data;
    LambdaArgs lambda;
    SolverArgs solver;
    std::string lambda_arg = "auto", out;
    double zero_tol = 1e-8;
    bool print_cfg = false;

    void add(CLI::App* app) {
        data.add(app);
        lambda.add(app, "--reps");
        solver.add(app);
        app->add_option("--lambda", lambda_arg, "'auto' or a positive value");
        app->add_option("--zero-tol", zero_tol, "threshold for nonzero groups");
        app->add_option("--out", out, "output JSON (stdout if omitted)");
        app->add_flag("--print-config", print_cfg, "echo the resolved configuration to stderr");
    }

    int run() const {
        const double fixed = parse_lambda(lambda_arg);
        rr_options opts = solver.resolved();
        const LogLevel level = log_level();
        if (level == LogLevel::Debug) opts.progress = progress_line;

        json cfg = {{"command", "solve"}, {"input", data.to_json()}, {"solver", solver.to_json()},
                    {"lambda", lambda_arg}, {"lambda_rule", lambda.to_json()}, {"zero_tol", zero_tol}};
        print_config(print_cfg, cfg);

        ProblemPtr prob = data.load();
        int64_t n = 0, p = 0, g = 0;
        check(rr_problem_dims(prob.get(), &n, &p, &g), "reading dimensions");

        json result;
        double lam = fixed;
        if (fixed == 0.0) {
            double q = 0.0;
            check(rr_select_lambda(prob.get(), &lambda.cfg, &lam, &q, nullptr), "selecting lambda");
            result["lambda_quantile"] = q;
        }

        rr_solution* raw = nullptr;
        const rr_status st = rr_solve(prob.get(), lam, &opts, &raw);
        check(st, "solving");
        SolutionPtr sol(raw);

        rr_solution_info info{};
        check(rr_solution_info_get(sol.get(), &info), "reading solution");
        int64_t count = 0;
        check(rr_solution_nonzero_groups(sol.get(), zero_tol, nullptr, 0, &count), "reading groups");
        std::vector<int64_t> nz(static_cast<std::size_t>(count));
        check(rr_solution_nonzero_groups(sol.get(), zero_tol, nz.data(), count, &count), "reading groups");
        for (auto& id : nz) ++id;  // 1-based on output, like the group files

        result["lambda"] = info.lambda;
        result["lambda_source"] = fixed == 0.0 ? "auto" : "fixed";
        result["converged"] = info.converged != 0;
        result["eta_kkt"] = info.eta_kkt;
        result["eta_p"] = info.eta_p;
        result["eta_d"] = info.eta_d;
        result["pobj"] = info.pobj;
        result["dobj"] = info.dobj;
        result["relgap"] = info.relgap;
        result["dual_infeas"] = info.dual_infeas;
        result["iters"] = info.outer_iters;
        result["newton_iters"] = info.newton_iters;
        result["time"] = info.wall_time;
        result["n"] = n;
        result["p"] = p;
        result["num_groups"] = g;
        result["nonzero_groups"] = nz;
        result["beta"] = solution_vector(rr_solution_beta, sol.get(), p);
        result["s"] = solution_vector(rr_solution_s, sol.get(), n);
        result["w"] = solution_vector(rr_solution_w, sol.get(), n);
        result["config"] = cfg;
        emit(out, result.dump(1) + "\n");

        if (level != LogLevel::Quiet)
            std::fprintf(stderr,
                         "done converged=%d lambda=%.6g eta_kkt=%.3e relgap=%.3e outer=%d newton=%d "
                         "time=%.3f nonzero_groups=%lld\n",
                         info.converged, info.lambda, info.eta_kkt, info.relgap, info.outer_iters,
                         info.newton_iters, info.wall_time, static_cast<long long>(count));
        return st == RR_OK ? kExitOk : kExitNotConverged;
    }
};

struct SelectLambdaCmd {
    DataArgs data;
    LambdaArgs lambda;
    std::string out, dump;
    bool print_cfg = false;

    void add(CLI::App* app) {
        data.add(app);
        lambda.add(app, "--reps");
        app->add_option("--out", out, "output JSON (stdout if omitted)");
        app->add_option("--dump", dump, "CSV receiving the K simulated dual norms");
        app->add_flag("--print-config", print_cfg, "echo the resolved configuration to stderr");
    }

    int run() const {
        const json cfg = {{"command", "select-lambda"}, {"input", data.to_json()},
                          {"lambda_rule", lambda.to_json()}};
        print_config(print_cfg, cfg);
        if (lambda.cfg.reps < 1) throw CliError("--reps must be >= 1");
        ProblemPtr prob = data.load();
        double lam = 0.0, q = 0.0;
        std::vector<double> samples(static_cast<std::size_t>(lambda.cfg.reps));
        check(rr_select_lambda(prob.get(), &lambda.cfg, &lam, &q, samples.data()), "selecting lambda");
        if (!dump.empty()) {
            std::string text = "dual_norm\n";
            for (double v : samples) text += fmt(v) + "\n";
            emit(dump, text);
        }
        json result = {{"lambda", lam}, {"quantile", q}, {"config", cfg}};
        emit(out, result.dump(1) + "\n");
        return kExitOk;
    }
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(path + ": cannot open for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw CliError(path + ": invalid JSON: " + e.what());
    }
}

std::vector<double> json_vector(const json& j, const char* key, int64_t len, const std::string& path) {
    if (!j.contains(key) || !j[key].is_array())
        throw CliError(path + ": missing array \"" + key + "\"");
    std::vector<double> v;
    try {
        v = j[key].get<std::vector<double>>();
    } catch (const json::exception&) {
        throw CliError(path + ": \"" + key + "\" must hold numbers");
    }
    if (static_cast<int64_t>(v.size()) != len)
        throw CliError(path + ": \"" + key + "\" has " + std::to_string(v.size()) + " entries, expected " +
                       std::to_string(len));
    return v;
}

// Recomputes the KKT residuals of a saved solution against the data files.
struct ScoreCmd {
    DataArgs data;
    std::string solution, lambda_arg, out;

    void add(CLI::App* app) {
        data.add(app);
        app->add_option("--solution", solution, "JSON written by 'solve'")->required();
        app->add_option("--lambda", lambda_arg, "override the lambda stored in the solution");
        app->add_option("--out", out, "output JSON (stdout if omitted)");
    }

    int run() const {
        const json sol = read_json(solution);
        ProblemPtr prob = data.load();
        int64_t n = 0, p = 0;
        check(rr_problem_dims(prob.get(), &n, &p, nullptr), "reading dimensions");
        double lam = 0.0;
        if (!lambda_arg.empty()) {
            lam = parse_lambda(lambda_arg);
            if (lam == 0.0) throw CliError("score needs a numeric --lambda");
        } else {
            if (!sol.contains("lambda") || !sol["lambda"].is_number())
                throw CliError(solution + ": missing \"lambda\"");
            lam = sol["lambda"].get<double>();
        }
        const auto beta = json_vector(sol, "beta", p, solution);
        const auto s = json_vector(sol, "s", n, solution);
        const auto w = json_vector(sol, "w", n, solution);
        double r[3];
        check(rr_kkt_residual(prob.get(), lam, w.data(), s.data(), beta.data(), r), "scoring");
        const json result = {{"lambda", lam}, {"eta_p", r[0]}, {"eta_d", r[1]}, {"eta_kkt", r[2]}};
        emit(out, result.dump(1) + "\n");
        return kExitOk;
    }
};

// Writes one synthetic dataset as X.csv, y.csv, beta_star.csv and groups.json.
struct GenerateCmd {
    ScenarioArgs scenario;
    uint64_t seed = 1;
    std::string out;

    void add(CLI::App* app) {
        scenario.add(app);
        app->add_option("--seed", seed, "random seed");
        app->add_option("--out", out, "output directory")->required();
    }

    int run() const {
        const rr_scenario sc = scenario.resolved();
        std::vector<double> beta_star(static_cast<std::size_t>(sc.p));
        rr_problem* raw = nullptr;
        check(rr_generate(&sc, seed, &raw, beta_star.data()), "generating data");
        ProblemPtr prob(raw);
        int64_t n = 0, p = 0, g = 0;
        check(rr_problem_dims(prob.get(), &n, &p, &g), "reading dimensions");
        std::vector<double> X(static_cast<std::size_t>(n * p)), y(static_cast<std::size_t>(n));
        std::vector<int64_t> group_of(static_cast<std::size_t>(p));
        std::vector<double> weights(static_cast<std::size_t>(g));
        check(rr_problem_data(prob.get(), X.data(), y.data(), group_of.data(), weights.data()),
              "reading data");

        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw CliError(out + ": " + ec.message());
        const fs::path dir(out);

        std::string text;
        for (int64_t i = 0; i < n; ++i) {
            for (int64_t j = 0; j < p; ++j) {
                if (j) text += ',';
                text += fmt(X[static_cast<std::size_t>(j * n + i)]);
            }
            text += '\n';
        }
        emit((dir / "X.csv").string(), text);
        text.clear();
        for (double v : y) text += fmt(v) + "\n";
        emit((dir / "y.csv").string(), text);
        text.clear();
        for (double v : beta_star) text += fmt(v) + "\n";
        emit((dir / "beta_star.csv").string(), text);

        json groups = json::array();
        for (int64_t l = 0; l < g; ++l) groups.push_back(json::array());
        for (int64_t j = 0; j < p; ++j) groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(j)])].push_back(j + 1);
        emit((dir / "groups.json").string(), json{{"groups", groups}, {"weights", weights}}.dump() + "\n");
        return kExitOk;
    }
};

// Replicated estimation experiment; per-replicate CSV plus a JSON aggregate.
struct SimulateCmd {
    ScenarioArgs scenario;
    LambdaArgs lambda;
    SolverArgs solver;
    std::string lambda_arg = "auto", out, summary;
    int64_t reps = 10;
    int jobs = 1;
    bool singleton = false, print_cfg = false;
    double zero_tol = 1e-8;

    void add(CLI::App* app) {
        scenario.add(app);
        lambda.add(app, "--lambda-reps");
        solver.add(app);
        app->add_option("--lambda", lambda_arg, "'auto' or a positive value");
        app->add_option("--reps", reps, "number of replicates")->check(CLI::PositiveNumber);
        app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        app->add_flag("--singleton-fit", singleton, "fit the l1 specialization");
        app->add_option("--zero-tol", zero_tol, "threshold for selected coefficients");
        app->add_option("--out", out, "per-replicate CSV (stdout if omitted)");
        app->add_option("--summary", summary, "aggregate JSON (stderr line if omitted)");
        app->add_flag("--print-config", print_cfg, "echo the resolved configuration to stderr");
    }

    int run() const {
        const rr_scenario sc = scenario.resolved();
        rr_method method;
        rr_method_default(&method);
        method.singleton_fit = singleton ? 1 : 0;
        method.lambda = parse_lambda(lambda_arg);
        method.lambda_rule = lambda.cfg;
        method.zero_tol = zero_tol;
        const rr_options opts = solver.resolved();
        const json cfg = {{"command", "simulate"}, {"scenario", scenario.to_json()},
                          {"solver", solver.to_json()}, {"lambda", lambda_arg},
                          {"lambda_rule", lambda.to_json()}, {"reps", reps},
                          {"singleton_fit", singleton}, {"zero_tol", zero_tol}};
        print_config(print_cfg, cfg);

        std::vector<rr_report> reports(static_cast<std::size_t>(reps));
        rr_aggregate agg{};
        check(rr_run_replications(&sc, &method, &opts, reps, lambda.cfg.seed, jobs, reports.data(), &agg),
              "running replicates");

        // Timings stay out of the CSV so that a fixed seed gives identical bytes.
        std::string text = "replicate,seed,lambda,l2_error,model_error,fp,fn,eta_kkt,relgap,outer_iters,"
                           "newton_iters,converged,failed,error\n";
        for (const auto& r : reports) {
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            text += std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," + fmt(r.lambda_used) +
                    "," + fmt(r.l2_error) + "," + fmt(r.model_error) + "," + std::to_string(r.fp) + "," +
                    std::to_string(r.fn) + "," + fmt(r.eta_kkt) + "," + fmt(r.relgap) + "," +
                    std::to_string(r.outer_iters) + "," + std::to_string(r.newton_iters) + "," +
                    std::to_string(r.converged) + "," + std::to_string(r.failed) + "," + err + "\n";
        }
        emit(out, text);

        int64_t zero_errors = 0;
        for (const auto& r : reports) zero_errors += (!r.failed && r.fp == 0 && r.fn == 0);
        const json aggregate = {
            {"median_l2", agg.median_l2},     {"mean_l2", agg.mean_l2},
            {"median_me", agg.median_me},     {"mean_me", agg.mean_me},
            {"median_fp", agg.median_fp},     {"mean_fp", agg.mean_fp},
            {"median_fn", agg.median_fn},     {"mean_fn", agg.mean_fn},
            {"median_lambda", agg.median_lambda}, {"median_solve_time", agg.median_solve_time},
            {"exact_support", zero_errors},   {"converged", agg.converged},
            {"failed", agg.failed},           {"reps", reps}};
        if (!summary.empty())
            emit(summary, json{{"aggregate", aggregate}, {"config", cfg}}.dump(1) + "\n");
        else if (log_level() != LogLevel::Quiet)
            std::cerr << "summary=" << aggregate.dump() << '\n';
        return agg.failed > 0 ? kExitError : kExitOk;
    }
};

// Solve-time sweep over a grid of n or p; one CSV row per grid point.
struct BenchCmd {
    ScenarioArgs scenario;
    LambdaArgs lambda;
    SolverArgs solver;
    std::string grid_p, grid_n, lambda_arg = "auto", out;
    int64_t reps = 1;
    bool print_cfg = false;

    void add(CLI::App* app) {
        scenario.add(app);
        lambda.add(app, "--lambda-reps");
        solver.add(app);
        app->add_option("--grid-p", grid_p, "comma-separated p values");
        app->add_option("--grid-n", grid_n, "comma-separated n values");
        app->add_option("--lambda", lambda_arg, "'auto' or a positive value");
        app->add_option("--reps", reps, "timed repetitions per point (median reported)")
            ->check(CLI::PositiveNumber);
        app->add_option("--out", out, "CSV table (stdout if omitted)");
        app->add_flag("--print-config", print_cfg, "echo the resolved configuration to stderr");
    }

    int run() const {
        if (grid_p.empty() == grid_n.empty()) throw CliError("give exactly one of --grid-p and --grid-n");
        const bool over_p = !grid_p.empty();
        const std::vector<int64_t> grid = parse_grid(over_p ? grid_p : grid_n);
        const double fixed = parse_lambda(lambda_arg);
        const rr_options opts = solver.resolved();
        const json cfg = {{"command", "bench"}, {"scenario", scenario.to_json()},
                          {"solver", solver.to_json()}, {"grid", grid}, {"over", over_p ? "p" : "n"},
                          {"lambda", lambda_arg}, {"lambda_rule", lambda.to_json()}, {"reps", reps}};
        print_config(print_cfg, cfg);
        const bool verbose = log_level() != LogLevel::Quiet;

        std::string text = "size,n,p,time,time_min,lambda,outer_iters,newton_iters,eta_kkt,relgap,converged\n";
        int exit_code = kExitOk;
        for (int64_t size : grid) {
            ScenarioArgs point = scenario;
            (over_p ? point.p : point.n) = size;
            const rr_scenario sc = point.resolved();
            rr_problem* raw = nullptr;
            check(rr_generate(&sc, lambda.cfg.seed, &raw, nullptr), "generating data");
            ProblemPtr prob(raw);
            double lam = fixed;
            if (lam == 0.0) check(rr_select_lambda(prob.get(), &lambda.cfg, &lam, nullptr, nullptr), "selecting lambda");

            std::vector<double> times;
            rr_solution_info info{};
            for (int64_t r = 0; r < reps; ++r) {
                rr_solution* s = nullptr;
                const rr_status st = rr_solve(prob.get(), lam, &opts, &s);
                check(st, "solving");
                SolutionPtr sol(s);
                check(rr_solution_info_get(sol.get(), &info), "reading solution");
                times.push_back(info.wall_time);
                if (st != RR_OK) exit_code = kExitNotConverged;
            }
            std::sort(times.begin(), times.end());
            const double med = times[times.size() / 2];
            text += std::to_string(size) + "," + std::to_string(sc.n) + "," + std::to_string(sc.p) + "," +
                    fmt(med) + "," + fmt(times.front()) + "," + fmt(lam) + "," +
                    std::to_string(info.outer_iters) + "," + std::to_string(info.newton_iters) + "," +
                    fmt(info.eta_kkt) + "," + fmt(info.relgap) + "," + std::to_string(info.converged) + "\n";
            if (verbose)
                std::fprintf(stderr, "bench n=%lld p=%lld time=%.3f converged=%d\n",
                             static_cast<long long>(sc.n), static_cast<long long>(sc.p), med, info.converged);
        }
        emit(out, text);
        return exit_code;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-based group-sparse regression solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rr_version()));

    SolveCmd solve;
    SelectLambdaCmd select;
    ScoreCmd score;
    GenerateCmd generate;
    SimulateCmd simulate;
    BenchCmd bench;
    solve.add(app.add_subcommand("solve", "fit one dataset"));
    select.add(app.add_subcommand("select-lambda", "simulate the regularization level"));
    score.add(app.add_subcommand("score", "KKT residuals of a saved solution"));
    generate.add(app.add_subcommand("generate", "write one synthetic dataset"));
    simulate.add(app.add_subcommand("simulate", "replicated estimation experiment"));
    bench.add(app.add_subcommand("bench", "solve-time sweep over n or p"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (app.got_subcommand("solve")) return solve.run();
        if (app.got_subcommand("select-lambda")) return select.run();
        if (app.got_subcommand("score")) return score.run();
        if (app.got_subcommand("generate")) return generate.run();
        if (app.got_subcommand("simulate")) return simulate.run();
        if (app.got_subcommand("bench")) return bench.run();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
