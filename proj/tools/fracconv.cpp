// fracconv — command-line front end for the fractional convection-equation
// library. Subcommands:
//
//   coeffs          dump the stencil coefficient sequences as CSV
//   stability-scan  grid scan of Re g_m with CSV grid + JSON summary
//   solve           one Crank-Nicolson run (manufactured or Levy problem)
//   example1        convergence table for the manufactured-solution benchmark
//   example2        convergence table for the Levy-Smirnov benchmark
//   convergence     study driven by a flat key = value config file

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fracconv/coeff.hpp>
#include <fracconv/genfun.hpp>
#include <fracconv/harness.hpp>
#include <fracconv/solver.hpp>

namespace {

using fracconv::coeff::FracOrder;
using fracconv::coeff::Scheme;
namespace genfun = fracconv::genfun;
namespace harness = fracconv::harness;
namespace solver = fracconv::solver;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::M1: return "m1";
        case Scheme::M2: return "m2";
        case Scheme::M3: return "m3";
    }
    return "?";
}

// ---------------------------------------------------------------- coeffs ---

struct CoeffsArgs {
    std::string scheme = "m1";
    double alpha = 0.5;
    int count = 32;
    std::string out;
};

void run_coeffs(const CoeffsArgs& args) {
    const Scheme scheme = harness::parse_scheme(args.scheme);
    const FracOrder alpha(args.alpha);
    const auto K = static_cast<std::size_t>(args.count);
    const fracconv::coeff::WeightTable table = fracconv::coeff::scheme_weights(scheme, alpha, K);
    std::ofstream out = open_out(args.out);
    out << "k,a,b,c,d,weight\n";
    out.precision(17);
    for (std::size_t k = 0; k < K; ++k) {
        out << k << ',' << fracconv::coeff::a_seq(alpha, k) << ','
            << fracconv::coeff::b_seq(alpha, k) << ',' << fracconv::coeff::c_seq(alpha, k) << ','
            << fracconv::coeff::d_seq(alpha, k) << ',' << table.weights[k] << '\n';
    }
    std::cout << "wrote " << args.count << " rows to " << args.out
              << " (scheme " << args.scheme << ", prefactor " << table.prefactor << ")\n";
}

// -------------------------------------------------------- stability-scan ---

struct ScanArgs {
    std::string scheme = "m2";
    double alpha_min = 0.05;
    double alpha_max = 0.95;
    int alpha_steps = 19;
    int theta_steps = 315;
    int nmax = 1000;
    std::string out;
};

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    if (steps == 1) {
        grid[0] = lo;
        return grid;
    }
    for (int i = 0; i < steps; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    grid.back() = hi;  // the incremental form can overshoot hi by an ulp
    return grid;
}

void run_scan(const ScanArgs& args) {
    const Scheme scheme = harness::parse_scheme(args.scheme);
    const std::vector<double> alphas = linspace(args.alpha_min, args.alpha_max, args.alpha_steps);
    const std::vector<double> thetas = linspace(0.001, std::numbers::pi, args.theta_steps);
    genfun::HSeriesParams params;
    params.n_max = args.nmax;
    const genfun::ScanReport report = genfun::stability_scan(scheme, alphas, thetas, params);

    std::ofstream out = open_out(args.out);
    out << "alpha,theta,re_g\n";
    out.precision(17);
    for (double alpha : alphas)
        for (double theta : thetas)
            out << alpha << ',' << theta << ','
                << genfun::re_g_closed(scheme, theta, FracOrder(alpha), params) << '\n';

    nlohmann::json verdicts = nlohmann::json::array();
    for (std::size_t i = 0; i < alphas.size(); ++i)
        verdicts.push_back({{"alpha", alphas[i]}, {"nonnegative", bool(report.nonnegative[i])}});
    const nlohmann::json summary{
        {"scheme", scheme_name(scheme)},
        {"min", report.min_value},
        {"argmin", {{"theta", report.argmin_theta}, {"alpha", report.argmin_alpha}}},
        {"tol_scan", report.tol_scan},
        {"max_tail_estimate", report.max_tail_estimate},
        {"verdicts", verdicts}};
    std::filesystem::path summary_path(args.out);
    summary_path.replace_extension(".json");
    open_out(summary_path.string()) << summary.dump(2) << '\n';
    std::cout << "grid written to " << args.out << ", summary to " << summary_path.string()
              << "\nmin Re g = " << report.min_value << " at (theta, alpha) = ("
              << report.argmin_theta << ", " << report.argmin_alpha << ")\n";
}

// ----------------------------------------------------------------- solve ---

struct SolveArgs {
    std::string scheme = "m1";
    double alpha = 0.5;
    double beta = 0.0;
    double bigd = 1.0;
    std::string domain = "0,2";
    double horizon = 1.0;
    int M = 512;
    int N = 0;  // 0 -> grid_couple
    std::string method = "direct";
    std::string tol_expr = "tau3";
    std::string problem = "manufactured";
    bool explicit_inverse = false;
    int dense_cap = 8192;
    std::string out;
    std::string profile;
};

void run_solve(const SolveArgs& args) {
    const Scheme scheme = harness::parse_scheme(args.scheme);
    const auto comma = args.domain.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--domain expects xL,xR");
    const double x_left = std::stod(args.domain.substr(0, comma));
    const double x_right = std::stod(args.domain.substr(comma + 1));

    const int N = args.N > 0 ? args.N
                             : harness::grid_couple(scheme, FracOrder(args.alpha), args.M);
    solver::ProblemSpec problem;
    if (args.problem == "manufactured") {
        problem = harness::make_manufactured_problem(args.alpha, args.beta, args.bigd, x_left,
                                                     x_right, args.horizon);
    } else if (args.problem == "levy") {
        // Canonical Levy-Smirnov setup; the domain/coefficient flags are
        // ignored because the reference density is specific to this setup.
        problem = harness::make_example2_problem(21.0 / (N + 1));
    } else {
        throw std::invalid_argument("--problem must be manufactured or levy");
    }
    const solver::GridSpec grid = solver::GridSpec::make(problem, args.M, N);

    solver::MethodSpec method;
    method.kind = (args.method == "gmres" || args.method == "g") ? solver::Method::Gmres
                                                                 : solver::Method::Direct;
    const harness::TolSpec tol_rule = harness::TolSpec::parse(args.tol_expr);
    method.gmres_tol = tol_rule.tol(grid.tau);
    method.explicit_inverse = args.explicit_inverse;
    method.dense_cap = args.dense_cap;

    const solver::SolveReport report = solver::run(scheme, problem, grid, method);
    if (report.stability_advisory)
        std::cerr << "warning: alpha = " << problem.alpha
                  << " lies outside the validated nonnegativity range of scheme "
                  << scheme_name(scheme) << "; results may be unstable\n";

    nlohmann::json doc{{"scheme", scheme_name(scheme)},
                       {"problem", args.problem},
                       {"alpha", problem.alpha},
                       {"beta", problem.beta},
                       {"D", problem.D},
                       {"x_left", problem.x_left},
                       {"x_right", problem.x_right},
                       {"T", problem.T},
                       {"M", report.M},
                       {"N", report.N},
                       {"tau", report.tau},
                       {"h", report.h},
                       {"mu_alpha", solver::mu_alpha(problem, grid)},
                       {"method", method.kind == solver::Method::Gmres ? "gmres" : "direct"},
                       {"tol", method.gmres_tol},
                       {"explicit_inverse", method.explicit_inverse},
                       {"cpu_seconds", report.cpu_seconds},
                       {"stability_advisory", report.stability_advisory},
                       {"gmres_all_converged", report.gmres_all_converged}};
    doc["error_h2"] = report.error_h2 ? nlohmann::json(*report.error_h2) : nlohmann::json();
    doc["avg_gmres_iters"] =
        report.avg_gmres_iters ? nlohmann::json(*report.avg_gmres_iters) : nlohmann::json();
    open_out(args.out) << doc.dump(2) << '\n';

    if (!args.profile.empty()) {
        std::ofstream prof = open_out(args.profile);
        prof << "x,u\n";
        prof.precision(17);
        for (int i = 0; i < report.N; ++i)
            prof << grid.x(problem, i + 1) << ',' << report.final_solution[i] << '\n';
    }
    std::cout << "report written to " << args.out;
    if (report.error_h2) std::cout << "; E_h2 = " << *report.error_h2;
    std::cout << '\n';
}

// ---------------------------------------------------- example1 / example2 ---

struct ExampleArgs {
    double alpha = 0.1;
    double beta = 0.2;
    std::string scheme = "m1";
    std::string method = "both";
    std::string mexp = "9..11";
    std::string tol_expr;  // default depends on the benchmark
    std::string out = ".";
};

void emit_and_print(harness::ConvergenceTable& table, const std::string& out_dir) {
    harness::fill_rates(table);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    harness::emit_table_file(table, harness::TableFormat::Csv, dir / "table.csv");
    harness::emit_table_file(table, harness::TableFormat::Json, dir / "table.json");
    harness::emit_table(table, harness::TableFormat::Csv, std::cout);
    std::cout << "tables written to " << (dir / "table.csv").string() << " and "
              << (dir / "table.json").string() << '\n';
}

void run_example(const ExampleArgs& args, bool levy) {
    const Scheme scheme = harness::parse_scheme(args.scheme);
    const bool want_direct = args.method == "direct" || args.method == "d" || args.method == "both";
    const bool want_gmres = args.method == "gmres" || args.method == "g" || args.method == "both";
    if (!want_direct && !want_gmres)
        throw std::invalid_argument("--method must be one of d, g, direct, gmres, both");
    const harness::TolSpec tol_rule = harness::TolSpec::parse(
        args.tol_expr.empty() ? (levy ? "10tau3" : "tau3") : args.tol_expr);

    harness::ConvergenceTable table;
    for (int M : harness::parse_m_list(args.mexp)) {
        harness::ConvergenceRow row;
        auto one = [&](solver::Method kind) {
            return levy ? harness::run_example2({M}, scheme, kind, tol_rule)
                        : harness::run_example1({args.alpha, args.beta, M}, scheme, kind,
                                                tol_rule);
        };
        if (want_direct) row = one(solver::Method::Direct);
        if (want_gmres) {
            const harness::ConvergenceRow gm = one(solver::Method::Gmres);
            row.M = gm.M;
            row.N = gm.N;
            row.e_gmres = gm.e_gmres;
            row.time_gmres = gm.time_gmres;
            row.iters = gm.iters;
        }
        table.rows.push_back(row);
    }
    emit_and_print(table, args.out);
}

// ----------------------------------------------------------- convergence ---

void run_convergence(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    const harness::StudyConfig config = harness::study_from_config(harness::parse_flat_config(in));
    harness::ConvergenceTable table = harness::convergence_study(config);
    emit_and_print(table, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional convection-equation toolkit"};
    app.require_subcommand(1);

    CoeffsArgs coeffs;
    CLI::App* coeffs_cmd = app.add_subcommand("coeffs", "dump coefficient sequences as CSV");
    coeffs_cmd->add_option("--scheme", coeffs.scheme, "m1|m2|m3")->capture_default_str();
    coeffs_cmd->add_option("--alpha", coeffs.alpha, "fractional order in (0,1)")->required();
    coeffs_cmd->add_option("--count", coeffs.count, "number of lags K >= 3")->required();
    coeffs_cmd->add_option("--out", coeffs.out, "output CSV path")->required();

    ScanArgs scan;
    CLI::App* scan_cmd =
        app.add_subcommand("stability-scan", "grid scan of Re g_m (CSV + JSON summary)");
    scan_cmd->add_option("--scheme", scan.scheme, "m1|m2|m3")->capture_default_str();
    scan_cmd->add_option("--alpha-min", scan.alpha_min)->capture_default_str();
    scan_cmd->add_option("--alpha-max", scan.alpha_max)->capture_default_str();
    scan_cmd->add_option("--alpha-steps", scan.alpha_steps)->capture_default_str();
    scan_cmd->add_option("--theta-steps", scan.theta_steps)->capture_default_str();
    scan_cmd->add_option("--nmax", scan.nmax, "H-series truncation")->capture_default_str();
    scan_cmd->add_option("--out", scan.out, "output CSV path")->required();

    SolveArgs solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "single Crank-Nicolson run");
    solve_cmd->add_option("--scheme", solve.scheme, "m1|m2|m3")->capture_default_str();
    solve_cmd->add_option("--alpha", solve.alpha)->capture_default_str();
    solve_cmd->add_option("--beta", solve.beta)->capture_default_str();
    solve_cmd->add_option("--bigd", solve.bigd, "diffusion coefficient D")->capture_default_str();
    solve_cmd->add_option("--domain", solve.domain, "xL,xR")->capture_default_str();
    solve_cmd->add_option("--horizon", solve.horizon, "final time T")->capture_default_str();
    solve_cmd->add_option("--m", solve.M, "time steps")->required();
    solve_cmd->add_option("--n", solve.N, "interior points (default: coupling rule)");
    solve_cmd->add_option("--method", solve.method, "direct|gmres")->capture_default_str();
    solve_cmd->add_option("--tol-expr", solve.tol_expr, "tau3|10tau3|<value>")
        ->capture_default_str();
    solve_cmd->add_option("--problem", solve.problem, "manufactured|levy")->capture_default_str();
    solve_cmd->add_flag("--explicit-inverse", solve.explicit_inverse,
                        "direct path: precompute the literal inverse");
    solve_cmd->add_option("--dense-cap", solve.dense_cap)->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "JSON report path")->required();
    solve_cmd->add_option("--profile", solve.profile, "optional CSV of the final profile");

    ExampleArgs ex1;
    CLI::App* ex1_cmd = app.add_subcommand("example1", "manufactured-solution benchmark table");
    ex1_cmd->add_option("--alpha", ex1.alpha)->required();
    ex1_cmd->add_option("--beta", ex1.beta)->required();
    ex1_cmd->add_option("--scheme", ex1.scheme, "m1|m2|m3")->capture_default_str();
    ex1_cmd->add_option("--method", ex1.method, "d|g|both")->capture_default_str();
    ex1_cmd->add_option("--mexp", ex1.mexp, "M list: k1..k2 exponents of 2, or comma list")
        ->capture_default_str();
    ex1_cmd->add_option("--tol-expr", ex1.tol_expr, "GMRES tolerance rule (default tau3)");
    ex1_cmd->add_option("--out", ex1.out, "output directory")->capture_default_str();

    ExampleArgs ex2;
    ex2.scheme = "m1";
    CLI::App* ex2_cmd = app.add_subcommand("example2", "Levy-Smirnov benchmark table");
    ex2_cmd->add_option("--scheme", ex2.scheme, "m1|m2|m3")->capture_default_str();
    ex2_cmd->add_option("--method", ex2.method, "d|g|both")->capture_default_str();
    ex2_cmd->add_option("--mexp", ex2.mexp, "M list: k1..k2 exponents of 2, or comma list")
        ->capture_default_str();
    ex2_cmd->add_option("--tol-expr", ex2.tol_expr, "GMRES tolerance rule (default 10tau3)");
    ex2_cmd->add_option("--out", ex2.out, "output directory")->capture_default_str();

    std::string config_path, conv_out = ".";
    CLI::App* conv_cmd = app.add_subcommand("convergence", "study driven by a config file");
    conv_cmd->add_option("--config", config_path, "flat key = value config file")->required();
    conv_cmd->add_option("--out", conv_out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (coeffs_cmd->parsed()) run_coeffs(coeffs);
        if (scan_cmd->parsed()) run_scan(scan);
        if (solve_cmd->parsed()) run_solve(solve);
        if (ex1_cmd->parsed()) run_example(ex1, /*levy=*/false);
        if (ex2_cmd->parsed()) run_example(ex2, /*levy=*/true);
        if (conv_cmd->parsed()) run_convergence(config_path, conv_out);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
