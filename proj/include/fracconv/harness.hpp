#pragma once

// Reproduction harness: the two benchmark problems, grid-coupling rules, rate
// tables, and table emission.
//
// Benchmark 1 (manufactured solution): u(x,t) = e^{-t} x^4 (2-x)^4 on
// [0,2] x [0,1] with D = 1; the source follows from the termwise fractional
// derivative of the quartic-pair polynomial. Generalizes to any interval via
// u = e^{-t} (x-xL)^4 (xR-x)^4.
//
// Benchmark 2 (Levy-Smirnov): alpha = 1/2, beta = 1, D = 1 on [-1,20] up to
// T = sqrt(2), zero source, Gaussian approximation of the Dirac initial datum
// with width eps = 2h; the final-time reference is the stable density
// S(x) = exp(-1/(2x)) / sqrt(2 pi x^3) for x > 0 (zero otherwise).

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coeff.hpp"
#include "solver.hpp"
#include "special.hpp"

namespace fracconv::harness {

using coeff::FracOrder;
using coeff::Scheme;

/// Coefficients of (x)^4 (2-x)^4 in powers of x (degrees 4..8).
inline constexpr std::array<double, 5> kQuarticCoeffs = {16.0, -32.0, 24.0, -8.0, 1.0};

/// e^{-t} x^4 (2-x)^4 on [0,2].
inline double example1_exact(double x, double t) {
    double poly = 0.0;
    for (int j = 4; j >= 0; --j) poly = poly * x + kQuarticCoeffs[static_cast<std::size_t>(j)];
    return std::exp(-t) * poly * x * x * x * x;
}

/// Source term of benchmark 1 (D = 1): q = du/dt + (1+beta)/2 D_L^alpha u
/// + (1-beta)/2 D_R^alpha u, using the termwise identity that the left
/// fractional derivative of x^j (based at 0) is Gamma(j+1)/Gamma(j+1-alpha)
/// x^{j-alpha}, and its mirror for the right derivative: the solution is
/// symmetric under x <-> 2-x, so the right derivative is the same series in
/// (2-x).
inline double example1_source(FracOrder alpha, double beta, double x, double t) {
    const double al = alpha.value();
    double left = 0.0, right = 0.0;
    for (std::size_t j = 0; j < kQuarticCoeffs.size(); ++j) {
        const double power = 4.0 + static_cast<double>(j);
        const double ratio = special::gamma_ratio(power + 1.0, power + 1.0 - al);
        left += kQuarticCoeffs[j] * ratio * std::pow(x, power - al);
        right += kQuarticCoeffs[j] * ratio * std::pow(2.0 - x, power - al);
    }
    return std::exp(-t) *
           (-example1_exact(x, 0.0) + 0.5 * (1.0 + beta) * left + 0.5 * (1.0 - beta) * right);
}

/// Levy-Smirnov density S(x) = exp(-1/(2x)) / sqrt(2 pi x^3), zero for x <= 0.
inline double levy_smirnov_density(double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(-0.5 / x) / std::sqrt(2.0 * std::numbers::pi * x * x * x);
}

/// Manufactured problem on an arbitrary interval: u = e^{-t}(x-xL)^4(xR-x)^4.
/// For [0, 2], T = 1, D = 1 this is exactly benchmark 1.
inline solver::ProblemSpec make_manufactured_problem(double alpha, double beta, double D,
                                                     double x_left, double x_right, double T) {
    const double L = x_right - x_left;
    // (y)^4 (L-y)^4 = sum_j kappa_j y^{4+j},  kappa_j = (-1)^j C(4,j) L^{4-j}.
    std::array<double, 5> kappa{};
    const double binom[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
    for (int j = 0; j <= 4; ++j)
        kappa[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * binom[j] *
                                             std::pow(L, 4.0 - j);
    std::array<double, 5> ratio{};
    for (int j = 0; j <= 4; ++j)
        ratio[static_cast<std::size_t>(j)] =
            special::gamma_ratio(5.0 + j, 5.0 + j - alpha);

    auto poly = [kappa](double y) {
        double acc = 0.0;
        for (int j = 4; j >= 0; --j) acc = acc * y + kappa[static_cast<std::size_t>(j)];
        return acc * y * y * y * y;
    };
    auto frac = [kappa, ratio, alpha](double y) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 5; ++j)
            acc += kappa[j] * ratio[j] * std::pow(y, 4.0 + static_cast<double>(j) - alpha);
        return acc;
    };

    solver::ProblemSpec problem;
    problem.alpha = alpha;
    problem.beta = beta;
    problem.D = D;
    problem.x_left = x_left;
    problem.x_right = x_right;
    problem.T = T;
    problem.u0 = [poly, x_left](double x) { return poly(x - x_left); };
    problem.q = [poly, frac, alpha, beta, D, x_left, x_right](double x, double t) {
        const double wl = 0.5 * (1.0 + beta), wr = 0.5 * (1.0 - beta);
        return std::exp(-t) *
               (-poly(x - x_left) + D * (wl * frac(x - x_left) + wr * frac(x_right - x)));
    };
    problem.exact = [poly, x_left](double x, double t) {
        return std::exp(-t) * poly(x - x_left);
    };
    return problem;
}

/// Benchmark-2 problem for a given spatial resolution (the Gaussian width is
/// tied to the grid: eps = 2h). The `exact` field is the final-time density
/// and is only meaningful at t = T.
inline solver::ProblemSpec make_example2_problem(double h) {
    solver::ProblemSpec problem;
    problem.alpha = 0.5;
    problem.beta = 1.0;
    problem.D = 1.0;
    problem.x_left = -1.0;
    problem.x_right = 20.0;
    problem.T = std::numbers::sqrt2;
    const double eps = 2.0 * h;
    problem.u0 = [eps](double x) {
        return std::exp(-x * x / (eps * eps)) / (eps * std::sqrt(std::numbers::pi));
    };
    problem.q = nullptr;  // zero source
    problem.exact = [](double x, double) { return levy_smirnov_density(x); };
    return problem;
}

/// Grid coupling of the convergence studies: N = M for the second-order
/// stencil, N = floor(M^(2/(3-alpha))) for the order-(3-alpha) stencils.
inline int grid_couple(Scheme scheme, FracOrder alpha, int M) {
    if (M < 4) throw std::invalid_argument("grid_couple: M must be >= 4");
    if (scheme == Scheme::M1) return M;
    const double exponent = 2.0 / (3.0 - alpha.value());
    // Nudge before truncating: pow may land a hair under an exact integer.
    return static_cast<int>(std::floor(std::pow(static_cast<double>(M), exponent) + 1e-9));
}

/// GMRES tolerance rules used by the tables.
struct TolSpec {
    enum class Rule { Tau3, TenTau3, Fixed };
    Rule rule = Rule::Tau3;
    double value = 0.0;

    [[nodiscard]] double tol(double tau) const {
        switch (rule) {
            case Rule::Tau3: return tau * tau * tau;
            case Rule::TenTau3: return 10.0 * tau * tau * tau;
            case Rule::Fixed: return value;
        }
        throw std::logic_error("TolSpec: unknown rule");
    }

    static TolSpec parse(const std::string& text) {
        if (text == "tau3") return {Rule::Tau3, 0.0};
        if (text == "10tau3") return {Rule::TenTau3, 0.0};
        return {Rule::Fixed, std::stod(text)};
    }
};

struct Example1Spec {
    double alpha;
    double beta;
    int M;
};

struct Example2Spec {
    int M;
};

/// One table row; missing method columns stay empty.
struct ConvergenceRow {
    int M = 0;
    int N = 0;
    std::optional<double> e_direct, time_direct;
    std::optional<double> e_gmres, rate, time_gmres, iters;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

namespace detail {

inline void fill_method_columns(ConvergenceRow& row, const solver::SolveReport& report,
                                solver::Method kind) {
    if (kind == solver::Method::Direct) {
        row.e_direct = report.error_h2;
        row.time_direct = report.cpu_seconds;
    } else {
        row.e_gmres = report.error_h2;
        row.time_gmres = report.cpu_seconds;
        row.iters = report.avg_gmres_iters;
    }
}

}  // namespace detail

/// Run one benchmark-1 row at the coupled grid size.
inline ConvergenceRow run_example1(const Example1Spec& spec, Scheme scheme, solver::Method kind,
                                   TolSpec tol_rule = {}) {
    const solver::ProblemSpec problem =
        make_manufactured_problem(spec.alpha, spec.beta, 1.0, 0.0, 2.0, 1.0);
    const int N = grid_couple(scheme, FracOrder(spec.alpha), spec.M);
    const solver::GridSpec grid = solver::GridSpec::make(problem, spec.M, N);
    solver::MethodSpec method;
    method.kind = kind;
    method.gmres_tol = tol_rule.tol(grid.tau);
    const solver::SolveReport report = solver::run(scheme, problem, grid, method);
    ConvergenceRow row;
    row.M = spec.M;
    row.N = N;
    detail::fill_method_columns(row, report, kind);
    return row;
}

/// Run one benchmark-2 row. The default tolerance rule is this benchmark's
/// 10 tau^3. Requires M >= 512 so that eps = 2h still resolves the Gaussian.
inline ConvergenceRow run_example2(const Example2Spec& spec, Scheme scheme, solver::Method kind,
                                   TolSpec tol_rule = {TolSpec::Rule::TenTau3, 0.0}) {
    if (spec.M < 512)
        throw std::invalid_argument("run_example2: M must be >= 512 (eps = 2h resolution)");
    const int N = grid_couple(scheme, FracOrder(0.5), spec.M);
    solver::ProblemSpec problem = make_example2_problem(21.0 / (N + 1));
    const solver::GridSpec grid = solver::GridSpec::make(problem, spec.M, N);
    solver::MethodSpec method;
    method.kind = kind;
    method.gmres_tol = tol_rule.tol(grid.tau);
    const solver::SolveReport report = solver::run(scheme, problem, grid, method);
    ConvergenceRow row;
    row.M = spec.M;
    row.N = N;
    detail::fill_method_columns(row, report, kind);
    return row;
}

/// rate[j] = log2(E[j-1] / E[j]) on successive rows (GMRES errors preferred,
/// direct errors otherwise — when both ran, the GMRES column is the one the
/// rates describe).
inline void fill_rates(ConvergenceTable& table) {
    auto error_of = [](const ConvergenceRow& row) -> std::optional<double> {
        return row.e_gmres ? row.e_gmres : row.e_direct;
    };
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto prev = error_of(table.rows[i - 1]);
        const auto curr = error_of(table.rows[i]);
        if (prev && curr && *curr != 0.0)
            table.rows[i].rate = std::log2(*prev / *curr);
    }
}

enum class TableFormat { Csv, Json };

namespace detail {

inline std::string num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

inline std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace detail

/// Emit the table; the column order is fixed
/// (M, E_direct, Time_direct, E_gmres, Rate, Time_gmres, Iter). The JSON
/// variant additionally carries N and round-trips doubles bit-exactly.
inline void emit_table(const ConvergenceTable& table, TableFormat format, std::ostream& out) {
    if (table.rows.empty()) throw std::invalid_argument("emit_table: empty table");
    if (format == TableFormat::Csv) {
        out << "M,E_direct,Time_direct,E_gmres,Rate,Time_gmres,Iter\n";
        for (const ConvergenceRow& row : table.rows) {
            out << row.M << ',' << detail::opt(row.e_direct) << ','
                << detail::opt(row.time_direct) << ',' << detail::opt(row.e_gmres) << ','
                << detail::opt(row.rate) << ',' << detail::opt(row.time_gmres) << ','
                << detail::opt(row.iters) << '\n';
        }
        return;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const ConvergenceRow& row : table.rows) {
        nlohmann::json entry{{"M", row.M}, {"N", row.N}};
        auto set = [&entry](const char* key, const std::optional<double>& v) {
            if (v) entry[key] = *v;
        };
        set("E_direct", row.e_direct);
        set("Time_direct", row.time_direct);
        set("E_gmres", row.e_gmres);
        set("Rate", row.rate);
        set("Time_gmres", row.time_gmres);
        set("Iter", row.iters);
        rows.push_back(std::move(entry));
    }
    out << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
}

inline void emit_table_file(const ConvergenceTable& table, TableFormat format,
                            const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_table: cannot open " + path.string());
    emit_table(table, format, out);
    if (!out.good()) throw std::runtime_error("emit_table: write failed for " + path.string());
}

/// Parse the JSON emitted by emit_table (used for round-trip checks).
inline ConvergenceTable parse_table_json(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in);
    ConvergenceTable table;
    for (const auto& entry : doc.at("rows")) {
        ConvergenceRow row;
        row.M = entry.at("M").get<int>();
        row.N = entry.at("N").get<int>();
        auto get = [&entry](const char* key) -> std::optional<double> {
            if (!entry.contains(key)) return std::nullopt;
            return entry[key].get<double>();
        };
        row.e_direct = get("E_direct");
        row.time_direct = get("Time_direct");
        row.e_gmres = get("E_gmres");
        row.rate = get("Rate");
        row.time_gmres = get("Time_gmres");
        row.iters = get("Iter");
        table.rows.push_back(row);
    }
    return table;
}

/// Flat key-value run configuration: one `key = value` (or `key: value`,
/// `key value`) pair per line, `#` comments.
inline std::map<std::string, std::string> parse_flat_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto sep = line.find_first_of("=:");
        if (sep == std::string::npos) sep = line.find_first_of(" \t");
        if (sep == std::string::npos)
            throw std::invalid_argument("config: malformed line '" + line + "'");
        const std::string key = trim(line.substr(0, sep));
        const std::string value = trim(line.substr(sep + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: malformed line '" + line + "'");
        kv[key] = value;
    }
    return kv;
}

/// m_list entries: plain integers are M values; `a..b` expands to 2^a..2^b.
inline std::vector<int> parse_m_list(const std::string& text) {
    std::vector<int> ms;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto dots = token.find("..");
        if (dots != std::string::npos) {
            const int k1 = std::stoi(token.substr(0, dots));
            const int k2 = std::stoi(token.substr(dots + 2));
            if (k1 > k2 || k1 < 2 || k2 > 30)
                throw std::invalid_argument("m_list: bad exponent range " + token);
            for (int k = k1; k <= k2; ++k) ms.push_back(1 << k);
        } else {
            ms.push_back(std::stoi(token));
        }
    }
    if (ms.empty()) throw std::invalid_argument("m_list: empty");
    return ms;
}

/// Convergence study over a list of M values on the manufactured problem.
struct StudyConfig {
    Scheme scheme = Scheme::M1;
    double alpha = 0.5;
    double beta = 0.0;
    double D = 1.0;
    double x_left = 0.0;
    double x_right = 2.0;
    double T = 1.0;
    std::vector<int> m_list;
    bool run_direct = true;
    bool run_gmres = true;
    TolSpec tol_rule;
};

inline ConvergenceTable convergence_study(const StudyConfig& config) {
    ConvergenceTable table;
    for (int M : config.m_list) {
        const solver::ProblemSpec problem = make_manufactured_problem(
            config.alpha, config.beta, config.D, config.x_left, config.x_right, config.T);
        const int N = grid_couple(config.scheme, FracOrder(config.alpha), M);
        const solver::GridSpec grid = solver::GridSpec::make(problem, M, N);
        ConvergenceRow row;
        row.M = M;
        row.N = N;
        if (config.run_direct) {
            const auto report =
                solver::run(config.scheme, problem, grid, solver::MethodSpec::direct());
            detail::fill_method_columns(row, report, solver::Method::Direct);
        }
        if (config.run_gmres) {
            const auto report = solver::run(
                config.scheme, problem, grid,
                solver::MethodSpec::gmres(config.tol_rule.tol(grid.tau)));
            detail::fill_method_columns(row, report, solver::Method::Gmres);
        }
        table.rows.push_back(row);
    }
    fill_rates(table);
    return table;
}

inline Scheme parse_scheme(const std::string& text) {
    if (text == "m1" || text == "M1" || text == "1") return Scheme::M1;
    if (text == "m2" || text == "M2" || text == "2") return Scheme::M2;
    if (text == "m3" || text == "M3" || text == "3") return Scheme::M3;
    throw std::invalid_argument("unknown scheme '" + text + "'");
}

/// Build a StudyConfig from the flat keys alpha, beta, bigd, scheme, method,
/// m_list, domain, horizon, tol_rule.
inline StudyConfig study_from_config(const std::map<std::string, std::string>& kv) {
    StudyConfig config;
    auto need = [&kv](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("config: missing key '" + key + "'");
        return it->second;
    };
    config.alpha = std::stod(need("alpha"));
    config.beta = std::stod(need("beta"));
    if (const auto it = kv.find("bigd"); it != kv.end()) config.D = std::stod(it->second);
    config.scheme = parse_scheme(need("scheme"));
    config.m_list = parse_m_list(need("m_list"));
    if (const auto it = kv.find("method"); it != kv.end()) {
        config.run_direct = it->second == "direct" || it->second == "both";
        config.run_gmres = it->second == "gmres" || it->second == "both";
        if (!config.run_direct && !config.run_gmres)
            throw std::invalid_argument("config: method must be direct, gmres, or both");
    }
    if (const auto it = kv.find("domain"); it != kv.end()) {
        const auto comma = it->second.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("config: domain must be 'xL,xR'");
        config.x_left = std::stod(it->second.substr(0, comma));
        config.x_right = std::stod(it->second.substr(comma + 1));
    }
    if (const auto it = kv.find("horizon"); it != kv.end()) config.T = std::stod(it->second);
    if (const auto it = kv.find("tol_rule"); it != kv.end())
        config.tol_rule = TolSpec::parse(it->second);
    return config;
}

}  // namespace fracconv::harness
