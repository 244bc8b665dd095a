#pragma once

// Flat `key = value` experiment configs and the command dispatcher behind the CLI.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "warpspec/acceptance.hpp"
#include "warpspec/eigen.hpp"
#include "warpspec/error.hpp"
#include "warpspec/experiments.hpp"
#include "warpspec/hardy.hpp"
#include "warpspec/ode.hpp"
#include "warpspec/parallel.hpp"
#include "warpspec/profiles.hpp"

namespace warpspec::cli {

enum class Command { warp, eigen, count, sweep, hardy, transplant, verify };

inline constexpr std::string_view command_names[] = {"warp", "eigen", "count", "sweep", "hardy", "transplant", "verify"};

inline std::string_view to_string(Command c) { return command_names[static_cast<int>(c)]; }

inline std::optional<Command> parse_command(std::string_view s)
{
    for (std::size_t i = 0; i < std::size(command_names); ++i)
        if (command_names[i] == s) return static_cast<Command>(i);
    return std::nullopt;
}

enum class ExitCode : int { success = 0, validation = 1, solver = 2, acceptance = 3 };

/// All validation problems of a config, reported together.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> errors)
        : InvalidArgument(join(errors))
        , errors_(std::move(errors))
    {
    }
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e)
    {
        std::string s;
        for (const auto& x : e) s += (s.empty() ? "" : "; ") + x;
        return s;
    }
    std::vector<std::string> errors_;
};

enum class ValueType { integer, real, real_list, text };

struct KeySpec {
    std::string name;
    ValueType type;
    bool required;
};

/// Accepted keys per command. Keys common to every command come first.
inline std::vector<KeySpec> command_schema(Command c)
{
    using enum ValueType;
    std::vector<KeySpec> keys{{"tol", real, false}, {"seed", integer, false}, {"threads", integer, false},
                              {"output_dir", text, false}};
    auto add = [&](std::initializer_list<KeySpec> more) { keys.insert(keys.end(), more); };
    switch (c) {
    case Command::warp:
        add({{"kappa", real, true}, {"beta", real, true}, {"r_join", real, false}, {"kind", text, false},
             {"r_max", real, true}, {"fit_lo", real, false}, {"fit_hi", real, false}});
        break;
    case Command::eigen:
        add({{"n", integer, true}, {"kappa", real, true}, {"beta", real, true}, {"r_join", real, false},
             {"L", real, true}, {"index", integer, false}});
        break;
    case Command::count:
        add({{"n", integer, true}, {"kappa", real, true}, {"beta", real, true}, {"r_join", real, false},
             {"L", real_list, true}, {"E", real, false}, {"eps_origin", real, false}});
        break;
    case Command::sweep:
        add({{"n", integer, true}, {"kappa", real, true}, {"beta", real_list, true}, {"L", real_list, true},
             {"eps_origin", real, false}});
        break;
    case Command::hardy:
        add({{"delta", real_list, true}, {"k", real_list, false}, {"R", real_list, true}});
        break;
    case Command::transplant:
        add({{"n", integer, true}, {"kappa", real, true}, {"beta", real, true}, {"r_join", real, false},
             {"target_kappa", real, true}, {"target_beta", real, true}, {"target_r_join", real, false},
             {"r_w", real, true}, {"R", real, true}});
        break;
    case Command::verify: break;
    }
    return keys;
}

struct ExperimentConfig {
    Command command = Command::verify;
    std::map<std::string, std::string> params; ///< validated raw values
    std::filesystem::path output_dir = "out";
    double tol = 1e-8;
    std::uint64_t seed = 7;
    unsigned threads = 1;

    bool has(const std::string& key) const { return params.count(key) != 0; }
    double real(const std::string& key) const;
    double real_or(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }
    long integer(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
    std::string text(const std::string& key) const { return params.at(key); }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<double> to_real(std::string_view s)
{
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<long> to_integer(std::string_view s)
{
    s = trim(s);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::vector<double>> to_list(std::string_view s)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        const auto v = to_real(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

inline double ExperimentConfig::real(const std::string& key) const { return *detail::to_real(params.at(key)); }
inline long ExperimentConfig::integer(const std::string& key) const { return *detail::to_integer(params.at(key)); }
inline std::vector<double> ExperimentConfig::list(const std::string& key) const { return *detail::to_list(params.at(key)); }

/// Parse a `[command]` header followed by `key = value` lines (`#` starts a comment).
/// Every problem found is collected before a ConfigError is thrown.
inline ExperimentConfig parse_config(std::string_view text)
{
    std::vector<std::string> errors;
    ExperimentConfig cfg;
    std::optional<Command> command;
    bool header_seen = false;
    std::map<std::string, std::string> raw;
    std::istringstream in{std::string(text)};
    std::string line_buf;
    int lineno = 0;
    while (std::getline(in, line_buf)) {
        ++lineno;
        std::string_view line = line_buf;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + "malformed command header");
                continue;
            }
            if (header_seen) {
                errors.push_back(where + "only one [command] header is allowed");
                continue;
            }
            header_seen = true;
            const auto name = detail::trim(line.substr(1, line.size() - 2));
            command = parse_command(name);
            if (!command) errors.push_back(where + "unknown command '" + std::string(name) + "'");
            continue;
        }
        if (!header_seen) {
            errors.push_back(where + "key before the [command] header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back(where + "expected key = value");
            continue;
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) errors.push_back(where + "empty key");
        else if (raw.count(key)) errors.push_back(where + "duplicate key '" + key + "'");
        else raw[key] = value;
    }
    if (!header_seen) errors.push_back("missing command header");
    if (!command) throw ConfigError(errors);
    cfg.command = *command;

    const auto schema = command_schema(*command);
    for (const auto& [key, value] : raw) {
        const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
        if (it == schema.end()) {
            errors.push_back("unknown key '" + key + "' for command " + std::string(to_string(*command)));
            continue;
        }
        bool ok = true;
        switch (it->type) {
        case ValueType::integer: ok = detail::to_integer(value).has_value(); break;
        case ValueType::real: ok = detail::to_real(value).has_value(); break;
        case ValueType::real_list: ok = detail::to_list(value).has_value(); break;
        case ValueType::text: ok = !value.empty(); break;
        }
        if (!ok) {
            static constexpr const char* names[] = {"an integer", "a number", "a comma-separated list of numbers", "text"};
            errors.push_back("key '" + key + "' must be " + names[static_cast<int>(it->type)] + ", got '" + value + "'");
            continue;
        }
        cfg.params[key] = value;
    }
    for (const auto& k : schema)
        if (k.required && !raw.count(k.name)) errors.push_back("missing required key '" + k.name + "'");

    // range checks on typed values
    auto check_real = [&](const char* key, auto pred, const char* msg) {
        if (cfg.has(key) && !pred(cfg.real(key))) errors.push_back(std::string(key) + " " + msg);
    };
    if (cfg.has("n") && cfg.integer("n") < 2) errors.push_back("n must be >= 2");
    check_real("tol", [](double v) { return v > 1e-14 && v < 1e-4; }, "must lie in (1e-14, 1e-4)");
    check_real("kappa", [](double v) { return v > 0.0; }, "must be positive");
    check_real("target_kappa", [](double v) { return v > 0.0; }, "must be positive");
    check_real("r_w", [](double v) { return v > 0.0; }, "must be positive");
    check_real("eps_origin", [](double v) { return v > 0.0; }, "must be positive");
    if (cfg.has("threads") && cfg.integer("threads") < 1) errors.push_back("threads must be >= 1");
    if (cfg.has("seed") && cfg.integer("seed") < 0) errors.push_back("seed must be nonnegative");
    if (cfg.has("kind")) {
        try {
            (void)parse_profile_kind(cfg.text("kind"));
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    for (const char* key : {"L", "R", "beta", "delta", "k", "target_beta", "r_join", "target_r_join", "r_max"})
        if (cfg.has(key)) {
            const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
            const bool is_list = it->type == ValueType::real_list;
            const auto vals = is_list ? cfg.list(key) : std::vector<double>{cfg.real(key)};
            const bool nonneg = std::string_view(key).ends_with("beta");
            for (double v : vals)
                if (nonneg ? v < 0.0 : v <= 0.0) {
                    errors.push_back(std::string(key) + (nonneg ? " must be nonnegative" : " must be positive"));
                    break;
                }
        }

    if (!errors.empty()) throw ConfigError(errors);
    if (cfg.has("tol")) cfg.tol = cfg.real("tol");
    if (cfg.has("seed")) cfg.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    if (cfg.has("threads")) cfg.threads = static_cast<unsigned>(cfg.integer("threads"));
    if (cfg.has("output_dir")) cfg.output_dir = cfg.text("output_dir");
    return cfg;
}

/// Which commands reach each library operation.
inline std::vector<std::pair<std::string, std::vector<Command>>> operation_coverage()
{
    using enum Command;
    return {
        {"make_profile", {warp, eigen, count, sweep, transplant, verify}},
        {"eval_profile", {warp, eigen, count, transplant, verify}},
        {"solve_warping", {warp, eigen, count, sweep, transplant, verify}},
        {"eval_warping", {warp, verify}},
        {"riccati_tail_fit", {warp, verify}},
        {"effective_potential", {count, verify}},
        {"first_dirichlet_eigen", {eigen, transplant, verify}},
        {"check_lemma21", {eigen, verify}},
        {"count_eigenvalues_below", {count, sweep, verify}},
        {"count_curve", {count, sweep, verify}},
        {"hardy_test_quotient", {hardy, verify}},
        {"hardy_first_eigenvalue", {hardy, verify}},
        {"hardy_weight", {verify}},
        {"verify_hardy_inequality", {verify}},
        {"verify_prop22", {verify}},
        {"transplant_check", {transplant, verify}},
        {"threshold_sweep", {sweep, verify}},
        {"parse_config", {warp, eigen, count, sweep, hardy, transplant, verify}},
        {"run", {warp, eigen, count, sweep, hardy, transplant, verify}},
    };
}

struct RunReport {
    ExitCode code = ExitCode::success;
    std::vector<std::filesystem::path> files;
};

namespace detail {

inline CurvatureProfile model_profile(const ExperimentConfig& c, const std::string& prefix = "",
                                      ProfileKind kind = ProfileKind::model_lower_bound)
{
    const double kappa = c.real(prefix + "kappa"), beta = c.real(prefix + "beta");
    const double r_join = c.real_or(prefix + "r_join", CurvatureProfile::default_r_join(kappa, beta));
    return CurvatureProfile::make(kappa, beta, r_join, kind);
}

class OutputSet {
public:
    OutputSet(std::filesystem::path dir, RunReport& rep)
        : dir_(std::move(dir))
        , rep_(rep)
    {
        std::filesystem::create_directories(dir_);
    }

    template <class Writer>
    void write(const std::string& name, Writer&& w)
    {
        const auto path = dir_ / name;
        warpspec::detail::write_file(path, std::forward<Writer>(w));
        rep_.files.push_back(path);
    }

    /// Tool-agnostic plotting notes: one line per series, columns referenced by name.
    void plot_stub(const std::vector<std::string>& lines)
    {
        write("plot_stub.txt", [&](std::ostream& os) {
            os << "# plot data description: file, x column, y column, grouping\n";
            for (const auto& l : lines) os << l << '\n';
        });
    }

private:
    std::filesystem::path dir_;
    RunReport& rep_;
};

template <class T>
struct Cell {
    std::optional<T> value;
    std::string error;
};

template <class Fn>
auto guarded(Fn&& fn) -> Cell<decltype(fn())>
{
    try {
        return {fn(), {}};
    } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
    }
}

inline std::string csv_quote(const std::string& s)
{
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline void run_warp(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    const ProfileKind kind = c.has("kind") ? parse_profile_kind(c.text("kind")) : ProfileKind::model_lower_bound;
    const auto p = model_profile(c, "", kind);
    const auto w = solve_warping(p, c.real("r_max"), c.tol);
    out.write("warp.csv", [&](std::ostream& os) { write_warping_csv(os, w); });
    log << "warp: " << w.grid().size() << " grid points on [" << w.t_series() << ", " << w.r_max() << "], S(r_max) = "
        << w.s_at(w.r_max()) << '\n';
    std::vector<std::string> plot{"warp.csv, t, log_j", "warp.csv, t, s"};
    if (c.has("fit_lo") || c.has("fit_hi")) {
        const auto fit = riccati_tail_fit(w, c.real_or("fit_lo", 50.0), c.real_or("fit_hi", w.r_max()));
        out.write("tail_fit.csv", [&](std::ostream& os) {
            os << "kappa,beta,kappa_hat,beta_hat,rms_residual\n"
               << p.kappa() << ',' << p.beta() << ',' << fit.kappa_hat << ',' << fit.beta_hat << ',' << fit.rms_residual
               << '\n';
        });
        log << "tail fit: kappa_hat = " << fit.kappa_hat << ", beta_hat = " << fit.beta_hat << '\n';
    }
    out.plot_stub(plot);
}

inline void run_eigen(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    const auto p = model_profile(c);
    const double L = c.real("L");
    const ModelSpace m(static_cast<int>(c.integer("n")), solve_warping(p, L * 1.001 + 1.0, std::clamp(c.tol, 1e-12, 1e-8)));
    const auto res = dirichlet_eigen(m, L, c.tol, static_cast<int>(c.has("index") ? c.integer("index") : 0));
    const auto lemma = check_lemma21(res);
    out.write("eigen.csv", [&](std::ostream& os) { write_eigen_csv(os, res); });
    out.write("eigen_summary.csv", [&](std::ostream& os) {
        os << "n,kappa,beta,r_join,L,eigenvalue,node_count,eps_origin,lemma21\n"
           << m.n() << ',' << p.kappa() << ',' << p.beta() << ',' << p.r_join() << ',' << L << ',' << res.eigenvalue
           << ',' << res.node_count << ',' << res.eps_origin << ',' << (lemma.passed ? "pass" : "fail") << '\n';
    });
    out.plot_stub({"eigen.csv, r, h1"});
    log << "eigen: lambda = " << res.eigenvalue << " (nodes " << res.node_count << ", monotone ground state "
        << (lemma.passed ? "yes" : "no") << ")\n";
}

inline void run_count(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    const auto p = model_profile(c);
    auto Ls = c.list("L");
    const ModelSpace m(static_cast<int>(c.integer("n")), solve_warping(p, *std::max_element(Ls.begin(), Ls.end()) * 1.0001, c.tol));
    const double E = c.real_or("E", m.essential_bottom() - 1e-9);
    const auto curve = count_curve(m, E, Ls, c.real_or("eps_origin", 0.01));
    out.write("count.csv", [&](std::ostream& os) { write_count_csv(os, curve); });
    out.write("potential.csv", [&](std::ostream& os) {
        os << "x,V\n";
        const double a = std::max(curve.eps_origin, m.warping().t_series()), b = Ls.back();
        constexpr int samples = 400;
        for (int i = 0; i <= samples; ++i) {
            const double x = a * std::pow(b / a, static_cast<double>(i) / samples);
            os << x << ',' << effective_potential(m, std::min(x, b)) << '\n';
        }
    });
    out.plot_stub({"count.csv, L (log axis), count", "potential.csv, x (log axis), V"});
    log << "count: E = " << E << ", classification " << to_string(curve.classification)
        << (curve.eps_converged ? "" : " (origin cutoff not converged)") << '\n';
    for (const auto& pt : curve.points) log << "  L = " << pt.L << "  N = " << pt.count << '\n';
}

inline bool run_sweep(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    const int n = static_cast<int>(c.integer("n"));
    const double kappa = c.real("kappa");
    const auto betas = c.list("beta");
    const auto Ls = c.list("L");
    const double eps = c.real_or("eps_origin", 0.01);
    const auto cells = parallel_map(betas.size(), c.threads, [&](std::size_t i) {
        return guarded([&] { return threshold_sweep(n, kappa, {betas[i]}, Ls, eps, c.tol, 1).front(); });
    });
    const bool failed = std::any_of(cells.begin(), cells.end(), [](const auto& x) { return !x.value; });
    out.write("sweep.csv", [&](std::ostream& os) {
        os << "n,kappa,beta,L,count,classification,predicted" << (failed ? ",status" : "") << '\n';
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!cells[i].value) {
                os << n << ',' << kappa << ',' << betas[i] << ",,,," << to_string(predicted_growth(n, betas[i])) << ','
                   << csv_quote("error: " + cells[i].error) << '\n';
                continue;
            }
            const auto& cell = *cells[i].value;
            for (const auto& p : cell.curve.points)
                os << n << ',' << kappa << ',' << cell.beta << ',' << p.L << ',' << p.count << ','
                   << to_string(cell.curve.classification) << ',' << to_string(cell.predicted) << (failed ? ",ok" : "")
                   << '\n';
        }
    });
    out.plot_stub({"sweep.csv, L (log axis), count, grouped by beta"});
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].value) {
            log << "sweep: beta = " << betas[i] << " failed: " << cells[i].error << '\n';
            continue;
        }
        const auto& cell = *cells[i].value;
        log << "sweep: beta = " << cell.beta << " observed " << to_string(cell.curve.classification) << ", predicted "
            << to_string(cell.predicted) << '\n';
    }
    return !failed;
}

inline bool run_hardy(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    struct Spec { double delta, k, R; };
    std::vector<Spec> specs;
    for (double d : c.list("delta")) {
        const auto ks = c.has("k") ? c.list("k") : std::vector<double>{std::ceil(2.0 * std::exp(12.0 / d)) + 1.0};
        for (double k : ks)
            for (double R : c.list("R")) specs.push_back({d, k, R});
    }
    struct Row { HardyQuotient q; double lambda; };
    const auto rows = parallel_map(specs.size(), c.threads, [&](std::size_t i) {
        return guarded([&] {
            const HardyProblem p(specs[i].R, specs[i].k, specs[i].delta);
            return Row{hardy_test_quotient(p), hardy_first_eigenvalue(p, std::min(c.tol, 1e-12))};
        });
    });
    const bool failed = std::any_of(rows.begin(), rows.end(), [](const auto& x) { return !x.value; });
    out.write("hardy.csv", [&](std::ostream& os) {
        os << "delta,k,R,numerator,bound,lambda1" << (failed ? ",status" : "") << '\n';
        for (std::size_t i = 0; i < rows.size(); ++i) {
            os << specs[i].delta << ',' << specs[i].k << ',' << specs[i].R << ',';
            if (rows[i].value)
                os << rows[i].value->q.numerator << ',' << rows[i].value->q.bound << ',' << rows[i].value->lambda
                   << (failed ? ",ok" : "");
            else
                os << ",,," << csv_quote("error: " + rows[i].error);
            os << '\n';
        }
    });
    out.plot_stub({"hardy.csv, k (log axis), numerator, grouped by delta", "hardy.csv, R (log axis), lambda1"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        log << "hardy: delta = " << specs[i].delta << ", k = " << specs[i].k << ", R = " << specs[i].R;
        if (rows[i].value)
            log << ": numerator " << rows[i].value->q.numerator << " (bound " << rows[i].value->q.bound
                << "), eigenvalue " << rows[i].value->lambda << '\n';
        else
            log << ": failed: " << rows[i].error << '\n';
    }
    return !failed;
}

inline void run_transplant(const ExperimentConfig& c, OutputSet& out, std::ostream& log)
{
    const auto model = model_profile(c);
    const auto target = model_profile(c, "target_", ProfileKind::radial_curvature);
    const auto rep = transplant_check(static_cast<int>(c.integer("n")), model, target, c.real("r_w"), c.real("R"),
                                      std::min(c.tol, 1e-9));
    out.write("transplant.csv", [&](std::ostream& os) { write_transplant_csv(os, rep); });
    out.plot_stub({"transplant.csv, R, margin"});
    log << "transplant: quotient " << rep.quotient << " vs model eigenvalue " << rep.lambda_d_model << ", margin "
        << rep.margin() << ", volume correction " << rep.correction << '\n';
}

} // namespace detail

/// Execute a validated config. Library errors propagate as InvalidArgument / SolverError;
/// multi-cell commands instead record failing cells in a `status` column and report a solver failure.
inline RunReport run(const ExperimentConfig& cfg, std::ostream& log)
{
    RunReport rep;
    detail::OutputSet out(cfg.output_dir, rep);
    const auto old = log.precision(10);
    switch (cfg.command) {
    case Command::warp: detail::run_warp(cfg, out, log); break;
    case Command::eigen: detail::run_eigen(cfg, out, log); break;
    case Command::count: detail::run_count(cfg, out, log); break;
    case Command::sweep:
        if (!detail::run_sweep(cfg, out, log)) rep.code = ExitCode::solver;
        break;
    case Command::hardy:
        if (!detail::run_hardy(cfg, out, log)) rep.code = ExitCode::solver;
        break;
    case Command::transplant: detail::run_transplant(cfg, out, log); break;
    case Command::verify: {
        AcceptanceOptions opt{cfg.output_dir, cfg.seed, cfg.tol, cfg.threads};
        const auto results = run_acceptance(opt, [&](const CriterionOutcome& o) { log << format_outcome(o) << '\n'; });
        rep.files.push_back(cfg.output_dir / "acceptance.csv");
        const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
        if (!ok) rep.code = ExitCode::acceptance;
        log << "verify: " << (ok ? "all criteria passed" : "acceptance failure") << '\n';
        break;
    }
    }
    log.precision(old);
    return rep;
}

/// Read a config file, apply command-line overrides, and run it. Returns the process exit code.
struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<double> tol;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

inline int main_entry(const std::string& config_text, const Overrides& ov, std::ostream& log, std::ostream& err)
{
    try {
        auto cfg = parse_config(config_text);
        if (ov.out) cfg.output_dir = *ov.out;
        if (ov.tol) {
            if (!(*ov.tol > 1e-14 && *ov.tol < 1e-4)) throw ConfigError({"tol must lie in (1e-14, 1e-4)"});
            cfg.tol = *ov.tol;
        }
        if (ov.threads) cfg.threads = std::max(1u, *ov.threads);
        if (ov.seed) cfg.seed = *ov.seed;
        return static_cast<int>(run(cfg, log).code);
    } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) err << "config error: " << msg << '\n';
        return static_cast<int>(ExitCode::validation);
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return static_cast<int>(ExitCode::solver);
    }
}

} // namespace warpspec::cli
