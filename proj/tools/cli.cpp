#include "cli.hpp"

#include "spde/selftest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace spde::cli {

namespace {

const std::vector<std::string> known_flags{"g",       "lambda", "d",           "N",    "T",    "tau",  "levels",
                                           "ref-level", "samples", "seed",     "integrators", "out", "jobs"};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& flag, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw UsageError("--" + flag + ": cannot parse '" + text + "'");
    }
    return value;
}

double parse_real(const std::string& flag, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--" + flag + ": cannot parse '" + text + "' as a number");
    }
}

std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot read '" + path.string() + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.starts_with("--")) key.erase(0, 2);
        if (std::find(known_flags.begin(), known_flags.end(), key) == known_flags.end()) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        entries.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return entries;
}

std::vector<Nonlinearity> parse_nonlinearities(const std::string& text, double lambda) {
    std::vector<Nonlinearity> out;
    for (const auto& tag : split(text, ',')) {
        const auto kind = parse_nonlinearity(tag);
        if (!kind) {
            throw UsageError("--g: unknown nonlinearity '" + tag + "' (expected linear, rational, sineplus, log1p, zero)");
        }
        out.push_back(Nonlinearity::make(*kind, lambda));
    }
    if (out.empty()) throw UsageError("--g: empty nonlinearity list");
    return out;
}

std::vector<IntegratorKind> parse_integrators(const std::string& text) {
    std::vector<IntegratorKind> out;
    for (const auto& name : split(text, ',')) {
        const auto kind = parse_integrator(name);
        if (!kind) throw UsageError("--integrators: unknown integrator '" + name + "' (expected LT, EM, SEM, SEXP)");
        out.push_back(*kind);
    }
    return out;
}

constexpr const char* help_footer = R"(Defaults:
  census       d=1: T=2, tau=2^-5, N=256, lambda=2.5, samples=100, all four g and integrators
               d=2: same with N=16 per axis, u0 = sin(pi x1) sin(pi x2)
  convergence  d=1: T=0.5, N=256, levels 4..12, ref-level 16, lambda=1, samples=150,
               g=linear,rational, integrators LT,SEM,SEXP
               d=2: N=16, levels 4..10, ref-level 14
  mesh-study   T=0.5, N=16,64,256,1024, lambda=1.5, g=linear,rational, integrators LT
  selftest     operator, noise and step invariants on small instances
Seed: --seed, else SPDE_LAB_SEED, else 20240229. Exit codes: 0 ok, 1 I/O or config error, 2 selftest failure.
)";

}  // namespace

int parse_dyadic_step(const std::string& text, double horizon) {
    const std::string t = trim(text);
    double tau = 0.0;
    if (t.starts_with("2^")) {
        std::string exponent = t.substr(2);
        if (exponent.size() > 2 && exponent.front() == '{' && exponent.back() == '}') {
            exponent = exponent.substr(1, exponent.size() - 2);
        }
        int e = 0;
        const auto* end = exponent.data() + exponent.size();
        const auto res = std::from_chars(exponent.data(), end, e);
        if (res.ec != std::errc{} || res.ptr != end) throw UsageError("--tau: cannot parse '" + text + "'");
        tau = std::ldexp(1.0, e);
    } else {
        tau = parse_real("tau", t);
    }
    if (!(tau > 0.0)) throw UsageError("--tau must be positive");
    const int level = static_cast<int>(std::lround(std::log2(horizon / tau)));
    if (level < 0 || level > max_path_level || std::ldexp(horizon, -level) != tau) {
        throw UsageError("--tau " + text + " is not T/2^j for T=" + format_double(horizon) +
                         " and 0 <= j <= 24 (non-dyadic step)");
    }
    return level;
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = parse_number<int>("levels", trim(text.substr(0, dots)));
        const int hi = parse_number<int>("levels", trim(text.substr(dots + 2)));
        if (hi < lo) throw UsageError("--levels: empty range '" + text + "'");
        for (int j = lo; j <= hi; ++j) out.push_back(j);
    } else {
        for (const auto& item : split(text, ',')) out.push_back(parse_number<int>("levels", item));
    }
    if (out.empty()) throw UsageError("--levels: no levels in '" + text + "'");
    return out;
}

RunSpec parse_args(std::span<const std::string> args, const EnvLookup& env) {
    // Config entries go first so later command-line flags win.
    std::optional<std::filesystem::path> config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            config_path = args[i + 1];
        } else if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
        }
    }
    std::vector<std::string> expanded;
    expanded.push_back(args.empty() ? "spde-lab" : args[0]);
    if (config_path) {
        for (auto& [k, v] : read_config(*config_path)) {
            expanded.push_back("--" + k);
            expanded.push_back(v);
        }
    }
    for (std::size_t i = 1; i < args.size(); ++i) expanded.push_back(args[i]);

    CLI::App app{"Positivity-preserving splitting and classical integrators for stochastic heat equations",
                 "spde-lab"};
    app.footer(help_footer);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::map<std::string, std::string> values;
    for (const auto& [flag, desc] : std::vector<std::pair<std::string, std::string>>{
             {"g", "nonlinearities: comma list of linear, rational, sineplus, log1p, zero"},
             {"lambda", "noise intensity lambda (census 2.5, convergence 1, mesh-study 1.5)"},
             {"d", "spatial dimension, 1 or 2 (default 1)"},
             {"N", "subdivisions per axis, h = 1/N; comma list for mesh-study"},
             {"T", "time horizon (census 2, convergence 0.5)"},
             {"tau", "census time step, 2^-j or a decimal equal to T/2^j (default 2^-5)"},
             {"levels", "convergence levels j (tau = T/2^j), 'a..b' or comma list"},
             {"ref-level", "level of the LT reference solution (1D 16, 2D 14)"},
             {"samples", "Monte Carlo sample count (census 100, convergence 150)"},
             {"seed", "master seed (fallback SPDE_LAB_SEED)"},
             {"integrators", "comma list of LT, EM, SEM, SEXP"},
             {"out", "CSV output path (default <subcommand>.csv)"},
             {"jobs", "worker threads (default: available cores)"},
         }) {
        app.add_option("--" + flag, values[flag], desc);
    }
    std::string config_dummy;
    app.add_option("--config", config_dummy, "key = value file; command-line flags override it");

    auto* census = app.add_subcommand("census", "positivity census (share of nonnegative sample paths)");
    auto* convergence = app.add_subcommand("convergence", "mean-square strong error study");
    auto* mesh = app.add_subcommand("mesh-study", "strong error study repeated over several N");
    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    for (auto* sub : {census, convergence, mesh, selftest}) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& s : expanded) argv.push_back(s.c_str());
    RunSpec spec;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        spec.help = app.help();
        return spec;
    } catch (const CLI::CallForAllHelp&) {
        spec.help = app.help("", CLI::AppFormatMode::All);
        return spec;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    spec.config_file = config_path;

    auto given = [&](const std::string& flag) { return app.get_option("--" + flag)->count() > 0; };
    auto value = [&](const std::string& flag) { return values.at(flag); };
    auto reject = [&](std::initializer_list<const char*> flags, const char* command) {
        for (const char* f : flags)
            if (given(f)) throw UsageError(std::string("--") + f + " does not apply to '" + command + "'");
    };

    if (census->parsed()) spec.command = Subcommand::census;
    else if (convergence->parsed()) spec.command = Subcommand::convergence;
    else if (mesh->parsed()) spec.command = Subcommand::mesh_study;
    else spec.command = Subcommand::selftest;

    spec.seed = default_seed;
    const EnvLookup lookup = env ? env : EnvLookup([](const char* name) { return std::getenv(name); });
    if (given("seed")) {
        spec.seed = parse_number<std::uint64_t>("seed", value("seed"));
    } else if (const char* s = lookup("SPDE_LAB_SEED"); s && *s) {
        try {
            spec.seed = parse_number<std::uint64_t>("seed", s);
        } catch (const UsageError&) {
            throw UsageError(std::string("SPDE_LAB_SEED: cannot parse '") + s + "'");
        }
    }
    if (given("jobs")) spec.jobs = parse_number<unsigned>("jobs", value("jobs"));

    const int d = given("d") ? parse_number<int>("d", value("d")) : 1;
    if (d != 1 && d != 2) throw UsageError("--d must be 1 or 2");

    static const std::map<Subcommand, const char*> names{{Subcommand::census, "census"},
                                                         {Subcommand::convergence, "convergence"},
                                                         {Subcommand::mesh_study, "mesh-study"},
                                                         {Subcommand::selftest, "selftest"}};
    spec.out = given("out") ? std::filesystem::path(value("out"))
                            : std::filesystem::path(std::string(names.at(spec.command)) + ".csv");

    try {
        switch (spec.command) {
            case Subcommand::census: {
                reject({"levels", "ref-level"}, "census");
                auto& c = spec.census;
                c = CensusConfig::defaults(d);
                if (given("N")) c.subdivisions = parse_number<int>("N", value("N"));
                if (given("T")) c.horizon = parse_real("T", value("T"));
                if (!(c.horizon > 0.0)) throw UsageError("--T must be positive");
                c.level = given("tau") ? parse_dyadic_step(value("tau"), c.horizon)
                                       : parse_dyadic_step("2^-5", c.horizon);
                const double lambda = given("lambda") ? parse_real("lambda", value("lambda")) : 2.5;
                c.nonlinearities = parse_nonlinearities(given("g") ? value("g") : "linear,rational,sineplus,log1p", lambda);
                if (given("samples")) c.samples = parse_number<std::size_t>("samples", value("samples"));
                if (given("integrators")) c.integrators = parse_integrators(value("integrators"));
                c.seed = spec.seed;
                c.jobs = spec.jobs;
                c.validate();
                break;
            }
            case Subcommand::convergence:
            case Subcommand::mesh_study: {
                reject({"tau"}, names.at(spec.command));
                const bool is_mesh = spec.command == Subcommand::mesh_study;
                ConvergenceConfig c = ConvergenceConfig::defaults(d);
                if (is_mesh) c.integrators = {IntegratorKind::lie_trotter};
                if (given("T")) c.horizon = parse_real("T", value("T"));
                if (given("ref-level")) c.reference_level = parse_number<int>("ref-level", value("ref-level"));
                if (given("levels")) c.levels = parse_levels(value("levels"));
                if (given("samples")) c.samples = parse_number<std::size_t>("samples", value("samples"));
                if (given("integrators")) c.integrators = parse_integrators(value("integrators"));
                c.seed = spec.seed;
                c.jobs = spec.jobs;
                for (int j : c.levels) {
                    if (j >= c.reference_level) {
                        throw UsageError("--levels: level " + std::to_string(j) + " must be below --ref-level " +
                                         std::to_string(c.reference_level));
                    }
                }
                const double lambda = given("lambda") ? parse_real("lambda", value("lambda")) : (is_mesh ? 1.5 : 1.0);
                auto nls = parse_nonlinearities(given("g") ? value("g") : "linear,rational", lambda);
                if (is_mesh) {
                    auto& m = spec.mesh;
                    m.base = c;
                    m.nonlinearities = nls;
                    if (given("N")) {
                        m.subdivisions.clear();
                        for (const auto& item : split(value("N"), ',')) m.subdivisions.push_back(parse_number<int>("N", item));
                    } else if (d == 2) {
                        m.subdivisions = {8, 16, 32};
                    }
                    for (int n : m.subdivisions) {
                        ConvergenceConfig probe = c;
                        probe.subdivisions = n;
                        probe.validate();
                    }
                } else {
                    if (given("N")) c.subdivisions = parse_number<int>("N", value("N"));
                    c.nonlinearity = nls.front();
                    c.validate();
                    spec.convergence = c;
                    spec.convergence_nonlinearities = std::move(nls);
                }
                break;
            }
            case Subcommand::selftest:
                break;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return spec;
}

RunSpec parse_args(int argc, const char* const* argv, const EnvLookup& env) {
    std::vector<std::string> args(argv, argv + argc);
    return parse_args(std::span<const std::string>(args), env);
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        ExperimentReport report;
        switch (spec.command) {
            case Subcommand::selftest: {
                const auto r = run_selftest();
                for (const auto& c : r.checks) {
                    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.detail << ")\n";
                }
                out << "selftest " << (r.passed() ? "passed" : "FAILED") << " in " << format_double(r.seconds)
                    << " s\n";
                return r.passed() ? 0 : 2;
            }
            case Subcommand::census:
                report = positivity_census(spec.census);
                break;
            case Subcommand::convergence: {
                bool first = true;
                for (const auto& nl : spec.convergence_nonlinearities) {
                    ConvergenceConfig c = spec.convergence;
                    c.nonlinearity = nl;
                    auto r = mean_square_error_study(c);
                    if (first) {
                        report = std::move(r);
                        first = false;
                    } else {
                        append(report, r);
                    }
                }
                break;
            }
            case Subcommand::mesh_study:
                report = mesh_independence_study(spec.mesh);
                break;
        }
        write_report(report, spec.out);
        out << summary_text(report);
        out << "wrote " << spec.out.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "spde-lab: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace spde::cli
