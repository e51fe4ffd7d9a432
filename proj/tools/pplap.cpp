#include "pplap/config.hpp"
#include "pplap/eigen.hpp"
#include "pplap/errors.hpp"
#include "pplap/field_io.hpp"
#include "pplap/report.hpp"
#include "pplap/solve.hpp"
#include "pplap/sources.hpp"
#include "pplap/spectral.hpp"
#include "pplap/study.hpp"
#include "pplap/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <sstream>

namespace fs = std::filesystem;
using namespace pplap;

namespace {

enum Exit { kOk = 0, kCheckFailure = 1, kDivergence = 2, kConfigError = 3 };

/// A flag whose text value is forwarded to apply_setting after parsing, so
/// flags and config files share one validation path.
struct Binding {
    CLI::Option* option;
    std::string section, key;
    std::string value;
};

class Flags {
public:
    void add(CLI::App* app, const std::string& name, const std::string& section, const std::string& key,
             const std::string& help) {
        bindings_.push_back({nullptr, section, key, {}});
        bindings_.back().option = app->add_option(name, bindings_.back().value, help);
    }

    void apply(RunConfig& cfg) const {
        for (const auto& b : bindings_)
            if (b.option->count() > 0) apply_setting(cfg, b.section, b.key, b.value);
    }

private:
    std::list<Binding> bindings_;  // stable addresses for CLI11
};

fs::path output_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return fs::path(cfg.output_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'", 0, "output.dir");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'", 0, "output.dir");
}

void write_field(const RunConfig& cfg, const std::string& stem, const ScalarField& u) {
    const bool binary = cfg.fields == FieldFormat::Binary;
    const fs::path path = output_path(cfg, stem + (binary ? ".bin" : ".csv"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'", 0, "output.dir");
    if (binary)
        write_binary(out, u);
    else
        write_csv(out, u);
}

void emit(const RunConfig& cfg, const std::string& kind, const Json& payload, const std::string& csv = {}) {
    const std::string json = envelope(kind, payload).dump(2) + "\n";
    write_text(output_path(cfg, kind + ".json"), json);
    if (!csv.empty()) write_text(output_path(cfg, kind + ".csv"), csv);
    std::cout << (cfg.format == ReportFormat::Csv && !csv.empty() ? csv : json);
}

ScalarField load_rhs(const RunConfig& cfg, const DomainPtr& domain) {
    for (const auto& name : builtin_source_names())
        if (cfg.rhs == name) return builtin_source(domain, name, cfg.seed);
    if (!fs::exists(cfg.rhs)) throw ConfigError("run.rhs: '" + cfg.rhs + "' is neither a builtin source nor a file", 0,
                                                "run.rhs");
    return load_field(cfg.rhs, domain);
}

std::vector<double> exponents(const RunConfig& cfg) { return cfg.p_list.empty() ? std::vector<double>{cfg.p} : cfg.p_list; }

int run_interval(const RunConfig& cfg) {
    const DomainPtr domain = cfg.domain.build();
    Json payload;
    payload["domain"] = to_json(*domain);
    const Json constants = to_json(geometry_constants(domain));
    for (const auto& [k, v] : constants.items()) payload[k] = v;
    emit(cfg, "interval", payload);
    return kOk;
}

int run_solve(const RunConfig& cfg) {
    const DomainPtr domain = cfg.domain.build();
    const ScalarField f = load_rhs(cfg, domain);
    SolverConfig scfg = cfg.solver.apply(cfg.p);
    validate(scfg);
    const SolveRecord rec = continuation(f, scfg);
    Json payload;
    payload["domain"] = to_json(*domain);
    payload["p"] = json_number(cfg.p);
    payload["rhs"] = cfg.rhs;
    payload["seed"] = cfg.seed;
    payload["record"] = to_json(rec);
    write_field(cfg, "solution", rec.u);
    emit(cfg, "solve", payload);
    return kOk;
}

int run_eigen(const RunConfig& cfg) {
    const DomainPtr domain = cfg.domain.build();
    EigenOptions opts = cfg.eigen;
    opts.seed = cfg.seed;
    const EigenRecord rec = p_eigenpair(domain, cfg.p, cfg.eigen_tol, opts);
    Json payload;
    payload["domain"] = to_json(*domain);
    payload["p"] = json_number(cfg.p);
    payload["seed"] = cfg.seed;
    payload["record"] = to_json(rec);
    write_field(cfg, "eigenfunction", rec.u);
    emit(cfg, "eigen", payload);
    return kOk;
}

int run_verify(const RunConfig& cfg) {
    std::vector<EstimateReport> reports;
    if (cfg.suite == "algebra" || cfg.suite == "all") {
        AlgebraOptions opts;
        opts.samples = cfg.samples;
        opts.seed = cfg.seed;
        auto r = algebra_suite(opts);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    if (cfg.suite == "estimates" || cfg.suite == "all") {
        const DomainPtr domain = cfg.domain.build();
        for (double p : exponents(cfg)) {
            auto r = estimate_suite(domain, p, cfg.seed);
            reports.insert(reports.end(), r.begin(), r.end());
        }
    }
    Json payload;
    payload["suite"] = cfg.suite;
    payload["seed"] = cfg.seed;
    payload["reports"] = to_json(reports);
    std::ostringstream csv;
    write_reports_csv(csv, reports);
    emit(cfg, "verify", payload, csv.str());
    for (const auto& r : reports)
        if (!r.pass) return kCheckFailure;
    return kOk;
}

int run_study(const RunConfig& cfg) {
    std::vector<StudyResult> studies;
    for (double p : exponents(cfg)) studies.push_back(refinement_study(cfg.domain, p, cfg.seed, cfg.levels));
    Json payload;
    payload["domain"] = to_json(*cfg.domain.build());
    payload["seed"] = cfg.seed;
    Json list = Json::array();
    bool pass = true;
    for (const auto& s : studies) {
        list.push_back(to_json(s));
        pass = pass && s.pass();
    }
    payload["studies"] = std::move(list);
    std::ostringstream csv;
    write_drift_csv(csv, studies);
    emit(cfg, "study", payload, csv.str());
    return pass ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-Poisson solver and estimate verifier on periodic grids and weighted graphs"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    std::vector<std::string> sets;
    Flags flags;
    app.add_option("--config", config_path, "configuration file (flags override it)");
    app.add_option("--set", sets, "override one setting: section.key=value (repeatable)");
    flags.add(&app, "--output-dir", "output", "dir", "output directory (default $PPLAP_OUTPUT_DIR or .)");
    flags.add(&app, "--format", "output", "format", "stdout format: json | csv");
    flags.add(&app, "--fields", "output", "fields", "field dump format: csv | binary");

    auto domain_flags = [&](CLI::App* sub) {
        flags.add(sub, "--domain", "domain", "spec", "torus(d,n,L) | circle(n,L) | graph(path)");
        flags.add(sub, "--K", "domain", "K", "curvature lower bound");
        flags.add(sub, "--N", "domain", "N", "dimension upper bound (inf allowed)");
    };

    CLI::App* interval = app.add_subcommand("interval", "spectral gap, defect and admissible exponent interval");
    domain_flags(interval);

    CLI::App* solve = app.add_subcommand("solve", "solve Delta_p u = f by regularized continuation");
    domain_flags(solve);
    flags.add(solve, "--p", "run", "p", "exponent p > 1");
    flags.add(solve, "--rhs", "run", "rhs", "builtin source (smooth | bump | dipole | spike) or field file");
    flags.add(solve, "--seed", "run", "seed", "seed of the smooth builtin source");

    CLI::App* eigen = app.add_subcommand("eigen", "first nontrivial p-eigenpair");
    domain_flags(eigen);
    flags.add(eigen, "--p", "run", "p", "exponent p > 1");
    flags.add(eigen, "--tol", "eigen", "tol", "relative dual gradient tolerance");
    flags.add(eigen, "--restarts", "eigen", "restarts", "number of seeded starts");
    flags.add(eigen, "--seed", "run", "seed", "seed of the starts");

    CLI::App* verify = app.add_subcommand("verify", "run the algebraic and/or estimate check suites");
    domain_flags(verify);
    flags.add(verify, "--suite", "run", "suite", "algebra | estimates | all");
    flags.add(verify, "--p", "run", "p_list", "exponents of the estimate suite (comma separated)");
    flags.add(verify, "--seed", "run", "seed", "seed of every randomized check");
    flags.add(verify, "--samples", "run", "samples", "samples per algebraic suite");

    CLI::App* study = app.add_subcommand("study", "grid-refinement drift of every fitted constant");
    domain_flags(study);
    flags.add(study, "--p", "run", "p_list", "exponents (comma separated)");
    flags.add(study, "--seed", "run", "seed", "seed of the suite");
    flags.add(study, "--levels", "run", "levels", "refinement levels n, 2n, 4n, ...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg;
        if (const char* env = std::getenv("PPLAP_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
        if (!config_path.empty()) read_config(config_path, cfg);
        for (const auto& s : sets) {
            const auto dot = s.find('.'), eq = s.find('=');
            if (dot == std::string::npos || eq == std::string::npos || dot > eq)
                throw ConfigError("--set expects section.key=value, got '" + s + "'");
            apply_setting(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
        }
        flags.apply(cfg);
        cfg.subcommand = app.get_subcommands().front()->get_name();
        validate(cfg);

        if (cfg.subcommand == "interval") return run_interval(cfg);
        if (cfg.subcommand == "solve") return run_solve(cfg);
        if (cfg.subcommand == "eigen") return run_eigen(cfg);
        if (cfg.subcommand == "verify") return run_verify(cfg);
        return run_study(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParameterError& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return kConfigError;
    } catch (const UnsupportedOperation& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kConfigError;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kDivergence;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDivergence;
    }
}
