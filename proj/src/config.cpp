#include "pplap/config.hpp"

#include "pplap/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace pplap {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::string name;
    int line;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(name + ": " + what, line, name); }
};

double parse_real(const std::string& text, const Field& f) {
    const std::string s = trim(text);
    double x = 0.0;
    const char* b = s.data();
    if (!s.empty() && s[0] == '+') ++b;
    const auto res = std::from_chars(b, s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || std::isnan(x))
        f.fail("expected a real number, got '" + s + "'");
    return x;
}

long long parse_integer(const std::string& text, const Field& f) {
    const std::string s = trim(text);
    long long x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        f.fail("expected an integer, got '" + s + "'");
    return x;
}

int parse_int(const std::string& text, const Field& f, long long lo) {
    const long long x = parse_integer(text, f);
    if (x < lo || x > 1000000000LL) f.fail("value " + std::to_string(x) + " out of range");
    return static_cast<int>(x);
}

std::vector<double> parse_list(const std::string& text, const Field& f) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item, f));
    if (out.empty()) f.fail("expected a comma separated list");
    return out;
}

double positive(double x, const Field& f) {
    if (!(x > 0.0)) f.fail("must be positive");
    return x;
}

std::string one_of(const std::string& text, const std::vector<std::string>& allowed, const Field& f) {
    const std::string s = trim(text);
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        f.fail("expected one of {" + list + "}, got '" + s + "'");
    }
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Field&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table{
        {"run.subcommand",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.subcommand = one_of(v, {"interval", "solve", "eigen", "verify", "study"}, f);
         }},
        {"run.p", [](RunConfig& c, const std::string& v, const Field& f) { c.p = parse_real(v, f); }},
        {"run.p_list", [](RunConfig& c, const std::string& v, const Field& f) { c.p_list = parse_list(v, f); }},
        {"run.rhs", [](RunConfig& c, const std::string& v, const Field&) { c.rhs = trim(v); }},
        {"run.seed",
         [](RunConfig& c, const std::string& v, const Field& f) {
             const long long s = parse_integer(v, f);
             if (s < 0 || s > 4294967295LL) f.fail("seed must lie in [0, 2^32)");
             c.seed = static_cast<unsigned>(s);
         }},
        {"run.suite",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.suite = one_of(v, {"algebra", "estimates", "all"}, f);
         }},
        {"run.samples",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.samples = static_cast<std::size_t>(parse_int(v, f, 1));
         }},
        {"run.levels", [](RunConfig& c, const std::string& v, const Field& f) { c.levels = parse_int(v, f, 2); }},
        {"domain.spec",
         [](RunConfig& c, const std::string& v, const Field& f) {
             try {
                 const DomainSpec d = parse_domain_spec(v);
                 c.domain.kind = d.kind;
                 c.domain.dim = d.dim;
                 c.domain.n = d.n;
                 c.domain.L = d.L;
                 c.domain.graph = d.graph;
             } catch (const ConfigError& e) {
                 throw ConfigError(e.what(), f.line, f.name);
             }
         }},
        {"domain.kind",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.domain.kind = one_of(v, {"torus", "circle", "graph"}, f);
         }},
        {"domain.dim", [](RunConfig& c, const std::string& v, const Field& f) { c.domain.dim = parse_int(v, f, 1); }},
        {"domain.n", [](RunConfig& c, const std::string& v, const Field& f) { c.domain.n = parse_int(v, f, 2); }},
        {"domain.L",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.domain.L = positive(parse_real(v, f), f);
             if (!std::isfinite(c.domain.L)) f.fail("must be finite");
         }},
        {"domain.K", [](RunConfig& c, const std::string& v, const Field& f) { c.domain.K = parse_real(v, f); }},
        {"domain.N", [](RunConfig& c, const std::string& v, const Field& f) { c.domain.N = parse_real(v, f); }},
        {"domain.graph", [](RunConfig& c, const std::string& v, const Field&) { c.domain.graph = trim(v); }},
        {"solver.inner_tol",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.inner_tol = positive(parse_real(v, f), f); }},
        {"solver.outer_tol",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.outer_tol = positive(parse_real(v, f), f); }},
        {"solver.poisson_tol",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.solver.poisson_tol = positive(parse_real(v, f), f);
         }},
        {"solver.max_inner",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.max_inner = parse_int(v, f, 1); }},
        {"solver.max_outer",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.max_outer = parse_int(v, f, 1); }},
        {"solver.damping",
         [](RunConfig& c, const std::string& v, const Field& f) {
             const double t = parse_real(v, f);
             if (!(t > 0.0 && t <= 1.0)) f.fail("damping must lie in (0, 1]");
             c.solver.damping = t;
         }},
        {"solver.max_damping_halvings",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.max_damping_halvings = parse_int(v, f, 0); }},
        {"solver.divergence_window",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.divergence_window = parse_int(v, f, 1); }},
        {"solver.eps_schedule",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.eps_schedule = parse_list(v, f); }},
        {"solver.M_schedule",
         [](RunConfig& c, const std::string& v, const Field& f) { c.solver.M_schedule = parse_list(v, f); }},
        {"solver.bochner",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.solver.bochner = one_of(v, {"inverse_lambda", "lambda"}, f) == "lambda" ? BochnerFactor::Lambda
                                                                                      : BochnerFactor::InverseLambda;
         }},
        {"eigen.tol",
         [](RunConfig& c, const std::string& v, const Field& f) { c.eigen_tol = positive(parse_real(v, f), f); }},
        {"eigen.restarts",
         [](RunConfig& c, const std::string& v, const Field& f) { c.eigen.restarts = parse_int(v, f, 1); }},
        {"eigen.max_iterations",
         [](RunConfig& c, const std::string& v, const Field& f) { c.eigen.max_iterations = parse_int(v, f, 1); }},
        {"output.dir", [](RunConfig& c, const std::string& v, const Field&) { c.output_dir = trim(v); }},
        {"output.format",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.format = one_of(v, {"json", "csv"}, f) == "csv" ? ReportFormat::Csv : ReportFormat::Json;
         }},
        {"output.fields",
         [](RunConfig& c, const std::string& v, const Field& f) {
             c.fields = one_of(v, {"csv", "binary"}, f) == "binary" ? FieldFormat::Binary : FieldFormat::Csv;
         }},
    };
    return table;
}

}  // namespace

DomainPtr DomainSpec::build() const {
    DomainPtr d;
    if (kind == "graph") {
        if (graph.empty()) throw ConfigError("domain.graph: a graph domain needs a spec file", 0, "domain.graph");
        d = read_graph_spec(graph);
    } else if (kind == "circle") {
        d = Domain::circle(n, L);
    } else if (kind == "torus") {
        d = Domain::torus(dim, n, L);
    } else {
        throw ConfigError("domain.kind: unknown kind '" + kind + "'", 0, "domain.kind");
    }
    if (K || N) {
        GeometryBounds b = d->bounds();
        if (K) b.K = *K;
        if (N) b.N = *N;
        d = d->with_bounds(b);
    }
    return d;
}

DomainSpec parse_domain_spec(const std::string& text) {
    const std::string s = trim(text);
    const auto open = s.find('('), close = s.rfind(')');
    if (open == std::string::npos || close != s.size() - 1 || close < open)
        throw ConfigError("domain spec '" + s + "' is not of the form kind(args)", 0, "domain.spec");
    const std::string kind = trim(s.substr(0, open));
    const std::string inside = s.substr(open + 1, close - open - 1);
    std::vector<std::string> args;
    std::stringstream ss(inside);
    std::string item;
    while (std::getline(ss, item, ',')) args.push_back(trim(item));
    const Field f{"domain.spec", 0};
    DomainSpec d;
    d.kind = kind;
    if (kind == "torus") {
        if (args.size() < 2 || args.size() > 3) f.fail("torus needs (d, n[, L])");
        d.dim = parse_int(args[0], f, 1);
        d.n = parse_int(args[1], f, 2);
        d.L = args.size() == 3 ? positive(parse_real(args[2], f), f) : 1.0;
        if (d.dim == 1) d.kind = "circle";
    } else if (kind == "circle") {
        if (args.empty() || args.size() > 2) f.fail("circle needs (n[, L])");
        d.dim = 1;
        d.n = parse_int(args[0], f, 2);
        d.L = args.size() == 2 ? positive(parse_real(args[1], f), f) : 2.0 * M_PI;
    } else if (kind == "graph") {
        if (args.size() != 1 || args[0].empty()) f.fail("graph needs (path)");
        d.graph = args[0];
    } else {
        f.fail("unknown domain kind '" + kind + "'");
    }
    if (!std::isfinite(d.L)) f.fail("side length must be finite");
    return d;
}

DomainSpec DomainSpec::refined(int n_new) const {
    DomainSpec s = *this;
    s.n = n_new;
    return s;
}

SolverConfig SolverOverrides::apply(double p) const {
    SolverConfig cfg = default_solver_config(p);
    if (inner_tol) cfg.inner_tol = *inner_tol;
    if (outer_tol) cfg.outer_tol = *outer_tol;
    if (poisson_tol) cfg.poisson_tol = *poisson_tol;
    if (damping) cfg.damping = *damping;
    if (max_inner) cfg.max_inner = *max_inner;
    if (max_outer) cfg.max_outer = *max_outer;
    if (max_damping_halvings) cfg.max_damping_halvings = *max_damping_halvings;
    if (divergence_window) cfg.divergence_window = *divergence_window;
    if (eps_schedule) {
        cfg.eps_schedule = *eps_schedule;
        cfg.rp.eps = cfg.eps_schedule.back();
    }
    if (M_schedule && p < 2.0) {
        cfg.M_schedule = *M_schedule;
        cfg.rp.M = cfg.M_schedule.back();
    }
    if (bochner) cfg.bochner = *bochner;
    return cfg;
}

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value,
                   int line) {
    const std::string name = section + "." + key;
    for (const auto& [k, set] : setters()) {
        if (k == name) {
            set(cfg, value, Field{name, line});
            return;
        }
    }
    throw ConfigError("unknown key '" + name + "'", line, name);
}

void parse_config(const std::string& text, RunConfig& cfg) {
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header '" + s + "'", line);
            section = trim(s.substr(1, s.size() - 2));
            static const std::vector<std::string> known{"run", "domain", "solver", "eigen", "output"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError("unknown section '" + section + "'", line, section);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", line);
        const std::string key = trim(s.substr(0, eq));
        if (section.empty()) throw ConfigError("key '" + key + "' appears before any section", line, key);
        apply_setting(cfg, section, key, s.substr(eq + 1), line);
    }
}

void read_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        parse_config(ss.str(), cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what(), 0, e.field());
    }
}

void validate(const RunConfig& cfg) {
    auto bad = [](const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what, 0, field); };
    static const std::vector<std::string> subs{"interval", "solve", "eigen", "verify", "study"};
    if (std::find(subs.begin(), subs.end(), cfg.subcommand) == subs.end())
        bad("run.subcommand", "unknown subcommand '" + cfg.subcommand + "'");
    auto check_p = [&](double p) {
        if (!(p > 1.0) || !std::isfinite(p)) bad("run.p", "p must lie in (1, inf)");
    };
    check_p(cfg.p);
    for (double p : cfg.p_list) check_p(p);
    if (cfg.domain.kind != "graph") {
        if (cfg.domain.kind == "torus" && (cfg.domain.dim < 1 || cfg.domain.dim > 3))
            bad("domain.dim", "grids support 1 to 3 dimensions");
        if (cfg.domain.n < 2) bad("domain.n", "need at least 2 points per axis");
    }
    if (cfg.domain.N && !(*cfg.domain.N >= 2.0)) bad("domain.N", "dimension bound must be >= 2 or inf");
    if (cfg.levels < 2) bad("run.levels", "a study needs at least 2 levels");
    const auto& s = cfg.solver;
    auto monotone = [](const std::vector<double>& xs, bool decreasing) {
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (decreasing ? !(xs[i] < xs[i - 1]) : !(xs[i] > xs[i - 1])) return false;
        return true;
    };
    if (s.eps_schedule) {
        for (double e : *s.eps_schedule)
            if (!(e >= 1e-14) || !std::isfinite(e)) bad("solver.eps_schedule", "entries must be finite and >= 1e-14");
        if (!monotone(*s.eps_schedule, true)) bad("solver.eps_schedule", "must be strictly decreasing");
    }
    if (s.M_schedule) {
        for (double m : *s.M_schedule)
            if (!(m > 0.0)) bad("solver.M_schedule", "entries must be positive");
        if (!monotone(*s.M_schedule, false)) bad("solver.M_schedule", "must be strictly increasing");
    }
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, set] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

}  // namespace pplap
