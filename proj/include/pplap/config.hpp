#pragma once

#include "pplap/eigen.hpp"
#include "pplap/mesh.hpp"
#include "pplap/solve.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pplap {

/// Domain description: a grid built from (dim, n, L) or a graph spec file.
struct DomainSpec {
    std::string kind = "torus";  ///< torus | circle | graph
    int dim = 2;
    int n = 32;
    double L = 1.0;
    std::optional<double> K;
    std::optional<double> N;  ///< may be kInf
    std::string graph;        ///< spec file path when kind = graph

    DomainPtr build() const;
    /// The same grid with n points per axis.
    DomainSpec refined(int n_new) const;
};

/// Parse "torus(d,n,L)", "circle(n,L)" or "graph(path)"; L defaults to 1
/// (2 pi for the circle). Throws ConfigError.
DomainSpec parse_domain_spec(const std::string& text);

/// Solver settings given explicitly; the rest come from default_solver_config(p).
struct SolverOverrides {
    std::optional<double> inner_tol, outer_tol, poisson_tol, damping;
    std::optional<int> max_inner, max_outer, max_damping_halvings, divergence_window;
    std::optional<std::vector<double>> eps_schedule, M_schedule;
    std::optional<BochnerFactor> bochner;

    SolverConfig apply(double p) const;
};

enum class ReportFormat { Json, Csv };
enum class FieldFormat { Csv, Binary };

struct RunConfig {
    std::string subcommand;  ///< interval | solve | eigen | verify | study
    DomainSpec domain;
    double p = 2.0;
    /// Exponents of a `verify --suite estimates` or `study` run; empty means {p}.
    std::vector<double> p_list;
    std::string rhs = "smooth";  ///< builtin source name or a field file
    unsigned seed = 1;
    SolverOverrides solver;
    double eigen_tol = 1e-10;
    EigenOptions eigen;
    std::string suite = "all";  ///< algebra | estimates | all
    std::size_t samples = 1000000;
    /// Refinement levels of a study: n, 2n, ..., 2^(levels-1) n.
    int levels = 3;
    std::string output_dir = ".";
    ReportFormat format = ReportFormat::Json;
    FieldFormat fields = FieldFormat::Csv;
};

/// Set one `section.key` from its text value. Throws ConfigError naming the
/// field (and `line` when positive) on unknown keys or malformed values.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value,
                   int line = 0);

/// Overlay a configuration text onto cfg. Format:
///   # comment
///   [section]
///   key = value
/// Sections: run, domain, solver, eigen, output. Lists are comma separated;
/// "inf" is accepted wherever a real is expected.
void parse_config(const std::string& text, RunConfig& cfg);
void read_config(const std::string& path, RunConfig& cfg);

/// Cross-field checks (p > 1, known subcommand and suite, positive sizes).
void validate(const RunConfig& cfg);

/// Every accepted "section.key", in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace pplap
