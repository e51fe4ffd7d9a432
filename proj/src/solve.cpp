#include "pplap/solve.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/optimize.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace pplap {

namespace {

constexpr double kTiny = 1e-300;

void require_zero_mean(const ScalarField& f, const char* who) {
    const double rms = lp_norm(f, 2.0) / std::sqrt(f.domain().total_measure());
    if (std::abs(mean(f)) > 1e-10 * rms)
        throw ParameterError(std::string(who) + ": right-hand side must have zero mean");
}

double M_at(const SolverConfig& cfg, std::size_t j) {
    if (cfg.rp.p >= 2.0 || cfg.M_schedule.empty()) return kInf;
    return cfg.M_schedule[std::min(j, cfg.M_schedule.size() - 1)];
}

double bound_for_message(const Domain& dom, const SolverConfig& cfg) {
    const double K_minus = dom.K_minus();
    const double lam = K_minus > 0.0 ? lambda1(dom, 1e-10) : 1.0;
    return contraction_bound(cfg.rp.p, dom.N(), lam, K_minus, cfg.bochner);
}

/// Internal state of a solve on the normalized problem (||f||_2 = 1).
struct Normalized {
    ScalarField f;
    double scale = 1.0;  ///< u = scale * u_hat
    double s = 1.0;      ///< ||f||_2
};

Normalized normalize(const ScalarField& f, double p) {
    Normalized n;
    n.s = lp_norm(f, 2.0);
    n.scale = std::pow(n.s, 1.0 / (p - 1.0));
    n.f = f;
    n.f *= 1.0 / n.s;
    return n;
}

RegParams scaled(const RegParams& rp, double scale) {
    return {rp.p, rp.eps / (scale * scale), rp.M / scale};
}

void run_outer(const ScalarField& fhat, const RegParams& rp, const SolverConfig& cfg, const PoissonSolver& solver,
               ScalarField& w, SolveRecord& rec, StageRecord& stage) {
    SolverConfig inner_cfg = cfg;
    inner_cfg.rp = rp;
    const bool linear = rp.p == 2.0;
    double tau = linear ? 1.0 : cfg.damping;
    int halvings = 0;
    int increases = 0;
    double last_energy = p_energy(w, fhat, rp.p, rp.eps);
    // Best fixed-point residual ||grad(S(w) - w)||_p seen since the last damping change.
    double best_residual = kInf;
    int stalls = 0;
    for (int k = 0; k < cfg.max_outer; ++k) {
        const ScalarField h = outer_rhs(w, fhat, rp);
        InnerResult inner = inner_fixed_point(w, h, inner_cfg, &solver);
        ScalarField step = inner.u;
        step -= w;
        step *= tau;
        w += step;
        const double step_norm = lp_norm(gradient(step), rp.p);

        const double max_ratio = inner.ratios.empty() ? 0.0 : *std::max_element(inner.ratios.begin(), inner.ratios.end());
        rec.inner_ratios.push_back(max_ratio);
        rec.inner_iterations += inner.iterations;
        ++rec.outer_iterations;
        stage.inner_iterations += inner.iterations;
        stage.max_inner_ratio = std::max(stage.max_inner_ratio, max_ratio);
        ++stage.outer_iterations;

        const double energy = p_energy(w, fhat, rp.p, rp.eps);
        rec.energy.push_back(energy);
        // Rounding noise near the minimum is not an increase.
        if (energy > last_energy + 1e-14 * std::max(1.0, std::abs(last_energy)))
            ++increases;
        else
            increases = 0;
        // A damped iteration caught in a cycle keeps the energy flat but stops
        // reducing the fixed-point residual.
        const double fp_residual = step_norm / tau;
        if (fp_residual < 0.9 * best_residual) {
            best_residual = fp_residual;
            stalls = 0;
        } else {
            ++stalls;
        }
        if (!linear && (increases >= cfg.divergence_window || stalls >= 2 * cfg.divergence_window)) {
            if (++halvings > cfg.max_damping_halvings) {
                std::ostringstream os;
                os << "outer fixed point diverged: "
                   << (increases >= cfg.divergence_window ? "energy increased for " : "no residual decrease in ")
                   << (increases >= cfg.divergence_window ? cfg.divergence_window : 2 * cfg.divergence_window)
                   << " consecutive steps after " << cfg.max_damping_halvings << " damping halvings (tau = " << tau
                   << ", eps = " << rp.eps << ")";
                throw DivergenceError(os.str());
            }
            tau *= 0.5;
            increases = 0;
            stalls = 0;
            best_residual = kInf;
        }
        last_energy = energy;
        if (linear || step_norm <= cfg.outer_tol) {
            stage.damping = tau;
            rec.damping_final = tau;
            return;
        }
    }
    std::ostringstream os;
    os << "outer fixed point hit the iteration cap (" << cfg.max_outer << ") at eps = " << rp.eps;
    throw ConvergenceError(os.str());
}

void finish_record(SolveRecord& rec, const ScalarField& f, const SolverConfig& cfg, const RegParams& final_rp) {
    const auto basis = residual_test_basis(f.domain_ptr(), cfg.residual_seed);
    rec.residual = weak_residual(rec.u, f, RegParams{final_rp.p, 0.0, kInf}, basis);
    rec.residual_regularized = weak_residual(rec.u, f, RegParams{final_rp.p, final_rp.eps, kInf}, basis);
    rec.eps_final = final_rp.eps;
    rec.M_final = final_rp.M;
}

}  // namespace

SolverConfig default_solver_config(double p) {
    SolverConfig cfg;
    cfg.rp.p = p;
    for (int j = 1; j <= 8; ++j) {
        cfg.eps_schedule.push_back(std::pow(10.0, -j));
        if (p < 2.0) cfg.M_schedule.push_back(std::pow(10.0, 0.5 * j));
    }
    cfg.rp.eps = cfg.eps_schedule.back();
    cfg.rp.M = p < 2.0 ? cfg.M_schedule.back() : kInf;
    return cfg;
}

void validate(const SolverConfig& cfg) {
    validate(cfg.rp);
    if (!(cfg.inner_tol > 0.0) || !(cfg.outer_tol > 0.0) || !(cfg.poisson_tol > 0.0))
        throw ParameterError("solver tolerances must be positive");
    if (cfg.max_inner < 1 || cfg.max_outer < 1) throw ParameterError("iteration caps must be positive");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw ParameterError("damping must lie in (0, 1]");
    for (std::size_t j = 0; j < cfg.eps_schedule.size(); ++j) {
        if (!(cfg.eps_schedule[j] >= 1e-14)) throw ParameterError("eps values must be >= 1e-14");
        if (j > 0 && !(cfg.eps_schedule[j] < cfg.eps_schedule[j - 1]))
            throw ParameterError("eps_schedule must be strictly decreasing");
    }
    for (std::size_t j = 0; j < cfg.M_schedule.size(); ++j) {
        if (!(cfg.M_schedule[j] > 0.0)) throw ParameterError("M values must be positive");
        if (j > 0 && !(cfg.M_schedule[j] > cfg.M_schedule[j - 1]))
            throw ParameterError("M_schedule must be strictly increasing");
    }
}

ScalarField outer_rhs(const ScalarField& w, const ScalarField& f, const RegParams& rp) {
    const VectorField g = gradient(w);
    ScalarField h = frozen_L(w, g, rp);
    if (rp.p == 2.0) {
        h += f;
        h -= laplacian(w);
        return h;
    }
    const ScalarField plap = divergence(flux_of_gradient(g, RegParams{rp.p, rp.eps, kInf}));
    const double e = 0.5 * (2.0 - rp.p);
    for (std::size_t x = 0; x < h.size(); ++x) {
        const double n2 = g.norm2_at(x);
        const double t = std::min(std::sqrt(n2), rp.M);
        h[x] += std::pow(t * t + rp.eps, e) * f[x] - std::pow(n2 + rp.eps, e) * plap[x];
    }
    return h;
}

InnerResult inner_fixed_point(const ScalarField& w, const ScalarField& h, const SolverConfig& cfg,
                              const PoissonSolver* solver) {
    validate(cfg.rp);
    const Domain& dom = w.domain();
    if (!dom.is_grid()) throw UnsupportedOperation("the Cordes iteration needs a Hessian and is grid only");
    if (!(cfg.rp.eps > 0.0)) throw ParameterError("inner_fixed_point needs eps > 0");
    std::optional<PoissonSolver> own;
    if (!solver) solver = &own.emplace(w.domain_ptr());

    const VectorField v = gradient(w);
    const ScalarField th = theta(v, cfg.rp, dom.N());
    const double hnorm = lp_norm(h, 2.0);

    InnerResult res;
    res.u = remove_mean(w);
    double prev = -1.0;
    int bad = 0;
    for (int k = 0; k <= cfg.max_inner; ++k) {
        ScalarField r = frozen_L(res.u, v, cfg.rp);
        for (std::size_t x = 0; x < r.size(); ++x) r[x] = th[x] * (h[x] - r[x]);
        // Second pass clears the rounding left by subtracting a large mean.
        r = remove_mean(remove_mean(r));
        const double rn = lp_norm(r, 2.0);
        const double scale = std::max({hnorm, lp_norm(laplacian(res.u), 2.0), kTiny});
        if (prev > 0.0) {
            const double ratio = rn / prev;
            res.ratios.push_back(ratio);
            // Ratios at the rounding floor carry no information.
            if (ratio >= 1.0 && rn > 1e-12 * scale) {
                if (++bad >= 5) {
                    const double bound = bound_for_message(dom, cfg);
                    std::ostringstream os;
                    os << "inner Cordes iteration is not contracting: observed ratio " << ratio
                       << " for 5 consecutive steps, theoretical bound " << bound << " (p = " << cfg.rp.p
                       << ", N = " << dom.N() << ")";
                    throw ContractionFailure(os.str(), ratio, bound);
                }
            } else {
                bad = 0;
            }
        }
        if (rn <= cfg.inner_tol * scale || rn == 0.0) return res;
        if (k == cfg.max_inner) break;
        res.u += solver->solve(r, cfg.poisson_tol);
        ++res.iterations;
        prev = rn;
    }
    std::ostringstream os;
    os << "inner Cordes iteration hit the iteration cap (" << cfg.max_inner << ")";
    throw ConvergenceError(os.str());
}

SolveRecord outer_picard(const ScalarField& f, const SolverConfig& cfg, const ScalarField* initial) {
    validate(cfg);
    require_zero_mean(f, "outer_picard");
    if (!(cfg.rp.eps > 0.0)) throw ParameterError("outer_picard needs eps > 0");
    SolveRecord rec;
    const double s = lp_norm(f, 2.0);
    if (s == 0.0) {
        rec.u = ScalarField(f.domain_ptr());
        finish_record(rec, f, cfg, cfg.rp);
        return rec;
    }
    const Normalized nf = normalize(f, cfg.rp.p);
    PoissonSolver solver(f.domain_ptr());
    ScalarField w(f.domain_ptr());
    if (initial) {
        w = remove_mean(*initial);
        w *= 1.0 / nf.scale;
    }
    StageRecord stage;
    stage.eps = cfg.rp.eps;
    stage.M = cfg.rp.M;
    const ScalarField w0 = w;
    run_outer(nf.f, scaled(cfg.rp, nf.scale), cfg, solver, w, rec, stage);
    stage.drift = lp_norm(gradient(w - w0), cfg.rp.p) * nf.scale;
    rec.stages.push_back(stage);
    w *= nf.scale;
    rec.u = remove_mean(w);
    finish_record(rec, f, cfg, cfg.rp);
    return rec;
}

SolveRecord continuation(const ScalarField& f, const SolverConfig& cfg) {
    validate(cfg);
    require_zero_mean(f, "continuation");
    if (cfg.eps_schedule.empty()) throw ParameterError("continuation needs a non-empty eps_schedule");
    SolveRecord rec;
    const double p = cfg.rp.p;
    const std::size_t stages = cfg.eps_schedule.size();
    RegParams final_rp{p, cfg.eps_schedule.back(), M_at(cfg, stages - 1)};

    if (p == 2.0) {
        // The regularization is invisible at p = 2: every stage is the linear solve.
        PoissonSolver solver(f.domain_ptr());
        rec.u = solver.solve(f, cfg.poisson_tol);
        for (std::size_t j = 0; j < stages; ++j) {
            StageRecord st;
            st.eps = cfg.eps_schedule[j];
            st.M = M_at(cfg, j);
            st.outer_iterations = 1;
            st.inner_iterations = 1;
            st.drift = j == 0 ? lp_norm(gradient(rec.u), p) : 0.0;
            st.damping = 1.0;
            rec.stages.push_back(st);
            if (cfg.keep_stages) rec.stage_solutions.push_back(rec.u);
        }
        rec.outer_iterations = static_cast<int>(stages);
        rec.inner_iterations = static_cast<int>(stages);
        rec.inner_ratios.assign(stages, 0.0);
        rec.damping_final = 1.0;
        finish_record(rec, f, cfg, final_rp);
        return rec;
    }

    if (lp_norm(f, 2.0) == 0.0) {
        rec.u = ScalarField(f.domain_ptr());
        for (std::size_t j = 0; j < stages; ++j) {
            rec.stages.push_back(StageRecord{cfg.eps_schedule[j], M_at(cfg, j), 0, 0, 0.0, 0.0, cfg.damping});
            if (cfg.keep_stages) rec.stage_solutions.push_back(rec.u);
        }
        finish_record(rec, f, cfg, final_rp);
        return rec;
    }

    const Normalized nf = normalize(f, p);
    PoissonSolver solver(f.domain_ptr());
    ScalarField w(f.domain_ptr());
    for (std::size_t j = 0; j < stages; ++j) {
        const RegParams rp{p, cfg.eps_schedule[j], M_at(cfg, j)};
        StageRecord stage;
        stage.eps = rp.eps;
        stage.M = rp.M;
        const ScalarField prev = w;
        try {
            run_outer(nf.f, scaled(rp, nf.scale), cfg, solver, w, rec, stage);
        } catch (const ConvergenceError& e) {
            std::ostringstream os;
            os << e.what() << " [continuation stage " << j + 1 << " of " << stages << "]";
            if (const auto* cf = dynamic_cast<const ContractionFailure*>(&e))
                throw ContractionFailure(os.str(), cf->observed_ratio(), cf->theoretical_bound());
            if (dynamic_cast<const DivergenceError*>(&e)) throw DivergenceError(os.str());
            throw ConvergenceError(os.str());
        }
        stage.drift = lp_norm(gradient(w - prev), p) * nf.scale;
        rec.stages.push_back(stage);
        if (cfg.keep_stages) rec.stage_solutions.push_back(remove_mean(nf.scale * w));
    }
    w *= nf.scale;
    rec.u = remove_mean(w);
    finish_record(rec, f, cfg, final_rp);
    return rec;
}

namespace {

/// Sparse matrix of the gradient operator: rows are (location, component) pairs.
Eigen::SparseMatrix<double> gradient_matrix(const Domain& dom) {
    const int c = dom.vector_components();
    std::vector<Eigen::Triplet<double>> t;
    if (dom.is_grid()) {
        const double inv_h = 1.0 / dom.spacing();
        for (std::size_t v = 0; v < dom.num_vertices(); ++v) {
            for (int i = 0; i < c; ++i) {
                const auto row = static_cast<int>(v * c + i);
                t.emplace_back(row, static_cast<int>(dom.step(v, i, +1)), inv_h);
                t.emplace_back(row, static_cast<int>(v), -inv_h);
            }
        }
    } else {
        const auto edges = dom.edges();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            t.emplace_back(static_cast<int>(e), static_cast<int>(edges[e].v), 1.0 / edges[e].length);
            t.emplace_back(static_cast<int>(e), static_cast<int>(edges[e].u), -1.0 / edges[e].length);
        }
    }
    Eigen::SparseMatrix<double> G(static_cast<int>(dom.num_vector_locations() * c),
                                  static_cast<int>(dom.num_vertices()));
    G.setFromTriplets(t.begin(), t.end());
    return G;
}

}  // namespace

ScalarField variational_solve(const ScalarField& f, double p, const VariationalOptions& options) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    require_zero_mean(f, "variational_solve");
    const double s = lp_norm(f, 2.0);
    if (s == 0.0) return ScalarField(f.domain_ptr());
    const Normalized nf = normalize(f, p);
    const DomainPtr dom = f.domain_ptr();
    PoissonSolver solver(dom);
    const auto m = dom->measure();
    const bool grid = dom->is_grid();
    const std::size_t nv = dom->num_vertices();

    LbfgsProblem prob;
    prob.dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i] * m[i];
        return acc;
    };
    prob.precondition = [&](const std::vector<double>& g) {
        ScalarField r = remove_mean(ScalarField(dom, g));
        if (grid) return solver.precondition(r).values();
        ScalarField z = solver.solve(r, 1e-10);
        z *= -1.0;
        return z.values();
    };
    const RegParams rp{p, 0.0, kInf};
    auto energy = [&](const ScalarField& u, const VectorField& g) {
        const auto w = dom->vector_weights();
        double e = 0.0;
        for (std::size_t l = 0; l < g.locations(); ++l) e += std::pow(g.norm2_at(l), 0.5 * p) / p * w[l];
        return e + inner(nf.f, u);
    };
    // Riesz representer of dE in the measure-weighted inner product: f - Delta_p u, mean removed.
    auto riesz_gradient = [&](const VectorField& g, std::vector<double>& grad) {
        const ScalarField div = divergence(flux_of_gradient(g, rp));
        grad.resize(nv);
        double c = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            grad[v] = nf.f[v] - div[v];
            c += grad[v] * m[v];
        }
        c /= dom->total_measure();
        for (double& gv : grad) gv -= c;
    };
    prob.evaluate = [&](const std::vector<double>& x, std::vector<double>& grad) {
        const ScalarField u(dom, x);
        const VectorField g = gradient(u);
        riesz_gradient(g, grad);
        return energy(u, g);
    };
    auto dual_norm = [&](const std::vector<double>& grad) {
        return std::sqrt(std::max(0.0, prob.dot(grad, prob.precondition(grad))));
    };

    const double fdual = dual_norm(nf.f.values());
    const double target = options.gradient_tol * fdual;

    // Phase 1: preconditioned L-BFGS to a moderate tolerance.
    LbfgsOptions opts;
    opts.gradient_tol = std::max(target, 1e-6 * fdual);
    opts.max_iterations = std::min(options.max_iterations, 5000);
    LbfgsResult warm = lbfgs_minimize(prob, std::vector<double>(nv, 0.0), opts);
    std::vector<double> x = std::move(warm.x);
    std::vector<double> grad;
    double e = prob.evaluate(x, grad);
    double gnorm = dual_norm(grad);

    // Phase 2: damped Newton with the exact Hessian G^T W A G, A = |g|^(p-2)(I + (p-2) e e^T).
    const Eigen::SparseMatrix<double> G = gradient_matrix(*dom);
    const int c = dom->vector_components();
    const auto w = dom->vector_weights();
    int stall = 0;
    for (int it = 0; it < options.max_iterations && gnorm > target; ++it) {
        const VectorField g = gradient(ScalarField(dom, x));
        double gmax = 0.0;
        for (std::size_t l = 0; l < g.locations(); ++l) gmax = std::max(gmax, g.norm_at(l));
        const double floor = 1e-8 * std::max(gmax, 1e-300);
        std::vector<Eigen::Triplet<double>> at;
        for (std::size_t l = 0; l < g.locations(); ++l) {
            const double r = std::max(g.norm_at(l), floor);
            const double k = std::pow(r, p - 2.0) * w[l];
            for (int i = 0; i < c; ++i) {
                for (int j = 0; j < c; ++j) {
                    double a = (i == j ? k : 0.0) + k * (p - 2.0) * g.at(l, i) * g.at(l, j) / (r * r);
                    if (a != 0.0) at.emplace_back(static_cast<int>(l * c + i), static_cast<int>(l * c + j), a);
                }
            }
        }
        Eigen::SparseMatrix<double> A(G.rows(), G.rows());
        A.setFromTriplets(at.begin(), at.end());
        Eigen::SparseMatrix<double> H = G.transpose() * A * G;
        // Pin vertex 0 (energy is invariant under constants).
        const int n1 = static_cast<int>(nv) - 1;
        Eigen::SparseMatrix<double> Hp = H.bottomRightCorner(n1, n1);
        Eigen::VectorXd rhs(n1);
        for (int v = 0; v < n1; ++v) rhs(v) = -grad[v + 1] * m[v + 1];
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hp);
        if (ldlt.info() != Eigen::Success) break;
        const Eigen::VectorXd dv = ldlt.solve(rhs);
        std::vector<double> d(nv, 0.0);
        for (int v = 0; v < n1; ++v) d[v + 1] = dv(v);
        const double slope = prob.dot(grad, d);
        if (!(slope < 0.0)) break;

        double step = 1.0;
        bool accepted = false;
        std::vector<double> xn(nv), gn;
        double en = 0.0;
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t v = 0; v < nv; ++v) xn[v] = x[v] + step * d[v];
            en = prob.evaluate(xn, gn);
            if (en <= e + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            for (std::size_t v = 0; v < nv; ++v) xn[v] = x[v] + d[v];
            en = prob.evaluate(xn, gn);
        }
        const double gn_norm = dual_norm(gn);
        if (!accepted && !(gn_norm < gnorm)) break;
        stall = gn_norm < 0.9 * gnorm ? 0 : stall + 1;
        x.swap(xn);
        grad.swap(gn);
        e = en;
        gnorm = gn_norm;
        if (stall >= 5) break;
    }
    if (gnorm > std::max(target, 1e-9 * fdual)) {
        std::ostringstream os;
        os << "variational descent stalled with relative dual gradient " << gnorm / fdual;
        throw ConvergenceError(os.str());
    }
    ScalarField u(dom, std::move(x));
    u *= nf.scale;
    return remove_mean(u);
}

ScalarField truncate_rhs(const ScalarField& f, double n) {
    if (!(n > 0.0)) throw ParameterError("truncation level must be positive");
    ScalarField out = f;
    for (double& x : out.values()) x = std::clamp(x, -n, n);
    return remove_mean(out);
}

std::vector<ScalarField> residual_test_basis(const DomainPtr& domain, unsigned seed) {
    const Domain& dom = *domain;
    std::vector<ScalarField> basis;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, dom.num_vertices() - 1);
    for (int b = 0; b < 64; ++b) {
        const std::size_t c = pick(rng);
        ScalarField phi(domain);
        phi[c] = 1.0;
        if (dom.is_grid()) {
            for (int a = 0; a < dom.dim(); ++a) {
                phi[dom.step(c, a, +1)] += 0.5;
                phi[dom.step(c, a, -1)] += 0.5;
            }
        } else {
            for (std::size_t e : dom.incident(c)) {
                const auto& edge = dom.edges()[e];
                phi[edge.u == c ? edge.v : edge.u] = 0.5;
            }
        }
        basis.push_back(std::move(phi));
    }
    if (dom.is_grid()) {
        int made = 0;
        for (int k = 1; made < 8; ++k) {
            for (int a = 0; a < dom.dim() && made < 8; ++a) {
                for (int kind = 0; kind < 2 && made < 8; ++kind, ++made) {
                    basis.push_back(ScalarField::from_function(domain, [&](std::size_t v) {
                        const double arg = 2.0 * std::numbers::pi * k * dom.position(v, a) / dom.side();
                        return kind == 0 ? std::cos(arg) : std::sin(arg);
                    }));
                }
            }
        }
    } else {
        std::normal_distribution<double> nd;
        for (int j = 0; j < 8; ++j) {
            ScalarField phi(domain);
            for (double& x : phi.values()) x = nd(rng);
            basis.push_back(std::move(phi));
        }
    }
    return basis;
}

double weak_residual(const ScalarField& u, const ScalarField& f, const RegParams& rp,
                     const std::vector<ScalarField>& basis) {
    const VectorField fl = flux(u, rp);
    const double q = rp.p / (rp.p - 1.0);
    double worst = 0.0;
    for (const auto& phi : basis) {
        const VectorField gphi = gradient(phi);
        const double den = lp_norm(gphi, q);
        if (den == 0.0) continue;
        worst = std::max(worst, std::abs(inner(fl, gphi) + inner(f, phi)) / den);
    }
    return worst;
}

}  // namespace pplap
