#include "pplap/eigen.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/optimize.hpp"
#include "pplap/plap.hpp"
#include "pplap/poisson.hpp"
#include "pplap/solve.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

namespace pplap {

namespace {

double signed_pow(double x, double e) { return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e); }

/// sum |u - c|^(p-2)(u - c) m, decreasing in c.
double center_equation(const ScalarField& u, double p, double c) {
    const auto m = u.domain().measure();
    double s = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) s += signed_pow(u[v] - c, p - 1.0) * m[v];
    return s;
}

struct Quotient {
    double num = 0.0;
    double den = 0.0;
    double c = 0.0;
};

}  // namespace

double p_center(const ScalarField& u, double p) {
    if (p == 2.0) return mean(u);
    double lo = *std::min_element(u.values().begin(), u.values().end());
    double hi = *std::max_element(u.values().begin(), u.values().end());
    if (lo == hi) return lo;
    // Illinois regula falsi on the monotone equation; the root lies in [lo, hi].
    double flo = center_equation(u, p, lo), fhi = center_equation(u, p, hi);
    int side = 0;
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        c = (flo * hi - fhi * lo) / (flo - fhi);
        if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
        const double fc = center_equation(u, p, c);
        if (fc == 0.0) return c;
        if (fc > 0.0) {
            lo = c;
            flo = fc;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = c;
            fhi = fc;
            if (side == +1) flo *= 0.5;
            side = +1;
        }
        if (hi - lo <= 4e-16 * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return c;
}

double edge_lipschitz(const ScalarField& u) {
    const Domain& dom = u.domain();
    double best = 0.0;
    if (dom.is_grid()) {
        const double h = dom.spacing();
        for (std::size_t v = 0; v < u.size(); ++v)
            for (int a = 0; a < dom.dim(); ++a) best = std::max(best, std::abs(u[dom.step(v, a, +1)] - u[v]) / h);
    } else {
        for (const auto& e : dom.edges())
            best = std::max(best, std::abs(u[e.v] - u[e.u]) / dom.distance(e.u, e.v));
    }
    return best;
}

EigenRecord p_eigenpair(const DomainPtr& domain, double p, double tol, const EigenOptions& options) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    if (!(tol > 0.0)) throw ParameterError("eigen tolerance must be positive");
    if (options.restarts < 1) throw ParameterError("at least one restart is required");
    const Domain& dom = *domain;
    const auto m = dom.measure();
    const std::size_t nv = dom.num_vertices();
    const RegParams rp{p, 0.0, kInf};

    auto run = [&](int restart) {
        PoissonSolver solver(domain);
        auto quotient = [&](const ScalarField& u) {
            Quotient q;
            const VectorField g = gradient(u);
            const auto w = dom.vector_weights();
            for (std::size_t l = 0; l < g.locations(); ++l) q.num += std::pow(g.norm2_at(l), 0.5 * p) * w[l];
            q.c = p_center(u, p);
            for (std::size_t v = 0; v < nv; ++v) q.den += std::pow(std::abs(u[v] - q.c), p) * m[v];
            return q;
        };

        LbfgsProblem prob;
        prob.dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i] * m[i];
            return acc;
        };
        prob.precondition = [&](const std::vector<double>& g) {
            ScalarField r = remove_mean(ScalarField(domain, g));
            if (dom.is_grid()) return solver.precondition(r).values();
            ScalarField z = solver.solve(r, 1e-10);
            z *= -1.0;
            return z.values();
        };
        prob.evaluate = [&](const std::vector<double>& x, std::vector<double>& grad) {
            const ScalarField u(domain, x);
            const Quotient q = quotient(u);
            grad.assign(nv, 0.0);
            if (!(q.den > 0.0)) return kInf;
            const double R = q.num / q.den;
            const ScalarField plap = p_laplacian(u, rp);
            // Riesz gradient of num/den: (-p Delta_p u - R p |u-c|^(p-2)(u-c)) / den.
            for (std::size_t v = 0; v < nv; ++v)
                grad[v] = p * (-plap[v] - R * signed_pow(u[v] - q.c, p - 1.0)) / q.den;
            return R;
        };

        // Smooth seeded start: white noise passed through two inverse Laplacians.
        std::mt19937_64 rng(options.seed * 7919u + static_cast<unsigned>(restart) * 104729u);
        std::normal_distribution<double> nd;
        ScalarField x(domain);
        for (double& v : x.values()) v = nd(rng);
        x = remove_mean(x);
        for (int s = 0; s < 2; ++s) x = solver.precondition(x);
        x *= 1.0 / lp_norm(x, p);

        LbfgsOptions opts;
        opts.max_iterations = options.max_iterations;
        LbfgsResult res;
        int total = 0;
        std::vector<double> xv = x.values();
        // Two passes: the second rescales the tolerance to the current quotient.
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> g;
            const double R = prob.evaluate(xv, g);
            opts.gradient_tol = tol * R;
            res = lbfgs_minimize(prob, xv, opts);
            total += res.iterations;
            xv = res.x;
            // Keep the iterate O(1); the quotient is scale and shift invariant.
            ScalarField u(domain, xv);
            const double c = p_center(u, p);
            u -= c;
            u *= 1.0 / lp_norm(u, p);
            xv = u.values();
        }
        EigenRecord rec;
        rec.u = ScalarField(domain, xv);
        rec.iterations = total;
        rec.restart = restart;
        rec.gradient_norm = res.gradient_norm * tol / opts.gradient_tol;
        rec.converged = res.converged;
        // For p < 2 the quotient is only C^1 where u = c or grad u = 0, and the line
        // search stalls above tol; a dual gradient below sqrt(tol) is accepted there.
        if (!res.converged && res.gradient_norm > std::sqrt(tol) * (opts.gradient_tol / tol)) {
            std::ostringstream os;
            os << "p-eigen descent stalled (" << res.message << "), dual gradient " << res.gradient_norm;
            throw ConvergenceError(os.str());
        }
        return rec;
    };

    std::vector<EigenRecord> results;
    if (options.parallel && options.restarts > 1) {
        std::vector<std::future<EigenRecord>> futures;
        for (int r = 0; r < options.restarts; ++r) futures.push_back(std::async(std::launch::async, run, r));
        for (auto& fu : futures) results.push_back(fu.get());
    } else {
        for (int r = 0; r < options.restarts; ++r) results.push_back(run(r));
    }

    EigenRecord best;
    double best_lambda = kInf;
    for (auto& rec : results) {
        const VectorField g = gradient(rec.u);
        const auto w = dom.vector_weights();
        double num = 0.0;
        for (std::size_t l = 0; l < g.locations(); ++l) num += std::pow(g.norm2_at(l), 0.5 * p) * w[l];
        const double den = std::pow(lp_norm(rec.u, p), p);
        rec.lambda = num / den;
        if (rec.lambda < best_lambda) {
            best_lambda = rec.lambda;
            best = rec;
        }
    }

    // Canonical sign: the vertex of largest magnitude is positive.
    std::size_t arg = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (std::abs(best.u[v]) > std::abs(best.u[arg])) arg = v;
    if (best.u[arg] < 0.0) best.u *= -1.0;

    double cons = 0.0, cons_scale = 0.0;
    ScalarField weight(domain);
    for (std::size_t v = 0; v < nv; ++v) {
        weight[v] = signed_pow(best.u[v], p - 1.0);
        cons += weight[v] * m[v];
        cons_scale += std::abs(weight[v]) * m[v];
    }
    best.constraint = cons / cons_scale;
    if (!(std::abs(best.constraint) <= 1e-10)) {
        std::ostringstream os;
        os << "p-eigen constraint violated: relative sum u|u|^(p-2) m = " << best.constraint;
        throw ConvergenceError(os.str());
    }

    const auto basis = residual_test_basis(domain, 12345);
    const VectorField fl = flux(best.u, rp);
    const double q = p / (p - 1.0);
    for (const auto& phi : basis) {
        const VectorField gphi = gradient(phi);
        const double den = lp_norm(gphi, q);
        if (den == 0.0) continue;
        best.residual = std::max(best.residual, std::abs(inner(fl, gphi) - best.lambda * inner(weight, phi)) / den);
    }
    best.lipschitz_estimate = edge_lipschitz(best.u);
    return best;
}

}  // namespace pplap
