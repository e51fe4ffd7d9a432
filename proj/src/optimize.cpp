#include "pplap/optimize.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace pplap {

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

LbfgsResult lbfgs_minimize(const LbfgsProblem& problem, std::vector<double> x0, const LbfgsOptions& options) {
    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> history;
    LbfgsResult res;
    res.x = std::move(x0);
    std::vector<double> g(res.x.size());
    double f = problem.evaluate(res.x, g);
    std::vector<double> pg = problem.precondition(g);
    double gnorm = std::sqrt(std::max(0.0, problem.dot(g, pg)));
    double gamma = 1.0;

    std::vector<double> xn(res.x.size()), gn(res.x.size());
    for (int it = 0; it < options.max_iterations; ++it) {
        res.iterations = it;
        if (gnorm <= options.gradient_tol) {
            res.converged = true;
            break;
        }
        // Two-loop recursion.
        std::vector<double> q = g;
        std::vector<double> alpha(history.size());
        for (std::size_t k = history.size(); k-- > 0;) {
            alpha[k] = history[k].rho * problem.dot(history[k].s, q);
            axpy(-alpha[k], history[k].y, q);
        }
        std::vector<double> d = problem.precondition(q);
        for (double& v : d) v *= gamma;
        for (std::size_t k = 0; k < history.size(); ++k) {
            const double beta = history[k].rho * problem.dot(history[k].y, d);
            axpy(alpha[k] - beta, history[k].s, d);
        }
        for (double& v : d) v = -v;
        double slope = problem.dot(g, d);
        if (!(slope < 0.0)) {
            // Lost descent: fall back to the preconditioned gradient.
            history.clear();
            d = pg;
            for (double& v : d) v = -gamma * v;
            slope = problem.dot(g, d);
            if (!(slope < 0.0)) {
                res.message = "no descent direction";
                break;
            }
        }

        double step = 1.0;
        double fn = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            xn = res.x;
            axpy(step, d, xn);
            fn = problem.evaluate(xn, gn);
            // A backtracked step that leaves f unchanged is a rounding artifact, not progress.
            if (std::isfinite(fn) && fn <= f + options.armijo * step * slope && (fn < f || step == 1.0)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // At the rounding floor of f the Armijo test is meaningless; accept
            // the full step if it reduces the gradient norm instead.
            xn = res.x;
            axpy(1.0, d, xn);
            fn = problem.evaluate(xn, gn);
            const std::vector<double> pgn = problem.precondition(gn);
            const double gn_norm = std::sqrt(std::max(0.0, problem.dot(gn, pgn)));
            if (!(gn_norm < gnorm) || !std::isfinite(fn)) {
                res.message = "line search failed";
                break;
            }
            step = 1.0;
        }

        Pair pair;
        pair.s.resize(res.x.size());
        pair.y.resize(res.x.size());
        for (std::size_t i = 0; i < res.x.size(); ++i) {
            pair.s[i] = xn[i] - res.x[i];
            pair.y[i] = gn[i] - g[i];
        }
        const double sy = problem.dot(pair.s, pair.y);
        if (sy > 1e-300) {
            const std::vector<double> py = problem.precondition(pair.y);
            const double ypy = problem.dot(pair.y, py);
            if (ypy > 0.0) gamma = sy / ypy;
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (static_cast<int>(history.size()) > options.memory) history.pop_front();
        }
        res.x.swap(xn);
        g.swap(gn);
        f = fn;
        pg = problem.precondition(g);
        gnorm = std::sqrt(std::max(0.0, problem.dot(g, pg)));
        res.iterations = it + 1;
    }
    if (gnorm <= options.gradient_tol) res.converged = true;
    if (!res.converged && res.message.empty()) res.message = "iteration cap reached";
    res.value = f;
    res.gradient_norm = gnorm;
    return res;
}

}  // namespace pplap
