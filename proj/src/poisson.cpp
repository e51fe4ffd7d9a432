#include "pplap/poisson.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <numbers>

namespace pplap {

namespace {

/// FFTW planning is not thread safe; plans are shared process-wide per grid shape.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

PlanPair plans_for(int d, int n) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find({d, n});
    if (it != cache.end()) return it->second;
    std::size_t real_size = 1;
    for (int i = 0; i < d; ++i) real_size *= static_cast<std::size_t>(n);
    const std::size_t complex_size = real_size / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    double* in = fftw_alloc_real(real_size);
    fftw_complex* out = fftw_alloc_complex(complex_size);
    const int dims[3] = {n, n, n};
    PlanPair pp;
    pp.forward = fftw_plan_dft_r2c(d, dims, in, out, FFTW_ESTIMATE);
    pp.backward = fftw_plan_dft_c2r(d, dims, out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    cache.emplace(std::make_pair(d, n), pp);
    return pp;
}

double weighted_mean(const std::vector<double>& x, std::span<const double> m, double total) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * m[i];
    return s / total;
}

void project(ScalarField& x) {
    const double c = weighted_mean(x.values(), x.domain().measure(), x.domain().total_measure());
    x -= c;
}

}  // namespace

struct PoissonSolver::Spectral {
    PlanPair plans;
    std::size_t real_size = 0;
    std::size_t complex_size = 0;
    std::vector<double> inverse_symbol;  ///< 1 / (n^d * eigenvalue of -Delta), 0 for the mean mode
};

PoissonSolver::PoissonSolver(DomainPtr domain) : domain_(std::move(domain)) {
    const Domain& dom = *domain_;
    if (dom.is_grid()) {
        auto sp = std::make_unique<Spectral>();
        const int d = dom.dim();
        const int n = dom.points_per_axis();
        sp->plans = plans_for(d, n);
        sp->real_size = dom.num_vertices();
        const int half = n / 2 + 1;
        sp->complex_size = sp->real_size / static_cast<std::size_t>(n) * static_cast<std::size_t>(half);
        std::vector<double> axis_symbol(static_cast<std::size_t>(n));
        const double h = dom.spacing();
        for (int k = 0; k < n; ++k) {
            const double s = std::sin(std::numbers::pi * k / n);
            axis_symbol[k] = 4.0 * s * s / (h * h);
        }
        sp->inverse_symbol.resize(sp->complex_size);
        const double scale = static_cast<double>(sp->real_size);
        for (std::size_t c = 0; c < sp->complex_size; ++c) {
            std::size_t rest = c / static_cast<std::size_t>(half);
            double lam = axis_symbol[c % static_cast<std::size_t>(half)];
            for (int a = 1; a < d; ++a) {
                lam += axis_symbol[rest % static_cast<std::size_t>(n)];
                rest /= static_cast<std::size_t>(n);
            }
            sp->inverse_symbol[c] = c == 0 ? 0.0 : 1.0 / (lam * scale);
        }
        spectral_ = std::move(sp);
    } else {
        jacobi_.assign(dom.num_vertices(), 0.0);
        const auto m = dom.measure();
        for (const auto& e : dom.edges()) {
            const double c = e.weight / (e.length * e.length);
            jacobi_[e.u] += c / m[e.u];
            jacobi_[e.v] += c / m[e.v];
        }
        for (double& j : jacobi_) j = j > 0.0 ? 1.0 / j : 0.0;
    }
}

PoissonSolver::~PoissonSolver() = default;

ScalarField PoissonSolver::precondition(const ScalarField& r) const {
    ScalarField z(domain_);
    if (spectral_) {
        double* in = fftw_alloc_real(spectral_->real_size);
        fftw_complex* out = fftw_alloc_complex(spectral_->complex_size);
        std::copy(r.values().begin(), r.values().end(), in);
        fftw_execute_dft_r2c(spectral_->plans.forward, in, out);
        for (std::size_t c = 0; c < spectral_->complex_size; ++c) {
            out[c][0] *= spectral_->inverse_symbol[c];
            out[c][1] *= spectral_->inverse_symbol[c];
        }
        fftw_execute_dft_c2r(spectral_->plans.backward, out, in);
        std::copy(in, in + spectral_->real_size, z.values().begin());
        fftw_free(in);
        fftw_free(out);
    } else {
        for (std::size_t v = 0; v < z.size(); ++v) z[v] = r[v] * jacobi_[v];
    }
    project(z);
    return z;
}

ScalarField PoissonSolver::solve(const ScalarField& f, double tol, const ScalarField* guess,
                                 PoissonStats* stats) const {
    if (!(tol > 0.0)) throw ParameterError("Poisson tolerance must be positive");
    const Domain& dom = *domain_;
    const double total = dom.total_measure();
    const double fnorm = lp_norm(f, 2.0);
    const double rms = fnorm / std::sqrt(total);
    const double fmean = mean(f);
    if (std::abs(fmean) > 1e-10 * rms) {
        std::ostringstream os;
        os << "Poisson right-hand side must have zero mean (mean " << fmean << ", rms " << rms << ", max " << lp_norm(f, kInf) << ")";
        throw ParameterError(os.str());
    }

    ScalarField x(domain_);
    if (guess) {
        x = *guess;
        project(x);
    }
    if (fnorm == 0.0) {
        if (stats) *stats = {};
        return ScalarField(domain_);
    }

    // Solve A x = b with A = -Delta, b = -f; the residual b - A x equals Delta x - f.
    auto residual = [&](const ScalarField& xx) {
        ScalarField r = laplacian(xx);
        r -= f;
        project(r);
        return r;
    };

    const std::size_t nv = dom.num_vertices();
    const int max_iter = dom.is_grid() ? 200 : static_cast<int>(10 * nv + 100);
    int it = 0;
    ScalarField r = residual(x);
    double rnorm = lp_norm(r, 2.0);
    double best = rnorm;
    int stalled = 0;
    while (rnorm > tol * fnorm) {
        // Restarted PCG: each cycle starts from the true residual to avoid drift.
        ScalarField z = precondition(r);
        ScalarField p = z;
        double rz = inner(r, z);
        bool restart = false;
        while (rnorm > tol * fnorm && !restart) {
            if (++it > max_iter) break;
            ScalarField Ap = laplacian(p);
            Ap *= -1.0;
            const double pAp = inner(p, Ap);
            if (!(pAp > 0.0)) {
                restart = true;
                break;
            }
            const double alpha = rz / pAp;
            for (std::size_t v = 0; v < nv; ++v) {
                x[v] += alpha * p[v];
                r[v] -= alpha * Ap[v];
            }
            project(r);
            rnorm = lp_norm(r, 2.0);
            if (rnorm < 0.5 * best) {
                best = rnorm;
                stalled = 0;
            } else if (++stalled >= 8) {
                restart = true;
                break;
            }
            ScalarField znew = precondition(r);
            const double rz_new = inner(r, znew);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t v = 0; v < nv; ++v) p[v] = znew[v] + beta * p[v];
        }
        project(x);
        r = residual(x);
        const double true_norm = lp_norm(r, 2.0);
        if (it > max_iter || (restart && true_norm >= 0.5 * rnorm && true_norm > tol * fnorm)) {
            // Rounding floor of the stencil: accept if it sits within a few
            // ulps of the operator scale, otherwise report nonconvergence.
            const double h2 = dom.is_grid() ? dom.spacing() * dom.spacing() : 1.0;
            const double floor = 1e3 * std::numeric_limits<double>::epsilon() * lp_norm(x, 2.0) *
                                 (dom.is_grid() ? 4.0 * dom.dim() / h2 : 1.0);
            if (true_norm <= std::max(floor, 1e-9 * fnorm)) {
                rnorm = true_norm;
                break;
            }
            throw ConvergenceError("Poisson CG did not converge: relative residual " +
                                   std::to_string(true_norm / fnorm) + " after " + std::to_string(it) +
                                   " iterations");
        }
        rnorm = true_norm;
        best = std::min(best, rnorm);
        stalled = 0;
    }
    if (stats) {
        stats->iterations = it;
        stats->relative_residual = rnorm / fnorm;
    }
    return x;
}

ScalarField poisson_solve(const ScalarField& f, double tol) {
    PoissonSolver solver(f.domain_ptr());
    return solver.solve(f, tol);
}

}  // namespace pplap
