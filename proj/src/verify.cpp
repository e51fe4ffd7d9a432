#include "pplap/verify.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/poisson.hpp"
#include "pplap/solve.hpp"
#include "pplap/sources.hpp"
#include "pplap/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace pplap {

void EstimateReport::set(const std::string& key, double value) {
    for (auto& kv : context)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    context.emplace_back(key, value);
}

double EstimateReport::get(const std::string& key) const {
    for (const auto& kv : context)
        if (kv.first == key) return kv.second;
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

constexpr double kRelTol = 1e-12;

/// lhs, rhs and the magnitude the tolerance is relative to.
struct Terms {
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;
};

double ratio_or_zero(double num, double den) {
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : kInf;
}

int matrix_dim(std::span<const double> A, std::span<const double> v) {
    const auto d = v.size();
    if (d == 0 || A.size() != d * d) throw ParameterError("matrix must be d x d for a d-vector");
    return static_cast<int>(d);
}

Terms key_terms(std::span<const double> A, std::span<const double> v, int n) {
    const int d = matrix_dim(A, v);
    double v2 = 0.0, A2 = 0.0, tr = 0.0, q = 0.0, Av2 = 0.0;
    for (int i = 0; i < d; ++i) {
        v2 += v[i] * v[i];
        tr += A[i * d + i];
        double row = 0.0;
        for (int j = 0; j < d; ++j) {
            A2 += A[i * d + j] * A[i * d + j];
            row += A[i * d + j] * v[j];
        }
        Av2 += row * row;
        q += row * v[i];
    }
    Terms t;
    t.lhs = v2 * v2 * A2;
    const double s = v2 * tr - q;
    t.rhs = 2.0 * v2 * Av2 + s * s / (n - 1) - q * q;
    t.scale = t.lhs * (1.0 + d);
    return t;
}

Terms elementary_terms(double t, double A, double B, double N) {
    const double den = N + t * t + 2.0 * t;
    const double a = (t * t + t) * A, b = (t * N + t * t) * B;
    const double x = (a - b) / den;
    Terms r;
    r.lhs = x * x;
    r.rhs = t * t * (N - 1.0) / den * ((A - B) * (A - B) / (N - 1.0) + B * B);
    const double mag = (std::abs(a) + std::abs(b)) / den;
    r.scale = mag * mag + r.rhs;
    return r;
}

struct QCoefficients {
    double a, b, c;
};

QCoefficients q_coefficients(double p, double N, double alpha) {
    const double s = p - 2.0;
    if (std::isinf(N)) return {-s * (s - 2.0 * alpha), 2.0 * alpha, 1.0};
    return {s * s / (N - 1.0) - s * (s - 2.0 * alpha), 2.0 * s / (N - 1.0) + 2.0 * alpha, 1.0 / (N - 1.0) + 1.0};
}

double q_one_closed(double p, double N, double alpha) {
    if (std::isinf(N)) return (p - 1.0) * (3.0 - p + 2.0 * alpha);
    return (p - 1.0) * ((p - 1.0) / (N - 1.0) + 3.0 - p + 2.0 * alpha);
}

void validate_pN(double p, double N) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    if (!(N >= 2.0)) throw ParameterError("N must be >= 2 or inf");
}

/// Q-check outcome without building a report.
bool q_consistent(double p, double N, double alpha, double* min_out = nullptr, double* q1_err = nullptr) {
    const auto co = q_coefficients(p, N, alpha);
    const double scale = 1.0 + std::abs(co.a) + std::abs(co.b) + std::abs(co.c);
    const double mn = q_minimum(p, N, alpha);
    const double q1 = co.a + co.b + co.c;
    const double err = std::abs(q1 - q_one_closed(p, N, alpha));
    if (min_out) *min_out = mn;
    if (q1_err) *q1_err = err / scale;
    const bool admissible = alpha > alpha_threshold(p, N);
    const bool sign_ok = admissible ? mn > -kRelTol * scale : mn <= kRelTol * scale;
    return sign_ok && err <= kRelTol * scale;
}

Terms monotonicity_check_terms(std::span<const double> a, std::span<const double> b, double p) {
    auto [lhs, rhs] = monotonicity_terms(a, b, p);
    double na = 0.0, nb = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i] * a[i];
        nb += b[i] * b[i];
        d2 += (a[i] - b[i]) * (a[i] - b[i]);
    }
    Terms t;
    t.lhs = lhs;
    t.rhs = monotonicity_constant(p) * rhs;
    t.scale = (std::pow(std::sqrt(na), p - 1.0) + std::pow(std::sqrt(nb), p - 1.0)) * std::sqrt(d2);
    return t;
}

Terms cordes_terms(std::span<const double> H, std::span<const double> v, double p, double N, double eps) {
    const int d = matrix_dim(H, v);
    double tr = 0.0, H2 = 0.0, q = 0.0, v2 = 0.0;
    for (int i = 0; i < d; ++i) {
        tr += H[i * d + i];
        v2 += v[i] * v[i];
        for (int j = 0; j < d; ++j) {
            H2 += H[i * d + j] * H[i * d + j];
            q += H[i * d + j] * v[i] * v[j];
        }
    }
    const RegParams rp{p, eps, kInf};
    const double den = v2 + eps;
    const double L = den > 0.0 ? tr + (p - 2.0) * q / den : tr;
    const double th = theta_value(v2, rp, N);
    Terms t;
    const double x = tr - th * L;
    t.lhs = x * x;
    t.rhs = alpha_p(p, N) * H2;
    const double mag = std::abs(tr) + th * std::abs(L);
    t.scale = mag * mag + t.rhs;
    return t;
}

void validate_cordes(double p, double N, int d) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw UnsupportedOperation("Cordes closeness is stated for p >= 2");
    if (!(N >= 2.0)) throw ParameterError("N must be >= 2 or inf");
    if (std::isfinite(N) && d > N) throw ParameterError("Cordes closeness needs dim <= N");
}

EstimateReport pointwise_report(std::string name, std::string relation, const Terms& t, bool greater) {
    EstimateReport r;
    r.name = std::move(name);
    r.relation = std::move(relation);
    r.lhs = t.lhs;
    r.rhs = t.rhs;
    if (greater) {
        r.fitted_constant = ratio_or_zero(t.rhs, t.lhs);
        r.pass = t.lhs - t.rhs >= -kRelTol * t.scale;
    } else {
        r.fitted_constant = ratio_or_zero(t.lhs, t.rhs);
        r.pass = t.lhs - t.rhs <= kRelTol * t.scale;
    }
    r.set("slack", greater ? t.lhs - t.rhs : t.rhs - t.lhs);
    r.set("scale", t.scale);
    return r;
}

// ------------------------------------------------------- random suites

/// Running summary of a randomized suite.
struct SuiteTally {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< largest (smaller side)/(larger side)
    double worst_slack = kInf;  ///< most negative normalized slack
    Terms worst{};

    void add(const Terms& t, bool greater) {
        ++samples;
        const double slack = greater ? t.lhs - t.rhs : t.rhs - t.lhs;
        const double norm_slack = t.scale > 0.0 ? slack / t.scale : slack;
        if (norm_slack < -kRelTol) ++violations;
        const double ratio = greater ? ratio_or_zero(t.rhs, t.lhs) : ratio_or_zero(t.lhs, t.rhs);
        worst_ratio = std::max(worst_ratio, ratio);
        if (norm_slack < worst_slack) {
            worst_slack = norm_slack;
            worst = t;
        }
    }

    EstimateReport report(std::string name, std::string relation, unsigned seed) const {
        EstimateReport r;
        r.name = std::move(name);
        r.relation = std::move(relation);
        r.lhs = worst.lhs;
        r.rhs = worst.rhs;
        r.fitted_constant = worst_ratio;
        r.pass = violations == 0;
        r.set("samples", static_cast<double>(samples));
        r.set("violations", static_cast<double>(violations));
        r.set("min_normalized_slack", worst_slack);
        r.set("tolerance", kRelTol);
        r.set("seed", seed);
        return r;
    }
};

double log_uniform(std::mt19937_64& rng, double lo_exp, double hi_exp) {
    std::uniform_real_distribution<double> u(lo_exp, hi_exp);
    return std::pow(10.0, u(rng));
}

void random_symmetric(std::mt19937_64& rng, int d, double scale, std::array<double, 9>& A) {
    std::normal_distribution<double> nd;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) A[i * d + j] = A[j * d + i] = scale * nd(rng);
}

EstimateReport key_suite(std::size_t samples, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x6b6579ULL);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dim(2, 3), kind(0, 7);
    SuiteTally tally;
    std::array<double, 9> A{};
    std::array<double, 3> v{};
    for (std::size_t s = 0; s < samples; ++s) {
        const int d = dim(rng);
        const int k = kind(rng);
        random_symmetric(rng, d, log_uniform(rng, -3, 3), A);
        const double vs = log_uniform(rng, -3, 3);
        for (int i = 0; i < d; ++i) v[i] = vs * nd(rng);
        if (k == 0) {
            // v along a coordinate axis of a diagonal A
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (i != j) A[i * d + j] = 0.0;
            for (int i = 1; i < d; ++i) v[i] = 0.0;
        } else if (k == 1) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A[i * d + j] = i == j ? 1.0 : 0.0;
        }
        tally.add(key_terms({A.data(), static_cast<std::size_t>(d * d)}, {v.data(), static_cast<std::size_t>(d)}, d),
                  true);
    }
    return tally.report("key_inequality.random", ">=", seed);
}

EstimateReport elementary_suite(std::size_t samples, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x656c656dULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> tdist(0.0, 100.0), Ndist(2.0, 10.0);
    std::uniform_int_distribution<int> kind(0, 7);
    SuiteTally tally;
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = tdist(rng), N = Ndist(rng);
        const double sc = log_uniform(rng, -3, 3);
        const double A = sc * nd(rng);
        const double B = kind(rng) == 0 ? A : sc * nd(rng);
        tally.add(elementary_terms(t, A, B, N), false);
    }
    return tally.report("elementary.random", "<=", seed);
}

EstimateReport monotonicity_suite(std::size_t samples, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x6d6f6e6fULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> pdist(1.05, 6.0);
    std::uniform_int_distribution<int> dim(1, 3), kind(0, 7);
    SuiteTally tally;
    std::array<double, 3> a{}, b{};
    for (std::size_t s = 0; s < samples; ++s) {
        const double p = pdist(rng);
        const int d = dim(rng);
        const int k = kind(rng);
        const double sc = log_uniform(rng, -2, 2);
        for (int i = 0; i < d; ++i) {
            a[i] = sc * nd(rng);
            b[i] = sc * nd(rng);
        }
        if (k == 0) {
            for (int i = 0; i < d; ++i) b[i] = 0.0;
        } else if (k == 1) {
            const double eps = log_uniform(rng, -6, -1);
            for (int i = 0; i < d; ++i) b[i] = a[i] * (1.0 + eps * nd(rng));
        }
        tally.add(monotonicity_check_terms({a.data(), static_cast<std::size_t>(d)},
                                           {b.data(), static_cast<std::size_t>(d)}, p),
                  true);
    }
    return tally.report("monotonicity.random", ">=", seed);
}

EstimateReport cordes_suite(std::size_t samples, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x636f7264ULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> pdist(2.0, 8.0);
    std::uniform_int_distribution<int> dim(2, 3), kind(0, 7);
    SuiteTally tally;
    std::array<double, 9> H{};
    std::array<double, 3> v{};
    for (std::size_t s = 0; s < samples; ++s) {
        const double p = pdist(rng);
        const int d = dim(rng);
        random_symmetric(rng, d, log_uniform(rng, -3, 3), H);
        const double vs = log_uniform(rng, -3, 3);
        for (int i = 0; i < d; ++i) v[i] = vs * nd(rng);
        if (kind(rng) == 0)
            for (int i = 0; i < d; ++i) v[i] = 0.0;
        double v2 = 0.0;
        for (int i = 0; i < d; ++i) v2 += v[i] * v[i];
        const double eps = std::max(v2, 1e-300) * log_uniform(rng, -8, 2);
        tally.add(cordes_terms({H.data(), static_cast<std::size_t>(d * d)}, {v.data(), static_cast<std::size_t>(d)}, p,
                               static_cast<double>(d), eps),
                  false);
    }
    return tally.report("cordes_closeness.random", "<=", seed);
}

EstimateReport q_suite(std::size_t samples, unsigned seed) {
    std::mt19937_64 rng(seed ^ 0x71706f6cULL);
    std::uniform_real_distribution<double> pdist(1.01, 8.0), Ndist(2.0, 20.0), adist(-4.0, 4.0), sgn(-1.0, 1.0);
    std::uniform_int_distribution<int> kind(0, 7);
    std::size_t violations = 0, admissible_count = 0;
    double worst_min = kInf;
    for (std::size_t s = 0; s < samples; ++s) {
        const double p = pdist(rng);
        const int k = kind(rng);
        const double N = k == 0 ? kInf : Ndist(rng);
        const double thr = alpha_threshold(p, N);
        double alpha = adist(rng);
        if (k == 1) alpha = thr;
        if (k == 2) alpha = thr + sgn(rng) * log_uniform(rng, -8, 0);
        double mn = 0.0;
        if (!q_consistent(p, N, alpha, &mn)) ++violations;
        if (alpha > thr) {
            ++admissible_count;
            worst_min = std::min(worst_min, mn);
        }
    }
    EstimateReport r;
    r.name = "q_polynomial.random";
    r.relation = ">";
    r.lhs = worst_min;
    r.rhs = 0.0;
    r.fitted_constant = worst_min;
    r.pass = violations == 0;
    r.set("samples", static_cast<double>(samples));
    r.set("violations", static_cast<double>(violations));
    r.set("admissible_samples", static_cast<double>(admissible_count));
    r.set("tolerance", kRelTol);
    r.set("seed", seed);
    r.note = "lhs is the smallest min Q over admissible samples";
    return r;
}

// ------------------------------------------------------- field helpers

const Domain& require_grid(const ScalarField& u, const char* what) {
    if (!u.domain().is_grid()) throw UnsupportedOperation(std::string(what) + " is grid only");
    return u.domain();
}

/// |grad u| at every vector location.
std::vector<double> grad_norms(const ScalarField& u) { return magnitude(gradient(u)); }

/// Sum over vector locations inside the ball of values * weight.
double sum_locations(const Domain& dom, const std::vector<double>& values, const Ball& b) {
    const auto w = dom.vector_weights();
    double s = 0.0;
    for (std::size_t l = 0; l < values.size(); ++l)
        if (location_in_ball(dom, l, b)) s += values[l] * w[l];
    return s;
}

double max_locations(const Domain& dom, const std::vector<double>& values, const Ball& b) {
    double m = 0.0;
    for (std::size_t l = 0; l < values.size(); ++l)
        if (location_in_ball(dom, l, b)) m = std::max(m, values[l]);
    return m;
}

double locations_measure(const Domain& dom, const Ball& b) {
    const auto w = dom.vector_weights();
    double s = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l)
        if (location_in_ball(dom, l, b)) s += w[l];
    return s;
}

void add_grid_context(EstimateReport& r, const Domain& dom, double p) {
    r.set("p", p);
    r.set("N", dom.N());
    r.set("K", dom.K());
    r.set("n", dom.is_grid() ? dom.points_per_axis() : static_cast<double>(dom.num_vertices()));
    r.set("dim", dom.dim());
}

void finish_fit(EstimateReport& r) {
    r.fitted_constant = ratio_or_zero(r.lhs, r.rhs);
    r.pass = std::isfinite(r.fitted_constant);
}

}  // namespace

// ------------------------------------------------------------ algebra API

EstimateReport check_key_inequality(std::span<const double> A, std::span<const double> v, int n) {
    if (n < 2) throw ParameterError("key inequality needs n >= 2");
    auto r = pointwise_report("key_inequality", ">=", key_terms(A, v, n), true);
    r.set("n", n);
    r.set("dim", static_cast<double>(v.size()));
    return r;
}

EstimateReport check_elementary(double t, double A, double B, double N) {
    if (!(t >= 0.0)) throw ParameterError("elementary estimate needs t >= 0");
    if (!(N >= 2.0) || !std::isfinite(N)) throw ParameterError("elementary estimate needs finite N >= 2");
    auto r = pointwise_report("elementary", "<=", elementary_terms(t, A, B, N), false);
    r.set("t", t);
    r.set("A", A);
    r.set("B", B);
    r.set("N", N);
    return r;
}

double q_polynomial(double p, double N, double alpha, double t) {
    const auto co = q_coefficients(p, N, alpha);
    return (co.a * t + co.b) * t + co.c;
}

double q_minimum(double p, double N, double alpha) {
    validate_pN(p, N);
    const auto co = q_coefficients(p, N, alpha);
    double mn = std::min(co.c, co.a + co.b + co.c);
    if (co.a > 0.0) {
        const double t = -co.b / (2.0 * co.a);
        if (t > 0.0 && t < 1.0) mn = std::min(mn, q_polynomial(p, N, alpha, t));
    }
    return mn;
}

double alpha_threshold(double p, double N) {
    if (std::isinf(N)) return 0.5 * (p - 3.0);
    return 0.5 * (p - 3.0 - (p - 1.0) / (N - 1.0));
}

EstimateReport check_Q_polynomial(double p, double N, double alpha) {
    validate_pN(p, N);
    EstimateReport r;
    r.name = "q_polynomial";
    r.relation = ">";
    double mn = 0.0, q1err = 0.0;
    r.pass = q_consistent(p, N, alpha, &mn, &q1err);
    r.lhs = mn;
    r.rhs = 0.0;
    r.fitted_constant = mn;
    r.set("p", p);
    r.set("N", N);
    r.set("alpha", alpha);
    r.set("threshold", alpha_threshold(p, N));
    r.set("admissible", alpha > alpha_threshold(p, N) ? 1.0 : 0.0);
    r.set("Q0", q_polynomial(p, N, alpha, 0.0));
    r.set("Q1", q_polynomial(p, N, alpha, 1.0));
    r.set("Q1_closed_form", q_one_closed(p, N, alpha));
    r.set("Q1_relative_error", q1err);
    return r;
}

double monotonicity_constant(double p) {
    if (!(p > 1.0)) throw ParameterError("p must lie in (1, inf)");
    return p >= 2.0 ? std::pow(2.0, 2.0 - p) : p - 1.0;
}

EstimateReport check_monotonicity(std::span<const double> a, std::span<const double> b, double p) {
    if (a.size() != b.size()) throw ParameterError("monotonicity needs vectors of equal length");
    const Terms t = monotonicity_check_terms(a, b, p);
    auto r = pointwise_report("monotonicity", ">=", t, true);
    // Empirical constant: lhs over the constant-free right-hand side.
    const double c = monotonicity_constant(p);
    r.fitted_constant = t.rhs > 0.0 ? t.lhs / (t.rhs / c) : kInf;
    r.set("p", p);
    r.set("c_p", c);
    return r;
}

EstimateReport check_cordes_pointwise(std::span<const double> H, std::span<const double> v, double p, double N,
                                      double eps) {
    validate_cordes(p, N, static_cast<int>(v.size()));
    auto r = pointwise_report("cordes_closeness", "<=", cordes_terms(H, v, p, N, eps), false);
    r.set("p", p);
    r.set("N", N);
    r.set("eps", eps);
    r.set("alpha_p", alpha_p(p, N));
    return r;
}

EstimateReport check_cordes_closeness(const ScalarField& u, const VectorField& v, double p, double N, double eps) {
    const Domain& dom = require_grid(u, "Cordes closeness");
    const int d = dom.dim();
    validate_cordes(p, N, d);
    const HessianField H = hessian(u);
    EstimateReport r;
    r.name = "cordes_closeness";
    r.relation = "<=";
    r.pass = true;
    std::size_t violations = 0;
    double worst = -1.0;
    std::vector<double> Hx(static_cast<std::size_t>(d * d));
    for (std::size_t x = 0; x < u.size(); ++x) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) Hx[i * d + j] = H.at(x, i, j);
        const Terms t = cordes_terms(Hx, v.at(x), p, N, eps);
        if (t.lhs - t.rhs > kRelTol * t.scale) ++violations;
        const double ratio = ratio_or_zero(t.lhs, t.rhs);
        if (ratio > worst) {
            worst = ratio;
            r.lhs = t.lhs;
            r.rhs = t.rhs;
        }
    }
    r.fitted_constant = worst;
    r.pass = violations == 0;
    add_grid_context(r, dom, p);
    r.set("N", N);
    r.set("eps", eps);
    r.set("alpha_p", alpha_p(p, N));
    r.set("violations", static_cast<double>(violations));
    return r;
}

std::vector<EstimateReport> algebra_suite(const AlgebraOptions& options) {
    using Fn = EstimateReport (*)(std::size_t, unsigned);
    const std::array<Fn, 5> suites{key_suite, elementary_suite, monotonicity_suite, cordes_suite, q_suite};
    std::vector<EstimateReport> out;
    if (options.parallel) {
        std::vector<std::future<EstimateReport>> fs;
        for (Fn fn : suites) fs.push_back(std::async(std::launch::async, fn, options.samples, options.seed));
        for (auto& f : fs) out.push_back(f.get());
    } else {
        for (Fn fn : suites) out.push_back(fn(options.samples, options.seed));
    }
    return out;
}

// ---------------------------------------------------------- estimate API

std::size_t vertex_near(const Domain& domain, std::span<const double> x) {
    if (!domain.is_grid()) throw UnsupportedOperation("vertex_near is grid only");
    if (static_cast<int>(x.size()) != domain.dim()) throw ParameterError("point dimension does not match the grid");
    const int n = domain.points_per_axis();
    std::size_t id = 0, stride = 1;
    for (int a = 0; a < domain.dim(); ++a) {
        long long i = std::llround(x[a] / domain.spacing());
        i = ((i % n) + n) % n;
        id += static_cast<std::size_t>(i) * stride;
        stride *= static_cast<std::size_t>(n);
    }
    return id;
}

ScalarField cutoff(const DomainPtr& domain, std::size_t center, double r, double R) {
    if (!(r >= 0.0 && R > r)) throw ParameterError("cutoff needs 0 <= r < R");
    const auto dist = domain->distances_from(center);
    ScalarField eta(domain);
    for (std::size_t v = 0; v < eta.size(); ++v) eta[v] = std::clamp((R - dist[v]) / (R - r), 0.0, 1.0);
    return eta;
}

EstimateReport check_hessian_estimate(const ScalarField& u, const RegParams& rp, double alpha, const ScalarField& eta) {
    const Domain& dom = require_grid(u, "the Hessian estimate");
    validate(rp);
    if (alpha >= 0.0 && std::isinf(rp.M)) throw ParameterError("alpha >= 0 needs a finite truncation M");
    if (alpha < 0.0 && std::isfinite(rp.M)) throw ParameterError("alpha < 0 needs M = inf");
    if (alpha < 0.0 && !(rp.eps > 0.0)) throw ParameterError("alpha < 0 needs eps > 0");
    const VectorField g = gradient(u);
    const HessianField H = hessian(u);
    const ScalarField D = rp.p == 2.0 ? laplacian(u) : developed(u, rp);
    const VectorField geta = gradient(eta);
    const auto m = dom.measure();
    const double Km = dom.K_minus();
    EstimateReport r;
    r.name = "hessian_estimate";
    for (std::size_t x = 0; x < u.size(); ++x) {
        const double gn = g.norm_at(x);
        const double t = std::min(gn, rp.M);
        const double w = alpha == 0.0 ? 1.0 : std::pow(t * t + rp.eps, alpha);
        const double e2 = eta[x] * eta[x];
        r.lhs += H.hs2_at(x) * w * e2 * m[x];
        r.rhs += ((1.0 + alpha * alpha) * D[x] * D[x] * e2 + gn * gn * (geta.norm2_at(x) + Km * e2)) * w * m[x];
    }
    finish_fit(r);
    add_grid_context(r, dom, rp.p);
    r.set("eps", rp.eps);
    r.set("M", rp.M);
    r.set("alpha", alpha);
    return r;
}

EstimateReport check_second_order_final(const ScalarField& u, const ScalarField& f, double p, double eps,
                                        const Ball& ball_R) {
    const Domain& dom = require_grid(u, "the second-order estimate");
    const VectorField v = flux(u, RegParams{p, eps, kInf});
    const int d = dom.dim();
    std::vector<VectorField> dv;
    for (int i = 0; i < d; ++i) dv.push_back(gradient(component(v, i)));
    const auto m = dom.measure();
    const bool global = ball_R.size() == dom.num_vertices();
    EstimateReport r;
    r.name = "second_order_final";
    if (global) {
        for (std::size_t x = 0; x < u.size(); ++x) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += dv[i].norm2_at(x);
            r.lhs += s * m[x];
            r.rhs += f[x] * f[x] * m[x];
        }
    } else {
        const Ball inner = ball(dom, ball_R.center, ball_R.radius / 8.0);
        for (std::size_t x : inner.members) {
            double s = v.norm2_at(x);
            for (int i = 0; i < d; ++i) s += dv[i].norm2_at(x);
            r.lhs += s * m[x];
        }
        double f2 = 0.0, gp = 0.0;
        const auto gn = grad_norms(u);
        for (std::size_t x : ball_R.members) {
            f2 += f[x] * f[x] * m[x];
            gp += std::pow(gn[x], p - 1.0) * m[x];
        }
        const double far = dom.K_minus() * gp * gp / ball_measure(dom, ball_R);
        r.rhs = f2 + far;
        r.set("far_field_term", far);
        r.set("inner_vertices", static_cast<double>(inner.size()));
    }
    finish_fit(r);
    add_grid_context(r, dom, p);
    r.set("eps", eps);
    r.set("R", global ? dom.diameter() : ball_R.radius);
    r.set("global", global ? 1.0 : 0.0);
    return r;
}

EstimateReport check_gradient_bound(const ScalarField& u, const ScalarField& f, double p, double q,
                                    std::size_t center, double r_in, double R, double m_exp) {
    const Domain& dom = u.domain();
    const double N = dom.N();
    if (std::isinf(N)) throw ParameterError("the gradient bound needs finite N");
    if (!(q > N)) throw ParameterError("the gradient bound needs q > N");
    if (!(m_exp >= 1.0)) throw ParameterError("the gradient bound needs m >= 1");
    if (!(r_in > 0.0 && R > r_in)) throw ParameterError("the gradient bound needs 0 < r < R");
    const Ball Br = ball(dom, center, r_in), BR = ball(dom, center, R);
    const auto gn = grad_norms(u);
    std::vector<double> gm(gn.size());
    for (std::size_t l = 0; l < gn.size(); ++l) gm[l] = std::pow(gn[l], m_exp);
    const double avg = sum_locations(dom, gm, BR) / locations_measure(dom, BR);
    EstimateReport r;
    r.name = "gradient_bound";
    r.lhs = max_locations(dom, gn, Br);
    r.rhs = std::pow(R / (R - r_in), N / m_exp) * (std::pow(avg, 1.0 / m_exp) + 1.0);
    finish_fit(r);
    double c0 = 0.0;
    if (std::isinf(q)) {
        for (std::size_t x : BR.members) c0 = std::max(c0, std::abs(f[x]));
    } else {
        const auto m = dom.measure();
        for (std::size_t x : BR.members) c0 += std::pow(std::abs(f[x]), q) * m[x];
        c0 /= ball_measure(dom, BR);
    }
    add_grid_context(r, dom, p);
    r.set("q", q);
    r.set("m", m_exp);
    r.set("r", r_in);
    r.set("R", R);
    r.set("source_q_average", c0);
    return r;
}

EstimateReport check_poincare_pp(const DomainPtr& domain, double p, int samples, unsigned seed) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    if (samples < 1) throw ParameterError("at least one sample is required");
    const Domain& dom = *domain;
    const auto w = dom.vector_weights();
    EstimateReport r;
    r.name = "poincare_pp";
    double best = 0.0;
    int used = 0;
    auto consider = [&](const ScalarField& g) {
        const ScalarField c = remove_mean(g);
        const VectorField gr = gradient(c);
        double num = 0.0, den = 0.0;
        const auto m = dom.measure();
        for (std::size_t v = 0; v < c.size(); ++v) num += std::pow(std::abs(c[v]), p) * m[v];
        for (std::size_t l = 0; l < gr.locations(); ++l) den += std::pow(gr.norm2_at(l), 0.5 * p) * w[l];
        if (!(den > 0.0)) return;  // constants carry no information
        ++used;
        if (num / den > best) {
            best = num / den;
            r.lhs = num;
            r.rhs = den;
        }
    };
    if (dom.is_grid()) {
        const double k = 2.0 * M_PI / dom.side();
        for (int a = 0; a < dom.dim(); ++a) {
            consider(ScalarField::from_function(domain, [&](std::size_t v) { return std::cos(k * dom.position(v, a)); }));
            consider(ScalarField::from_function(domain, [&](std::size_t v) { return std::sin(k * dom.position(v, a)); }));
        }
    }
    std::mt19937_64 rng(seed ^ 0x706f696eULL);
    std::normal_distribution<double> nd;
    PoissonSolver solver(domain);
    for (int s = 0; s < samples; ++s) {
        ScalarField g(domain);
        for (double& x : g.values()) x = nd(rng);
        if (s % 2 == 0) g = solver.solve(remove_mean(g), 1e-10);
        consider(g);
    }
    r.fitted_constant = best;
    r.pass = std::isfinite(best) && used > 0;
    add_grid_context(r, dom, p);
    r.set("samples", used);
    r.set("seed", seed);
    return r;
}

EstimateReport check_sobolev_trick(const ScalarField& f, const Ball& B, const std::vector<double>& deltas) {
    const Domain& dom = f.domain();
    const double N = dom.N();
    if (std::isinf(N)) throw ParameterError("the local Sobolev trick needs finite N");
    if (deltas.empty()) throw ParameterError("at least one delta is required");
    const auto m = dom.measure();
    const double R = B.radius;
    double A = 0.0, L1 = 0.0;
    for (std::size_t x : B.members) {
        A += f[x] * f[x] * m[x];
        L1 += std::abs(f[x]) * m[x];
    }
    auto gn = grad_norms(f);
    for (double& g : gn) g = R * R * g * g;
    const double G = sum_locations(dom, gn, B);
    const double mean_term = L1 * L1 / ball_measure(dom, B);
    EstimateReport r;
    r.name = "sobolev_trick";
    r.lhs = A;
    double best = 0.0;
    bool gradient_dominates = true;
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
        const double excess = A - delta * G;
        double c = 0.0;
        if (excess > 0.0) {
            gradient_dominates = false;
            c = mean_term > 0.0 ? excess / (std::pow(delta, -0.5 * N) * mean_term) : kInf;
        }
        std::ostringstream key;
        key << "C[delta=" << delta << "]";
        r.set(key.str(), c);
        if (c >= best) {
            best = c;
            r.rhs = delta * G + c * std::pow(delta, -0.5 * N) * mean_term;
        }
    }
    r.fitted_constant = best;
    r.pass = std::isfinite(best);
    add_grid_context(r, dom, 2.0);
    r.set("R", R);
    r.set("gradient_term", G);
    r.set("mean_term", mean_term);
    if (gradient_dominates) r.note = "gradient term dominates for every delta";
    return r;
}

EstimateReport check_harnack(const ScalarField& u, double p, std::size_t center, double r_in, double R,
                             const ScalarField& f, double q) {
    const Domain& dom = u.domain();
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
    if (std::isinf(dom.N())) throw ParameterError("the Harnack check needs finite N");
    if (!(r_in > 0.0 && R >= r_in)) throw ParameterError("the Harnack check needs 0 < r <= R");
    const double s = std::max(dom.N(), p);
    const Ball Br = ball(dom, center, r_in), BR = ball(dom, center, R);
    for (std::size_t x : BR.members)
        if (!(u[x] > 0.0)) throw ParameterError("the Harnack check needs u > 0 on the enclosing ball");
    double sup = -kInf, inf = kInf;
    for (std::size_t x : Br.members) {
        sup = std::max(sup, u[x]);
        inf = std::min(inf, u[x]);
    }
    const auto m = dom.measure();
    double tail = 0.0;
    if (std::isinf(q)) {
        double fmax = 0.0;
        for (std::size_t x : BR.members) fmax = std::max(fmax, std::abs(f[x]));
        tail = std::pow(r_in, p / (p - 1.0)) * std::pow(fmax, 1.0 / (p - 1.0));
    } else {
        if (!(q > s / p)) throw ParameterError("the Harnack check needs q > s/p");
        double avg = 0.0;
        for (std::size_t x : BR.members) avg += std::pow(std::abs(f[x]), q) * m[x];
        avg /= ball_measure(dom, BR);
        tail = std::pow(r_in, (p - s / q) / (p - 1.0)) * std::pow(R, s / (q * (p - 1.0))) *
               std::pow(avg, 1.0 / (q * (p - 1.0)));
    }
    EstimateReport r;
    r.name = "harnack";
    r.lhs = sup;
    r.rhs = inf + tail;
    finish_fit(r);
    add_grid_context(r, dom, p);
    r.set("s", s);
    r.set("q", q);
    r.set("r", r_in);
    r.set("R", R);
    r.set("quotient", sup / inf);
    r.set("source_term", tail);
    return r;
}

EstimateReport check_w22_pharmonic(const ScalarField& u, const RegParams& rp, std::size_t center, double R,
                                   double residual_tol) {
    const Domain& dom = u.domain();
    validate(rp);
    if (!(R > 0.0)) throw ParameterError("the W22 check needs R > 0");
    const Ball BR = ball(dom, center, R), Bh = ball(dom, center, 0.5 * R);
    const ScalarField lp = p_laplacian(u, rp);
    double in_ball = 0.0, global = 0.0;
    for (std::size_t x = 0; x < lp.size(); ++x) {
        global = std::max(global, std::abs(lp[x]));
        if (BR.contains(x)) in_ball = std::max(in_ball, std::abs(lp[x]));
    }
    if (in_ball > residual_tol * global) {
        std::ostringstream os;
        os << "u is not p-harmonic on the ball: max |Delta_p u| there is " << in_ball << " vs " << global
           << " globally";
        throw ParameterError(os.str());
    }
    const ScalarField lap = laplacian(u);
    const auto m = dom.measure();
    EstimateReport r;
    r.name = "w22_pharmonic";
    // Laplacian values at the rounding floor count as zero (at p = 2 Delta u vanishes identically on the ball).
    const double floor = 1e-12 * lp_norm(lap, kInf);
    for (std::size_t x : Bh.members)
        if (std::abs(lap[x]) > floor) r.lhs += lap[x] * lap[x] * m[x];
    auto gn = grad_norms(u);
    for (double& g : gn) g = (1.0 + 1.0 / (R * R)) * g * g;
    r.rhs = sum_locations(dom, gn, BR);
    finish_fit(r);
    add_grid_context(r, dom, rp.p);
    r.set("eps", rp.eps);
    r.set("R", R);
    r.set("ball_residual", global > 0.0 ? in_ball / global : 0.0);
    return r;
}

EstimateReport refinement_drift(const EstimateReport& coarse, const EstimateReport& fine, double limit) {
    EstimateReport r;
    r.name = coarse.name + ".drift";
    r.relation = "<";
    r.lhs = coarse.fitted_constant;
    r.rhs = fine.fitted_constant;
    const double a = std::abs(coarse.fitted_constant), b = std::abs(fine.fitted_constant);
    double drift = 1.0;
    if (a > 0.0 || b > 0.0) drift = std::min(a, b) > 0.0 ? std::max(a, b) / std::min(a, b) : kInf;
    if (!std::isfinite(a) || !std::isfinite(b)) drift = kInf;
    r.fitted_constant = drift;
    r.pass = drift < limit;
    r.set("limit", limit);
    r.set("n_coarse", coarse.get("n"));
    r.set("n_fine", fine.get("n"));
    return r;
}

std::vector<EstimateReport> estimate_suite(const DomainPtr& domain, double p, unsigned seed) {
    const Domain& dom = *domain;
    if (!dom.is_grid()) throw UnsupportedOperation("the estimate suite is grid only");
    const double L = dom.side();
    const std::size_t c0 = grid_point(dom, 0.5, 0.5);
    const double R = 0.4 * L;

    const ScalarField f = smooth_source(domain, seed);
    std::mt19937_64 rng(seed ^ 0x736f626fULL);
    std::normal_distribution<double> nd;

    const SolverConfig cfg = default_solver_config(p);
    const double eps = cfg.eps_schedule.empty() ? cfg.rp.eps : cfg.eps_schedule.back();
    const SolveRecord smooth = continuation(f, cfg);
    const ScalarField& u = smooth.u;

    std::vector<EstimateReport> out;

    {
        const double alpha = p - 2.0 > alpha_threshold(p, dom.N()) ? p - 2.0 : 0.0;
        RegParams rp{p, eps, kInf};
        if (alpha >= 0.0) {
            const auto gn = grad_norms(u);
            rp.M = std::max(1.0, 2.0 * *std::max_element(gn.begin(), gn.end()));
        }
        out.push_back(check_hessian_estimate(u, rp, alpha, cutoff(domain, c0, 0.5 * R, R)));
    }
    {
        const Ball b = p == 2.0 ? whole_domain(dom, c0) : ball(dom, c0, R);
        out.push_back(check_second_order_final(u, f, p, eps, b));
    }
    if (std::isfinite(dom.N())) out.push_back(check_gradient_bound(u, f, p, kInf, c0, 0.5 * R, R, 2.0));
    out.push_back(check_poincare_pp(domain, p, 32, seed));
    {
        ScalarField g(domain);
        for (double& x : g.values()) x = nd(rng);
        g = poisson_solve(remove_mean(g), 1e-10);
        if (std::isfinite(dom.N())) out.push_back(check_sobolev_trick(g, ball(dom, c0, R)));
    }

    const std::size_t sa = grid_point(dom, 0.1, 0.1);
    const std::size_t sb = grid_point(dom, 0.9, 0.9);
    if (std::isfinite(dom.N())) {
        const ScalarField fs = remove_mean(gaussian_bump(domain, sa, 0.05 * L));
        const SolveRecord sr = continuation(fs, cfg);
        const auto [mn, mx] = std::minmax_element(sr.u.values().begin(), sr.u.values().end());
        ScalarField pos = sr.u;
        pos += (*mx - *mn) - *mn;
        out.push_back(check_harnack(pos, p, c0, 0.1 * L, 0.3 * L, fs));
    }
    {
        const ScalarField fd = remove_mean(gaussian_bump(domain, sa, 0.05 * L) - gaussian_bump(domain, sb, 0.05 * L));
        const SolveRecord dr = continuation(fd, cfg);
        out.push_back(check_w22_pharmonic(dr.u, RegParams{p, eps, kInf}, c0, 0.3 * L));
    }
    for (auto& r : out) {
        r.set("seed", seed);
        r.set("solver_residual", smooth.residual);
    }
    return out;
}

}  // namespace pplap
