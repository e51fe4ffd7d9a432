#include "pplap/fields.hpp"

#include "pplap/errors.hpp"

#include <cmath>

namespace pplap {

namespace {

void require_same(const DomainPtr& a, const DomainPtr& b) {
    if (a.get() != b.get() && (a->num_vertices() != b->num_vertices() ||
                               a->num_vector_locations() != b->num_vector_locations()))
        throw ParameterError("fields live on different domains");
}

}  // namespace

ScalarField::ScalarField(DomainPtr domain, double value)
    : domain_(std::move(domain)), values_(domain_->num_vertices(), value) {}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_->num_vertices())
        throw ParameterError("scalar field size " + std::to_string(values_.size()) + " does not match " +
                             std::to_string(domain_->num_vertices()) + " vertices");
}

ScalarField ScalarField::from_function(DomainPtr domain, const std::function<double(std::size_t)>& fn) {
    ScalarField f(std::move(domain));
    for (std::size_t v = 0; v < f.size(); ++v) f[v] = fn(v);
    return f;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same(domain_, o.domain_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same(domain_, o.domain_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& x : values_) x *= s;
    return *this;
}

ScalarField& ScalarField::operator+=(double c) {
    for (double& x : values_) x += c;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

VectorField::VectorField(DomainPtr domain)
    : domain_(std::move(domain)),
      values_(domain_->num_vector_locations() * static_cast<std::size_t>(domain_->vector_components()), 0.0) {}

VectorField::VectorField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_->num_vector_locations() * static_cast<std::size_t>(domain_->vector_components()))
        throw ParameterError("vector field size does not match domain");
}

double VectorField::norm2_at(std::size_t loc) const noexcept {
    double s = 0.0;
    for (double x : at(loc)) s += x * x;
    return s;
}

double VectorField::norm_at(std::size_t loc) const noexcept { return std::sqrt(norm2_at(loc)); }

VectorField& VectorField::operator+=(const VectorField& o) {
    require_same(domain_, o.domain_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    require_same(domain_, o.domain_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (double& x : values_) x *= s;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

HessianField::HessianField(DomainPtr domain) : domain_(std::move(domain)) {
    if (!domain_->is_grid()) throw UnsupportedOperation("Hessian fields exist only on grid domains");
    const auto d = static_cast<std::size_t>(domain_->dim());
    values_.assign(domain_->num_vertices() * d * d, 0.0);
}

double HessianField::trace_at(std::size_t v) const noexcept {
    double t = 0.0;
    for (int i = 0; i < dim(); ++i) t += at(v, i, i);
    return t;
}

double HessianField::hs2_at(std::size_t v) const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) s += at(v, i, j) * at(v, i, j);
    return s;
}

double HessianField::bilinear_at(std::size_t v, std::span<const double> a, std::span<const double> b) const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) s += a[i] * at(v, i, j) * b[j];
    return s;
}

}  // namespace pplap
