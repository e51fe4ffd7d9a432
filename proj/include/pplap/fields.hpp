#pragma once

#include "pplap/mesh.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pplap {

/// One value per vertex.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(DomainPtr domain, double value = 0.0);
    ScalarField(DomainPtr domain, std::vector<double> values);

    /// Sample fn(vertex id) at every vertex.
    static ScalarField from_function(DomainPtr domain, const std::function<double(std::size_t)>& fn);

    const DomainPtr& domain_ptr() const noexcept { return domain_; }
    const Domain& domain() const noexcept { return *domain_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t v) noexcept { return values_[v]; }
    double operator[](std::size_t v) const noexcept { return values_[v]; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    ScalarField& operator+=(double c);
    ScalarField& operator-=(double c) { return *this += -c; }

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
ScalarField operator-(ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Gradient-type field: d components per vertex on grids, one signed value per
/// edge on graphs (oriented u -> v). Layout: values[location * components + c].
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(DomainPtr domain);
    VectorField(DomainPtr domain, std::vector<double> values);

    const DomainPtr& domain_ptr() const noexcept { return domain_; }
    const Domain& domain() const noexcept { return *domain_; }
    std::size_t locations() const noexcept { return domain_->num_vector_locations(); }
    int components() const noexcept { return domain_->vector_components(); }

    double& at(std::size_t loc, int c) noexcept { return values_[loc * components() + c]; }
    double at(std::size_t loc, int c) const noexcept { return values_[loc * components() + c]; }
    std::span<const double> at(std::size_t loc) const noexcept {
        return {values_.data() + loc * components(), static_cast<std::size_t>(components())};
    }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Euclidean norm at a location.
    double norm_at(std::size_t loc) const noexcept;
    double norm2_at(std::size_t loc) const noexcept;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Symmetric d x d matrix per grid vertex, row-major.
class HessianField {
public:
    HessianField() = default;
    explicit HessianField(DomainPtr domain);

    const Domain& domain() const noexcept { return *domain_; }
    const DomainPtr& domain_ptr() const noexcept { return domain_; }
    int dim() const noexcept { return domain_->dim(); }
    std::size_t size() const noexcept { return domain_->num_vertices(); }

    double& at(std::size_t v, int i, int j) noexcept { return values_[(v * dim() + i) * dim() + j]; }
    double at(std::size_t v, int i, int j) const noexcept { return values_[(v * dim() + i) * dim() + j]; }

    /// Trace at v, summed in axis order.
    double trace_at(std::size_t v) const noexcept;
    /// Hilbert-Schmidt norm squared at v.
    double hs2_at(std::size_t v) const noexcept;
    /// H(a, b) at v for d-vectors a, b.
    double bilinear_at(std::size_t v, std::span<const double> a, std::span<const double> b) const noexcept;

    const std::vector<double>& values() const noexcept { return values_; }

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

}  // namespace pplap
