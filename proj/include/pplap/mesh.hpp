#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pplap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DomainKind { PeriodicGrid, Circle, WeightedGraph };

std::string to_string(DomainKind kind);

/// One undirected graph edge. The gradient of a function lives on the edge,
/// oriented from `u` to `v`; `weight` is the edge measure used when pairing
/// edge quantities and `length` is the metric length.
struct GraphEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 1.0;
    double length = 1.0;
};

/// Synthetic curvature/dimension bounds attached to a domain. They never
/// enter the discrete operators, only the verification constants.
struct GeometryBounds {
    double K = 0.0;
    double N = 2.0;  ///< may be kInf
};

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

/// A finite metric-measure space: a flat periodic grid (d = 1 is the circle)
/// or a weighted graph. Immutable after construction.
///
/// Vertex ids on a grid are lexicographic with axis 0 fastest:
/// id = i0 + n*i1 + n*n*i2.
class Domain {
public:
    /// Flat d-torus of side L sampled with n points per axis. d = 1 yields a
    /// Circle. Defaults K = 0, N = max(d, 2).
    static DomainPtr torus(int d, int n, double L);
    static DomainPtr torus(int d, int n, double L, GeometryBounds bounds);
    static DomainPtr circle(int n, double L) { return torus(1, n, L); }

    /// Weighted graph; bounds default to K = 0, N = 2.
    static DomainPtr graph(std::vector<double> vertex_measure, std::vector<GraphEdge> edges,
                           GeometryBounds bounds = {});

    DomainKind kind() const noexcept { return kind_; }
    bool is_grid() const noexcept { return kind_ != DomainKind::WeightedGraph; }

    std::size_t num_vertices() const noexcept { return measure_.size(); }
    /// Spatial dimension of a grid; 1 for graphs (scalar per-edge gradient).
    int dim() const noexcept { return dim_; }
    int points_per_axis() const noexcept { return n_; }
    double side() const noexcept { return side_; }
    double spacing() const noexcept { return h_; }

    std::span<const double> measure() const noexcept { return measure_; }
    double total_measure() const noexcept { return total_measure_; }

    double K() const noexcept { return bounds_.K; }
    double K_minus() const noexcept { return bounds_.K < 0.0 ? -bounds_.K : 0.0; }
    double N() const noexcept { return bounds_.N; }
    GeometryBounds bounds() const noexcept { return bounds_; }
    double diameter() const noexcept { return diameter_; }

    /// Same domain with different synthetic bounds.
    DomainPtr with_bounds(GeometryBounds bounds) const;

    /// Periodic neighbour of a grid vertex: one step (+1 or -1) along `axis`.
    std::size_t step(std::size_t v, int axis, int dir) const noexcept {
        return dir > 0 ? plus_[static_cast<std::size_t>(axis) * num_vertices() + v]
                       : minus_[static_cast<std::size_t>(axis) * num_vertices() + v];
    }
    /// Integer grid coordinate of vertex v along axis.
    int coord(std::size_t v, int axis) const noexcept;
    /// Physical coordinate (i * h) of vertex v along axis.
    double position(std::size_t v, int axis) const noexcept { return coord(v, axis) * h_; }

    std::span<const GraphEdge> edges() const noexcept { return edges_; }
    /// Edge ids incident to a graph vertex.
    std::span<const std::size_t> incident(std::size_t v) const noexcept {
        return {incident_ids_.data() + incident_offsets_[v], incident_offsets_[v + 1] - incident_offsets_[v]};
    }

    /// Locations where vector fields live: vertices on grids, edges on graphs.
    std::size_t num_vector_locations() const noexcept {
        return is_grid() ? num_vertices() : edges_.size();
    }
    /// Components per vector location: d on grids, 1 on graphs.
    int vector_components() const noexcept { return is_grid() ? dim_ : 1; }
    /// Measure attached to each vector location (vertex measure or edge weight).
    std::span<const double> vector_weights() const noexcept {
        return is_grid() ? std::span<const double>(measure_) : std::span<const double>(edge_weights_);
    }

    /// Torus metric on grids, shortest path on graphs.
    double distance(std::size_t a, std::size_t b) const;
    /// Distances from `source` to every vertex.
    std::vector<double> distances_from(std::size_t source) const;

    std::string describe() const;

private:
    Domain() = default;
    void build_grid_tables();
    void build_graph_tables();
    double torus_distance(std::size_t a, std::size_t b) const noexcept;

    DomainKind kind_ = DomainKind::PeriodicGrid;
    int dim_ = 1;
    int n_ = 0;
    double side_ = 0.0;
    double h_ = 0.0;
    std::vector<double> measure_;
    double total_measure_ = 0.0;
    GeometryBounds bounds_;
    double diameter_ = 0.0;

    std::vector<std::size_t> plus_;
    std::vector<std::size_t> minus_;

    std::vector<GraphEdge> edges_;
    std::vector<double> edge_weights_;
    std::vector<std::size_t> incident_offsets_;
    std::vector<std::size_t> incident_ids_;
};

/// Closed metric ball {v : dist(center, v) <= radius}.
struct Ball {
    std::size_t center = 0;
    double radius = 0.0;
    std::vector<std::size_t> members;  ///< sorted vertex ids
    std::vector<char> mask;            ///< mask[v] != 0 iff v is a member

    bool contains(std::size_t v) const noexcept { return mask[v] != 0; }
    std::size_t size() const noexcept { return members.size(); }
};

Ball ball(const Domain& domain, std::size_t center, double radius);
/// The whole domain as a ball of radius diam.
Ball whole_domain(const Domain& domain, std::size_t center = 0);
double ball_measure(const Domain& domain, const Ball& b);

/// Parse a graph spec file. Records, one per line ('#' starts a comment):
///   vertex <id> <measure>
///   edge <u> <v> <weight> [<length>]
///   K <value> | N <value|inf>
/// Vertex ids must be 0..n-1 without gaps.
DomainPtr read_graph_spec(const std::string& path);
DomainPtr parse_graph_spec(const std::string& text);

}  // namespace pplap
