#include "pplap/mesh.hpp"

#include "pplap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace pplap {

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::PeriodicGrid: return "torus";
        case DomainKind::Circle: return "circle";
        case DomainKind::WeightedGraph: return "graph";
    }
    return "unknown";
}

DomainPtr Domain::torus(int d, int n, double L) {
    return torus(d, n, L, GeometryBounds{0.0, static_cast<double>(std::max(d, 2))});
}

DomainPtr Domain::torus(int d, int n, double L, GeometryBounds bounds) {
    if (d < 1 || d > 3) throw ParameterError("torus dimension must be 1, 2 or 3, got " + std::to_string(d));
    if (n < 4) throw ParameterError("torus needs at least 4 points per axis, got " + std::to_string(n));
    if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("torus side length must be positive and finite");
    if (!(bounds.N >= 2.0)) throw ParameterError("dimension bound N must be >= 2");

    std::shared_ptr<Domain> dom(new Domain());
    dom->kind_ = d == 1 ? DomainKind::Circle : DomainKind::PeriodicGrid;
    dom->dim_ = d;
    dom->n_ = n;
    dom->side_ = L;
    dom->h_ = L / n;
    std::size_t nv = 1;
    for (int i = 0; i < d; ++i) nv *= static_cast<std::size_t>(n);
    dom->measure_.assign(nv, std::pow(dom->h_, d));
    dom->total_measure_ = std::pow(L, d);
    dom->bounds_ = bounds;
    dom->diameter_ = 0.5 * L * std::sqrt(static_cast<double>(d));
    dom->build_grid_tables();
    return dom;
}

DomainPtr Domain::graph(std::vector<double> vertex_measure, std::vector<GraphEdge> edges, GeometryBounds bounds) {
    if (vertex_measure.empty()) throw ParameterError("graph needs at least one vertex");
    for (double m : vertex_measure) {
        if (!(m > 0.0) || !std::isfinite(m)) throw ParameterError("vertex measures must be positive and finite");
    }
    for (const auto& e : edges) {
        if (e.u >= vertex_measure.size() || e.v >= vertex_measure.size())
            throw ParameterError("edge endpoint out of range");
        if (e.u == e.v) throw ParameterError("self loops are not allowed");
        if (!(e.weight > 0.0) || !(e.length > 0.0)) throw ParameterError("edge weight and length must be positive");
    }
    if (!(bounds.N >= 2.0)) throw ParameterError("dimension bound N must be >= 2");

    std::shared_ptr<Domain> dom(new Domain());
    dom->kind_ = DomainKind::WeightedGraph;
    dom->dim_ = 1;
    dom->measure_ = std::move(vertex_measure);
    dom->total_measure_ = std::accumulate(dom->measure_.begin(), dom->measure_.end(), 0.0);
    dom->edges_ = std::move(edges);
    dom->bounds_ = bounds;
    dom->build_graph_tables();

    double diam = 0.0;
    for (std::size_t s = 0; s < dom->num_vertices(); ++s) {
        for (double dist : dom->distances_from(s)) {
            if (!std::isfinite(dist)) throw ParameterError("graph must be connected");
            diam = std::max(diam, dist);
        }
    }
    dom->diameter_ = diam > 0.0 ? diam : 1.0;
    return dom;
}

DomainPtr Domain::with_bounds(GeometryBounds bounds) const {
    if (!(bounds.N >= 2.0)) throw ParameterError("dimension bound N must be >= 2");
    auto copy = std::shared_ptr<Domain>(new Domain(*this));
    copy->bounds_ = bounds;
    return copy;
}

void Domain::build_grid_tables() {
    const std::size_t nv = num_vertices();
    plus_.resize(nv * dim_);
    minus_.resize(nv * dim_);
    std::size_t stride = 1;
    for (int axis = 0; axis < dim_; ++axis) {
        for (std::size_t v = 0; v < nv; ++v) {
            const auto i = static_cast<int>((v / stride) % n_);
            const std::size_t base = v - static_cast<std::size_t>(i) * stride;
            plus_[axis * nv + v] = base + static_cast<std::size_t>((i + 1) % n_) * stride;
            minus_[axis * nv + v] = base + static_cast<std::size_t>((i + n_ - 1) % n_) * stride;
        }
        stride *= static_cast<std::size_t>(n_);
    }
}

void Domain::build_graph_tables() {
    const std::size_t nv = num_vertices();
    edge_weights_.resize(edges_.size());
    std::vector<std::size_t> degree(nv, 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_weights_[e] = edges_[e].weight;
        ++degree[edges_[e].u];
        ++degree[edges_[e].v];
    }
    incident_offsets_.assign(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) incident_offsets_[v + 1] = incident_offsets_[v] + degree[v];
    incident_ids_.resize(incident_offsets_.back());
    std::vector<std::size_t> fill(incident_offsets_.begin(), incident_offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        incident_ids_[fill[edges_[e].u]++] = e;
        incident_ids_[fill[edges_[e].v]++] = e;
    }
}

int Domain::coord(std::size_t v, int axis) const noexcept {
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(n_);
    return static_cast<int>((v / stride) % n_);
}

double Domain::torus_distance(std::size_t a, std::size_t b) const noexcept {
    double sum = 0.0;
    for (int axis = 0; axis < dim_; ++axis) {
        int di = std::abs(coord(a, axis) - coord(b, axis));
        di = std::min(di, n_ - di);
        const double d = di * h_;
        sum += d * d;
    }
    return std::sqrt(sum);
}

double Domain::distance(std::size_t a, std::size_t b) const {
    if (is_grid()) return torus_distance(a, b);
    return distances_from(a)[b];
}

std::vector<double> Domain::distances_from(std::size_t source) const {
    const std::size_t nv = num_vertices();
    std::vector<double> dist(nv, kInf);
    if (is_grid()) {
        for (std::size_t v = 0; v < nv; ++v) dist[v] = torus_distance(source, v);
        return dist;
    }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        for (std::size_t e : incident(v)) {
            const auto& edge = edges_[e];
            const std::size_t w = edge.u == v ? edge.v : edge.u;
            const double nd = d + edge.length;
            if (nd < dist[w]) {
                dist[w] = nd;
                queue.emplace(nd, w);
            }
        }
    }
    return dist;
}

std::string Domain::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    if (is_grid()) {
        os << "(d=" << dim_ << ", n=" << n_ << ", L=" << side_ << ")";
    } else {
        os << "(vertices=" << num_vertices() << ", edges=" << edges_.size() << ")";
    }
    return os.str();
}

Ball ball(const Domain& domain, std::size_t center, double radius) {
    if (!(radius >= 0.0)) throw ParameterError("ball radius must be non-negative");
    if (center >= domain.num_vertices()) throw ParameterError("ball center out of range");
    Ball b;
    b.center = center;
    b.radius = radius;
    b.mask.assign(domain.num_vertices(), 0);
    const auto dist = domain.distances_from(center);
    // Relative slack so that radius = diam (computed in closed form) captures every vertex.
    const double slack = 1e-12 * std::max(1.0, radius);
    for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] <= radius + slack) {
            b.members.push_back(v);
            b.mask[v] = 1;
        }
    }
    return b;
}

Ball whole_domain(const Domain& domain, std::size_t center) {
    return ball(domain, center, domain.diameter());
}

double ball_measure(const Domain& domain, const Ball& b) {
    double total = 0.0;
    const auto m = domain.measure();
    for (std::size_t v : b.members) total += m[v];
    return total;
}

DomainPtr parse_graph_spec(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::pair<std::size_t, double>> vertices;
    std::vector<GraphEdge> edges;
    GeometryBounds bounds;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "vertex") {
            long long id = -1;
            double m = 0.0;
            if (!(ls >> id >> m) || id < 0) throw ConfigError("expected 'vertex <id> <measure>'", lineno, "vertex");
            vertices.emplace_back(static_cast<std::size_t>(id), m);
        } else if (tag == "edge") {
            long long u = -1, v = -1;
            GraphEdge e;
            if (!(ls >> u >> v >> e.weight) || u < 0 || v < 0)
                throw ConfigError("expected 'edge <u> <v> <weight> [<length>]'", lineno, "edge");
            if (!(ls >> e.length)) e.length = 1.0;
            e.u = static_cast<std::size_t>(u);
            e.v = static_cast<std::size_t>(v);
            edges.push_back(e);
        } else if (tag == "K" || tag == "N") {
            std::string value;
            if (!(ls >> value)) throw ConfigError("missing value", lineno, tag);
            double x = 0.0;
            if (value == "inf") {
                x = kInf;
            } else {
                try {
                    x = std::stod(value);
                } catch (const std::exception&) {
                    throw ConfigError("not a number: " + value, lineno, tag);
                }
            }
            (tag == "K" ? bounds.K : bounds.N) = x;
        } else {
            throw ConfigError("unknown record '" + tag + "'", lineno, tag);
        }
        std::string extra;
        if (ls >> extra) throw ConfigError("trailing token '" + extra + "'", lineno, tag);
    }
    std::sort(vertices.begin(), vertices.end());
    std::vector<double> measure(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].first != i) throw ConfigError("vertex ids must be 0..n-1 without gaps or repeats");
        measure[i] = vertices[i].second;
    }
    try {
        return Domain::graph(std::move(measure), std::move(edges), bounds);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

DomainPtr read_graph_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph spec '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_graph_spec(buffer.str());
}

}  // namespace pplap
