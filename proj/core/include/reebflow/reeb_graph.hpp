#pragma once

#include "reebflow/measure.hpp"
#include "reebflow/scalar.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reebflow {

// Marker vertices only appear in refined graphs (2-valent subdivision points).
enum class VertexRole { Min, Max, Saddle, Boundary, Marker };

const char* to_string(VertexRole r);
VertexRole parse_role(const std::string& s);

struct Vertex {
    std::string id;
    VertexRole role = VertexRole::Saddle;
    Scalar f;
};

struct Edge {
    std::string id;
    std::string tail;
    std::string head;
    EdgeMeasure measure;
    // Overrides the weight ∫ f dμ computed from the measure.
    std::optional<Scalar> weight;
};

struct SurfaceInfo {
    std::optional<int> genus;
    std::optional<int> boundary_components;
};

// Names the limit of a circulation function at `vertex` along `edge`.
struct LimitRef {
    std::string vertex;
    std::string edge;
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Compares ids so that "e2" < "e10".
bool natural_less(const std::string& a, const std::string& b);

// Immutable measured Reeb graph. Copies share the underlying data. Vertices
// and edges are stored sorted by id (natural order); all index-based
// accessors refer to that order.
class MeasuredReebGraph {
public:
    MeasuredReebGraph();
    MeasuredReebGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, SurfaceInfo surface = {},
                      std::vector<LimitRef> coordinates = {}, double tol = 1e-12);

    std::size_t vertex_count() const { return d_->vertices.size(); }
    std::size_t edge_count() const { return d_->edges.size(); }
    const Vertex& vertex(std::size_t v) const { return d_->vertices.at(v); }
    const Edge& edge(std::size_t e) const { return d_->edges.at(e); }
    const std::vector<Vertex>& vertices() const { return d_->vertices; }
    const std::vector<Edge>& edges() const { return d_->edges; }

    // npos when the endpoint id does not resolve
    std::size_t tail(std::size_t e) const { return d_->tail.at(e); }
    std::size_t head(std::size_t e) const { return d_->head.at(e); }
    const std::vector<std::size_t>& in_edges(std::size_t v) const { return d_->in.at(v); }
    const std::vector<std::size_t>& out_edges(std::size_t v) const { return d_->out.at(v); }

    std::optional<std::size_t> find_vertex(const std::string& id) const;
    std::optional<std::size_t> find_edge(const std::string& id) const;
    std::size_t vertex_index(const std::string& id) const;
    std::size_t edge_index(const std::string& id) const;

    Interval domain(std::size_t e) const;
    const SurfaceInfo& surface() const { return d_->surface; }
    const std::vector<LimitRef>& coordinates() const { return d_->coordinates; }
    double tolerance() const { return d_->tol; }

    std::size_t boundary_count() const;
    bool has_boundary() const { return boundary_count() > 0; }
    std::vector<std::size_t> saddles() const;

    // All heights, measures and weights exact.
    bool is_exact() const;

    MeasuredReebGraph with_weights(const std::vector<Scalar>& weights) const;
    MeasuredReebGraph with_coordinates(std::vector<LimitRef> coords) const;
    MeasuredReebGraph with_surface(SurfaceInfo s) const;
    MeasuredReebGraph as_float() const;

private:
    struct Data {
        std::vector<Vertex> vertices;
        std::vector<Edge> edges;
        SurfaceInfo surface;
        std::vector<LimitRef> coordinates;
        double tol = 1e-12;
        std::vector<std::size_t> tail, head;
        std::vector<std::vector<std::size_t>> in, out;
        std::map<std::string, std::size_t> vindex, eindex;
    };
    std::shared_ptr<const Data> d_;
};

struct Violation {
    std::string kind;
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(const std::string& kind) const;
};

ValidationReport validate_graph(const MeasuredReebGraph& g);

class InvalidGraphError : public std::runtime_error {
public:
    explicit InvalidGraphError(ValidationReport r);
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

void require_valid(const MeasuredReebGraph& g);

struct HomologyDims {
    int b1 = 0;
    int relative_dim = 0;
    int boundary_count = 0;
};

HomologyDims homology_dimensions(const MeasuredReebGraph& g);

struct TrunkBranches {
    std::size_t trunk = npos;
    std::array<std::size_t, 2> branches{npos, npos};
};

TrunkBranches trunk_and_branches(const MeasuredReebGraph& g, std::size_t v);
TrunkBranches trunk_and_branches(const MeasuredReebGraph& g, const std::string& v);

// Graph-level measure queries.
Scalar edge_moment(const MeasuredReebGraph& g, std::size_t e, unsigned i);
Scalar edge_weight(const MeasuredReebGraph& g, std::size_t e);
std::vector<Scalar> edge_weights(const MeasuredReebGraph& g);

struct MassAndWeight {
    Scalar mass;
    Scalar weight;
};
MassAndWeight total_mass_and_weight(const MeasuredReebGraph& g);

}  // namespace reebflow
