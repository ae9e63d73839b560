#pragma once

#include "reebflow/measure.hpp"
#include "reebflow/reeb_graph.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reebflow {

using Point3 = std::array<double, 3>;
using Tri = std::array<std::size_t, 3>;

class MeshError : public std::runtime_error {
public:
    MeshError(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
    // "non-manifold", "disconnected", "zero-area", "non-orientable",
    // "boundary", "non-simple-morse", "format"
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Validated triangulated surface with a per-vertex scalar F.
class Mesh {
public:
    // Throws MeshError when the input is not a connected orientable
    // 2-manifold (with boundary) with positive triangle areas.
    Mesh(std::vector<Point3> xyz, std::vector<double> F, std::vector<Tri> tris, SurfaceInfo declared = {});

    std::size_t vertex_count() const { return xyz_.size(); }
    std::size_t triangle_count() const { return tris_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Point3>& positions() const { return xyz_; }
    const std::vector<double>& values() const { return F_; }
    const std::vector<Tri>& triangles() const { return tris_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }  // (u < v)
    std::size_t edge_index(std::size_t u, std::size_t v) const;  // npos if absent
    const std::vector<std::size_t>& edge_triangles(std::size_t e) const { return edge_tris_[e]; }
    const std::vector<std::size_t>& vertex_triangles(std::size_t v) const { return vertex_tris_[v]; }
    // Boundary loops as vertex cycles.
    const std::vector<std::vector<std::size_t>>& boundary_loops() const { return loops_; }
    // Loop index per vertex, npos for interior vertices.
    std::size_t loop_of(std::size_t v) const { return loop_of_[v]; }
    const SurfaceInfo& declared() const { return declared_; }

    double triangle_area(std::size_t t) const { return area_[t]; }
    double area() const;
    int euler_characteristic() const;
    // Genus from χ = 2 - 2κ - k.
    int genus() const;

    Mesh with_values(std::vector<double> F) const;
    Mesh with_declared(SurfaceInfo s) const;

private:
    std::vector<Point3> xyz_;
    std::vector<double> F_;
    std::vector<Tri> tris_;
    SurfaceInfo declared_;
    std::vector<double> area_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_id_;
    std::vector<std::vector<std::size_t>> edge_tris_, vertex_tris_;
    std::vector<std::vector<std::size_t>> loops_;
    std::vector<std::size_t> loop_of_;
};

// OFF (a 4th vertex column is taken as F, otherwise F = z) or the JSON
// schema {"vertices":[{"id","xyz","F"}],"triangles":[[i,j,k]]}.
Mesh load_mesh(const std::string& path);
Mesh read_off(std::istream& in);
Mesh read_mesh_json(const std::string& text);
std::string write_off(const Mesh& m);

enum class CriticalRole { Regular, Min, Max, Saddle };
const char* to_string(CriticalRole r);

struct CriticalPoint {
    std::size_t vertex = 0;
    CriticalRole role = CriticalRole::Regular;
};

// Simulation of simplicity: vertices ordered by (F, index); every boundary
// loop is collapsed to one rank. Boundary loops must have constant F and no
// critical point, otherwise MeshError("boundary").
std::vector<std::size_t> vertex_ranks(const Mesh& m);

// Lower-link classification of interior vertices. Monkey saddles raise
// MeshError("non-simple-morse").
std::vector<CriticalPoint> classify_critical(const Mesh& m);

struct ExtractedEdge {
    std::size_t tail = 0, head = 0;  // graph vertex indices
    // Clipped triangle pieces: (triangle, F range inside this edge).
    std::vector<std::pair<std::size_t, std::array<double, 2>>> pieces;
    double flat_area = 0.0;  // flat boundary triangles credited to this edge
};

struct SaddleSamples {
    std::string saddle;                 // graph vertex id
    std::array<std::string, 3> edges;   // trunk, branch, branch
    std::array<LogFitSamples, 3> samples;
};

struct ExtractionResult {
    MeasuredReebGraph graph;
    // Graph vertex index -> mesh vertex (critical point) or boundary loop.
    std::vector<std::size_t> node_vertex;
    std::vector<std::size_t> node_loop;
    // Graph edge index (graph order) -> pieces.
    std::vector<ExtractedEdge> edges;
    std::vector<SaddleSamples> diagnostics;
};

struct ExtractOptions {
    int subsamples = 3;        // extra table points between consecutive events
    double fit_window = 0.5;   // saddle diagnostics use |f - f(v)| < window * (shortest incident edge)
};

ExtractionResult extract_reeb(const Mesh& m, const ExtractOptions& opt = {});

// Fits log coefficients from an extraction's saddle diagnostics.
std::vector<LogFit> saddle_log_fits(const ExtractionResult& r);

struct CompatibilityReport {
    struct Check {
        std::string name;
        bool passed = false;
        std::string detail;
    };
    std::vector<Check> checks;
    bool passed() const;
};

// Genus from χ against b1(Γ), boundary vertices against loops, total mass
// against area (relative tolerance), and any declared genus / boundary count.
CompatibilityReport compatibility_check(const MeasuredReebGraph& g, const Mesh& m, double rtol = 1e-6);

// Discrete 1-form: value on each mesh edge oriented from the smaller to the
// larger vertex index; the opposite orientation carries the negative.
using OneForm = std::vector<double>;

OneForm exact_one_form(const Mesh& m, const std::vector<double>& potential);
// Value on (u, v) given by `integral(u, v)`, which must be antisymmetric.
OneForm one_form_from(const Mesh& m, const std::function<double(std::size_t, std::size_t)>& integral);

struct EdgeCirculation {
    std::string edge;
    std::vector<double> levels;
    std::vector<double> values;       // ∮ over the level cycle(s) of this edge
    std::vector<double> head_estimates;  // per level, value + curl above it
    double head_limit = 0.0;
    double tail_limit = 0.0;
    double curl = 0.0;                 // ∫ dα over the edge's region
};

struct PushforwardCirculation {
    std::vector<EdgeCirculation> edges;  // graph edge order
    std::vector<Scalar> head_limits;
    double kirchhoff_residual = 0.0;     // max over saddles
    double scale = 0.0;                  // max |head limit|, for relative checks
};

PushforwardCirculation pushforward_circulation(const Mesh& m, const OneForm& form, const ExtractionResult& r,
                                               int levels_per_edge = 16);

// Test and demo surfaces.
// Torus with axis z, F = x + tilt * z.
Mesh make_torus(int n_major, int n_minor, double R = 2.0, double r = 1.0, double tilt = 0.0);
// Octahedron subdivided `levels` times and projected to the unit sphere, F = z + tilt * x.
Mesh make_sphere(int levels, double tilt = 0.0);
// Unit disk (polar grid), F = r² + A(1 - r²)² exp(-|p - (0.5, 0)|²/σ²), constant on the rim.
Mesh make_bump_disk(int rings, int sectors, double A = 1.5, double sigma = 0.25);
// Genus-2 surface: a plate with two holes, doubled and glued along all
// boundaries, F = x + tilt_y * y + tilt_z * z.
Mesh make_double_plate(int nx, int ny, double tilt_y = 1e-3, double tilt_z = 1e-4);

}  // namespace reebflow
