#pragma once

#include "reebflow/circulation.hpp"
#include "reebflow/reeb_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reebflow {

// m_{i,e} = ∫_e f^i dμ for i = 0..order, per edge and summed.
struct MomentTable {
    unsigned order = 0;
    std::vector<std::string> edges;
    std::vector<std::vector<Scalar>> rows;  // rows[e][i]
    std::vector<Scalar> total;
};

MomentTable moment_table(const MeasuredReebGraph& g, unsigned order);
std::string moment_table_csv(const MomentTable& t);

// Relabeling-invariant summary: a colour-refinement signature of the directed
// graph, the moment table and the head limits listed in a canonical edge order.
struct OrbitInvariantBundle {
    std::string signature;
    MomentTable moments;
    std::vector<std::string> canonical_edges;
    std::vector<Scalar> head_limits;  // in canonical_edges order
};

OrbitInvariantBundle invariant_bundle(const CirculationFunction& c, unsigned order);

struct OrbitComparison {
    bool equivalent = false;
    // When equivalent: g1 index -> g2 index.
    std::vector<std::size_t> vertex_map;
    std::vector<std::size_t> edge_map;
    // When distinct: which invariant separates the two, e.g. "structure",
    // "height", "total_moment", "edge_moment", "circulation".
    std::string invariant;
    std::optional<unsigned> order;  // moment order of the witness
    std::string subject;            // g1 vertex/edge id of the witness
    std::string detail;
};

// Searches f-preserving directed isomorphisms matching per-edge moments up to
// `order` and head limits. Equality is exact for exact values, otherwise
// relative within tol. Equivalence therefore holds "up to order N".
OrbitComparison orbit_equivalent(const CirculationFunction& c1, const CirculationFunction& c2,
                                 unsigned order = 10, double tol = 1e-9);

// Adds `bump` (a density on [a, b]) to one branch of saddle v and subtracts
// it from the other. Both branches must span [a, b]. Throws if either
// density stops being positive.
MeasuredReebGraph move_density_between_branches(const MeasuredReebGraph& g, const std::string& saddle,
                                                const ScalarPoly& bump, const Scalar& a, const Scalar& b,
                                                int receiving_branch = 0);

}  // namespace reebflow
