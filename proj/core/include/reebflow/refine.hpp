#pragma once

#include "reebflow/circulation.hpp"
#include "reebflow/reeb_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reebflow {

struct RefinedGraph {
    MeasuredReebGraph graph;
    std::vector<std::string> origin;   // original edge id, per refined edge index
    std::vector<std::string> markers;  // ids of inserted marker vertices
    std::optional<CirculationFunction> circulation;  // c carried over to the pieces
};

// Subdivides every edge at interior points where f = 0 and, when c is given,
// where c = 0, so that f and c have constant sign on each open piece.
RefinedGraph refine_at_zeros(const MeasuredReebGraph& g, const std::optional<CirculationFunction>& c = std::nullopt);

// Removes marker vertices and glues the pieces back together.
MeasuredReebGraph merge_markers(const RefinedGraph& r);

}  // namespace reebflow
