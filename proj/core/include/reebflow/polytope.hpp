#pragma once

#include "reebflow/circulation.hpp"

#include <string>
#include <vector>

namespace reebflow {

// normal · t + offset < 0 (strict) or <= 0
struct Inequality {
    std::vector<Scalar> normal;
    Scalar offset;
    bool strict = true;
    std::string vertex;  // saddle the row came from
    std::string edge;    // incident edge whose limit it constrains
};

struct HRep {
    int dim = 0;
    std::vector<Inequality> rows;
    std::vector<std::string> labels;  // coordinate names
    bool is_exact() const;
    bool contains(const std::vector<Scalar>& t) const;  // strictness respected
};

struct VRep {
    std::vector<std::vector<Scalar>> vertices;
    std::vector<std::vector<Scalar>> rays;
};

struct Feasibility {
    bool feasible = false;
    std::vector<Scalar> point;    // maximizer of the minimum slack
    Scalar slack;                 // meaningful when feasible and !unbounded_slack
    bool unbounded_slack = false;
};

struct Boundedness {
    bool bounded = true;
    std::vector<Scalar> direction;  // recession direction when unbounded
};

// Limits at every saddle strictly negative, in the space's coordinates.
HRep negative_system(const AffineCirculationSpace& space);

Feasibility feasibility(const HRep& h);

// Vertices and extreme rays of the closure; requires dim <= 6.
VRep enumerate_vertices(const HRep& h);

Boundedness boundedness(const HRep& h);

struct BalancedRegion {
    std::vector<std::string> saddles;
    std::vector<int> signs;  // +1 / -1 per saddle
    HRep system;
    Feasibility verdict;
};

// One region per sign pattern on the saddles (at most 20 saddles).
std::vector<BalancedRegion> balanced_regions(const AffineCirculationSpace& space);

// Per edge, the sum of ρ over all edges below it in the reachability order;
// a lower bound for λ⁺(e) on any totally negative c. Closed graphs only.
std::vector<Scalar> circulation_lower_bounds(const MeasuredReebGraph& g);

}  // namespace reebflow
