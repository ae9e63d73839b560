#pragma once

#include "reebflow/circulation.hpp"
#include "reebflow/reeb_graph.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace reebflow::gen {

using Rng = std::mt19937_64;

// Positive density on (lo, hi) with ∫ f dμ = w, exact. A constant when its
// sign allows, else a positive combination of (hi-f)/L and (f-lo)/L, else
// 1 plus a polynomial bump patch on one side of f = 0.
// Throws std::invalid_argument if no positive density can reach w.
EdgeMeasure realize_weight(const Scalar& lo, const Scalar& hi, const Scalar& w);

enum class Family { Tree, Closed, Bordered };
const char* to_string(Family f);
Family parse_family(const std::string& s);

struct FamilyParams {
    Family family = Family::Closed;
    int genus = 1;          // handles (ignored for Tree)
    int boundary = 0;       // Bordered only, >= 1
    int max_side_leaves = 2;
};

// Random graph with exact rational heights and positive polynomial densities.
// Closed graphs are shifted in height so that ρ(Γ) = 0 exactly. The graph's
// surface info records genus and boundary count.
MeasuredReebGraph random_graph(Rng& rng, const FamilyParams& p);

// Closed graph together with a totally negative circulation function whose
// saddle limits were drawn first; densities are realised to match.
// Rejection sampled over skeletons, 1000 attempts; from genus 5 on this
// usually runs out and throws std::runtime_error.
struct SteadyInstance {
    MeasuredReebGraph graph;
    std::vector<Scalar> head_limits;
};
SteadyInstance random_totally_negative(Rng& rng, int genus, int max_side_leaves = 2);

// Torus graph: Min(-2) -e1-> D(-1) -e2,e3-> E(1) -e4-> Max(2), edge weights
// a1..a4 (sum 0). Coordinate: the limit at D along e2.
MeasuredReebGraph torus_graph(const std::vector<Scalar>& a);

// Genus-2 graph with weights (-1,-1,0,0,0,1,1) on e1..e7 and coordinates the
// limits at G along e3 and e4.
MeasuredReebGraph pretzel_graph();

// Disk: Min(1) -> S(2) -> Max(3), S -> Boundary(4), all weights positive.
MeasuredReebGraph positive_disk_graph();

// Min(-3) -> S(-1) -> two Max(2); density 1 on the trunk, 4/3 on the branches.
MeasuredReebGraph split_graph();

// Annulus: Boundary(0) -> Boundary(1), uniform density, no saddle.
MeasuredReebGraph annulus_graph();

// Torus shape with the double edge entirely in f > 0: a circulation that is
// positive on one branch and negative on the other has a sign cycle.
struct WitnessInstance {
    MeasuredReebGraph graph;
    std::vector<Scalar> head_limits;
};
WitnessInstance unbalanced_witness();

}  // namespace reebflow::gen
