#pragma once

#include "reebflow/circulation.hpp"
#include "reebflow/refine.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reebflow {

// Plain directed multigraph for the sign-coboundary problem.
struct Digraph {
    std::size_t vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (tail, head), loops allowed
};

// Either a potential whose coboundary ξ(e) = η̂(head) - η̂(tail) has sign
// eps(e) on every edge, or a directed cycle of the graph with every edge
// reversed where eps = -1.
struct SignCoboundary {
    bool ok = false;
    std::vector<long long> potential;  // topological rank per vertex
    std::vector<long long> xi;         // per edge
    std::vector<std::size_t> cycle;    // edge indices along the cycle
};

SignCoboundary sign_coboundary(const Digraph& g, const std::vector<int>& eps);

struct CertificateEdge {
    std::string id;       // refined edge id
    std::string origin;   // edge of the input graph it came from
    Scalar lo, hi;        // height range
    int sign_f = 0;
    int sign_c = 0;
    int eps = 0;          // -sgn(f c)
    long long xi = 0;     // ∫_e f β
    Scalar density;       // β = density · df, constant on the edge
};

struct GraphCertificate {
    bool ok = false;
    RefinedGraph refined;
    std::vector<CertificateEdge> edges;
    std::vector<long long> potential;  // per refined vertex
    // One entry per fundamental cycle: the closed-form integral of f β.
    std::vector<double> cycle_integrals;
    double max_cycle_integral = 0.0;
    // Failure only: refined edge ids of the offending cycle.
    std::vector<std::string> cycle;
};

// Refines at f = 0 and c = 0, sets eps = -sgn(f c) per piece and looks for a
// sign coboundary. With a balanced c this always succeeds; a failure then is
// an internal fault and throws std::logic_error. `force` skips the balance
// precondition and returns failures instead of throwing.
GraphCertificate graph_certificate(const CirculationFunction& c, bool force = false);

}  // namespace reebflow
