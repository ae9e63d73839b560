#pragma once

#include "reebflow/reeb_graph.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace reebflow {

// A graph antiderivative of ρ, stored as the limit λ⁺(e) at each edge head.
class CirculationFunction {
public:
    CirculationFunction(MeasuredReebGraph g, std::vector<Scalar> head_limits);

    const MeasuredReebGraph& graph() const { return g_; }
    const std::vector<Scalar>& head_limits() const { return head_; }
    const std::vector<Scalar>& weights() const { return rho_; }

    Scalar head_limit(std::size_t e) const { return head_.at(e); }
    Scalar tail_limit(std::size_t e) const { return head_.at(e) - rho_.at(e); }
    // Limit at vertex v along an incident edge e.
    Scalar limit(std::size_t v, std::size_t e) const;

private:
    MeasuredReebGraph g_;
    std::vector<Scalar> head_;
    std::vector<Scalar> rho_;
};

// t ↦ coeffs · t + constant
struct AffineForm {
    std::vector<Scalar> coeffs;
    Scalar constant;
    Scalar operator()(const std::vector<Scalar>& t) const;
};

struct AffineCirculationSpace {
    MeasuredReebGraph graph;
    std::vector<Scalar> particular;           // head limits at t = 0
    std::vector<std::vector<Scalar>> basis;   // head-limit deltas, one per coordinate
    std::vector<std::string> labels;          // coordinate names
    std::vector<std::size_t> free_edges;      // set while coordinates are free-edge values
    double residual = 0.0;                    // Kirchhoff residual of the particular solution
    std::optional<std::string> warning;

    int dim() const { return static_cast<int>(basis.size()); }
    bool is_exact() const;

    CirculationFunction point(const std::vector<Scalar>& t) const;
    CirculationFunction particular_function() const { return point(std::vector<Scalar>(basis.size(), Scalar(0))); }
    AffineForm head_form(std::size_t e) const;
    AffineForm limit_form(std::size_t v, std::size_t e) const;

    // Affine change of coordinates so that coordinate k is the limit named by
    // refs[k]. Throws if those limits do not form a coordinate system.
    AffineCirculationSpace reparametrize(const std::vector<LimitRef>& refs) const;

    // Coordinates of a circulation function lying in this space.
    std::vector<Scalar> coordinates_of(const CirculationFunction& c) const;
};

struct Infeasible {
    Scalar total_weight;
    double residual = 0.0;
    std::string reason;
};

using CirculationSolve = std::variant<AffineCirculationSpace, Infeasible>;

// Solves Kirchhoff at every non-boundary vertex for the head limits.
CirculationSolve solve_circulation_space(const MeasuredReebGraph& g);

// Convenience: solve and apply the graph's declared coordinates, if any.
CirculationSolve solve_with_declared_coordinates(const MeasuredReebGraph& g);

// c at the point of edge e with height f0 (strictly inside the edge).
Scalar evaluate(const CirculationFunction& c, std::size_t e, const Scalar& f0);

// Largest |Σ_in λ⁺ − Σ_out λ⁻| over non-boundary vertices.
double kirchhoff_residual(const CirculationFunction& c);

struct SaddleLimits {
    std::size_t vertex = npos;
    std::array<std::size_t, 3> edges{npos, npos, npos};  // trunk, branch, branch
    std::array<Scalar, 3> limits;
};

SaddleLimits vertex_limits(const CirculationFunction& c, std::size_t v);

struct Verdict {
    enum class Status { Holds, Fails, Indeterminate };
    Status status = Status::Holds;
    std::optional<SaddleLimits> witness;
    bool holds() const { return status == Status::Holds; }
};

// Every saddle has three nonzero limits of one sign.
Verdict is_balanced(const CirculationFunction& c, double tol = 1e-9);
// Every saddle limit is strictly negative. Closed graphs only.
Verdict is_totally_negative(const CirculationFunction& c, double tol = 1e-9);

// True when the sampled profile of c along e has no interior local maximum,
// so its maximum over the edge is attained at an endpoint.
bool edge_concavity_check(const CirculationFunction& c, std::size_t e, int samples = 100);

}  // namespace reebflow
