#pragma once

#include <span>
#include <utility>
#include <vector>

#include "formint/stacked.hpp"

namespace formint {

/// Undirected interaction topology over s agents embedded in R^n.
///
/// Edges are stored canonically as (a, b) with a < b; duplicates collapse,
/// self-loops and out-of-range indices are rejected at construction.
class FormationGraph {
public:
    struct Edge {
        int a, b;  // a < b
    };

    FormationGraph(int num_agents, int dim, const std::vector<std::pair<int, int>>& edges);

    int num_agents() const { return num_agents_; }
    int dim() const { return dim_; }
    int num_edges() const { return int(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Neighbor set N_i, sorted ascending.
    std::span<const int> neighbors(int i) const;
    /// Edge indices parallel to neighbors(i): incident_edges(i)[k] is the edge to neighbors(i)[k].
    std::span<const int> incident_edges(int i) const;

    /// Index of edge {i, j} in edges(), or -1 if absent.
    int edge_index(int i, int j) const;
    bool has_edge(int i, int j) const { return edge_index(i, j) >= 0; }

    void check_agent(int i) const;

private:
    int num_agents_;
    int dim_;
    std::vector<Edge> edges_;
    std::vector<int> adj_offsets_;  // CSR offsets, size num_agents_+1
    std::vector<int> adj_;          // neighbor indices
    std::vector<int> adj_edge_;     // edge index per adjacency entry
};

/// True iff every unordered pair of agents has the same separation in both
/// configurations, up to rel_tol relative to the reference distance (second
/// argument). Pairs with zero reference distance are compared absolutely.
bool is_congruent(const Configuration& q1, const Configuration& q2, double rel_tol);

/// Largest relative pairwise-distance discrepancy of q1 against reference q2.
double max_pairwise_deviation(const Configuration& q1, const Configuration& q2);

}  // namespace formint
