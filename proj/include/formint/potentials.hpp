#pragma once

#include <vector>

#include "formint/graph.hpp"
#include "formint/stacked.hpp"

namespace formint {

enum class PotentialKind { DistanceBased, DisplacementBased };

/// Per-edge control potential parameters for one formation graph.
///
/// Distance-based: V_ij = 1/4 (|q_i - q_j|^2 - d_ij^2)^2, one d_ij > 0 per edge.
/// Displacement-based: V_ij = 1/2 |q_i - q_j - t_ij|^2, one target offset per
/// edge, stored for the canonical direction a < b (t_ji = -t_ij).
class PotentialSpec {
public:
    /// Distance-based spec; desired_distances[e] pairs with graph.edges()[e].
    static PotentialSpec distance_based(const FormationGraph& graph,
                                        std::vector<double> desired_distances);

    /// Displacement-based spec; desired_offsets has graph.num_edges()*dim entries,
    /// edge e owning the slice [e*dim, (e+1)*dim) as the offset q_a - q_b, a < b.
    static PotentialSpec displacement_based(const FormationGraph& graph,
                                            std::vector<double> desired_offsets);

    /// Distance-based spec whose targets are the edge lengths of a reference shape.
    static PotentialSpec distance_from_shape(const FormationGraph& graph,
                                             const Configuration& shape);

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double desired_distance(int edge) const { return dist_[std::size_t(edge)]; }
    /// Largest desired distance over edges (distance-based only).
    double max_desired_distance() const;
    const double* desired_offset(int edge) const { return offs_.data() + std::size_t(edge) * dim_; }

    /// Distance targets enter the potential through their squares; keeping the
    /// square as the stored quantity lets shapes built by distance_from_shape
    /// sit at exactly zero gradient.
    double desired_distance_sq(int edge) const { return dist_sq_[std::size_t(edge)]; }

    double eval_edge(int edge, const double* qa, const double* qb) const;
    /// Gradient w.r.t. the canonical first endpoint a; the gradient w.r.t. b is its negation.
    void grad_edge(int edge, const double* qa, const double* qb, double* ga) const;

private:
    PotentialSpec() = default;
    PotentialKind kind_ = PotentialKind::DistanceBased;
    int dim_ = 0;
    std::vector<double> dist_;     // distance targets d, per edge
    std::vector<double> dist_sq_;  // stored d^2, per edge
    std::vector<double> offs_;     // displacement targets, per edge, canonical a < b
};

/// V_ij(q_i, q_j) for edge (i, j); rejects non-edges.
double eval_pair(const FormationGraph& graph, const PotentialSpec& spec, int i, int j,
                 const double* qi, const double* qj);

/// (grad_{q_i} V_ij, grad_{q_j} V_ij) for edge (i, j); gj = -gi always.
void grad_pair(const FormationGraph& graph, const PotentialSpec& spec, int i, int j,
               const double* qi, const double* qj, double* gi, double* gj);

/// Sum over j in N_i of grad_{q_i} V_ij(q_i, q_j); zero vector for isolated agents.
void force_sum(const FormationGraph& graph, const PotentialSpec& spec, const Configuration& q,
               int i, double* out);

/// Total formation potential: sum of V_ij over unordered edges.
double total_potential(const FormationGraph& graph, const PotentialSpec& spec,
                       const Configuration& q);

/// Stacked gradient g_i = sum_j grad_{q_i} V_ij for every agent (serial loop).
void gradient_stack_serial(const FormationGraph& graph, const PotentialSpec& spec,
                           const Configuration& q, StackedVector& out);

/// Same result as gradient_stack_serial; runs the per-agent gather loop with
/// OpenMP when the graph is large enough to pay for it.
void gradient_stack(const FormationGraph& graph, const PotentialSpec& spec,
                    const Configuration& q, StackedVector& out);

}  // namespace formint
