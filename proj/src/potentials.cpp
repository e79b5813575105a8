#include "formint/potentials.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace formint {

PotentialSpec PotentialSpec::distance_based(const FormationGraph& graph,
                                            std::vector<double> desired_distances) {
    if (int(desired_distances.size()) != graph.num_edges())
        throw std::invalid_argument("potential: need one desired distance per edge");
    for (double d : desired_distances)
        if (!(d > 0.0)) throw std::invalid_argument("potential: desired distances must be > 0");
    PotentialSpec s;
    s.kind_ = PotentialKind::DistanceBased;
    s.dim_ = graph.dim();
    s.dist_ = std::move(desired_distances);
    s.dist_sq_.reserve(s.dist_.size());
    for (double d : s.dist_) s.dist_sq_.push_back(d * d);
    return s;
}

PotentialSpec PotentialSpec::displacement_based(const FormationGraph& graph,
                                                std::vector<double> desired_offsets) {
    if (int(desired_offsets.size()) != graph.num_edges() * graph.dim())
        throw std::invalid_argument("potential: need one desired offset of length dim per edge");
    PotentialSpec s;
    s.kind_ = PotentialKind::DisplacementBased;
    s.dim_ = graph.dim();
    s.offs_ = std::move(desired_offsets);
    return s;
}

PotentialSpec PotentialSpec::distance_from_shape(const FormationGraph& graph,
                                                 const Configuration& shape) {
    if (shape.agents != graph.num_agents() || shape.dim != graph.dim())
        throw std::invalid_argument("potential: shape does not match graph");
    PotentialSpec s;
    s.kind_ = PotentialKind::DistanceBased;
    s.dim_ = graph.dim();
    for (const auto& e : graph.edges()) {
        double r2 = 0.0;
        for (int k = 0; k < graph.dim(); ++k) {
            const double d = shape.agent(e.a)[k] - shape.agent(e.b)[k];
            r2 += d * d;
        }
        if (!(r2 > 0.0))
            throw std::invalid_argument("potential: shape places edge endpoints together");
        // Store the squared separation verbatim so the shape itself evaluates
        // to an exactly zero gradient.
        s.dist_sq_.push_back(r2);
        s.dist_.push_back(std::sqrt(r2));
    }
    return s;
}

double PotentialSpec::max_desired_distance() const {
    if (kind_ != PotentialKind::DistanceBased)
        throw std::logic_error("max_desired_distance: spec is not distance-based");
    return *std::max_element(dist_.begin(), dist_.end());
}

double PotentialSpec::eval_edge(int edge, const double* qa, const double* qb) const {
    if (kind_ == PotentialKind::DistanceBased) {
        double r2 = 0.0;
        for (int k = 0; k < dim_; ++k) {
            const double d = qa[k] - qb[k];
            r2 += d * d;
        }
        const double g = r2 - dist_sq_[std::size_t(edge)];
        return 0.25 * g * g;
    }
    const double* t = desired_offset(edge);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
        const double e = qa[k] - qb[k] - t[k];
        s += e * e;
    }
    return 0.5 * s;
}

void PotentialSpec::grad_edge(int edge, const double* qa, const double* qb, double* ga) const {
    if (kind_ == PotentialKind::DistanceBased) {
        double r2 = 0.0;
        for (int k = 0; k < dim_; ++k) {
            const double d = qa[k] - qb[k];
            r2 += d * d;
        }
        const double g = r2 - dist_sq_[std::size_t(edge)];
        for (int k = 0; k < dim_; ++k) ga[k] = g * (qa[k] - qb[k]);
        return;
    }
    const double* t = desired_offset(edge);
    for (int k = 0; k < dim_; ++k) ga[k] = qa[k] - qb[k] - t[k];
}

namespace {

int require_edge(const FormationGraph& graph, int i, int j) {
    const int e = graph.edge_index(i, j);
    if (e < 0)
        throw std::invalid_argument("potential: (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") is not an edge");
    return e;
}

}  // namespace

double eval_pair(const FormationGraph& graph, const PotentialSpec& spec, int i, int j,
                 const double* qi, const double* qj) {
    const int e = require_edge(graph, i, j);
    // V_ij is symmetric under swapping endpoints for both families.
    if (i < j) return spec.eval_edge(e, qi, qj);
    return spec.eval_edge(e, qj, qi);
}

void grad_pair(const FormationGraph& graph, const PotentialSpec& spec, int i, int j,
               const double* qi, const double* qj, double* gi, double* gj) {
    const int e = require_edge(graph, i, j);
    const int n = graph.dim();
    if (i < j) {
        spec.grad_edge(e, qi, qj, gi);
        for (int k = 0; k < n; ++k) gj[k] = -gi[k];
    } else {
        spec.grad_edge(e, qj, qi, gj);
        for (int k = 0; k < n; ++k) gi[k] = -gj[k];
    }
}

void force_sum(const FormationGraph& graph, const PotentialSpec& spec, const Configuration& q,
               int i, double* out) {
    const int n = graph.dim();
    for (int k = 0; k < n; ++k) out[k] = 0.0;
    const auto nbrs = graph.neighbors(i);
    const auto eidx = graph.incident_edges(i);
    double g[8];
    std::vector<double> gbig;
    double* gbuf = g;
    if (n > 8) {
        gbig.resize(std::size_t(n));
        gbuf = gbig.data();
    }
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const int j = nbrs[k];
        const int e = eidx[k];
        if (i < j) {
            spec.grad_edge(e, q.agent(i), q.agent(j), gbuf);
            for (int a = 0; a < n; ++a) out[a] += gbuf[a];
        } else {
            spec.grad_edge(e, q.agent(j), q.agent(i), gbuf);
            for (int a = 0; a < n; ++a) out[a] -= gbuf[a];
        }
    }
}

double total_potential(const FormationGraph& graph, const PotentialSpec& spec,
                       const Configuration& q) {
    double total = 0.0;
    const auto& edges = graph.edges();
    for (int e = 0; e < int(edges.size()); ++e)
        total += spec.eval_edge(e, q.agent(edges[std::size_t(e)].a), q.agent(edges[std::size_t(e)].b));
    return total;
}

void gradient_stack_serial(const FormationGraph& graph, const PotentialSpec& spec,
                           const Configuration& q, StackedVector& out) {
    const int s = graph.num_agents();
    if (!out.same_shape(q)) out = StackedVector(q.agents, q.dim);
    for (int i = 0; i < s; ++i) force_sum(graph, spec, q, i, out.agent(i));
}

void gradient_stack(const FormationGraph& graph, const PotentialSpec& spec,
                    const Configuration& q, StackedVector& out) {
    const int s = graph.num_agents();
    // Below a few thousand agents the fork/join overhead dominates this loop,
    // and nesting a region inside an already-parallel sweep only adds
    // contention; both cases must bypass the OpenMP runtime entirely.
    if (s < 8192 || omp_in_parallel()) {
        gradient_stack_serial(graph, spec, q, out);
        return;
    }
    if (!out.same_shape(q)) out = StackedVector(q.agents, q.dim);
    // per-agent gather, no write races
    #pragma omp parallel for schedule(static)
    for (int i = 0; i < s; ++i) force_sum(graph, spec, q, i, out.agent(i));
}

}  // namespace formint
