#include "formint/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace formint {

FormationGraph::FormationGraph(int num_agents, int dim,
                               const std::vector<std::pair<int, int>>& edges)
    : num_agents_(num_agents), dim_(dim) {
    if (num_agents < 1) throw std::invalid_argument("graph: need at least one agent");
    if (dim < 1) throw std::invalid_argument("graph: dimension must be >= 1");

    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto [i, j] : edges) {
        if (i == j)
            throw std::invalid_argument("graph: self-loop edge (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
        if (i < 0 || j < 0 || i >= num_agents || j >= num_agents)
            throw std::invalid_argument("graph: edge index out of range (" + std::to_string(i) +
                                        ", " + std::to_string(j) + ")");
        canon.push_back({std::min(i, j), std::max(i, j)});
    }
    std::sort(canon.begin(), canon.end(),
              [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    canon.erase(std::unique(canon.begin(), canon.end(),
                            [](const Edge& x, const Edge& y) { return x.a == y.a && x.b == y.b; }),
                canon.end());
    edges_ = std::move(canon);

    adj_offsets_.assign(std::size_t(num_agents_) + 1, 0);
    for (const Edge& e : edges_) {
        ++adj_offsets_[std::size_t(e.a) + 1];
        ++adj_offsets_[std::size_t(e.b) + 1];
    }
    for (int i = 0; i < num_agents_; ++i) adj_offsets_[std::size_t(i) + 1] += adj_offsets_[i];
    adj_.resize(std::size_t(adj_offsets_[num_agents_]));
    adj_edge_.resize(adj_.size());
    std::vector<int> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
    for (int e = 0; e < int(edges_.size()); ++e) {
        const Edge& ed = edges_[std::size_t(e)];
        adj_[std::size_t(fill[std::size_t(ed.a)])] = ed.b;
        adj_edge_[std::size_t(fill[std::size_t(ed.a)]++)] = e;
        adj_[std::size_t(fill[std::size_t(ed.b)])] = ed.a;
        adj_edge_[std::size_t(fill[std::size_t(ed.b)]++)] = e;
    }
    // Sort each adjacency slice by neighbor index (keeps the edge map aligned).
    for (int i = 0; i < num_agents_; ++i) {
        const int lo = adj_offsets_[std::size_t(i)], hi = adj_offsets_[std::size_t(i) + 1];
        std::vector<std::pair<int, int>> tmp;
        tmp.reserve(std::size_t(hi - lo));
        for (int k = lo; k < hi; ++k) tmp.emplace_back(adj_[std::size_t(k)], adj_edge_[std::size_t(k)]);
        std::sort(tmp.begin(), tmp.end());
        for (int k = lo; k < hi; ++k) {
            adj_[std::size_t(k)] = tmp[std::size_t(k - lo)].first;
            adj_edge_[std::size_t(k)] = tmp[std::size_t(k - lo)].second;
        }
    }
}

void FormationGraph::check_agent(int i) const {
    if (i < 0 || i >= num_agents_)
        throw std::invalid_argument("graph: agent index " + std::to_string(i) + " out of range");
}

std::span<const int> FormationGraph::neighbors(int i) const {
    check_agent(i);
    const int lo = adj_offsets_[std::size_t(i)], hi = adj_offsets_[std::size_t(i) + 1];
    return {adj_.data() + lo, std::size_t(hi - lo)};
}

std::span<const int> FormationGraph::incident_edges(int i) const {
    check_agent(i);
    const int lo = adj_offsets_[std::size_t(i)], hi = adj_offsets_[std::size_t(i) + 1];
    return {adj_edge_.data() + lo, std::size_t(hi - lo)};
}

int FormationGraph::edge_index(int i, int j) const {
    if (i == j) return -1;
    check_agent(i);
    check_agent(j);
    const Edge key{std::min(i, j), std::max(i, j)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                               [](const Edge& x, const Edge& y) {
                                   return x.a != y.a ? x.a < y.a : x.b < y.b;
                               });
    if (it != edges_.end() && it->a == key.a && it->b == key.b)
        return int(it - edges_.begin());
    return -1;
}

bool is_congruent(const Configuration& q1, const Configuration& q2, double rel_tol) {
    if (!q1.same_shape(q2))
        throw std::invalid_argument("is_congruent: configurations differ in shape");
    for (int i = 0; i < q1.agents; ++i) {
        for (int j = i + 1; j < q1.agents; ++j) {
            const double a = agent_distance(q1, i, j);
            const double b = agent_distance(q2, i, j);
            if (b == 0.0) {
                if (std::abs(a) > rel_tol) return false;
            } else if (std::abs(a - b) > rel_tol * b) {
                return false;
            }
        }
    }
    return true;
}

double max_pairwise_deviation(const Configuration& q1, const Configuration& q2) {
    if (!q1.same_shape(q2))
        throw std::invalid_argument("max_pairwise_deviation: configurations differ in shape");
    double worst = 0.0;
    for (int i = 0; i < q1.agents; ++i) {
        for (int j = i + 1; j < q1.agents; ++j) {
            const double a = agent_distance(q1, i, j);
            const double b = agent_distance(q2, i, j);
            const double dev = b == 0.0 ? std::abs(a) : std::abs(a - b) / b;
            worst = std::max(worst, dev);
        }
    }
    return worst;
}

}  // namespace formint
