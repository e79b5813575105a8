#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace formint {

/// Stacked per-agent vectors in R^{s*n}; agent i owns the slice [i*n, (i+1)*n).
struct StackedVector {
    int agents = 0;
    int dim = 0;
    std::vector<double> v;

    StackedVector() = default;
    StackedVector(int agents_, int dim_, double fill = 0.0)
        : agents(agents_), dim(dim_), v(std::size_t(agents_) * dim_, fill) {
        if (agents_ < 1 || dim_ < 1)
            throw std::invalid_argument("StackedVector: agents and dim must be >= 1");
    }

    static StackedVector from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty() || rows.front().empty())
            throw std::invalid_argument("StackedVector: empty row data");
        StackedVector out(int(rows.size()), int(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size())
                throw std::invalid_argument("StackedVector: ragged row data");
            for (std::size_t a = 0; a < rows[i].size(); ++a)
                out.v[i * rows.front().size() + a] = rows[i][a];
        }
        return out;
    }

    std::size_t size() const { return v.size(); }

    double* agent(int i) { return v.data() + std::size_t(i) * dim; }
    const double* agent(int i) const { return v.data() + std::size_t(i) * dim; }

    std::span<const double> agent_span(int i) const { return {agent(i), std::size_t(dim)}; }

    bool same_shape(const StackedVector& o) const { return agents == o.agents && dim == o.dim; }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

/// Stacked agent positions q = (q_1, ..., q_s).
using Configuration = StackedVector;
/// Stacked agent momenta p = (p^1, ..., p^s); equals velocities under unit mass.
using MomentumVector = StackedVector;

inline double sq_norm(std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return s;
}

inline double agent_distance(const Configuration& q, int i, int j) {
    double s = 0.0;
    for (int a = 0; a < q.dim; ++a) {
        const double d = q.agent(i)[a] - q.agent(j)[a];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace formint
