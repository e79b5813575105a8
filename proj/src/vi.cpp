#include "formint/vi.hpp"

#include <cmath>
#include <utility>

namespace formint {

ViState init_from_ic(const Configuration& q0, const Configuration& v0, const ViParams& params) {
    if (!q0.same_shape(v0))
        throw std::invalid_argument("init_from_ic: position/velocity shape mismatch");
    ViState s;
    s.q_prev = q0;
    s.q_curr = q0;
    for (std::size_t k = 0; k < q0.size(); ++k) s.q_curr.v[k] += params.h * v0.v[k];
    s.step_index = 1;
    return s;
}

void vi_step_inplace(ViState& state, const ViParams& params, const FormationGraph& graph,
                     const PotentialSpec& spec, StackedVector& grad_buf) {
    gradient_stack(graph, spec, state.q_curr, grad_buf);
    // Writing the update as q_curr + kappa_h*(q_prev - q_curr) - kappa_bar_h*g
    // keeps zero-gradient rest states bitwise stationary.
    bool finite = true;
    for (std::size_t k = 0; k < state.q_curr.size(); ++k) {
        const double qc = state.q_curr.v[k];
        const double next =
            qc + params.kappa_h * (state.q_prev.v[k] - qc) - params.kappa_bar_h * grad_buf.v[k];
        state.q_prev.v[k] = next;  // build q_{k+1} in the retiring buffer
        finite = finite && std::isfinite(next);
    }
    std::swap(state.q_prev, state.q_curr);
    ++state.step_index;
    if (!finite) throw DivergenceError(state.step_index);
}

ViState vi_step(const ViState& state, const ViParams& params, const FormationGraph& graph,
                const PotentialSpec& spec) {
    ViState next = state;
    StackedVector g(state.q_curr.agents, state.q_curr.dim);
    vi_step_inplace(next, params, graph, spec, g);
    return next;
}

DiscreteEnergy discrete_energy(const Configuration& q0, const Configuration& q1,
                               const ViParams& params, const FormationGraph& graph,
                               const PotentialSpec& spec) {
    if (!q0.same_shape(q1)) throw std::invalid_argument("discrete_energy: shape mismatch");
    const int s = graph.num_agents();
    const int n = graph.dim();
    DiscreteEnergy out;
    out.per_agent.assign(std::size_t(s), 0.0);
    const double inv2h = 1.0 / (2.0 * params.h);
    for (int i = 0; i < s; ++i) {
        double k = 0.0;
        for (int a = 0; a < n; ++a) {
            const double d = q1.agent(i)[a] - q0.agent(i)[a];
            k += d * d;
        }
        out.per_agent[std::size_t(i)] = inv2h * k;
        out.kinetic += inv2h * k;
    }
    const double hq = params.h / 4.0;
    const auto& edges = graph.edges();
    for (int e = 0; e < int(edges.size()); ++e) {
        const auto& ed = edges[std::size_t(e)];
        const double ve = hq * (spec.eval_edge(e, q0.agent(ed.a), q0.agent(ed.b)) +
                                spec.eval_edge(e, q1.agent(ed.a), q1.agent(ed.b)));
        out.per_agent[std::size_t(ed.a)] += ve;
        out.per_agent[std::size_t(ed.b)] += ve;
        out.potential += 2.0 * ve;
    }
    out.total = out.kinetic + out.potential;
    return out;
}

namespace {

MomentumVector legendre(const Configuration& q0, const Configuration& q1, const ViParams& params,
                        const FormationGraph& graph, const PotentialSpec& spec, bool plus) {
    if (!q0.same_shape(q1)) throw std::invalid_argument("discrete_legendre: shape mismatch");
    StackedVector g(q0.agents, q0.dim);
    // Pre-momentum differentiates the discrete Lagrangian in its first slot
    // (gradient at q0); post-momentum in its second (gradient at q1).
    gradient_stack_serial(graph, spec, plus ? q1 : q0, g);
    MomentumVector p(q0.agents, q0.dim);
    const double sign = plus ? -1.0 : 1.0;
    const double hq = params.h / 4.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double dq = q1.v[k] - q0.v[k];
        p.v[k] = dq / params.h + sign * (hq * g.v[k] + params.kappa * dq);
    }
    return p;
}

}  // namespace

MomentumVector discrete_legendre_minus(const Configuration& q0, const Configuration& q1,
                                       const ViParams& params, const FormationGraph& graph,
                                       const PotentialSpec& spec) {
    return legendre(q0, q1, params, graph, spec, false);
}

MomentumVector discrete_legendre_plus(const Configuration& q0, const Configuration& q1,
                                      const ViParams& params, const FormationGraph& graph,
                                      const PotentialSpec& spec) {
    return legendre(q0, q1, params, graph, spec, true);
}

Trajectory run_vi(const Configuration& q0, const Configuration& v0, const ViParams& params,
                  const FormationGraph& graph, const PotentialSpec& spec,
                  std::int64_t num_steps) {
    if (num_steps < 1) throw std::invalid_argument("run_vi: num_steps must be >= 1");
    if (q0.agents != graph.num_agents() || q0.dim != graph.dim())
        throw std::invalid_argument("run_vi: configuration does not match graph");

    Trajectory traj;
    traj.h = params.h;
    traj.q.reserve(std::size_t(num_steps) + 1);
    traj.q.push_back(q0);

    ViState st = init_from_ic(q0, v0, params);
    if (!st.q_curr.finite()) {
        traj.diverged = true;
        traj.divergence_step = 1;
        return traj;
    }
    traj.q.push_back(st.q_curr);

    StackedVector g(q0.agents, q0.dim);
    for (std::int64_t k = 1; k < num_steps; ++k) {
        try {
            vi_step_inplace(st, params, graph, spec, g);
        } catch (const DivergenceError& e) {
            traj.diverged = true;
            traj.divergence_step = e.step();
            break;
        }
        traj.q.push_back(st.q_curr);
    }

    const std::size_t intervals = traj.q.size() - 1;
    traj.energy.reserve(intervals);
    traj.energy_kinetic.reserve(intervals);
    traj.energy_potential.reserve(intervals);
    traj.energy_agents.reserve(intervals);
    for (std::size_t k = 0; k < intervals; ++k) {
        DiscreteEnergy e = discrete_energy(traj.q[k], traj.q[k + 1], params, graph, spec);
        traj.energy.push_back(e.total);
        traj.energy_kinetic.push_back(e.kinetic);
        traj.energy_potential.push_back(e.potential);
        traj.energy_agents.push_back(std::move(e.per_agent));
    }
    return traj;
}

}  // namespace formint
