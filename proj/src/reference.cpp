#include "formint/reference.hpp"

#include <cmath>

namespace formint {

void field_rhs(const FlowField& field, const FormationGraph& graph, const PotentialSpec& spec,
               const FirstOrderState& x, FirstOrderState& dx, StackedVector& grad_buf) {
    gradient_stack(graph, spec, x.q, grad_buf);
    if (!dx.q.same_shape(x.q)) dx.q = Configuration(x.q.agents, x.q.dim);
    if (!dx.p.same_shape(x.p)) dx.p = MomentumVector(x.p.agents, x.p.dim);
    for (std::size_t k = 0; k < x.q.size(); ++k) {
        dx.q.v[k] = x.p.v[k];
        dx.p.v[k] = -field.damping * x.p.v[k] - field.force_scale * grad_buf.v[k];
    }
}

FirstOrderState rhs(const FirstOrderState& x, double kappa, const FormationGraph& graph,
                    const PotentialSpec& spec) {
    FirstOrderState dx;
    StackedVector g(x.q.agents, x.q.dim);
    field_rhs(FlowField{kappa, 1.0}, graph, spec, x, dx, g);
    return dx;
}

FirstOrderState euler_step(const FirstOrderState& x, double h, double kappa,
                           const FormationGraph& graph, const PotentialSpec& spec) {
    if (!(h > 0.0)) throw std::invalid_argument("euler_step: h must be > 0");
    FirstOrderState dx = rhs(x, kappa, graph, spec);
    FirstOrderState out = x;
    for (std::size_t k = 0; k < x.q.size(); ++k) {
        out.q.v[k] += h * dx.q.v[k];
        out.p.v[k] += h * dx.p.v[k];
    }
    if (!out.q.finite() || !out.p.finite()) throw DivergenceError(1);
    return out;
}

FirstOrderState rk4_step(const FirstOrderState& x, double h, double kappa,
                         const FormationGraph& graph, const PotentialSpec& spec) {
    if (!(h > 0.0)) throw std::invalid_argument("rk4_step: h must be > 0");
    FirstOrderState out = rk4_integrate(FlowField{kappa, 1.0}, graph, spec, x, h, 1, 0,
                                        [](std::int64_t, const FirstOrderState&) {});
    if (!out.q.finite() || !out.p.finite()) throw DivergenceError(1);
    return out;
}

namespace {

void record_energy(RefTrajectory& traj, const FirstOrderState& x, const FormationGraph& graph,
                   const PotentialSpec& spec) {
    const int s = graph.num_agents();
    const int n = graph.dim();
    std::vector<double> per(std::size_t(s), 0.0);
    double kin = 0.0;
    for (int i = 0; i < s; ++i) {
        double k = 0.0;
        for (int a = 0; a < n; ++a) k += x.p.agent(i)[a] * x.p.agent(i)[a];
        per[std::size_t(i)] = 0.5 * k;
        kin += 0.5 * k;
    }
    double pot = 0.0;
    const auto& edges = graph.edges();
    for (int e = 0; e < int(edges.size()); ++e) {
        const auto& ed = edges[std::size_t(e)];
        const double ve = spec.eval_edge(e, x.q.agent(ed.a), x.q.agent(ed.b));
        per[std::size_t(ed.a)] += 0.5 * ve;
        per[std::size_t(ed.b)] += 0.5 * ve;
        pot += ve;
    }
    traj.energy.push_back(kin + pot);
    traj.energy_kinetic.push_back(kin);
    traj.energy_potential.push_back(pot);
    traj.energy_agents.push_back(std::move(per));
}

}  // namespace

RefTrajectory run_reference(Method method, const Configuration& q0, const Configuration& v0,
                            double h, double kappa, const FormationGraph& graph,
                            const PotentialSpec& spec, std::int64_t num_steps) {
    if (num_steps < 1) throw std::invalid_argument("run_reference: num_steps must be >= 1");
    if (!(h > 0.0)) throw std::invalid_argument("run_reference: h must be > 0");
    if (q0.agents != graph.num_agents() || q0.dim != graph.dim())
        throw std::invalid_argument("run_reference: configuration does not match graph");

    RefTrajectory traj;
    traj.h = h;
    traj.q.reserve(std::size_t(num_steps) + 1);

    FirstOrderState x{q0, v0};
    FirstOrderState dx = x, k1 = x, k2 = x, k3 = x, k4 = x, tmp = x;
    StackedVector g(q0.agents, q0.dim);
    const FlowField field{kappa, 1.0};
    const std::size_t m = q0.size();

    traj.q.push_back(x.q);
    record_energy(traj, x, graph, spec);

    for (std::int64_t step = 0; step < num_steps; ++step) {
        if (method == Method::Euler) {
            field_rhs(field, graph, spec, x, dx, g);
            traj.rhs_evals += 1;
            for (std::size_t a = 0; a < m; ++a) {
                x.q.v[a] += h * dx.q.v[a];
                x.p.v[a] += h * dx.p.v[a];
            }
        } else {
            field_rhs(field, graph, spec, x, k1, g);
            for (std::size_t a = 0; a < m; ++a) {
                tmp.q.v[a] = x.q.v[a] + 0.5 * h * k1.q.v[a];
                tmp.p.v[a] = x.p.v[a] + 0.5 * h * k1.p.v[a];
            }
            field_rhs(field, graph, spec, tmp, k2, g);
            for (std::size_t a = 0; a < m; ++a) {
                tmp.q.v[a] = x.q.v[a] + 0.5 * h * k2.q.v[a];
                tmp.p.v[a] = x.p.v[a] + 0.5 * h * k2.p.v[a];
            }
            field_rhs(field, graph, spec, tmp, k3, g);
            for (std::size_t a = 0; a < m; ++a) {
                tmp.q.v[a] = x.q.v[a] + h * k3.q.v[a];
                tmp.p.v[a] = x.p.v[a] + h * k3.p.v[a];
            }
            field_rhs(field, graph, spec, tmp, k4, g);
            traj.rhs_evals += 4;
            for (std::size_t a = 0; a < m; ++a) {
                x.q.v[a] += h / 6.0 * (k1.q.v[a] + 2.0 * (k2.q.v[a] + k3.q.v[a]) + k4.q.v[a]);
                x.p.v[a] += h / 6.0 * (k1.p.v[a] + 2.0 * (k2.p.v[a] + k3.p.v[a]) + k4.p.v[a]);
            }
        }
        if (!x.q.finite() || !x.p.finite()) {
            traj.diverged = true;
            traj.divergence_step = step + 1;
            break;
        }
        traj.q.push_back(x.q);
        record_energy(traj, x, graph, spec);
    }
    traj.final_p = x.p;
    return traj;
}

}  // namespace formint
