#pragma once

#include <cstdint>
#include <vector>

#include "formint/potentials.hpp"
#include "formint/vi.hpp"

namespace formint {

/// Phase-space state (q, p); p equals velocity under unit mass.
struct FirstOrderState {
    Configuration q;
    MomentumVector p;
};

/// Damped gradient flow on phase space:
///   qd_i = p_i,  pd_i = -damping * p_i - force_scale * sum_j grad V_ij(q).
/// The system field uses damping = kappa, force_scale = 1.
struct FlowField {
    double damping;
    double force_scale = 1.0;
};

/// Evaluate the field; grad_buf is caller-owned scratch.
void field_rhs(const FlowField& field, const FormationGraph& graph, const PotentialSpec& spec,
               const FirstOrderState& x, FirstOrderState& dx, StackedVector& grad_buf);

/// Time derivative of the system field (damping kappa, unscaled gradients).
FirstOrderState rhs(const FirstOrderState& x, double kappa, const FormationGraph& graph,
                    const PotentialSpec& spec);

FirstOrderState euler_step(const FirstOrderState& x, double h, double kappa,
                           const FormationGraph& graph, const PotentialSpec& spec);

/// Classical 4-stage Runge-Kutta update; four field evaluations.
FirstOrderState rk4_step(const FirstOrderState& x, double h, double kappa,
                         const FormationGraph& graph, const PotentialSpec& spec);

enum class Method { Euler, RK4 };

/// Reference trajectory with continuous energy records
/// H = 1/2 sum |p_i|^2 + total potential, one per stored state.
struct RefTrajectory {
    double h = 0.0;
    std::vector<Configuration> q;
    std::vector<double> energy;
    std::vector<double> energy_kinetic;
    std::vector<double> energy_potential;
    std::vector<std::vector<double>> energy_agents;  // 1/2|p_i|^2 + 1/2 sum_j V_ij
    MomentumVector final_p;
    std::int64_t rhs_evals = 0;
    bool diverged = false;
    std::int64_t divergence_step = -1;

    const Configuration& final_config() const { return q.back(); }
};

RefTrajectory run_reference(Method method, const Configuration& q0, const Configuration& v0,
                            double h, double kappa, const FormationGraph& graph,
                            const PotentialSpec& spec, std::int64_t num_steps);

/// Integrate an arbitrary flow field with fixed-step RK4, invoking
/// on_sample(step, state) after every sample_stride-th step (0 = never).
template <class SampleFn>
FirstOrderState rk4_integrate(const FlowField& field, const FormationGraph& graph,
                              const PotentialSpec& spec, FirstOrderState x, double h,
                              std::int64_t num_steps, std::int64_t sample_stride,
                              SampleFn&& on_sample) {
    StackedVector g(x.q.agents, x.q.dim);
    FirstOrderState k1 = x, k2 = x, k3 = x, k4 = x, tmp = x;
    const std::size_t m = x.q.size();
    for (std::int64_t step = 0; step < num_steps; ++step) {
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
        for (std::size_t a = 0; a < m; ++a) {
            x.q.v[a] += h / 6.0 * (k1.q.v[a] + 2.0 * (k2.q.v[a] + k3.q.v[a]) + k4.q.v[a]);
            x.p.v[a] += h / 6.0 * (k1.p.v[a] + 2.0 * (k2.p.v[a] + k3.p.v[a]) + k4.p.v[a]);
        }
        if (sample_stride > 0 && (step + 1) % sample_stride == 0) on_sample(step + 1, x);
    }
    return x;
}

}  // namespace formint
