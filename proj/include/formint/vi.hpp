#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "formint/potentials.hpp"

namespace formint {

/// Step size, damping gain, and the derived update coefficients
///   kappa_h     = (kappa*h - 1) / (1 + kappa*h)
///   kappa_bar_h = h^2 / (2 (1 + kappa*h)).
/// Note kappa_h + 2/(1 + kappa*h) = 1, so zero-gradient rest states are fixed points.
struct ViParams {
    double h;
    double kappa;
    double kappa_h;
    double kappa_bar_h;

    ViParams(double h_, double kappa_) : h(h_), kappa(kappa_) {
        if (!(h > 0.0)) throw std::invalid_argument("ViParams: h must be > 0");
        if (!(kappa > 0.0)) throw std::invalid_argument("ViParams: kappa must be > 0");
        kappa_h = (kappa * h - 1.0) / (1.0 + kappa * h);
        kappa_bar_h = h * h / (2.0 * (1.0 + kappa * h));
    }
};

/// The position pair the discrete flow advances: (q_{k-1}, q_k).
struct ViState {
    Configuration q_prev;
    Configuration q_curr;
    std::int64_t step_index = 1;
};

/// Raised when an update produces non-finite positions.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::int64_t step)
        : std::runtime_error("trajectory diverged at step " + std::to_string(step)),
          step_(step) {}
    std::int64_t step() const { return step_; }

private:
    std::int64_t step_;
};

/// Start the two-step scheme from initial positions and velocities:
/// q_prev = q0, q_curr = q0 + h*v0, step_index = 1.
ViState init_from_ic(const Configuration& q0, const Configuration& v0, const ViParams& params);

/// One explicit update (q_{k-1}, q_k) -> (q_k, q_{k+1}),
///   q_{k+1} = q_k + kappa_h (q_{k-1} - q_k) - kappa_bar_h * sum_j grad V_ij(q_k),
/// gradients evaluated once at q_k. Throws DivergenceError on non-finite output.
ViState vi_step(const ViState& state, const ViParams& params, const FormationGraph& graph,
                const PotentialSpec& spec);

/// In-place variant reusing a caller-owned gradient buffer; rotates q_prev/q_curr.
void vi_step_inplace(ViState& state, const ViParams& params, const FormationGraph& graph,
                     const PotentialSpec& spec, StackedVector& grad_buf);

/// Per-agent discrete energy over one interval,
///   E_i = |q1_i - q0_i|^2 / (2h) + (h/4) sum_j [V_ij(q0) + V_ij(q1)],
/// plus the total over agents (each edge potential counted once per endpoint share).
struct DiscreteEnergy {
    std::vector<double> per_agent;
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

DiscreteEnergy discrete_energy(const Configuration& q0, const Configuration& q1,
                               const ViParams& params, const FormationGraph& graph,
                               const PotentialSpec& spec);

/// Pre-momentum map: (q0, q1) -> p0 = (q1 - q0)/h + (h/4) grad V(q0) + kappa (q1 - q0).
MomentumVector discrete_legendre_minus(const Configuration& q0, const Configuration& q1,
                                       const ViParams& params, const FormationGraph& graph,
                                       const PotentialSpec& spec);

/// Post-momentum map: (q0, q1) -> p1 = (q1 - q0)/h - (h/4) grad V(q1) - kappa (q1 - q0).
/// Along discrete trajectories the post-momentum of one interval equals the
/// pre-momentum of the next.
MomentumVector discrete_legendre_plus(const Configuration& q0, const Configuration& q1,
                                      const ViParams& params, const FormationGraph& graph,
                                      const PotentialSpec& spec);

/// Discrete path q_0 ... q_N with per-interval discrete energy records.
struct Trajectory {
    double h = 0.0;
    std::vector<Configuration> q;                    // up to N+1 entries
    std::vector<double> energy;                      // E^d per interval
    std::vector<double> energy_kinetic;              // kinetic part per interval
    std::vector<double> energy_potential;            // potential part per interval
    std::vector<std::vector<double>> energy_agents;  // per-agent E^d per interval
    bool diverged = false;
    std::int64_t divergence_step = -1;

    const Configuration& final_config() const { return q.back(); }
};

/// Run the scheme for num_steps steps (the first is the init map), recording
/// positions and discrete energies. On divergence the trajectory stops at the
/// last finite state and carries the failing step index.
Trajectory run_vi(const Configuration& q0, const Configuration& v0, const ViParams& params,
                  const FormationGraph& graph, const PotentialSpec& spec, std::int64_t num_steps);

/// Damping and force scaling of the first-order flow the update rule is
/// consistent with. Taylor expansion of
///   (1 + kh) q_{k+1} - 2 q_k + (1 - kh) q_{k-1} = -(h^2/2) grad V(q_k)
/// gives qdd = -2*kappa qd - (1/2) grad V + O(h^2): the trapezoidal force pair
/// assigns the full per-step work to each of the two discrete forces, and the
/// h/4 potential weights halve the gradient. Diagnostics that compare the
/// discrete flow against continuous theory integrate this field.
struct ModeledFlow {
    double damping;
    double force_scale;
};

inline ModeledFlow vi_modeled_flow(double kappa) { return {2.0 * kappa, 0.5}; }

}  // namespace formint
