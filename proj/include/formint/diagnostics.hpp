#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "formint/reference.hpp"
#include "formint/vi.hpp"

namespace formint {

/// Inputs to the conservative step-size bound: trajectories confined to
/// |(q,p) - (q0,p0)| < 2R with |p| < c.
struct AlphaInputs {
    double radius;         // R
    double momentum_bound; // c
    double kappa;
    int num_agents;
    int num_edges;
    double max_desired_distance;
};

/// Conservative field bound M with
///   M^2 = (1 + 2|V| kappa^2) c^2 + 64 |E| max(R^6, R^2 max_d^4),
/// merging the two regime branches of the gradient estimate.
double conservative_field_bound(const AlphaInputs& in);

/// Guaranteed-monotone-energy step-size bound alpha = R / (e M).
double alpha_bound(const AlphaInputs& in);

/// Largest step count with guaranteed long-time energy behavior at step h:
/// k h <= e^{alpha/(2h)}, i.e. floor(e^{alpha/(2h)} / h). Requires 0 < h <= alpha.
std::uint64_t max_guaranteed_steps(double h, double alpha);

/// Energy series audit: steps where E_{k+1} - E_k exceeds the slack.
struct EnergyAudit {
    struct Violation {
        std::int64_t index;  // interval k with E_{k+1} - E_k > slack
        double increase;
    };
    std::vector<Violation> violations;
    double max_increase = 0.0;  // largest single-step change (signed)
};

EnergyAudit audit_energy(std::span<const double> series, double slack);

/// Per-step deviation of the discrete energy decay from the continuous law.
/// The discrete energy carries an h factor relative to the physical energy,
/// so the law's prediction is scaled the same way:
///   err_k = | (E_{k+1} - E_k)/h - h * (-kappa sum_i |p_i|^2) |
/// with p from the pre-momentum map on interval k.
std::vector<double> dissipation_rate_error(const Trajectory& traj, const ViParams& params,
                                           const FormationGraph& graph, const PotentialSpec& spec);

enum class OrderMethod { VI, Euler, RK4 };

struct OrderEstimate {
    double slope = 0.0;
    std::vector<double> step_sizes;
    std::vector<double> errors;
};

/// Empirical convergence order: global position error at horizon T against a
/// fixed-step RK4 reference at h_ref = min(h_list)/100, fitted as a log-log
/// least-squares slope. Each method is measured against the flow it
/// discretizes: Euler and RK4 against the system field, the two-step scheme
/// against its modeled flow (see vi_modeled_flow).
OrderEstimate estimate_order(OrderMethod method, const Configuration& q0,
                             const Configuration& v0, double kappa, const FormationGraph& graph,
                             const PotentialSpec& spec, std::span<const double> h_list, double T);

}  // namespace formint
