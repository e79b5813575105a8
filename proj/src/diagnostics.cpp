#include "formint/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace formint {

namespace {

void validate(const AlphaInputs& in) {
    if (!(in.radius > 0.0)) throw std::invalid_argument("alpha: radius must be > 0");
    if (!(in.momentum_bound > 0.0)) throw std::invalid_argument("alpha: momentum bound must be > 0");
    if (in.kappa < 0.0) throw std::invalid_argument("alpha: kappa must be >= 0");
    if (in.num_agents < 1) throw std::invalid_argument("alpha: need at least one agent");
    if (in.num_edges < 0) throw std::invalid_argument("alpha: edge count must be >= 0");
    if (in.num_edges > 0 && !(in.max_desired_distance > 0.0))
        throw std::invalid_argument("alpha: max desired distance must be > 0");
}

}  // namespace

double conservative_field_bound(const AlphaInputs& in) {
    validate(in);
    const double c2 = in.momentum_bound * in.momentum_bound;
    const double r2 = in.radius * in.radius;
    const double d4 = std::pow(in.max_desired_distance, 4);
    const double grad2 = std::max(r2 * r2 * r2, r2 * d4);
    const double m2 = (1.0 + 2.0 * in.num_agents * in.kappa * in.kappa) * c2 +
                      64.0 * in.num_edges * grad2;
    return std::sqrt(m2);
}

double alpha_bound(const AlphaInputs& in) {
    return in.radius / (std::numbers::e * conservative_field_bound(in));
}

std::uint64_t max_guaranteed_steps(double h, double alpha) {
    if (!(h > 0.0)) throw std::invalid_argument("max_guaranteed_steps: h must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("max_guaranteed_steps: alpha must be > 0");
    if (h > alpha)
        throw std::invalid_argument(
            "max_guaranteed_steps: h exceeds alpha; the energy-behavior guarantee does not "
            "apply in this regime");
    const double k = std::floor(std::exp(alpha / (2.0 * h)) / h);
    if (!(k < double(std::numeric_limits<std::uint64_t>::max())))
        return std::numeric_limits<std::uint64_t>::max();
    return std::uint64_t(k);
}

EnergyAudit audit_energy(std::span<const double> series, double slack) {
    if (series.size() < 2) throw std::invalid_argument("audit_energy: need at least two entries");
    EnergyAudit audit;
    audit.max_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double d = series[k + 1] - series[k];
        audit.max_increase = std::max(audit.max_increase, d);
        if (d > slack) audit.violations.push_back({std::int64_t(k), d});
    }
    return audit;
}

std::vector<double> dissipation_rate_error(const Trajectory& traj, const ViParams& params,
                                           const FormationGraph& graph,
                                           const PotentialSpec& spec) {
    std::vector<double> err;
    if (traj.energy.size() < 2) return err;
    err.reserve(traj.energy.size() - 1);
    for (std::size_t k = 0; k + 1 < traj.energy.size(); ++k) {
        const MomentumVector p =
            discrete_legendre_minus(traj.q[k], traj.q[k + 1], params, graph, spec);
        double p2 = 0.0;
        for (double x : p.v) p2 += x * x;
        const double rate = (traj.energy[k + 1] - traj.energy[k]) / params.h;
        const double predicted = params.h * (-params.kappa * p2);
        err.push_back(std::abs(rate - predicted));
    }
    return err;
}

namespace {

double final_position_error(const Configuration& a, const Configuration& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a.v[k] - b.v[k];
        s += d * d;
    }
    return std::sqrt(s);
}

std::int64_t steps_for(double T, double h) {
    const double n = T / h;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-9 * std::max(1.0, r))
        throw std::invalid_argument("estimate_order: every step size must divide the horizon");
    return std::int64_t(r);
}

}  // namespace

OrderEstimate estimate_order(OrderMethod method, const Configuration& q0,
                             const Configuration& v0, double kappa, const FormationGraph& graph,
                             const PotentialSpec& spec, std::span<const double> h_list, double T) {
    if (h_list.size() < 3)
        throw std::invalid_argument("estimate_order: need at least three step sizes");
    for (double h : h_list)
        if (!(h > 0.0)) throw std::invalid_argument("estimate_order: step sizes must be > 0");

    const double h_min = *std::min_element(h_list.begin(), h_list.end());
    const double h_ref = h_min / 100.0;
    const FlowField field = method == OrderMethod::VI ? FlowField{vi_modeled_flow(kappa).damping,
                                                                  vi_modeled_flow(kappa).force_scale}
                                                      : FlowField{kappa, 1.0};

    const FirstOrderState ref_end =
        rk4_integrate(field, graph, spec, FirstOrderState{q0, v0}, h_ref, steps_for(T, h_ref), 0,
                      [](std::int64_t, const FirstOrderState&) {});
    if (!ref_end.q.finite() || !ref_end.p.finite())
        throw std::runtime_error("estimate_order: reference run diverged");

    OrderEstimate est;
    for (double h : h_list) {
        const std::int64_t n = steps_for(T, h);
        Configuration qT(q0.agents, q0.dim);
        if (method == OrderMethod::VI) {
            Trajectory tr = run_vi(q0, v0, ViParams(h, kappa), graph, spec, n);
            if (tr.diverged) throw std::runtime_error("estimate_order: trajectory diverged");
            qT = tr.final_config();
        } else {
            RefTrajectory tr =
                run_reference(method == OrderMethod::Euler ? Method::Euler : Method::RK4, q0, v0,
                              h, kappa, graph, spec, n);
            if (tr.diverged) throw std::runtime_error("estimate_order: trajectory diverged");
            qT = tr.final_config();
        }
        est.step_sizes.push_back(h);
        est.errors.push_back(final_position_error(qT, ref_end.q));
    }

    // Least-squares slope of log(error) against log(h).
    const std::size_t m = est.errors.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = std::log(est.step_sizes[k]);
        const double y = std::log(std::max(est.errors[k], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    est.slope = (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
    return est;
}

}  // namespace formint
