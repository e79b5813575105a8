#include "formint/roa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace formint {

const char* to_string(RoaOutcomeKind k) {
    switch (k) {
        case RoaOutcomeKind::ConvergedCongruent: return "converged_congruent";
        case RoaOutcomeKind::ConvergedOther: return "converged_other";
        case RoaOutcomeKind::NotConverged: return "not_converged";
        case RoaOutcomeKind::Diverged: return "diverged";
    }
    return "unknown";
}

void RoaConfig::validate(const FormationGraph& graph) const {
    if (desired.agents != graph.num_agents() || desired.dim != graph.dim())
        throw std::invalid_argument("roa: desired shape does not match graph");
    if (displaced_agent < 0 || displaced_agent >= graph.num_agents())
        throw std::invalid_argument("roa: displaced agent out of range");
    if (!(h > 0.0)) throw std::invalid_argument("roa: h must be > 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("roa: kappa must be > 0");
    if (max_steps < 1) throw std::invalid_argument("roa: max_steps must be >= 1");
    if (!(congruence_rel_tol > 0.0)) throw std::invalid_argument("roa: rel_tol must be > 0");
    if (!(velocity_threshold > 0.0))
        throw std::invalid_argument("roa: velocity threshold must be > 0");
    if (samples.empty()) {
        if (grid_nx < 1 || grid_ny < 1)
            throw std::invalid_argument("roa: grid resolution must be >= 1");
        if (!(box[1] >= box[0]) || !(box[3] >= box[2]))
            throw std::invalid_argument("roa: malformed sample box");
    }
    if (desired.dim < 2) throw std::invalid_argument("roa: sweep needs dimension >= 2");
}

std::vector<std::array<double, 2>> sample_points(const RoaConfig& cfg) {
    if (!cfg.samples.empty()) return cfg.samples;
    std::vector<std::array<double, 2>> pts;
    pts.reserve(std::size_t(cfg.grid_nx) * std::size_t(cfg.grid_ny));
    for (int iy = 0; iy < cfg.grid_ny; ++iy) {
        for (int ix = 0; ix < cfg.grid_nx; ++ix) {
            const double fx = cfg.grid_nx == 1 ? 0.5 : double(ix) / (cfg.grid_nx - 1);
            const double fy = cfg.grid_ny == 1 ? 0.5 : double(iy) / (cfg.grid_ny - 1);
            pts.push_back({cfg.box[0] + fx * (cfg.box[1] - cfg.box[0]),
                           cfg.box[2] + fy * (cfg.box[3] - cfg.box[2])});
        }
    }
    return pts;
}

RoaOutcomeKind classify_final(const Configuration& q_last_prev, const Configuration& q_last,
                              const Configuration& q_star, double rel_tol, double vel_threshold,
                              double h) {
    if (!q_last.finite() || !q_last_prev.finite()) return RoaOutcomeKind::Diverged;
    bool at_rest = true;
    for (int i = 0; i < q_last.agents && at_rest; ++i) {
        double v2 = 0.0;
        for (int a = 0; a < q_last.dim; ++a) {
            const double v = (q_last.agent(i)[a] - q_last_prev.agent(i)[a]) / h;
            v2 += v * v;
        }
        at_rest = std::sqrt(v2) < vel_threshold;
    }
    if (!at_rest) return RoaOutcomeKind::NotConverged;
    return is_congruent(q_last, q_star, rel_tol) ? RoaOutcomeKind::ConvergedCongruent
                                                 : RoaOutcomeKind::ConvergedOther;
}

RoaOutcome run_sample(const RoaConfig& cfg, const FormationGraph& graph,
                      const PotentialSpec& spec, double x, double y) {
    RoaOutcome out;
    out.x = x;
    out.y = y;

    Configuration q0 = cfg.desired;
    q0.agent(cfg.displaced_agent)[0] = x;
    q0.agent(cfg.displaced_agent)[1] = y;

    const ViParams params(cfg.h, cfg.kappa);
    ViState st;
    st.q_prev = q0;
    st.q_curr = q0;  // rest start: q1 = q0 + h*0
    StackedVector g(q0.agents, q0.dim);

    std::int64_t steps = 1;
    bool diverged = false;
    for (; steps < cfg.max_steps; ++steps) {
        try {
            vi_step_inplace(st, params, graph, spec, g);
        } catch (const DivergenceError&) {
            diverged = true;
            break;
        }
    }
    out.steps_used = diverged ? steps + 1 : cfg.max_steps;
    if (diverged) {
        out.kind = RoaOutcomeKind::Diverged;
        out.final_energy = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.kind = classify_final(st.q_prev, st.q_curr, cfg.desired, cfg.congruence_rel_tol,
                              cfg.velocity_threshold, cfg.h);
    out.final_energy = discrete_energy(st.q_prev, st.q_curr, params, graph, spec).total;
    return out;
}

std::vector<RoaOutcome> run_sweep(const RoaConfig& cfg, const FormationGraph& graph,
                                  const PotentialSpec& spec, int workers, const ChunkSink& sink,
                                  std::size_t chunk_size) {
    cfg.validate(graph);
    if (workers < 1) throw std::invalid_argument("roa: worker count must be >= 1");
    if (chunk_size < 1) throw std::invalid_argument("roa: chunk size must be >= 1");

    const auto pts = sample_points(cfg);
    std::vector<RoaOutcome> outcomes(pts.size());

    // Chunks complete strictly in order so partial output is deterministic;
    // samples inside a chunk are independent and run in parallel.
    for (std::size_t first = 0; first < pts.size(); first += chunk_size) {
        const std::int64_t last = std::int64_t(std::min(pts.size(), first + chunk_size));
        #pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
        for (std::int64_t k = std::int64_t(first); k < last; ++k) {
            outcomes[std::size_t(k)] =
                run_sample(cfg, graph, spec, pts[std::size_t(k)][0], pts[std::size_t(k)][1]);
        }
        if (sink)
            sink(first, std::span<const RoaOutcome>(outcomes.data() + first,
                                                    std::size_t(last) - first));
    }
    return outcomes;
}

std::vector<RoaOutcome> run_sweep_serial(const RoaConfig& cfg, const FormationGraph& graph,
                                         const PotentialSpec& spec) {
    cfg.validate(graph);
    const auto pts = sample_points(cfg);
    std::vector<RoaOutcome> outcomes;
    outcomes.reserve(pts.size());
    for (const auto& p : pts) outcomes.push_back(run_sample(cfg, graph, spec, p[0], p[1]));
    return outcomes;
}

}  // namespace formint
