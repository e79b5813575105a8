#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "formint/vi.hpp"

namespace formint {

enum class RoaOutcomeKind : int {
    ConvergedCongruent = 0,
    ConvergedOther = 1,
    NotConverged = 2,
    Diverged = 3,
};

const char* to_string(RoaOutcomeKind k);

/// Attraction-region sweep: one displaced agent, all others at the desired
/// shape, everything at rest. Samples come from a grid over an axis-aligned
/// box or from an explicit list of points.
struct RoaConfig {
    Configuration desired;  // q*
    int displaced_agent = 0;
    std::array<double, 4> box{0, 0, 0, 0};  // xmin, xmax, ymin, ymax
    int grid_nx = 0;
    int grid_ny = 0;
    std::vector<std::array<double, 2>> samples;  // explicit mode when non-empty
    double h = 0.0;
    double kappa = 0.0;
    std::int64_t max_steps = 0;
    double congruence_rel_tol = 0.01;
    double velocity_threshold = 0.1;
    std::uint64_t seed = 0;  // reserved for random sampling; recorded, unused by grid mode

    void validate(const FormationGraph& graph) const;
};

struct RoaOutcome {
    double x = 0.0;
    double y = 0.0;
    RoaOutcomeKind kind = RoaOutcomeKind::NotConverged;
    std::int64_t steps_used = 0;
    double final_energy = 0.0;
};

/// Sample points in deterministic order (row-major over the grid, or the
/// explicit list verbatim).
std::vector<std::array<double, 2>> sample_points(const RoaConfig& cfg);

/// Classify a finished run from its last two configurations: velocities are
/// backward differences (qN - qNm1)/h; small velocities plus congruence with
/// the desired shape is ConvergedCongruent, small velocities alone
/// ConvergedOther, non-finite data Diverged, anything else NotConverged.
RoaOutcomeKind classify_final(const Configuration& q_last_prev, const Configuration& q_last,
                              const Configuration& q_star, double rel_tol, double vel_threshold,
                              double h);

/// Run one sample to completion (position given for the displaced agent).
RoaOutcome run_sample(const RoaConfig& cfg, const FormationGraph& graph,
                      const PotentialSpec& spec, double x, double y);

/// Called after each completed chunk, in sample order; `first` is the index
/// of the chunk's first sample in the full outcome list.
using ChunkSink = std::function<void(std::size_t first, std::span<const RoaOutcome> chunk)>;

/// Sweep every sample; chunks of chunk_size samples run OpenMP-parallel with
/// the given worker count and are handed to the sink in deterministic order,
/// so results never depend on scheduling.
std::vector<RoaOutcome> run_sweep(const RoaConfig& cfg, const FormationGraph& graph,
                                  const PotentialSpec& spec, int workers,
                                  const ChunkSink& sink = {}, std::size_t chunk_size = 1024);

/// Single-threaded reference sweep; must produce results identical to run_sweep.
std::vector<RoaOutcome> run_sweep_serial(const RoaConfig& cfg, const FormationGraph& graph,
                                         const PotentialSpec& spec);

}  // namespace formint
