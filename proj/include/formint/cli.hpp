#pragma once

#include <limits>
#include <string>

namespace formint::cli {

/// Exit code contract: 0 success, 1 config error, 2 divergence or guarantee
/// violation, 3 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitIo = 3;

struct RunOpts {
    std::string config_path;
    std::string out_dir;
    int workers = 0;  // 0: resolve from FORMINT_WORKERS, then hardware
    double h_override = std::numeric_limits<double>::quiet_NaN();
    double kappa_override = std::numeric_limits<double>::quiet_NaN();
};

struct AlphaOpts {
    double radius = 0.0;
    double momentum_bound = 0.0;
    double kappa = 0.0;
    int agents = 0;
    int edges = 0;
    double max_desired_distance = 0.0;
    double h = std::numeric_limits<double>::quiet_NaN();  // optional
};

int cmd_simulate(const RunOpts& opts);
int cmd_compare(const RunOpts& opts);
int cmd_alpha(const AlphaOpts& opts);
int cmd_order(const RunOpts& opts);
int cmd_roa(const RunOpts& opts);

/// Flag value if nonzero, else FORMINT_WORKERS, else available parallelism.
int resolve_workers(int flag_value);

/// Shortest-full-precision decimal rendering (17 significant digits).
std::string g17(double x);

}  // namespace formint::cli
