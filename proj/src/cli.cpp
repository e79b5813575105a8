#include "formint/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "formint/config.hpp"
#include "formint/diagnostics.hpp"
#include "formint/reference.hpp"
#include "formint/roa.hpp"

namespace formint::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int resolve_workers(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("FORMINT_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1, omp_get_max_threads());
}

namespace {

constexpr const char* kVersion = "0.1.0";

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot open output file: " + p.string());
    return f;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
}

void write_meta(const fs::path& dir, const std::string& command, const json& effective_config,
                int workers, double wall_ms) {
    json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["workers"] = workers;
    meta["wall_ms"] = wall_ms;
    meta["config"] = effective_config;
    auto f = open_out(dir / "meta.json");
    f << meta.dump(2) << "\n";
    if (!f) throw IoError("failed writing meta.json");
}

void apply_overrides(json& cfg, const RunOpts& opts) {
    if (!std::isnan(opts.h_override)) cfg["h"] = opts.h_override;
    if (!std::isnan(opts.kappa_override)) cfg["kappa"] = opts.kappa_override;
}

void write_config_header(std::ofstream& f, const FormationGraph& graph, const char* prefix) {
    for (int i = 0; i < graph.num_agents(); ++i)
        for (int a = 0; a < graph.dim(); ++a) f << "," << prefix << i << "_" << a;
}

void write_flat(std::ofstream& f, const StackedVector& x) {
    for (double v : x.v) f << "," << g17(v);
}

/// trajectory.csv: step,t,q<i>_<a>... one row per stored state.
void write_trajectory(const fs::path& p, const FormationGraph& graph,
                      const std::vector<Configuration>& qs, double h) {
    auto f = open_out(p);
    f << "step,t";
    write_config_header(f, graph, "q");
    f << "\n";
    for (std::size_t k = 0; k < qs.size(); ++k) {
        f << k << "," << g17(double(k) * h);
        write_flat(f, qs[k]);
        f << "\n";
    }
    if (!f) throw IoError("failed writing " + p.string());
}

/// energy.csv: step,t,kinetic,potential,total,E_agent<i>...
void write_energy(const fs::path& p, double h, const std::vector<double>& total,
                  const std::vector<double>& kin, const std::vector<double>& pot,
                  const std::vector<std::vector<double>>& agents) {
    auto f = open_out(p);
    f << "step,t,kinetic,potential,total";
    if (!agents.empty())
        for (std::size_t i = 0; i < agents.front().size(); ++i) f << ",E_agent" << i;
    f << "\n";
    for (std::size_t k = 0; k < total.size(); ++k) {
        f << k << "," << g17(double(k) * h) << "," << g17(kin[k]) << "," << g17(pot[k]) << ","
          << g17(total[k]);
        for (double e : agents[k]) f << "," << g17(e);
        f << "\n";
    }
    if (!f) throw IoError("failed writing " + p.string());
}

struct SimCase {
    std::string integrator;
    double h;
    std::int64_t steps;
};

SimCase parse_case(const json& j, const std::string& ctx) {
    SimCase c;
    const json& integ = j.at("integrator");
    if (!integ.is_string()) throw ConfigError(ctx + ": \"integrator\" must be a string");
    c.integrator = integ.get<std::string>();
    if (c.integrator != "vi" && c.integrator != "euler" && c.integrator != "rk4")
        throw ConfigError(ctx + ": integrator must be \"vi\", \"euler\" or \"rk4\"");
    c.h = get_double(j, "h", ctx);
    if (!(c.h > 0.0)) throw ConfigError(ctx + ": h must be > 0");
    c.steps = get_int(j, "steps", ctx);
    if (c.steps < 1) throw ConfigError(ctx + ": steps must be >= 1");
    return c;
}

struct CaseResult {
    std::vector<Configuration> q;
    std::vector<double> energy, kin, pot;
    std::vector<std::vector<double>> agents;
    std::int64_t field_evals = 0;
    bool diverged = false;
    std::int64_t divergence_step = -1;
    double wall_ms = 0.0;
};

CaseResult run_case(const SimCase& c, const Configuration& q0, const Configuration& v0,
                    double kappa, const FormationGraph& graph, const PotentialSpec& spec) {
    CaseResult r;
    Stopwatch sw;
    if (c.integrator == "vi") {
        Trajectory t = run_vi(q0, v0, ViParams(c.h, kappa), graph, spec, c.steps);
        r.q = std::move(t.q);
        r.energy = std::move(t.energy);
        r.kin = std::move(t.energy_kinetic);
        r.pot = std::move(t.energy_potential);
        r.agents = std::move(t.energy_agents);
        r.field_evals = std::int64_t(r.q.size()) - 1;  // one gradient stack per update
        r.diverged = t.diverged;
        r.divergence_step = t.divergence_step;
    } else {
        RefTrajectory t =
            run_reference(c.integrator == "euler" ? Method::Euler : Method::RK4, q0, v0, c.h,
                          kappa, graph, spec, c.steps);
        r.q = std::move(t.q);
        r.energy = std::move(t.energy);
        r.kin = std::move(t.energy_kinetic);
        r.pot = std::move(t.energy_potential);
        r.agents = std::move(t.energy_agents);
        r.field_evals = t.rhs_evals;
        r.diverged = t.diverged;
        r.divergence_step = t.divergence_step;
    }
    r.wall_ms = sw.ms();
    return r;
}

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int cmd_simulate(const RunOpts& opts) {
    return guard([&] {
        Stopwatch sw;
        json cfg = load_json_file(opts.config_path);
        apply_overrides(cfg, opts);
        check_keys(cfg,
                   {"graph", "potential", "initial", "integrator", "h", "kappa", "steps", "seed"},
                   "simulate config");
        const FormationGraph graph = parse_graph(cfg.at("graph"));
        const PotentialSpec spec = parse_potential(cfg.at("potential"), graph);
        Configuration q0, v0;
        parse_initial(cfg.at("initial"), graph, q0, v0);
        const double kappa = get_double(cfg, "kappa", "simulate config");
        if (!(kappa > 0.0)) throw ConfigError("simulate config: kappa must be > 0");
        const SimCase c = parse_case(cfg, "simulate config");

        const fs::path dir(opts.out_dir);
        ensure_dir(dir);
        const CaseResult r = run_case(c, q0, v0, kappa, graph, spec);
        write_trajectory(dir / "trajectory.csv", graph, r.q, c.h);
        write_energy(dir / "energy.csv", c.h, r.energy, r.kin, r.pot, r.agents);
        write_meta(dir, "simulate", cfg, 1, sw.ms());
        if (r.diverged) {
            std::cerr << "divergence at step " << r.divergence_step << "\n";
            return kExitDiverged;
        }
        std::cout << "simulate: " << r.q.size() - 1 << " steps, final total energy "
                  << g17(r.energy.back()) << "\n";
        return kExitOk;
    });
}

int cmd_compare(const RunOpts& opts) {
    return guard([&] {
        Stopwatch sw;
        json cfg = load_json_file(opts.config_path);
        apply_overrides(cfg, opts);
        check_keys(cfg,
                   {"graph", "potential", "initial", "kappa", "combos", "congruence_rel_tol",
                    "seed"},
                   "compare config");
        const FormationGraph graph = parse_graph(cfg.at("graph"));
        const PotentialSpec spec = parse_potential(cfg.at("potential"), graph);
        Configuration q0, v0;
        parse_initial(cfg.at("initial"), graph, q0, v0);
        const double kappa = get_double(cfg, "kappa", "compare config");
        if (!(kappa > 0.0)) throw ConfigError("compare config: kappa must be > 0");
        double rel_tol = 0.01;
        if (cfg.contains("congruence_rel_tol"))
            rel_tol = get_double(cfg, "congruence_rel_tol", "compare config");

        const json& combos = cfg.at("combos");
        if (!combos.is_array() || combos.size() < 2)
            throw ConfigError("compare config: need at least two combos");
        std::vector<SimCase> cases;
        for (std::size_t i = 0; i < combos.size(); ++i) {
            check_keys(combos[i], {"integrator", "h", "steps"}, "combo");
            cases.push_back(parse_case(combos[i], "combo " + std::to_string(i)));
        }

        const fs::path dir(opts.out_dir);
        ensure_dir(dir);

        std::vector<CaseResult> results;
        bool any_diverged = false;
        auto summary = open_out(dir / "summary.csv");
        summary << "combo,integrator,h,steps,wall_ms,field_evals,diverged\n";
        auto finals = open_out(dir / "finals.csv");
        finals << "combo";
        write_config_header(finals, graph, "q");
        finals << "\n";
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const SimCase& c = cases[i];
            CaseResult r = run_case(c, q0, v0, kappa, graph, spec);
            const fs::path sub =
                dir / ("combo_" + std::to_string(i) + "_" + c.integrator + "_h" + g17(c.h));
            ensure_dir(sub);
            write_trajectory(sub / "trajectory.csv", graph, r.q, c.h);
            write_energy(sub / "energy.csv", c.h, r.energy, r.kin, r.pot, r.agents);
            summary << i << "," << c.integrator << "," << g17(c.h) << "," << c.steps << ","
                    << g17(r.wall_ms) << "," << r.field_evals << "," << (r.diverged ? 1 : 0)
                    << "\n";
            finals << i;
            write_flat(finals, r.q.back());
            finals << "\n";
            any_diverged = any_diverged || r.diverged;
            results.push_back(std::move(r));
        }
        if (!summary || !finals) throw IoError("failed writing comparison tables");

        auto cong = open_out(dir / "congruence.csv");
        cong << "combo_i,combo_j,max_rel_deviation,congruent\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (std::size_t j = 0; j < results.size(); ++j) {
                const double dev =
                    max_pairwise_deviation(results[i].q.back(), results[j].q.back());
                const bool c = is_congruent(results[i].q.back(), results[j].q.back(), rel_tol);
                cong << i << "," << j << "," << g17(dev) << "," << (c ? 1 : 0) << "\n";
            }
        }
        if (!cong) throw IoError("failed writing congruence.csv");

        write_meta(dir, "compare", cfg, 1, sw.ms());
        std::cout << "compare: " << cases.size() << " combos written to " << dir.string() << "\n";
        return any_diverged ? kExitDiverged : kExitOk;
    });
}

int cmd_alpha(const AlphaOpts& opts) {
    return guard([&] {
        AlphaInputs in{opts.radius, opts.momentum_bound, opts.kappa,
                       opts.agents, opts.edges,          opts.max_desired_distance};
        const double m = conservative_field_bound(in);
        const double alpha = alpha_bound(in);
        std::cout << "M = " << g17(m) << "\n";
        std::cout << "alpha = " << g17(alpha) << "\n";
        if (!std::isnan(opts.h)) {
            if (opts.h > alpha) {
                std::cerr << "warning: h = " << g17(opts.h) << " exceeds alpha = " << g17(alpha)
                          << "; the energy-behavior guarantee does not apply\n";
                return kExitConfig;
            }
            std::cout << "max_guaranteed_steps(h=" << g17(opts.h)
                      << ") = " << max_guaranteed_steps(opts.h, alpha) << "\n";
        }
        return kExitOk;
    });
}

int cmd_order(const RunOpts& opts) {
    return guard([&] {
        Stopwatch sw;
        json cfg = load_json_file(opts.config_path);
        apply_overrides(cfg, opts);
        check_keys(cfg, {"graph", "potential", "initial", "kappa", "horizon", "h_list",
                         "methods", "seed"},
                   "order config");
        const FormationGraph graph = parse_graph(cfg.at("graph"));
        const PotentialSpec spec = parse_potential(cfg.at("potential"), graph);
        Configuration q0, v0;
        parse_initial(cfg.at("initial"), graph, q0, v0);
        const double kappa = get_double(cfg, "kappa", "order config");
        if (!(kappa > 0.0)) throw ConfigError("order config: kappa must be > 0");
        const double T = get_double(cfg, "horizon", "order config");
        if (!(T > 0.0)) throw ConfigError("order config: horizon must be > 0");

        auto parse_hlist = [](const json& arr, const std::string& ctx) {
            if (!arr.is_array() || arr.size() < 3)
                throw ConfigError(ctx + ": need at least three step sizes");
            std::vector<double> hs;
            for (const json& x : arr) {
                if (!x.is_number()) throw ConfigError(ctx + ": step sizes must be numbers");
                hs.push_back(x.get<double>());
            }
            return hs;
        };
        const std::vector<double> default_hs = parse_hlist(cfg.at("h_list"), "order config");

        struct MethodPlan {
            OrderMethod method;
            std::string name;
            std::vector<double> hs;
        };
        std::vector<MethodPlan> plans;
        auto method_of = [](const std::string& s) {
            if (s == "vi") return OrderMethod::VI;
            if (s == "euler") return OrderMethod::Euler;
            if (s == "rk4") return OrderMethod::RK4;
            throw ConfigError("order config: unknown method \"" + s + "\"");
        };
        if (cfg.contains("methods")) {
            const json& ms = cfg.at("methods");
            if (!ms.is_array() || ms.empty())
                throw ConfigError("order config: \"methods\" must be a non-empty array");
            for (const json& m : ms) {
                check_keys(m, {"method", "h_list"}, "order method");
                const json& name = m.at("method");
                if (!name.is_string())
                    throw ConfigError("order method: \"method\" must be a string");
                MethodPlan p;
                p.name = name.get<std::string>();
                p.method = method_of(p.name);
                p.hs = m.contains("h_list") ? parse_hlist(m.at("h_list"), "order method")
                                            : default_hs;
                plans.push_back(std::move(p));
            }
        } else {
            plans = {{OrderMethod::VI, "vi", default_hs},
                     {OrderMethod::Euler, "euler", default_hs},
                     {OrderMethod::RK4, "rk4", default_hs}};
        }

        const fs::path dir(opts.out_dir);
        ensure_dir(dir);
        auto rows = open_out(dir / "order.csv");
        rows << "method,h,error\n";
        auto summ = open_out(dir / "order_summary.csv");
        summ << "method,slope\n";
        for (const MethodPlan& p : plans) {
            OrderEstimate est;
            try {
                est = estimate_order(p.method, q0, v0, kappa, graph, spec, p.hs, T);
            } catch (const std::runtime_error& e) {
                std::cerr << "order: " << e.what() << "\n";
                return kExitDiverged;
            }
            for (std::size_t k = 0; k < est.errors.size(); ++k)
                rows << p.name << "," << g17(est.step_sizes[k]) << "," << g17(est.errors[k])
                     << "\n";
            summ << p.name << "," << g17(est.slope) << "\n";
            std::cout << "order " << p.name << ": slope = " << g17(est.slope) << "\n";
        }
        if (!rows || !summ) throw IoError("failed writing order tables");
        write_meta(dir, "order", cfg, 1, sw.ms());
        return kExitOk;
    });
}

int cmd_roa(const RunOpts& opts) {
    return guard([&] {
        Stopwatch sw;
        json cfg = load_json_file(opts.config_path);
        apply_overrides(cfg, opts);
        check_keys(cfg,
                   {"graph", "potential", "desired_positions", "displaced_agent", "box", "grid",
                    "samples", "h", "kappa", "max_steps", "congruence_rel_tol",
                    "velocity_threshold", "seed"},
                   "roa config");
        const FormationGraph graph = parse_graph(cfg.at("graph"));
        const PotentialSpec spec = parse_potential(cfg.at("potential"), graph);

        RoaConfig rc;
        rc.desired = parse_positions(cfg.at("desired_positions"), graph, "roa desired_positions");
        rc.displaced_agent = int(get_int(cfg, "displaced_agent", "roa config"));
        rc.h = get_double(cfg, "h", "roa config");
        rc.kappa = get_double(cfg, "kappa", "roa config");
        rc.max_steps = get_int(cfg, "max_steps", "roa config");
        if (cfg.contains("congruence_rel_tol"))
            rc.congruence_rel_tol = get_double(cfg, "congruence_rel_tol", "roa config");
        if (cfg.contains("velocity_threshold"))
            rc.velocity_threshold = get_double(cfg, "velocity_threshold", "roa config");
        if (cfg.contains("seed")) rc.seed = std::uint64_t(get_int(cfg, "seed", "roa config"));

        if (cfg.contains("samples")) {
            const json& ss = cfg.at("samples");
            if (!ss.is_array() || ss.empty())
                throw ConfigError("roa config: \"samples\" must be a non-empty array");
            for (const json& s : ss) {
                if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
                    throw ConfigError("roa config: each sample must be [x, y]");
                rc.samples.push_back({s[0].get<double>(), s[1].get<double>()});
            }
        } else {
            const json& box = cfg.at("box");
            if (!box.is_array() || box.size() != 4)
                throw ConfigError("roa config: \"box\" must be [xmin, xmax, ymin, ymax]");
            for (std::size_t k = 0; k < 4; ++k) {
                if (!box[k].is_number()) throw ConfigError("roa config: box entries must be numbers");
                rc.box[k] = box[k].get<double>();
            }
            const json& grid = cfg.at("grid");
            if (!grid.is_array() || grid.size() != 2 || !grid[0].is_number_integer() ||
                !grid[1].is_number_integer())
                throw ConfigError("roa config: \"grid\" must be [nx, ny]");
            rc.grid_nx = grid[0].get<int>();
            rc.grid_ny = grid[1].get<int>();
        }
        try {
            rc.validate(graph);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }

        const int workers = resolve_workers(opts.workers);
        const fs::path dir(opts.out_dir);
        ensure_dir(dir);
        const fs::path table = dir / "outcomes.csv";
        auto f = open_out(table);
        f << "x,y,outcome,steps,final_energy\n";

        std::size_t counts[4] = {0, 0, 0, 0};
        auto sink = [&](std::size_t, std::span<const RoaOutcome> chunk) {
            for (const RoaOutcome& o : chunk) {
                f << g17(o.x) << "," << g17(o.y) << "," << int(o.kind) << "," << o.steps_used
                  << "," << g17(o.final_energy) << "\n";
                ++counts[int(o.kind)];
            }
            f.flush();
            if (!f) {
                // Leave a marker so an interrupted table is recognizable.
                std::ofstream marker(table, std::ios::app);
                marker << "# PARTIAL: write failure\n";
                throw IoError("failed writing " + table.string());
            }
        };
        run_sweep(rc, graph, spec, workers, sink);
        write_meta(dir, "roa", cfg, workers, sw.ms());

        std::cout << "roa: " << counts[0] << " converged_congruent, " << counts[1]
                  << " converged_other, " << counts[2] << " not_converged, " << counts[3]
                  << " diverged\n";
        return kExitOk;
    });
}

}  // namespace formint::cli
