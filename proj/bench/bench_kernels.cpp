// Timing harness: serial vs OpenMP gradient assembly, update-rule throughput
// against the four-stage Runge-Kutta baseline, and sweep scaling.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "formint/diagnostics.hpp"
#include "formint/reference.hpp"
#include "formint/roa.hpp"

using namespace formint;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Ring of s agents with chords to second neighbors: 2s edges, degree 4.
FormationGraph ring_graph(int s) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(std::size_t(2 * s));
    for (int i = 0; i < s; ++i) {
        edges.emplace_back(i, (i + 1) % s);
        edges.emplace_back(i, (i + 2) % s);
    }
    return FormationGraph(s, 2, edges);
}

Configuration ring_positions(int s, double radius, std::mt19937& rng, double jitter) {
    Configuration q(s, 2);
    std::uniform_real_distribution<double> u(-jitter, jitter);
    for (int i = 0; i < s; ++i) {
        const double th = 2.0 * M_PI * i / s;
        q.agent(i)[0] = radius * std::cos(th) + u(rng);
        q.agent(i)[1] = radius * std::sin(th) + u(rng);
    }
    return q;
}

}  // namespace

int main() {
    std::mt19937 rng(7);
    const int threads = omp_get_max_threads();
    std::printf("threads available: %d\n\n", threads);

    // --- gradient assembly, serial vs parallel ---
    std::printf("%-10s %-8s %12s %12s %8s\n", "agents", "reps", "serial_ms", "parallel_ms",
                "speedup");
    for (int s : {512, 4096, 32768}) {
        const FormationGraph g = ring_graph(s);
        const Configuration q = ring_positions(s, double(s) / 6.0, rng, 0.05);
        const PotentialSpec spec = PotentialSpec::distance_from_shape(g, q);
        StackedVector out(s, 2);
        const int reps = 4 * 32768 / s + 1;

        gradient_stack_serial(g, spec, q, out);  // warm up
        double t0 = now_ms();
        for (int r = 0; r < reps; ++r) gradient_stack_serial(g, spec, q, out);
        const double serial = (now_ms() - t0) / reps;

        gradient_stack(g, spec, q, out);
        t0 = now_ms();
        for (int r = 0; r < reps; ++r) gradient_stack(g, spec, q, out);
        const double parallel = (now_ms() - t0) / reps;

        std::printf("%-10d %-8d %12.4f %12.4f %7.2fx\n", s, reps, serial, parallel,
                    serial / parallel);
    }

    // --- stepper throughput: two-step update vs RK4 on the same system ---
    {
        const int s = 4096;
        const FormationGraph g = ring_graph(s);
        Configuration q = ring_positions(s, double(s) / 6.0, rng, 0.02);
        const PotentialSpec spec = PotentialSpec::distance_from_shape(g, q);
        const double h = 1e-3, kappa = 2.0;
        const int steps = 200;

        ViState st;
        st.q_prev = q;
        st.q_curr = q;
        StackedVector buf(s, 2);
        const ViParams params(h, kappa);
        double t0 = now_ms();
        for (int k = 0; k < steps; ++k) vi_step_inplace(st, params, g, spec, buf);
        const double vi_ms = (now_ms() - t0) / steps;

        FirstOrderState x{q, MomentumVector(s, 2)};
        t0 = now_ms();
        x = rk4_integrate(FlowField{kappa, 1.0}, g, spec, x, h, steps, 0,
                          [](std::int64_t, const FirstOrderState&) {});
        const double rk4_ms = (now_ms() - t0) / steps;
        std::printf("\nstepper (%d agents): update %.4f ms/step, rk4 %.4f ms/step (%.2fx)\n", s,
                    vi_ms, rk4_ms, rk4_ms / vi_ms);
    }

    // --- sweep scaling, serial loop vs worker pool ---
    {
        std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6},
                                                  {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}};
        const FormationGraph g(7, 2, edges);
        Configuration shape(7, 2);
        for (int i = 1; i <= 6; ++i) {
            shape.agent(i)[0] = std::cos(M_PI * (i - 1) / 3.0);
            shape.agent(i)[1] = std::sin(M_PI * (i - 1) / 3.0);
        }
        const PotentialSpec spec = PotentialSpec::distance_from_shape(g, shape);
        RoaConfig rc;
        rc.desired = shape;
        rc.displaced_agent = 3;
        rc.box = {shape.agent(3)[0] - 0.5, shape.agent(3)[0] + 0.5, shape.agent(3)[1] - 0.5,
                  shape.agent(3)[1] + 0.5};
        rc.grid_nx = 64;
        rc.grid_ny = 64;
        rc.h = 0.014;
        rc.kappa = 0.5;
        rc.max_steps = 200;

        double t0 = now_ms();
        auto serial = run_sweep_serial(rc, g, spec);
        const double serial_ms = now_ms() - t0;
        t0 = now_ms();
        auto parallel = run_sweep(rc, g, spec, threads);
        const double parallel_ms = now_ms() - t0;

        bool identical = serial.size() == parallel.size();
        for (std::size_t k = 0; identical && k < serial.size(); ++k)
            identical = serial[k].kind == parallel[k].kind &&
                        serial[k].final_energy == parallel[k].final_energy;
        std::printf("sweep (%zu samples): serial %.1f ms, %d workers %.1f ms (%.2fx), results %s\n",
                    serial.size(), serial_ms, threads, parallel_ms, serial_ms / parallel_ms,
                    identical ? "identical" : "DIFFER");
    }
    return 0;
}
