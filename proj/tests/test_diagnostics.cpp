#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "formint/diagnostics.hpp"

using namespace formint;

TEST_CASE("conservative bound and alpha") {
    SUBCASE("seven agents, eleven edges, unit bounds") {
        const AlphaInputs in{1.0, 1.0, 0.5, 7, 11, 1.0};
        const double m2 = conservative_field_bound(in) * conservative_field_bound(in);
        CHECK(m2 == doctest::Approx(708.5).epsilon(1e-12));
        const double a = alpha_bound(in);
        CHECK(a == doctest::Approx(1.0 / (std::numbers::e * std::sqrt(708.5))).epsilon(1e-12));
        CHECK(a > 0.0135);
        CHECK(a < 0.0145);
    }
    SUBCASE("no edges, vanishing damping") {
        const AlphaInputs in{1.0, 1.0, 0.0, 3, 0, 0.0};
        CHECK(conservative_field_bound(in) == doctest::Approx(1.0));
        CHECK(alpha_bound(in) == doctest::Approx(1.0 / std::numbers::e).epsilon(1e-14));
    }
    SUBCASE("monotone in each worsening input") {
        const AlphaInputs base{1.0, 1.0, 0.5, 7, 11, 1.0};
        const double a0 = alpha_bound(base);
        AlphaInputs w = base;
        w.num_edges = 22;
        CHECK(alpha_bound(w) < a0);
        w = base;
        w.kappa = 1.0;
        CHECK(alpha_bound(w) < a0);
        w = base;
        w.num_agents = 14;
        CHECK(alpha_bound(w) < a0);
        w = base;
        w.momentum_bound = 2.0;
        CHECK(alpha_bound(w) < a0);
        w = base;
        w.max_desired_distance = 2.0;
        CHECK(alpha_bound(w) < a0);
    }
    SUBCASE("identity alpha * e * M = R") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.1, 5.0);
        for (int t = 0; t < 50; ++t) {
            const AlphaInputs in{u(rng), u(rng), u(rng), 1 + int(u(rng)), int(u(rng)), u(rng)};
            const double lhs = alpha_bound(in) * std::numbers::e * conservative_field_bound(in);
            CHECK(std::abs(lhs - in.radius) <= 1e-12 * in.radius);
        }
    }
    SUBCASE("rejects bad inputs") {
        CHECK_THROWS_AS(alpha_bound(AlphaInputs{0.0, 1, 1, 1, 1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(alpha_bound(AlphaInputs{1, -1, 1, 1, 1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(alpha_bound(AlphaInputs{1, 1, 1, 0, 1, 1}), std::invalid_argument);
    }
}

TEST_CASE("guaranteed step budget") {
    CHECK(max_guaranteed_steps(0.014, 0.014) == 117);  // floor(e^{1/2} / 0.014)
    const double alpha = 0.3;
    CHECK(max_guaranteed_steps(alpha, alpha) ==
          std::uint64_t(std::floor(std::exp(0.5) / alpha)));
    CHECK_THROWS_AS(max_guaranteed_steps(0.02, 0.014), std::invalid_argument);
    CHECK_THROWS_AS(max_guaranteed_steps(-0.1, 0.014), std::invalid_argument);
    // tiny h saturates instead of overflowing
    CHECK(max_guaranteed_steps(1e-5, 0.5) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("energy audit") {
    SUBCASE("constant series has no violations") {
        const std::vector<double> s(10, 3.0);
        const EnergyAudit a = audit_energy(s, 1e-12);
        CHECK(a.violations.empty());
        CHECK(a.max_increase == doctest::Approx(0.0));
    }
    SUBCASE("strictly increasing series flags every step") {
        const std::vector<double> s{0, 1, 2, 3};
        const EnergyAudit a = audit_energy(s, 1e-12);
        CHECK(a.violations.size() == 3);
        CHECK(a.max_increase == doctest::Approx(1.0));
    }
    SUBCASE("flags exactly the perturbed indices of a monotone series") {
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 30; ++t) {
            std::vector<double> s(50);
            double e = 100.0;
            for (double& x : s) {
                e -= u(rng);
                x = e;
            }
            std::vector<std::int64_t> expected;
            for (int k = 0; k < 5; ++k) {
                const std::size_t idx = 1 + std::size_t(u(rng) * 47);
                if (s[idx + 1] - s[idx] <= 0.5) {  // make it a genuine increase
                    s[idx + 1] = s[idx] + 0.5 + u(rng);
                }
            }
            const double slack = 1e-9;
            const EnergyAudit a = audit_energy(s, slack);
            for (std::size_t k = 0; k + 1 < s.size(); ++k) {
                const bool flagged =
                    std::find_if(a.violations.begin(), a.violations.end(),
                                 [&](const EnergyAudit::Violation& v) {
                                     return v.index == std::int64_t(k);
                                 }) != a.violations.end();
                CHECK(flagged == (s[k + 1] - s[k] > slack));
            }
        }
    }
    SUBCASE("too-short series is rejected") {
        const std::vector<double> s{1.0};
        CHECK_THROWS_AS(audit_energy(s, 0.0), std::invalid_argument);
    }
}

TEST_CASE("dissipation rate error") {
    SUBCASE("rest at equilibrium gives zero error") {
        FormationGraph g(2, 2, {{0, 1}});
        PotentialSpec spec = PotentialSpec::displacement_based(g, {1.0, 0.0});
        const Configuration q0 = Configuration::from_rows({{1, 0}, {0, 0}});
        const ViParams p(0.01, 2.0);
        const Trajectory t = run_vi(q0, Configuration(2, 2, 0.0), p, g, spec, 20);
        for (double e : dissipation_rate_error(t, p, g, spec)) CHECK(e == doctest::Approx(0.0));
    }
    SUBCASE("free agent matches the closed form") {
        // One damped free agent: dq_{k+1} = L dq_k with L = (1-kh)/(1+kh), so
        // E_k = |dq_0|^2 L^{2k} / (2h) and the pre-momentum is (1/h + k) dq_k.
        FormationGraph g(1, 2, {});
        PotentialSpec spec = PotentialSpec::distance_based(g, {});
        const double h = 1e-3, kappa = 2.0;
        const ViParams p(h, kappa);
        const Configuration q0 = Configuration::from_rows({{0.0, 0.0}});
        const Configuration v0 = Configuration::from_rows({{1.0, -0.5}});
        const Trajectory t = run_vi(q0, v0, p, g, spec, 50);
        const std::vector<double> err = dissipation_rate_error(t, p, g, spec);
        const double L = (1.0 - kappa * h) / (1.0 + kappa * h);
        const double dq0 = sq_norm(std::span<const double>(t.q[1].v)) -
                           2.0 * (t.q[1].v[0] * t.q[0].v[0] + t.q[1].v[1] * t.q[0].v[1]) +
                           sq_norm(std::span<const double>(t.q[0].v));
        for (std::size_t k = 0; k < err.size(); ++k) {
            const double dqk = dq0 * std::pow(L, 2.0 * double(k));
            const double rate = (L * L - 1.0) * dqk / (2.0 * h * h);
            const double predicted = -h * kappa * std::pow(1.0 / h + kappa, 2.0) * dqk;
            CHECK(err[k] == doctest::Approx(std::abs(rate - predicted)).epsilon(1e-10));
        }
    }
    SUBCASE("halving the step roughly halves the worst deviation") {
        FormationGraph g(4, 2, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
        const Configuration shape = Configuration::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        PotentialSpec spec = PotentialSpec::distance_from_shape(g, shape);
        std::mt19937 rng(42);
        Configuration q0 = shape;
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        for (double& x : q0.v) x += u(rng);

        auto worst = [&](double h) {
            const ViParams p(h, 5.0);
            const Trajectory t =
                run_vi(q0, Configuration(4, 2, 0.0), p, g, spec, std::int64_t(1.0 / h));
            REQUIRE(!t.diverged);
            double w = 0.0;
            for (double e : dissipation_rate_error(t, p, g, spec)) w = std::max(w, e);
            return w;
        };
        const double ratio = worst(2e-3) / worst(1e-3);
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("order estimation") {
    FormationGraph g(2, 2, {{0, 1}});
    PotentialSpec spec = PotentialSpec::displacement_based(g, {1.0, 0.0});
    const double kappa = 1.5;
    // zero initial acceleration in the modeled flow: v0 = -+ grad/(4 kappa)
    const Configuration q0 = Configuration::from_rows({{1.3, 0.15}, {0.0, 0.0}});
    const Configuration v0 = Configuration::from_rows(
        {{-0.3 / (4 * kappa), -0.15 / (4 * kappa)}, {0.3 / (4 * kappa), 0.15 / (4 * kappa)}});
    const std::vector<double> hs{4e-3, 2e-3, 1e-3, 5e-4};

    SUBCASE("euler is first order") {
        const OrderEstimate est = estimate_order(OrderMethod::Euler, q0, v0, kappa, g, spec, hs, 1.0);
        CHECK(est.slope >= 0.8);
        CHECK(est.slope <= 1.2);
    }
    SUBCASE("rk4 is fourth order on steps above the noise floor") {
        const std::vector<double> big{0.2, 0.1, 0.05, 0.025};
        const OrderEstimate est = estimate_order(OrderMethod::RK4, q0, v0, kappa, g, spec, big, 1.0);
        CHECK(est.slope >= 3.5);
        CHECK(est.slope <= 4.5);
    }
    SUBCASE("two-step scheme is second order against its modeled flow") {
        const OrderEstimate est = estimate_order(OrderMethod::VI, q0, v0, kappa, g, spec, hs, 1.0);
        CHECK(est.slope >= 1.8);
        CHECK(est.slope <= 2.2);
        // error quarters per halving
        for (std::size_t k = 0; k + 1 < est.errors.size(); ++k)
            CHECK(est.errors[k] / est.errors[k + 1] == doctest::Approx(4.0).epsilon(0.05));
    }
    SUBCASE("input validation") {
        const std::vector<double> two{1e-2, 5e-3};
        CHECK_THROWS_AS(estimate_order(OrderMethod::Euler, q0, v0, kappa, g, spec, two, 1.0),
                        std::invalid_argument);
        const std::vector<double> bad{3e-3, 2e-3, 1e-3};  // 3e-3 does not divide 1.0
        CHECK_THROWS_AS(estimate_order(OrderMethod::Euler, q0, v0, kappa, g, spec, bad, 1.0),
                        std::invalid_argument);
    }
}
