#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "formint/cli.hpp"
#include "formint/config.hpp"

using namespace formint;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("formint_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json square_config() {
    json cfg;
    cfg["graph"] = {{"agents", 4},
                    {"dim", 2},
                    {"edges", json::array({{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}})}};
    cfg["potential"] = {{"kind", "distance"},
                        {"desired_distances", {1.0, 1.0, 1.0, 1.0, std::sqrt(2.0)}}};
    cfg["initial"] = {
        {"desired_positions", json::array({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}})},
        {"displaced_agent", 3},
        {"displaced_position", {0.1, 0.9}}};
    cfg["integrator"] = "vi";
    cfg["h"] = 0.005;
    cfg["kappa"] = 5.0;
    cfg["steps"] = 50;
    return cfg;
}

fs::path write_config(const TempDir& dir, const json& cfg, const char* name = "config.json") {
    const fs::path p = dir.path / name;
    std::ofstream f(p);
    f << cfg.dump(2);
    return p;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("graph and potential parsing") {
    json g = {{"agents", 3}, {"dim", 2}, {"edges", json::array({{0, 1}, {1, 2}})}};
    const FormationGraph graph = parse_graph(g);
    CHECK(graph.num_edges() == 2);

    SUBCASE("unknown keys are rejected") {
        g["extra"] = 1;
        CHECK_THROWS_AS(parse_graph(g), ConfigError);
    }
    SUBCASE("self-loops are rejected with a named field") {
        g["edges"] = json::array({{1, 1}});
        CHECK_THROWS_AS(parse_graph(g), ConfigError);
    }
    SUBCASE("potential kinds") {
        json p = {{"kind", "distance"}, {"desired_distances", {1.0, 2.0}}};
        CHECK(parse_potential(p, graph).kind() == PotentialKind::DistanceBased);
        json d = {{"kind", "displacement"},
                  {"desired_offsets", json::array({{1.0, 0.0}, {0.0, 1.0}})}};
        CHECK(parse_potential(d, graph).kind() == PotentialKind::DisplacementBased);
        json bad = {{"kind", "magnetic"}, {"desired_distances", {1.0, 2.0}}};
        CHECK_THROWS_AS(parse_potential(bad, graph), ConfigError);
        json mixed = {{"kind", "distance"},
                      {"desired_distances", {1.0, 2.0}},
                      {"desired_offsets", json::array({{1.0, 0.0}, {0.0, 1.0}})}};
        CHECK_THROWS_AS(parse_potential(mixed, graph), ConfigError);
        json neg = {{"kind", "distance"}, {"desired_distances", {1.0, -2.0}}};
        CHECK_THROWS_AS(parse_potential(neg, graph), ConfigError);
    }
    SUBCASE("initial conditions") {
        Configuration q0, v0;
        json init = {{"positions", json::array({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}})},
                     {"velocities", json::array({{0.0, 0.0}, {0.0, 0.0}, {0.1, 0.0}})}};
        parse_initial(init, graph, q0, v0);
        CHECK(q0.agent(2)[0] == 2.0);
        CHECK(v0.agent(2)[0] == 0.1);

        json shorthand = {
            {"desired_positions", json::array({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}})},
            {"displaced_agent", 1},
            {"displaced_position", {5.0, 5.0}}};
        parse_initial(shorthand, graph, q0, v0);
        CHECK(q0.agent(1)[0] == 5.0);
        CHECK(v0.agent(1)[0] == 0.0);

        json ragged = {{"positions", json::array({{0.0}, {1.0, 0.0}, {2.0, 0.0}})},
                       {"velocities", json::array({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}})}};
        CHECK_THROWS_AS(parse_initial(ragged, graph, q0, v0), ConfigError);
    }
}

TEST_CASE("simulate command") {
    TempDir dir;
    SUBCASE("writes trajectory, energy, and metadata") {
        cli::RunOpts opts;
        opts.config_path = write_config(dir, square_config()).string();
        opts.out_dir = (dir.path / "out").string();
        CHECK(cli::cmd_simulate(opts) == cli::kExitOk);
        CHECK(count_lines(dir.path / "out" / "trajectory.csv") == 52);  // header + 51 states
        CHECK(count_lines(dir.path / "out" / "energy.csv") == 51);      // header + 50 intervals
        const json meta = load_json_file(dir.path / "out" / "meta.json");
        CHECK(meta.at("command") == "simulate");
        // the metadata echo reloads to the original config
        CHECK(meta.at("config") == square_config());
    }
    SUBCASE("negative step size is a config error") {
        json cfg = square_config();
        cfg["h"] = -0.005;
        cli::RunOpts opts;
        opts.config_path = write_config(dir, cfg).string();
        opts.out_dir = (dir.path / "out").string();
        CHECK(cli::cmd_simulate(opts) == cli::kExitConfig);
    }
    SUBCASE("unknown top-level key is a config error") {
        json cfg = square_config();
        cfg["stepsize"] = 0.01;
        cli::RunOpts opts;
        opts.config_path = write_config(dir, cfg).string();
        opts.out_dir = (dir.path / "out").string();
        CHECK(cli::cmd_simulate(opts) == cli::kExitConfig);
    }
    SUBCASE("divergence exits with the dedicated code") {
        json cfg = square_config();
        cfg["h"] = 10.0;
        cli::RunOpts opts;
        opts.config_path = write_config(dir, cfg).string();
        opts.out_dir = (dir.path / "out").string();
        CHECK(cli::cmd_simulate(opts) == cli::kExitDiverged);
    }
    SUBCASE("equilibrium rest run stays put with zero energy") {
        json cfg = square_config();
        cfg["initial"] = {
            {"positions", json::array({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}})},
            {"velocities",
             json::array({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}})}};
        cli::RunOpts opts;
        opts.config_path = write_config(dir, cfg).string();
        opts.out_dir = (dir.path / "out").string();
        CHECK(cli::cmd_simulate(opts) == cli::kExitOk);
        std::ifstream f(dir.path / "out" / "energy.csv");
        std::string header, row;
        std::getline(f, header);
        std::getline(f, row);
        CHECK(row.find(",0,0,0") != std::string::npos);
    }
}

TEST_CASE("compare command") {
    TempDir dir;
    json cfg = square_config();
    cfg.erase("integrator");
    cfg.erase("h");
    cfg.erase("steps");
    cfg["combos"] = json::array({{{"integrator", "vi"}, {"h", 0.005}, {"steps", 40}},
                                 {{"integrator", "vi"}, {"h", 0.005}, {"steps", 40}},
                                 {{"integrator", "rk4"}, {"h", 0.005}, {"steps", 40}}});
    cli::RunOpts opts;
    opts.config_path = write_config(dir, cfg).string();
    opts.out_dir = (dir.path / "cmp").string();
    CHECK(cli::cmd_compare(opts) == cli::kExitOk);

    // identical combos give identical finals; the cross matrix says congruent
    std::ifstream finals(dir.path / "cmp" / "finals.csv");
    std::string header, row0, row1;
    std::getline(finals, header);
    std::getline(finals, row0);
    std::getline(finals, row1);
    CHECK(row0.substr(1) == row1.substr(1));

    std::ifstream cong(dir.path / "cmp" / "congruence.csv");
    std::getline(cong, header);
    bool saw_identical_pair = false;
    std::string line;
    while (std::getline(cong, line)) {
        if (line.rfind("0,1,", 0) == 0) {
            CHECK(line.back() == '1');
            saw_identical_pair = true;
        }
    }
    CHECK(saw_identical_pair);

    // rk4 cost column is four evaluations per step
    std::ifstream summary(dir.path / "cmp" / "summary.csv");
    std::getline(summary, header);
    int rk4_evals = -1;
    while (std::getline(summary, line)) {
        std::stringstream ss(line);
        std::string combo, integ, h, steps, wall, evals;
        std::getline(ss, combo, ',');
        std::getline(ss, integ, ',');
        std::getline(ss, h, ',');
        std::getline(ss, steps, ',');
        std::getline(ss, wall, ',');
        std::getline(ss, evals, ',');
        if (integ == "rk4") rk4_evals = std::stoi(evals);
    }
    CHECK(rk4_evals == 4 * 40);

    SUBCASE("a single combo is rejected") {
        cfg["combos"] = json::array({{{"integrator", "vi"}, {"h", 0.005}, {"steps", 40}}});
        opts.config_path = write_config(dir, cfg, "one.json").string();
        CHECK(cli::cmd_compare(opts) == cli::kExitConfig);
    }
}

TEST_CASE("alpha command") {
    SUBCASE("paper-scale inputs") {
        cli::AlphaOpts a{1.0, 1.0, 0.5, 7, 11, 1.0};
        CHECK(cli::cmd_alpha(a) == cli::kExitOk);
    }
    SUBCASE("step budget for h at the bound") {
        cli::AlphaOpts a{1.0, 1.0, 0.5, 7, 11, 1.0};
        a.h = 0.0138;
        CHECK(cli::cmd_alpha(a) == cli::kExitOk);
    }
    SUBCASE("h beyond the bound fails loudly") {
        cli::AlphaOpts a{1.0, 1.0, 0.5, 7, 11, 1.0};
        a.h = 0.02;
        CHECK(cli::cmd_alpha(a) == cli::kExitConfig);
    }
    SUBCASE("nonpositive inputs are rejected") {
        cli::AlphaOpts a{-1.0, 1.0, 0.5, 7, 11, 1.0};
        CHECK(cli::cmd_alpha(a) == cli::kExitConfig);
    }
}

TEST_CASE("roa command") {
    TempDir dir;
    json cfg;
    cfg["graph"] = {{"agents", 7},
                    {"dim", 2},
                    {"edges",
                     json::array({{0, 1},
                                  {0, 2},
                                  {0, 3},
                                  {0, 4},
                                  {0, 5},
                                  {0, 6},
                                  {1, 2},
                                  {2, 3},
                                  {3, 4},
                                  {4, 5},
                                  {5, 6}})}};
    json shape = json::array();
    shape.push_back({0.0, 0.0});
    for (int i = 0; i < 6; ++i)
        shape.push_back({std::cos(M_PI * i / 3.0), std::sin(M_PI * i / 3.0)});
    json dists = json::array();
    for (int e = 0; e < 11; ++e) dists.push_back(1.0);
    cfg["potential"] = {{"kind", "distance"}, {"desired_distances", dists}};
    cfg["desired_positions"] = shape;
    cfg["displaced_agent"] = 3;
    const double x = std::cos(2.0 * M_PI / 3.0), y = std::sin(2.0 * M_PI / 3.0);
    cfg["box"] = {x - 0.02, x + 0.02, y - 0.02, y + 0.02};
    cfg["grid"] = {4, 4};
    cfg["h"] = 0.014;
    cfg["kappa"] = 0.5;
    cfg["max_steps"] = 200;

    cli::RunOpts opts;
    opts.config_path = write_config(dir, cfg).string();
    opts.out_dir = (dir.path / "roa").string();
    opts.workers = 2;
    CHECK(cli::cmd_roa(opts) == cli::kExitOk);
    CHECK(count_lines(dir.path / "roa" / "outcomes.csv") == 17);  // header + 16 samples

    SUBCASE("reruns are byte-identical") {
        std::ifstream a(dir.path / "roa" / "outcomes.csv");
        std::stringstream first;
        first << a.rdbuf();
        opts.out_dir = (dir.path / "roa2").string();
        opts.workers = 4;
        CHECK(cli::cmd_roa(opts) == cli::kExitOk);
        std::ifstream b(dir.path / "roa2" / "outcomes.csv");
        std::stringstream second;
        second << b.rdbuf();
        CHECK(first.str() == second.str());
    }
    SUBCASE("metadata records workers and echoes the config") {
        const json meta = load_json_file(dir.path / "roa" / "meta.json");
        CHECK(meta.at("workers") == 2);
        CHECK(meta.at("config") == cfg);
    }
}

TEST_CASE("order command") {
    TempDir dir;
    json cfg;
    cfg["graph"] = {{"agents", 2}, {"dim", 2}, {"edges", json::array({{0, 1}})}};
    cfg["potential"] = {{"kind", "displacement"}, {"desired_offsets", json::array({{1.0, 0.0}})}};
    cfg["initial"] = {{"positions", json::array({{0.3, -0.2}, {1.4, 0.9}})},
                      {"velocities", json::array({{0.4, 0.1}, {-0.2, 0.3}})}};
    cfg["kappa"] = 1.5;
    cfg["horizon"] = 0.5;
    cfg["h_list"] = {4e-3, 2e-3, 1e-3};
    cfg["methods"] = json::array({{{"method", "euler"}}});

    cli::RunOpts opts;
    opts.config_path = write_config(dir, cfg).string();
    opts.out_dir = (dir.path / "ord").string();
    CHECK(cli::cmd_order(opts) == cli::kExitOk);
    CHECK(count_lines(dir.path / "ord" / "order.csv") == 4);
    CHECK(count_lines(dir.path / "ord" / "order_summary.csv") == 2);
}

TEST_CASE("worker resolution prefers flag, then environment") {
    unsetenv("FORMINT_WORKERS");
    CHECK(cli::resolve_workers(3) == 3);
    setenv("FORMINT_WORKERS", "5", 1);
    CHECK(cli::resolve_workers(0) == 5);
    CHECK(cli::resolve_workers(2) == 2);
    unsetenv("FORMINT_WORKERS");
    CHECK(cli::resolve_workers(0) >= 1);
}

TEST_CASE("full-precision serialization round-trips") {
    const double vals[] = {1.0 / 3.0, std::sqrt(2.0), 0.1, 6.02e23, -1.7e-300};
    for (double v : vals) {
        const std::string s = cli::g17(v);
        CHECK(std::stod(s) == v);
    }
}
