#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "prl/config.hpp"
#include "prl/harness.hpp"
#include "prl/relabel.hpp"
#include "support.hpp"

using namespace prl;
namespace fs = std::filesystem;

namespace {

RunConfig small_door_config() {
    RunConfig cfg;
    cfg.env.kind = "door";
    cfg.env.door_angles = 8;
    cfg.env.eval_horizon = 20;
    cfg.train_horizon = 1000;
    cfg.total_steps = 6000;
    cfg.eval_every = 500;
    cfg.seeds = {1};
    return cfg;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config validation rejects the documented error classes") {
    RunConfig cfg = small_door_config();
    SUBCASE("unknown strategy") {
        cfg.strategy = "dagger";
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    }
    SUBCASE("eval trials below one") {
        cfg.eval_trials = 0;
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    }
    SUBCASE("train horizon below eval horizon") {
        cfg.train_horizon = cfg.env.eval_horizon - 1;
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    }
    SUBCASE("step-index curriculum without demos") {
        cfg.demos.enabled = false;
        cfg.strategy = "vaprl";
        cfg.curriculum.distance_mode = DistanceMode::step_index;
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    }
    SUBCASE("short budgets only warn") {
        cfg.total_steps = 10;
        CHECK_NOTHROW(validate(cfg));
        CHECK(config_warnings(cfg).size() == 1);
    }
}

TEST_CASE("config files and key overrides round-trip") {
    RunConfig cfg;
    apply_preset(cfg, "paper-analog");
    set_config_key(cfg, "strategy", "fbrl");
    set_config_key(cfg, "seeds", "7,9");
    set_config_key(cfg, "curriculum_epsilon", "0.25");
    set_config_key(cfg, "distance_mode", "value_based");
    set_config_key(cfg, "early_switch", "false");
    fs::path path = fs::temp_directory_path() / "prl_config_test.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n" << serialize_config(cfg);
    }
    RunConfig loaded = load_config_file(path.string());
    CHECK(serialize_config(loaded) == serialize_config(cfg));
    CHECK(loaded.seeds == std::vector<std::uint64_t>{7, 9});
    CHECK(loaded.curriculum.epsilon == 0.25);
    CHECK_FALSE(loaded.early_switch);
    fs::remove(path);

    CHECK_THROWS_AS(set_config_key(cfg, "not_a_key", "1"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_key(cfg, "alpha", "fast"), std::invalid_argument);
    RunConfig preset;
    CHECK_THROWS_AS(apply_preset(preset, "imaginary"), std::invalid_argument);
}

TEST_CASE("zero-step runs contain only the step-zero evaluation") {
    RunConfig cfg = small_door_config();
    cfg.total_steps = 0;
    SeedOutcome out = run_seed(cfg, 1);
    REQUIRE(out.series.rows.size() == 1);
    CHECK(out.series.rows.front().step == 0);
    CHECK(out.series.rows.front().interventions == 0);
}

TEST_CASE("identical config and seed reproduce identical series") {
    RunConfig cfg = small_door_config();
    cfg.strategy = "vaprl";
    SeedOutcome a = run_seed(cfg, 3);
    SeedOutcome b = run_seed(cfg, 3);
    REQUIRE(a.series.rows.size() == b.series.rows.size());
    for (std::size_t i = 0; i < a.series.rows.size(); ++i) {
        CHECK(a.series.rows[i].step == b.series.rows[i].step);
        CHECK(a.series.rows[i].eval_success == b.series.rows[i].eval_success);
        CHECK(a.series.rows[i].interventions == b.series.rows[i].interventions);
        CHECK(a.series.rows[i].buffer_size == b.series.rows[i].buffer_size);
    }
    CHECK(a.final_table.q == b.final_table.q);
}

TEST_CASE("buffer grows by exactly relabel_n + 1 per environment step") {
    RunConfig cfg = small_door_config();
    cfg.relabel_n = 4;
    SeedOutcome out = run_seed(cfg, 2);
    const std::size_t seeded = out.series.rows.front().buffer_size;
    for (const MetricsRow& row : out.series.rows) {
        CHECK(row.buffer_size == seeded + static_cast<std::size_t>(row.step) * 5);
    }
    CHECK(audit_rewards(*out.buffer, *make_env(cfg.env)));
}

TEST_CASE("logged interventions equal the persistent-env counter law") {
    RunConfig cfg = small_door_config();
    for (const char* strategy : {"vaprl", "fbrl", "naive", "r3l"}) {
        cfg.strategy = strategy;
        SeedOutcome out = run_seed(cfg, 5);
        for (const MetricsRow& row : out.series.rows) {
            long long expected = (row.step + cfg.train_horizon - 1) / cfg.train_horizon;
            REQUIRE(row.interventions == expected);
        }
    }
}

TEST_CASE("the oracle trains episodically and pays one reset per episode") {
    RunConfig cfg = small_door_config();
    cfg.strategy = "oracle";
    SeedOutcome out = run_seed(cfg, 4);
    long long final_step = out.series.rows.back().step;
    CHECK(out.series.rows.back().interventions == final_step / cfg.env.eval_horizon);
}

TEST_CASE("every strategy trains the door to a solid final success") {
    RunConfig cfg = small_door_config();
    for (const char* strategy : {"vaprl", "fbrl", "naive", "r3l", "oracle"}) {
        cfg.strategy = strategy;
        SeedOutcome out = run_seed(cfg, 1);
        INFO(strategy);
        CHECK(out.series.rows.back().eval_success >= 0.8);
    }
}

TEST_CASE("all strategies receive the identical demo seeding") {
    RunConfig cfg = small_door_config();
    cfg.total_steps = 0;
    std::vector<Transition> reference;
    for (const char* strategy : {"vaprl", "fbrl", "naive", "r3l", "oracle"}) {
        cfg.strategy = strategy;
        SeedOutcome out = run_seed(cfg, 9);
        if (reference.empty()) {
            reference = out.buffer->transitions();
            CHECK_FALSE(reference.empty());
            continue;
        }
        REQUIRE(out.buffer->size() == reference.size());
        for (std::size_t i = 0; i < reference.size(); ++i) {
            const Transition& a = reference[i];
            const Transition& b = out.buffer->transitions()[i];
            REQUIRE((a.state == b.state && a.action == b.action &&
                     a.next_state == b.next_state && a.goal == b.goal &&
                     a.reward == b.reward && a.terminal == b.terminal));
        }
    }
}

TEST_CASE("vaprl emits a curriculum trace, baselines do not") {
    RunConfig cfg = small_door_config();
    cfg.strategy = "vaprl";
    SeedOutcome vaprl = run_seed(cfg, 6);
    CHECK_FALSE(vaprl.series.trace.empty());
    for (const TraceRow& row : vaprl.series.trace) {
        CHECK(row.normalized >= 0.0);
        CHECK(row.normalized <= 1.0);
    }
    for (const MetricsRow& row : vaprl.series.rows) {
        if (row.step > 0) CHECK_FALSE(std::isnan(row.curriculum_distance));
    }
    cfg.strategy = "fbrl";
    SeedOutcome fbrl = run_seed(cfg, 6);
    CHECK(fbrl.series.trace.empty());
    CHECK(std::isnan(fbrl.series.rows.back().curriculum_distance));
}

TEST_CASE("run_experiment writes the full artifact set and reloads") {
    RunConfig cfg = small_door_config();
    cfg.strategy = "vaprl";
    cfg.seeds = {1, 2};
    fs::path dir = fresh_dir("prl_run_artifacts");
    cfg.out_dir = dir.string();
    Metrics metrics = run_experiment(cfg);
    CHECK(metrics.strategy == "vaprl");
    CHECK(metrics.per_seed.size() == 2);
    CHECK(fs::exists(dir / "config.txt"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "seed_1" / "metrics.csv"));
    CHECK(fs::exists(dir / "seed_1" / "trace.csv"));
    CHECK(fs::exists(dir / "seed_2" / "qtable.txt"));

    Metrics loaded = load_run_dir(dir.string());
    CHECK(loaded.strategy == "vaprl");
    CHECK(loaded.steps == metrics.steps);
    for (std::size_t i = 0; i < metrics.steps.size(); ++i) {
        CHECK(loaded.success_mean[i] == doctest::Approx(metrics.success_mean[i]));
    }
    QTable table = load_qtable((dir / "seed_1" / "qtable.txt").string());
    CHECK(table.num_actions == 3);
    fs::remove_all(dir);
}

TEST_CASE("constant success across seeds gives zero standard error") {
    SeedSeries a, b;
    a.seed = 1;
    b.seed = 2;
    for (long long step : {0, 10, 20}) {
        a.rows.push_back({step, 1.0, 0, 0, 0.0});
        b.rows.push_back({step, 1.0, 0, 0, 0.0});
    }
    Metrics m = summarize("x", {a, b});
    for (double se : m.success_stderr) CHECK(se == 0.0);
}

TEST_CASE("single-seed summaries omit the standard error") {
    SeedSeries a;
    a.seed = 1;
    a.rows.push_back({0, 0.5, 0, 0, 0.0});
    Metrics m = summarize("x", {a});
    CHECK(std::isnan(m.success_stderr.front()));
    fs::path dir = fresh_dir("prl_summary_single");
    fs::create_directories(dir);
    write_summary_csv(m, (dir / "summary.csv").string());
    std::string text = slurp(dir / "summary.csv");
    CHECK(text.find("0,0.5,,0,0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("emit_summary produces the comparison artifacts") {
    RunConfig cfg = small_door_config();
    cfg.total_steps = 2000;
    fs::path dir_a = fresh_dir("prl_cmp_a");
    fs::path dir_b = fresh_dir("prl_cmp_b");
    cfg.strategy = "vaprl";
    cfg.out_dir = dir_a.string();
    Metrics vaprl = run_experiment(cfg);
    cfg.strategy = "oracle";
    cfg.out_dir = dir_b.string();
    Metrics oracle = run_experiment(cfg);

    fs::path out = fresh_dir("prl_cmp_out");
    emit_summary({vaprl, oracle}, out.string());
    CHECK(fs::exists(out / "aligned.csv"));
    CHECK(fs::exists(out / "curves.svg"));
    std::string table = slurp(out / "interventions.csv");
    // oracle pays 2000/20 = 100 resets, vaprl ceil(2000/1000) = 2: ratio 50.
    CHECK(table.find("oracle,2000,") != std::string::npos);
    CHECK(table.find(",50\n") != std::string::npos);
    std::string aligned = slurp(out / "aligned.csv");
    CHECK(aligned.find("step,vaprl_mean,vaprl_stderr,oracle_mean,oracle_stderr") !=
          std::string::npos);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    fs::remove_all(out);
}

TEST_CASE("misaligned eval grids are resampled to the coarsest") {
    SeedSeries fine, coarse;
    fine.seed = 1;
    coarse.seed = 1;
    for (long long step : {0, 100, 200, 300, 400}) fine.rows.push_back({step, step / 400.0, 0, 0, 0.0});
    for (long long step : {0, 200, 400}) coarse.rows.push_back({step, 1.0, 0, 0, 0.0});
    Metrics a = summarize("fine", {fine});
    Metrics b = summarize("coarse", {coarse});
    fs::path out = fresh_dir("prl_resample_out");
    emit_summary({a, b}, out.string());
    std::string aligned = slurp(out / "aligned.csv");
    // Three rows on the coarse grid; the fine run carries its 200-step value.
    CHECK(aligned.find("200,0.5,,1,") != std::string::npos);
    CHECK(aligned.find("100,") == std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("metrics csv round-trips through the reader") {
    SeedSeries series;
    series.rows.push_back({0, 0.0, 0, 42, std::numeric_limits<double>::quiet_NaN()});
    series.rows.push_back({500, 0.9, 1, 2542, 0.75});
    fs::path path = fs::temp_directory_path() / "prl_metrics_roundtrip.csv";
    write_metrics_csv(series, path.string());
    SeedSeries loaded = read_metrics_csv(path.string());
    REQUIRE(loaded.rows.size() == 2);
    CHECK(loaded.rows[0].step == 0);
    CHECK(std::isnan(loaded.rows[0].curriculum_distance));
    CHECK(loaded.rows[1].eval_success == 0.9);
    CHECK(loaded.rows[1].buffer_size == 2542);
    CHECK(loaded.rows[1].curriculum_distance == 0.75);
    fs::remove(path);
}

TEST_CASE("oracle reset ablation is byte-identical to the oracle strategy run") {
    RunConfig cfg = small_door_config();
    cfg.total_steps = 3000;
    fs::path oracle_dir = fresh_dir("prl_oracle_run");
    cfg.strategy = "oracle";
    cfg.out_dir = oracle_dir.string();
    run_experiment(cfg);

    RunConfig ablate_cfg = small_door_config();
    ablate_cfg.total_steps = 3000;
    fs::path ablate_dir = fresh_dir("prl_oracle_ablate");
    ablate_cfg.out_dir = ablate_dir.string();
    run_reset_ablation(ablate_cfg, ResetVariant::oracle_reset);

    std::string a = slurp(oracle_dir / "seed_1" / "metrics.csv");
    std::string b = slurp(ablate_dir / "oracle_fbrl_reset" / "seed_1" / "metrics.csv");
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);
    fs::remove_all(oracle_dir);
    fs::remove_all(ablate_dir);
}

TEST_CASE("uniform reset variant teleports uniformly over reachable states") {
    RunConfig cfg;
    cfg.env.kind = "door";
    cfg.env.door_angles = 12;
    cfg.env.eval_horizon = 1;  // teleport every step
    cfg.train_horizon = 10'000;
    cfg.total_steps = 10'000;
    cfg.eval_every = 10'000;
    cfg.relabel_n = 0;
    cfg.seeds = {1};
    cfg.demos.enabled = true;
    SeedOutcome out = run_reset_seed(cfg, 1, ResetVariant::uniform_reset);
    // Every stored transition starts at a teleported state.
    std::vector<long long> counts(12, 0);
    std::size_t demo_seeded = out.buffer->size() - 10'000;
    for (std::size_t i = demo_seeded; i < out.buffer->size(); ++i) {
        ++counts[out.buffer->transitions()[i].state];
    }
    std::vector<double> expected(12, 10'000.0 / 12.0);
    CHECK(test::chi_square(counts, expected) < 35.0);  // df 11, ~3 sigma
}

TEST_CASE("vaprl reset variant trains on task goals only") {
    RunConfig cfg = small_door_config();
    cfg.total_steps = 2000;
    cfg.relabel_n = 0;
    SeedOutcome out = run_reset_seed(cfg, 2, ResetVariant::vaprl_reset);
    auto mdp = make_env(cfg.env);
    std::vector<GoalId> task_goals = mdp->task_goals();
    std::set<GoalId> tasks(task_goals.begin(), task_goals.end());
    std::size_t demo_seeded = out.buffer->size() - 2000;
    for (std::size_t i = demo_seeded; i < out.buffer->size(); ++i) {
        REQUIRE(tasks.count(out.buffer->transitions()[i].goal) == 1);
    }
    CHECK_FALSE(out.series.trace.empty());  // the teleport targets C(g)
}

TEST_CASE("exploration decays linearly between the endpoints") {
    RunConfig cfg;
    cfg.learner.eps_start = 0.1;
    cfg.learner.eps_end = 0.02;
    cfg.total_steps = 1001;
    CHECK(exploration_at(cfg, 0) == doctest::Approx(0.1));
    CHECK(exploration_at(cfg, 1000) == doctest::Approx(0.02));
    CHECK(exploration_at(cfg, 500) == doctest::Approx(0.06));
}

TEST_SUITE_END();
