#include "prl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "prl/config.hpp"
#include "prl/stats.hpp"

namespace fs = std::filesystem;

namespace prl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent substreams of the per-seed root seed.
enum Stream : std::uint64_t {
    kEnvStream = 0,
    kDemoStream,
    kStrategyStream,
    kExploreStream,
    kRelabelStream,
    kEvalStream,
    kTrainStream,
};

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

const std::set<std::string>& strategy_names() {
    static const std::set<std::string> names{"vaprl", "fbrl", "naive", "r3l", "oracle"};
    return names;
}

}  // namespace

std::unique_ptr<GoalConditionedMdp> make_env(const EnvConfig& cfg) {
    if (cfg.kind == "grid") {
        GridOptions opts;
        opts.eval_horizon = cfg.eval_horizon;
        opts.discount = cfg.discount;
        opts.projection = cfg.goal_projection == "object_gripper"
                              ? GridGoalProjection::object_and_gripper
                              : GridGoalProjection::object_cell;
        opts.require_gripper_home = cfg.require_gripper_home;
        return std::make_unique<GridTableTop>(cfg.grid_width, cfg.grid_height,
                                              std::vector<GridCell>{}, opts);
    }
    if (cfg.kind == "door") {
        return std::make_unique<DoorChain>(cfg.door_angles, cfg.eval_horizon, cfg.discount);
    }
    throw std::invalid_argument("make_env: unknown environment kind: " + cfg.kind);
}

void validate(const RunConfig& cfg) {
    if (!strategy_names().count(cfg.strategy)) {
        throw std::invalid_argument("invalid strategy key: " + cfg.strategy);
    }
    if (cfg.env.kind != "grid" && cfg.env.kind != "door") {
        throw std::invalid_argument("invalid environment kind: " + cfg.env.kind);
    }
    if (cfg.env.goal_projection != "object" && cfg.env.goal_projection != "object_gripper") {
        throw std::invalid_argument("invalid goal_projection: " + cfg.env.goal_projection);
    }
    if (cfg.eval_trials < 1) throw std::invalid_argument("eval_trials must be >= 1");
    if (cfg.total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
    if (cfg.train_horizon < cfg.env.eval_horizon) {
        throw std::invalid_argument("train_horizon must be >= eval_horizon");
    }
    if (cfg.relabel_n < 0) throw std::invalid_argument("relabel_n must be >= 0");
    if (cfg.demos.noise < 0.0 || cfg.demos.noise >= 1.0) {
        throw std::invalid_argument("demo_noise must be in [0,1)");
    }
    if (cfg.seeds.empty()) throw std::invalid_argument("seeds must be nonempty");
    if (cfg.curriculum.candidate_source == CandidateSource::replay_sample &&
        cfg.curriculum.candidate_sample_size < 1) {
        throw std::invalid_argument("candidate_sample_size must be >= 1 for replay_sample");
    }
    if (!cfg.demos.enabled && cfg.curriculum.distance_mode == DistanceMode::step_index &&
        cfg.strategy == "vaprl") {
        throw std::invalid_argument(
            "step_index distance requires demonstrations; enable demos or use value_based");
    }
}

std::vector<std::string> config_warnings(const RunConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.total_steps < cfg.train_horizon) {
        out.push_back("total_steps < train_horizon: training never spans a full persistent block");
    }
    return out;
}

long long resolved_eval_every(const RunConfig& cfg) {
    if (cfg.eval_every > 0) return cfg.eval_every;
    return std::max<long long>(1, cfg.train_horizon / 100);
}

double exploration_at(const RunConfig& cfg, long long step) {
    if (cfg.total_steps <= 1) return cfg.learner.eps_start;
    double f = static_cast<double>(step) / static_cast<double>(cfg.total_steps - 1);
    f = std::clamp(f, 0.0, 1.0);
    return cfg.learner.eps_start + f * (cfg.learner.eps_end - cfg.learner.eps_start);
}

namespace {

// Demos drive the curriculum when they exist; otherwise fall back to
// replay-sampled candidates with the value-based distance.
CurriculumConfig effective_curriculum(const RunConfig& cfg, const DemoSet& demos) {
    CurriculumConfig cur = cfg.curriculum;
    if (demos.empty()) {
        cur.candidate_source = CandidateSource::replay_sample;
        cur.distance_mode = DistanceMode::value_based;
    }
    return cur;
}

struct SeedRun {
    std::unique_ptr<GoalConditionedMdp> mdp;
    DemoSet demos;
    QTable table;
    std::unique_ptr<ReplayBuffer> buffer;
    std::unique_ptr<GoalPool> pool;
    Rng explore_rng, relabel_rng, eval_rng, train_rng, strategy_rng, greedy_rng;
};

SeedRun prepare_seed(const RunConfig& cfg, std::uint64_t seed) {
    SeedRun run;
    run.mdp = make_env(cfg.env);
    run.explore_rng = make_rng(seed, kExploreStream);
    run.relabel_rng = make_rng(seed, kRelabelStream);
    run.eval_rng = make_rng(seed, kEvalStream);
    run.train_rng = make_rng(seed, kTrainStream);
    // curriculum.rng_seed offsets the tie-break stream without touching
    // the other substreams.
    run.strategy_rng = make_rng(seed, kStrategyStream + 16 * cfg.curriculum.rng_seed);

    if (cfg.demos.enabled) {
        Rng demo_rng = make_rng(seed, kDemoStream);
        run.demos = generate_demos(*run.mdp, cfg.demos.per_goal_forward,
                                   cfg.demos.per_goal_reverse, cfg.demos.noise, demo_rng);
    }

    // One reserved goal row holds the novelty pseudo-goal used by the
    // perturbation phases.
    run.table = QTable(run.mdp->num_states(), run.mdp->num_goals() + 1,
                       run.mdp->num_actions(), cfg.learner.alpha, run.mdp->discount(),
                       cfg.learner.eps_start);
    run.buffer = std::make_unique<ReplayBuffer>(cfg.learner.buffer_cap);
    run.pool = std::make_unique<GoalPool>(
        *run.mdp, run.demos.empty() ? nullptr : &run.demos, run.buffer.get(),
        run.demos.empty() ? PoolMode::replay_union_task : PoolMode::demo_union_task);

    if (!run.demos.empty()) {
        IngestMode mode =
            run.demos.total_transitions() < 10'000 ? IngestMode::dense : IngestMode::sampled;
        ingest_demos(*run.buffer, run.demos, *run.mdp, mode, cfg.relabel_n, *run.pool,
                     run.relabel_rng, cfg.keep_after_success);
    }
    return run;
}

std::unique_ptr<Strategy> make_strategy(const RunConfig& cfg, SeedRun& run,
                                        VaprlStrategy** vaprl_out) {
    *vaprl_out = nullptr;
    if (cfg.strategy == "vaprl") {
        auto strat = std::make_unique<VaprlStrategy>(
            *run.mdp, run.table, run.demos.empty() ? nullptr : &run.demos, run.buffer.get(),
            effective_curriculum(cfg, run.demos));
        *vaprl_out = strat.get();
        return strat;
    }
    if (cfg.strategy == "fbrl") {
        return std::make_unique<FbrlStrategy>(*run.mdp, cfg.early_switch);
    }
    if (cfg.strategy == "naive") {
        return std::make_unique<NaiveStrategy>(*run.mdp, cfg.early_switch);
    }
    if (cfg.strategy == "r3l") {
        return std::make_unique<R3lStrategy>(*run.mdp, run.table, cfg.early_switch);
    }
    if (cfg.strategy == "oracle") {
        return make_oracle_strategy(*run.mdp, cfg.early_switch);
    }
    throw std::invalid_argument("invalid strategy key: " + cfg.strategy);
}

}  // namespace

SeedOutcome run_seed(const RunConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    SeedRun run = prepare_seed(cfg, seed);
    VaprlStrategy* vaprl = nullptr;
    std::unique_ptr<Strategy> strat = make_strategy(cfg, run, &vaprl);

    // The oracle trains on the evaluation environment directly: the training
    // horizon collapses to the evaluation horizon.
    long long horizon =
        cfg.strategy == "oracle" ? run.mdp->eval_horizon() : cfg.train_horizon;
    PersistentEnv env(*run.mdp, horizon, make_rng(seed, kEnvStream));

    const long long eval_every = resolved_eval_every(cfg);
    SeedOutcome out;
    out.series.seed = seed;

    auto greedy = [&](StateId s, GoalId g) {
        return policy_action(run.table, s, g, false, run.greedy_rng);
    };
    auto evaluate = [&](long long step) {
        int successes = run_evaluation(greedy, *run.mdp, cfg.eval_trials, run.eval_rng);
        double dist = vaprl ? vaprl->last_normalized_distance() : kNaN;
        out.series.rows.push_back({step,
                                   static_cast<double>(successes) / cfg.eval_trials,
                                   env.intervention_count(), run.buffer->size(), dist});
    };

    evaluate(0);
    for (long long t = 0; t < cfg.total_steps; ++t) {
        run.table.explore_eps = exploration_at(cfg, t);
        StateId s = env.state();
        GoalId g = strat->next_goal(s, run.strategy_rng);
        ActionId a = policy_action(run.table, s, g, true, run.explore_rng);
        StateId next = env.step(a);
        Transition tr = strat->label(s, a, next);
        strat->observe(tr);
        for (const Transition& r : relabel_online(tr, *run.pool, cfg.relabel_n, *run.mdp,
                                                  run.relabel_rng)) {
            run.buffer->push(r);
        }
        q_update(run.table, tr);  // online step keeps nonstationary rewards fresh
        for (int k = 0; k < cfg.learner.updates_per_step; ++k) {
            q_update(run.table, run.buffer->sample(run.train_rng));
        }
        if (env.just_reset()) strat->on_env_reset(env.state());
        long long now = t + 1;
        if (now % eval_every == 0 || now == cfg.total_steps) evaluate(now);
    }

    if (vaprl) out.series.trace = curriculum_trace(vaprl->events());
    out.final_table = std::move(run.table);
    out.buffer = std::move(run.buffer);
    return out;
}

Metrics summarize(const std::string& strategy, std::vector<SeedSeries> per_seed) {
    Metrics m;
    m.strategy = strategy;
    m.per_seed = std::move(per_seed);
    if (m.per_seed.empty()) return m;
    const std::size_t rows = m.per_seed.front().rows.size();
    for (const SeedSeries& s : m.per_seed) {
        if (s.rows.size() != rows) {
            throw std::runtime_error("summarize: seeds disagree on the eval grid");
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        m.steps.push_back(m.per_seed.front().rows[i].step);
        std::vector<double> success, interventions, distance;
        for (const SeedSeries& s : m.per_seed) {
            success.push_back(s.rows[i].eval_success);
            interventions.push_back(static_cast<double>(s.rows[i].interventions));
            if (!std::isnan(s.rows[i].curriculum_distance)) {
                distance.push_back(s.rows[i].curriculum_distance);
            }
        }
        m.success_mean.push_back(mean(success));
        m.success_stderr.push_back(standard_error(success));
        m.interventions_mean.push_back(mean(interventions));
        m.distance_mean.push_back(distance.empty() ? kNaN : mean(distance));
    }
    return m;
}

namespace {

template <typename Runner>
std::vector<SeedOutcome> run_all_seeds(const RunConfig& cfg, Runner runner) {
    std::vector<SeedOutcome> outcomes(cfg.seeds.size());
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    std::vector<std::thread> workers;
    workers.reserve(cfg.seeds.size());
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                outcomes[i] = runner(cfg, cfg.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return outcomes;
}

void write_run_artifacts(const RunConfig& cfg, const std::vector<SeedOutcome>& outcomes,
                         const Metrics& metrics) {
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "config.txt");
        if (!out) throw std::runtime_error("cannot write config echo under " + cfg.out_dir);
        for (const std::string& w : config_warnings(cfg)) out << "# warning: " << w << '\n';
        out << serialize_config(cfg);
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const SeedOutcome& o = outcomes[i];
        fs::path dir = fs::path(cfg.out_dir) / ("seed_" + std::to_string(cfg.seeds[i]));
        fs::create_directories(dir);
        write_metrics_csv(o.series, (dir / "metrics.csv").string());
        if (!o.series.trace.empty()) {
            write_trace_csv(o.series.trace, (dir / "trace.csv").string());
        }
        save_qtable(o.final_table, (dir / "qtable.txt").string());
    }
    write_summary_csv(metrics, (fs::path(cfg.out_dir) / "summary.csv").string());
}

}  // namespace

Metrics run_experiment(const RunConfig& cfg) {
    validate(cfg);
    for (const std::string& w : config_warnings(cfg)) {
        std::cerr << "warning: " << w << '\n';
    }
    std::vector<SeedOutcome> outcomes =
        run_all_seeds(cfg, [](const RunConfig& c, std::uint64_t s) { return run_seed(c, s); });
    std::vector<SeedSeries> series;
    series.reserve(outcomes.size());
    for (const SeedOutcome& o : outcomes) series.push_back(o.series);
    Metrics metrics = summarize(cfg.strategy, std::move(series));
    write_run_artifacts(cfg, outcomes, metrics);
    return metrics;
}

// ── Reset ablations ─────────────────────────────────────────────────────────

std::string to_string(ResetVariant v) {
    switch (v) {
        case ResetVariant::vaprl_reset: return "vaprl_reset";
        case ResetVariant::oracle_reset: return "oracle_fbrl_reset";
        case ResetVariant::uniform_reset: return "uniform_r3l_reset";
    }
    throw std::logic_error("unknown reset variant");
}

SeedOutcome run_reset_seed(const RunConfig& cfg, std::uint64_t seed, ResetVariant variant) {
    validate(cfg);
    if (variant == ResetVariant::oracle_reset) {
        // Resetting to the initial distribution every episode is exactly the
        // oracle strategy.
        RunConfig oracle_cfg = cfg;
        oracle_cfg.strategy = "oracle";
        return run_seed(oracle_cfg, seed);
    }

    SeedRun run = prepare_seed(cfg, seed);
    const int episode_len = run.mdp->eval_horizon();
    std::unique_ptr<CurriculumSelector> selector;
    std::vector<StateId> reachable;
    if (variant == ResetVariant::vaprl_reset) {
        selector = std::make_unique<CurriculumSelector>(
            *run.mdp, run.table, run.demos.empty() ? nullptr : &run.demos, run.buffer.get(),
            effective_curriculum(cfg, run.demos));
    } else {
        reachable = reachable_states(*run.mdp);
    }

    // The environment never resets on its own; every episode start is an
    // explicit teleport intervention.
    long long horizon = std::max<long long>(cfg.total_steps + episode_len, episode_len);
    PersistentEnv env(*run.mdp, horizon, make_rng(seed, kEnvStream));

    const long long eval_every = resolved_eval_every(cfg);
    SeedOutcome out;
    out.series.seed = seed;
    auto greedy = [&](StateId s, GoalId g) {
        return policy_action(run.table, s, g, false, run.greedy_rng);
    };
    auto evaluate = [&](long long step) {
        int successes = run_evaluation(greedy, *run.mdp, cfg.eval_trials, run.eval_rng);
        double dist = selector ? selector->last_normalized_distance() : kNaN;
        out.series.rows.push_back({step,
                                   static_cast<double>(successes) / cfg.eval_trials,
                                   env.intervention_count(), run.buffer->size(), dist});
    };

    evaluate(0);
    GoalId episode_goal = 0;
    for (long long t = 0; t < cfg.total_steps; ++t) {
        if (t % episode_len == 0) {
            episode_goal = run.mdp->sample_task_goal(run.strategy_rng);
            StateId start;
            if (variant == ResetVariant::vaprl_reset) {
                selector->set_step(t);
                start = selector->choose_state(episode_goal, run.strategy_rng);
            } else {
                start = reachable[uniform_int(
                    run.strategy_rng, 0, static_cast<int>(reachable.size()) - 1)];
            }
            env.set_state(start);
        }
        run.table.explore_eps = exploration_at(cfg, t);
        StateId s = env.state();
        ActionId a = policy_action(run.table, s, episode_goal, true, run.explore_rng);
        StateId next = env.step(a);
        Transition tr{s, a, next, episode_goal, run.mdp->reward(next, episode_goal),
                      run.mdp->goal_reached(next, episode_goal)};
        for (const Transition& r : relabel_online(tr, *run.pool, cfg.relabel_n, *run.mdp,
                                                  run.relabel_rng)) {
            run.buffer->push(r);
        }
        q_update(run.table, tr);
        for (int k = 0; k < cfg.learner.updates_per_step; ++k) {
            q_update(run.table, run.buffer->sample(run.train_rng));
        }
        long long now = t + 1;
        if (now % eval_every == 0 || now == cfg.total_steps) evaluate(now);
    }
    if (selector) out.series.trace = curriculum_trace(selector->events());
    out.final_table = std::move(run.table);
    out.buffer = std::move(run.buffer);
    return out;
}

Metrics run_reset_ablation(const RunConfig& cfg, ResetVariant variant) {
    validate(cfg);
    RunConfig sub = cfg;
    sub.out_dir = (fs::path(cfg.out_dir) / to_string(variant)).string();
    std::vector<SeedOutcome> outcomes = run_all_seeds(sub, [variant](const RunConfig& c, std::uint64_t s) {
        return run_reset_seed(c, s, variant);
    });
    std::vector<SeedSeries> series;
    series.reserve(outcomes.size());
    for (const SeedOutcome& o : outcomes) series.push_back(o.series);
    Metrics metrics = summarize(to_string(variant), std::move(series));
    write_run_artifacts(sub, outcomes, metrics);
    return metrics;
}

std::map<std::string, Metrics> run_ablation(const RunConfig& cfg) {
    std::map<std::string, Metrics> out;
    for (ResetVariant v : {ResetVariant::vaprl_reset, ResetVariant::oracle_reset,
                           ResetVariant::uniform_reset}) {
        out[to_string(v)] = run_reset_ablation(cfg, v);
    }
    return out;
}

// ── CSV / report artifacts ──────────────────────────────────────────────────

void write_metrics_csv(const SeedSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# schema_version=1\n";
    out << "step,eval_success,intervention_count,buffer_size,curriculum_normalized_distance\n";
    for (const MetricsRow& r : series.rows) {
        out << r.step << ',' << fmt(r.eval_success) << ',' << r.interventions << ','
            << r.buffer_size << ',' << fmt(r.curriculum_distance) << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double field_to_double(const std::string& s) {
    if (s.empty()) return kNaN;
    return std::stod(s);
}

}  // namespace

SeedSeries read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    SeedSeries series;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("step,", 0) == 0) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 5) throw std::runtime_error("malformed metrics row in " + path);
        series.rows.push_back({std::stoll(f[0]), field_to_double(f[1]), std::stoll(f[2]),
                               static_cast<std::size_t>(std::stoull(f[3])),
                               field_to_double(f[4])});
    }
    return series;
}

void write_trace_csv(std::span<const TraceRow> rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# schema_version=1\n";
    out << "training_step,goal_id,subgoal_encoding,raw_distance,normalized_distance\n";
    for (const TraceRow& r : rows) {
        out << r.step << ',' << r.task_goal << ',' << r.subgoal_state << ','
            << fmt(r.raw_distance) << ',' << fmt(r.normalized) << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<TraceRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("training_step,", 0) == 0) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 5) throw std::runtime_error("malformed trace row in " + path);
        rows.push_back({std::stoll(f[0]), std::stoi(f[1]), std::stoi(f[2]),
                        field_to_double(f[3]), field_to_double(f[4])});
    }
    return rows;
}

void write_summary_csv(const Metrics& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# schema_version=1\n";
    out << "step,eval_success_mean,eval_success_stderr,intervention_count_mean,"
           "curriculum_normalized_distance_mean\n";
    for (std::size_t i = 0; i < metrics.steps.size(); ++i) {
        out << metrics.steps[i] << ',' << fmt(metrics.success_mean[i]) << ','
            << fmt(metrics.success_stderr[i]) << ',' << fmt(metrics.interventions_mean[i])
            << ',' << fmt(metrics.distance_mean[i]) << '\n';
    }
}

Metrics load_run_dir(const std::string& dir) {
    std::vector<fs::path> seed_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0) {
            seed_dirs.push_back(entry.path());
        }
    }
    if (seed_dirs.empty()) throw std::runtime_error("no seed_* directories under " + dir);
    std::sort(seed_dirs.begin(), seed_dirs.end());

    std::vector<SeedSeries> series;
    for (const fs::path& sd : seed_dirs) {
        SeedSeries s = read_metrics_csv((sd / "metrics.csv").string());
        s.seed = std::stoull(sd.filename().string().substr(5));
        fs::path trace = sd / "trace.csv";
        if (fs::exists(trace)) s.trace = read_trace_csv(trace.string());
        series.push_back(std::move(s));
    }

    std::string label = fs::path(dir).filename().string();
    fs::path config = fs::path(dir) / "config.txt";
    if (fs::exists(config)) {
        std::ifstream in(config);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("strategy = ", 0) == 0) {
                label = line.substr(std::string("strategy = ").size());
                break;
            }
        }
    }
    return summarize(label, std::move(series));
}

// ── Comparison report ───────────────────────────────────────────────────────

namespace {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series, double y_min, double y_max) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const double w = 760, h = 480, ml = 70, mr = 160, mt = 50, mb = 60;
    double x_min = 0, x_max = 1;
    bool any = false;
    for (const ChartSeries& s : series) {
        for (const auto& [x, y] : s.points) {
            if (std::isnan(y)) continue;
            if (!any) {
                x_min = x_max = x;
                any = true;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
            }
        }
    }
    if (x_max <= x_min) x_max = x_min + 1;
    if (y_max <= y_min) y_max = y_min + 1;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double x = x_min + (x_max - x_min) * i / 5.0;
        double y = y_min + (y_max - y_min) * i / 5.0;
        out << "<text x=\"" << px(x) << "\" y=\"" << h - mb + 18
            << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << py(y) << "\" x2=\"" << w - mr << "\" y2=\""
            << py(y) << "\" stroke=\"#dddddd\"/>\n";
    }
    out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 16
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + h - mb) / 2 << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << (mt + h - mb) / 2 << ")\">" << y_label
        << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % (sizeof(palette) / sizeof(palette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : series[i].points) {
            if (std::isnan(y)) continue;
            out << px(x) << ',' << py(y) << ' ';
        }
        out << "\"/>\n";
        double ly = mt + 20.0 * static_cast<double>(i);
        out << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - mr + 34
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << w - mr + 40 << "\" y=\"" << ly + 4 << "\">" << series[i].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

double value_at_or_before(const std::vector<long long>& steps, const std::vector<double>& vals,
                          long long target) {
    double out = kNaN;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] <= target) out = vals[i];
    }
    return out;
}

}  // namespace

void emit_summary(const std::vector<Metrics>& runs, const std::string& out_dir) {
    if (runs.empty()) throw std::invalid_argument("emit_summary: no metrics");
    fs::create_directories(out_dir);

    // Unique labels for the table columns.
    std::vector<std::string> labels;
    for (const Metrics& m : runs) {
        std::string label = m.strategy;
        int suffix = 2;
        while (std::find(labels.begin(), labels.end(), label) != labels.end()) {
            label = m.strategy + "_" + std::to_string(suffix++);
        }
        labels.push_back(label);
    }

    // Resample everything to the coarsest grid when the eval grids disagree.
    std::size_t base = 0;
    bool misaligned = false;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].steps != runs[base].steps) misaligned = true;
        if (runs[i].steps.size() < runs[base].steps.size()) base = i;
    }
    if (misaligned) {
        std::cerr << "warning: eval grids differ; resampling to the coarsest grid ("
                  << labels[base] << ")\n";
    }
    const std::vector<long long>& grid = runs[base].steps;

    {
        std::ofstream out(fs::path(out_dir) / "aligned.csv");
        if (!out) throw std::runtime_error("cannot write aligned.csv under " + out_dir);
        out << "# schema_version=1\n";
        out << "step";
        for (const std::string& l : labels) out << ',' << l << "_mean," << l << "_stderr";
        out << '\n';
        for (long long step : grid) {
            out << step;
            for (const Metrics& m : runs) {
                out << ',' << fmt(value_at_or_before(m.steps, m.success_mean, step)) << ','
                    << fmt(value_at_or_before(m.steps, m.success_stderr, step));
            }
            out << '\n';
        }
    }

    std::vector<ChartSeries> curves;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        ChartSeries s;
        s.label = labels[i];
        for (std::size_t j = 0; j < runs[i].steps.size(); ++j) {
            s.points.push_back({static_cast<double>(runs[i].steps[j]),
                                runs[i].success_mean[j]});
        }
        curves.push_back(std::move(s));
    }
    write_line_chart((fs::path(out_dir) / "curves.svg").string(), "Evaluation success",
                     "training step", "success rate", curves, 0.0, 1.0);

    // Interventions-versus-success table; the reset ratio is relative to the
    // run labeled oracle, when present.
    double oracle_interventions = kNaN;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (labels[i] == "oracle" && !runs[i].interventions_mean.empty()) {
            oracle_interventions = runs[i].interventions_mean.back();
        }
    }
    std::ofstream out(fs::path(out_dir) / "interventions.csv");
    if (!out) throw std::runtime_error("cannot write interventions.csv under " + out_dir);
    out << "# schema_version=1\n";
    out << "strategy,final_step,eval_success_mean,intervention_count_mean,"
           "oracle_reset_ratio\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Metrics& m = runs[i];
        if (m.steps.empty()) continue;
        double ratio = kNaN;
        if (!std::isnan(oracle_interventions) && m.interventions_mean.back() > 0) {
            ratio = oracle_interventions / m.interventions_mean.back();
        }
        out << labels[i] << ',' << m.steps.back() << ',' << fmt(m.success_mean.back()) << ','
            << fmt(m.interventions_mean.back()) << ',' << fmt(ratio) << '\n';
    }
}

void emit_trace_report(const std::string& run_dir, const std::string& out_dir) {
    Metrics run = load_run_dir(run_dir);
    fs::create_directories(out_dir);
    std::vector<ChartSeries> curves;
    std::ofstream stats(fs::path(out_dir) / "trace_stats.csv");
    if (!stats) throw std::runtime_error("cannot write trace_stats.csv under " + out_dir);
    stats << "# schema_version=1\n";
    stats << "seed,num_subgoals,spearman_step_vs_distance\n";
    bool any = false;
    for (const SeedSeries& s : run.per_seed) {
        if (s.trace.empty()) continue;
        any = true;
        ChartSeries c;
        c.label = "seed " + std::to_string(s.seed);
        std::vector<double> steps, dists;
        for (const TraceRow& r : s.trace) {
            c.points.push_back({static_cast<double>(r.step), r.normalized});
            steps.push_back(static_cast<double>(r.step));
            dists.push_back(r.normalized);
        }
        stats << s.seed << ',' << s.trace.size() << ',' << fmt(spearman(steps, dists)) << '\n';
        curves.push_back(std::move(c));
    }
    if (!any) throw std::runtime_error("no curriculum traces under " + run_dir);
    write_line_chart((fs::path(out_dir) / "trace.svg").string(),
                     "Curriculum distance to the initial states", "training step",
                     "normalized distance", curves, 0.0, 1.0);
}

}  // namespace prl
