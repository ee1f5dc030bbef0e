#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prl/baselines.hpp"
#include "prl/curriculum.hpp"
#include "prl/envs.hpp"
#include "prl/learner.hpp"
#include "prl/mdp.hpp"
#include "prl/relabel.hpp"

namespace prl {

struct EnvConfig {
    std::string kind = "grid";  // grid | door
    int grid_width = 5;
    int grid_height = 5;
    int door_angles = 16;
    int eval_horizon = 50;
    double discount = 0.99;
    std::string goal_projection = "object";  // object | object_gripper
    bool require_gripper_home = false;
};

struct LearnerConfig {
    double alpha = 0.1;
    double eps_start = 0.1;
    double eps_end = 0.02;
    int updates_per_step = 4;
    std::size_t buffer_cap = 10'000'000;
};

struct DemoConfig {
    bool enabled = true;
    int per_goal_forward = 3;
    int per_goal_reverse = 3;
    double noise = 0.1;
};

struct RunConfig {
    EnvConfig env;
    std::string strategy = "vaprl";  // vaprl | fbrl | naive | r3l | oracle
    long long train_horizon = 50'000;
    long long total_steps = 150'000;
    long long eval_every = 0;  // 0 -> train_horizon / 100
    int eval_trials = 10;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    CurriculumConfig curriculum;
    int relabel_n = 4;
    LearnerConfig learner;
    DemoConfig demos;
    bool early_switch = true;
    bool keep_after_success = false;
    std::string out_dir = "out";
};

struct MetricsRow {
    long long step;
    double eval_success;  // fraction of eval_trials
    long long interventions;
    std::size_t buffer_size;
    double curriculum_distance;  // normalized; NaN when not applicable
};

struct SeedSeries {
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;
    std::vector<TraceRow> trace;
};

/// Per-seed series plus the across-seed summary at the shared eval grid.
struct Metrics {
    std::string strategy;
    std::vector<SeedSeries> per_seed;
    std::vector<long long> steps;
    std::vector<double> success_mean;
    std::vector<double> success_stderr;  // NaN when < 2 seeds
    std::vector<double> interventions_mean;
    std::vector<double> distance_mean;  // NaN when not applicable
};

struct SeedOutcome {
    SeedSeries series;
    QTable final_table;
    std::unique_ptr<ReplayBuffer> buffer;
};

std::unique_ptr<GoalConditionedMdp> make_env(const EnvConfig& cfg);

/// Throws on invalid configuration; soft problems come back as warnings.
void validate(const RunConfig& cfg);
std::vector<std::string> config_warnings(const RunConfig& cfg);

long long resolved_eval_every(const RunConfig& cfg);
double exploration_at(const RunConfig& cfg, long long step);

/// One fully isolated training run: demo generation, ingestion with
/// relabeling, the strategy-driven collect/relabel/train loop, and
/// intermittent evaluations on the pristine episodic environment. Pure
/// function of (cfg, seed); performs no file I/O.
SeedOutcome run_seed(const RunConfig& cfg, std::uint64_t seed);

/// Runs every seed (concurrently, fully isolated) and writes the run
/// artifacts under cfg.out_dir: config echo, per-seed metrics/trace/qtable,
/// and the across-seed summary.
Metrics run_experiment(const RunConfig& cfg);

Metrics summarize(const std::string& strategy, std::vector<SeedSeries> per_seed);

/// Reset ablations: episodic wrappers that teleport the state at each
/// episode start instead of running persistently. vaprl_reset starts at the
/// curriculum state C(g) and trains on task goals only; oracle_reset resets
/// to the initial distribution (identical to the oracle strategy);
/// uniform_reset starts from a uniformly random reachable state.
enum class ResetVariant { vaprl_reset, oracle_reset, uniform_reset };

std::string to_string(ResetVariant v);
SeedOutcome run_reset_seed(const RunConfig& cfg, std::uint64_t seed, ResetVariant variant);
Metrics run_reset_ablation(const RunConfig& cfg, ResetVariant variant);
std::map<std::string, Metrics> run_ablation(const RunConfig& cfg);

// ── Run artifacts ───────────────────────────────────────────────────────────

void write_metrics_csv(const SeedSeries& series, const std::string& path);
SeedSeries read_metrics_csv(const std::string& path);
void write_trace_csv(std::span<const TraceRow> rows, const std::string& path);
std::vector<TraceRow> read_trace_csv(const std::string& path);
void write_summary_csv(const Metrics& metrics, const std::string& path);

/// Load a run directory (seed_*/metrics.csv [+ trace.csv]) back into a
/// Metrics, recomputing the summary.
Metrics load_run_dir(const std::string& dir);

/// Comparison artifacts: an aligned learning-curve CSV (resampled to the
/// coarsest eval grid when runs disagree, with a warning), an SVG learning
/// curve, and the interventions-versus-success table.
void emit_summary(const std::vector<Metrics>& runs, const std::string& out_dir);

/// Curriculum trace artifacts for one run directory: per-seed trace SVG and
/// a small stats CSV (Spearman of step vs normalized distance per seed).
void emit_trace_report(const std::string& run_dir, const std::string& out_dir);

}  // namespace prl
