#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prl/envs.hpp"
#include "prl/learner.hpp"
#include "prl/mdp.hpp"

namespace prl {

/// How the distance of a state to the initial distribution is measured.
/// value_based: negated expected value of reaching the initial states'
/// goal-projections. step_index: minimal demonstration step index; states
/// absent from the demos are not curriculum candidates under this mode.
enum class DistanceMode { value_based, step_index };

enum class CandidateSource { demo_states, replay_sample };

struct CurriculumConfig {
    double epsilon = 0.1;
    DistanceMode distance_mode = DistanceMode::step_index;
    CandidateSource candidate_source = CandidateSource::demo_states;
    int candidate_sample_size = 256;
    bool include_reverse_demos = true;
    std::uint64_t rng_seed = 0;
};

/// A distance to the initial distribution; nullopt marks states that are not
/// valid curriculum candidates under the active mode.
using DistanceFn = std::function<std::optional<double>(StateId)>;

/// Ability of the policy to reach g from s: 1 when s already satisfies g
/// (under termination-on-success the return from the goal itself is the
/// full success reward), otherwise the behavior-policy value estimate.
double reach_value(const GoalConditionedMdp& mdp, const QTable& table, StateId s, GoalId g);

double distance_value(StateId s, const QTable& table, std::span<const StateId> rho_samples,
                      const GoalConditionedMdp& mdp);
std::optional<int> distance_step_index(StateId s, const DemoSet& demos);

/// The curriculum goal: among candidates whose behavior-policy value toward
/// g clears epsilon, the state with minimal distance (exact ties broken
/// uniformly at random). When no candidate clears the threshold, the
/// candidate with maximal value (again random among exact ties).
/// Rejects an empty candidate set.
StateId curriculum_goal(GoalId g, std::span<const StateId> candidates, const QTable& table,
                        double epsilon, const DistanceFn& distance, Rng& rng);

/// Switch automaton state for the goal generator: each task goal is pursued
/// in two phases (its curriculum subgoal first, then the task goal itself),
/// each phase capped at eval_horizon steps or ended early on success.
struct GoalPhase {
    enum class Mode { subgoal, task_goal };
    Mode mode = Mode::subgoal;
    GoalId current_goal = 0;
    GoalId task_goal = 0;
    int steps_in_phase = 0;
};

using SubgoalPicker = std::function<GoalId(GoalId task_goal, Rng& rng)>;

/// Phase before the first step of a cycle: a fresh task goal is drawn and
/// its subgoal computed; steps_in_phase starts at 0 and counts emissions.
GoalPhase start_goal_phase(const GoalConditionedMdp& mdp, const SubgoalPicker& pick_subgoal,
                           Rng& rng);

/// One emission of the goal generator: switches phase when the current goal
/// is reached at s or has been in place for eval_horizon steps, then returns
/// the goal to pursue this step. pick_subgoal is only consulted on
/// task_goal -> subgoal switches.
GoalId goal_generator(StateId s, GoalPhase& phase, const GoalConditionedMdp& mdp,
                      int eval_horizon, const SubgoalPicker& pick_subgoal, Rng& rng);

/// One curriculum selection, with the distance anchors needed to normalize
/// it later: d_init is the minimal candidate distance (the initial states),
/// d_goal the distance of the candidates that already satisfy the task goal
/// (the task-goal state); both recorded at selection time.
struct SubgoalEvent {
    long long step = 0;
    GoalId task_goal = 0;
    StateId chosen_state = 0;
    double raw_distance = 0.0;
    double d_init = 0.0;
    double d_goal = 0.0;
};

struct TraceRow {
    long long step;
    GoalId task_goal;
    StateId subgoal_state;
    double raw_distance;
    double normalized;  // 0 = initial-state distance, 1 = task-goal-state distance
};

double normalized_distance(const SubgoalEvent& e);
std::vector<TraceRow> curriculum_trace(std::span<const SubgoalEvent> events);

}  // namespace prl
