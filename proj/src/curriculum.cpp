#include "prl/curriculum.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace prl {

double reach_value(const GoalConditionedMdp& mdp, const QTable& table, StateId s, GoalId g) {
    if (mdp.goal_reached(s, g)) return 1.0;
    return value(table, s, g);
}

double distance_value(StateId s, const QTable& table, std::span<const StateId> rho_samples,
                      const GoalConditionedMdp& mdp) {
    if (rho_samples.empty()) {
        throw std::invalid_argument("distance_value: rho_samples must be nonempty");
    }
    double sum = 0.0;
    for (StateId s0 : rho_samples) sum += reach_value(mdp, table, s, mdp.goal_of(s0));
    return -sum / static_cast<double>(rho_samples.size());
}

std::optional<int> distance_step_index(StateId s, const DemoSet& demos) {
    return demos.step_index(s);
}

StateId curriculum_goal(GoalId g, std::span<const StateId> candidates, const QTable& table,
                        double epsilon, const DistanceFn& distance, Rng& rng) {
    if (candidates.empty()) throw std::invalid_argument("curriculum_goal: empty candidate set");

    std::vector<StateId> best;
    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<StateId> fallback;
    double best_value = -std::numeric_limits<double>::infinity();

    for (StateId s : candidates) {
        std::optional<double> d = distance(s);
        if (!d) continue;  // not a candidate under this distance mode
        double v = value(table, s, g);
        if (v >= epsilon) {
            if (*d < best_dist) {
                best_dist = *d;
                best.clear();
                best.push_back(s);
            } else if (*d == best_dist) {
                best.push_back(s);
            }
        }
        if (v > best_value) {
            best_value = v;
            fallback.clear();
            fallback.push_back(s);
        } else if (v == best_value) {
            fallback.push_back(s);
        }
    }

    std::vector<StateId>& pool = best.empty() ? fallback : best;
    if (pool.empty()) {
        throw std::invalid_argument(
            "curriculum_goal: no candidate has a defined distance under this mode");
    }
    return pool[uniform_int(rng, 0, static_cast<int>(pool.size()) - 1)];
}

GoalPhase start_goal_phase(const GoalConditionedMdp& mdp, const SubgoalPicker& pick_subgoal,
                           Rng& rng) {
    GoalPhase phase;
    phase.task_goal = mdp.sample_task_goal(rng);
    phase.mode = GoalPhase::Mode::subgoal;
    phase.current_goal = pick_subgoal(phase.task_goal, rng);
    phase.steps_in_phase = 0;
    return phase;
}

GoalId goal_generator(StateId s, GoalPhase& phase, const GoalConditionedMdp& mdp,
                      int eval_horizon, const SubgoalPicker& pick_subgoal, Rng& rng) {
    bool reached = mdp.goal_reached(s, phase.current_goal);
    bool expired = phase.steps_in_phase >= eval_horizon;
    if (reached || expired) {
        if (phase.mode == GoalPhase::Mode::subgoal) {
            phase.mode = GoalPhase::Mode::task_goal;
            phase.current_goal = phase.task_goal;
        } else {
            phase.task_goal = mdp.sample_task_goal(rng);
            phase.mode = GoalPhase::Mode::subgoal;
            phase.current_goal = pick_subgoal(phase.task_goal, rng);
        }
        phase.steps_in_phase = 1;
    } else {
        ++phase.steps_in_phase;
    }
    return phase.current_goal;
}

double normalized_distance(const SubgoalEvent& e) {
    double span = e.d_goal - e.d_init;
    if (span <= 0.0) return e.raw_distance <= e.d_init ? 0.0 : 1.0;
    return std::clamp((e.raw_distance - e.d_init) / span, 0.0, 1.0);
}

std::vector<TraceRow> curriculum_trace(std::span<const SubgoalEvent> events) {
    std::vector<TraceRow> rows;
    rows.reserve(events.size());
    for (const SubgoalEvent& e : events) {
        rows.push_back({e.step, e.task_goal, e.chosen_state, e.raw_distance,
                        normalized_distance(e)});
    }
    return rows;
}

}  // namespace prl
