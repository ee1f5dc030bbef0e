#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prl/mdp.hpp"

namespace prl {

struct GridCell {
    int x = 0;
    int y = 0;
    bool operator==(const GridCell&) const = default;
};

struct GridState {
    GridCell gripper;
    GridCell object;
    bool holding = false;
};

/// Which part of a grid state a goal names. object_cell: the object's cell
/// (success additionally requires the object to be dropped).
/// object_and_gripper: object cell and gripper cell jointly.
enum class GridGoalProjection { object_cell, object_and_gripper };

struct GridOptions {
    int eval_horizon = 50;
    double discount = 0.99;
    GridGoalProjection projection = GridGoalProjection::object_cell;
    /// Strict success: the gripper must also be parked at the center cell.
    bool require_gripper_home = false;
};

/// Desk-scale rearrangement world: a gripper moves on a WxH grid, can attach
/// to the object when co-located, and must drop it at a goal cell. All moves
/// are reversible, so the world is ergodic.
class GridTableTop final : public GoalConditionedMdp {
public:
    enum Action : ActionId { up = 0, down = 1, left = 2, right = 3, toggle_grip = 4 };

    /// goal_cells: task goal locations for the object; defaults to the four
    /// corner cells. rho is deterministic: gripper and object at the center,
    /// not holding.
    GridTableTop(int width, int height, std::vector<GridCell> goal_cells = {},
                 GridOptions opts = {});

    int width() const { return width_; }
    int height() const { return height_; }
    GridCell center() const { return {width_ / 2, height_ / 2}; }
    const GridOptions& options() const { return opts_; }

    int cell_index(GridCell c) const { return c.y * width_ + c.x; }
    GridCell cell_at(int idx) const { return {idx % width_, idx / width_}; }

    StateId encode(const GridState& s) const;
    GridState decode(StateId id) const;

    int num_states() const override { return num_cells_ * num_cells_ * 2; }
    int num_actions() const override { return 5; }
    int num_goals() const override;
    GoalId goal_of(StateId s) const override;
    std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const override;
    StateId step(StateId s, ActionId a, Rng& rng) const override;
    double reward(StateId s, GoalId g) const override;
    std::vector<StateId> initial_support() const override;
    std::vector<GoalId> task_goals() const override;
    double discount() const override { return opts_.discount; }
    int eval_horizon() const override { return opts_.eval_horizon; }
    std::string name() const override;

private:
    StateId apply(GridState s, ActionId a) const;

    int width_;
    int height_;
    int num_cells_;
    std::vector<GridCell> goal_cells_;
    GridOptions opts_;
};

/// Door modeled as a chain of K discrete angles; 0 is fully closed (the task
/// goal), K-1 is fully open (the initial state). Closing practice implicitly
/// requires learning to re-open.
class DoorChain final : public GoalConditionedMdp {
public:
    enum Action : ActionId { close_step = 0, open_step = 1, no_op = 2 };

    explicit DoorChain(int angle_count, int eval_horizon = 50, double discount = 0.99);

    int angle_count() const { return angle_count_; }

    int num_states() const override { return angle_count_; }
    int num_actions() const override { return 3; }
    int num_goals() const override { return angle_count_; }
    GoalId goal_of(StateId s) const override { return s; }
    std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const override;
    StateId step(StateId s, ActionId a, Rng& rng) const override;
    double reward(StateId s, GoalId g) const override { return s == g ? 1.0 : 0.0; }
    std::vector<StateId> initial_support() const override { return {angle_count_ - 1}; }
    std::vector<GoalId> task_goals() const override { return {0}; }
    double discount() const override { return discount_; }
    int eval_horizon() const override { return eval_horizon_; }
    std::string name() const override;

private:
    int angle_count_;
    int eval_horizon_;
    double discount_;
};

// ── Demonstrations ──────────────────────────────────────────────────────────

enum class DemoDirection : int { forward = 0, reverse = 1 };

struct Trajectory {
    DemoDirection direction = DemoDirection::forward;
    GoalId goal = 0;
    std::vector<StateId> states;    // length T+1
    std::vector<ActionId> actions;  // length T
};

/// Materialize the stored transitions of a trajectory, labeled with its goal.
std::vector<Transition> trajectory_transitions(const Trajectory& traj,
                                               const GoalConditionedMdp& mdp);

/// A demonstration set with per-state minimal step indices: forward
/// trajectories are indexed 0,1,...,T from the start, reverse trajectories
/// in reverse order (their final, initial-distribution end gets 0). The
/// index of a state is the minimum over all its labeled occurrences.
struct DemoSet {
    std::vector<Trajectory> trajectories;
    std::unordered_map<StateId, int> min_step_index;

    void ingest(const Trajectory& traj);
    void ingest(const std::vector<Trajectory>& trajs);

    std::optional<int> step_index(StateId s) const;
    std::vector<StateId> unique_states() const;
    std::size_t total_transitions() const;
    bool empty() const { return trajectories.empty(); }

    /// Copy containing only forward trajectories (reverse demos excluded
    /// from the curriculum), indices rebuilt.
    DemoSet forward_only() const;
};

/// Scripted demonstrations: for every task goal, `per_goal_forward`
/// trajectories from rho to the goal and `per_goal_reverse` trajectories
/// from the reached goal state back to rho. With probability `noise` a step
/// substitutes a random non-regressing action (one that does not increase
/// the shortest-path distance), making demos suboptimal but successful.
/// Throws if a rollout exceeds 10x its shortest-path length.
DemoSet generate_demos(const GoalConditionedMdp& mdp, int per_goal_forward,
                       int per_goal_reverse, double noise, Rng& rng);

/// Line-delimited demo files: one trajectory per line, all fields integers:
///   <direction> <goal> <s0> <a0> <s1> <a1> ... <s_{T-1}> <a_{T-1}>
/// Next states are reconstructed by replaying actions, so ingestion requires
/// a deterministic environment.
void save_demos(const DemoSet& demos, const std::string& path);
DemoSet load_demos(const std::string& path, const GoalConditionedMdp& mdp);

/// A success state for goal g nearest to the initial distribution.
StateId nearest_success_state(const GoalConditionedMdp& mdp, GoalId g);

}  // namespace prl
