#include <doctest.h>

#include <deque>
#include <filesystem>

#include "prl/envs.hpp"
#include "support.hpp"

using namespace prl;

namespace {

// Independent forward BFS: optimal number of steps from `start` until the
// reached-predicate fires for g.
int bfs_optimal_steps(const GoalConditionedMdp& mdp, StateId start, GoalId g) {
    if (mdp.goal_reached(start, g)) return 0;
    std::vector<int> dist(mdp.num_states(), -1);
    std::deque<StateId> frontier{start};
    dist[start] = 0;
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(s, a)) {
                if (p <= 0.0 || dist[next] >= 0) continue;
                if (mdp.goal_reached(next, g)) return dist[s] + 1;
                dist[next] = dist[s] + 1;
                frontier.push_back(next);
            }
        }
    }
    return -1;
}

}  // namespace

TEST_SUITE_BEGIN("envs");

TEST_CASE("held object tracks the gripper") {
    GridTableTop grid(5, 5);
    GridState s;
    s.gripper = {2, 2};
    s.object = {2, 2};
    s.holding = true;
    Rng rng = make_rng(1);
    GridState next = grid.decode(grid.step(grid.encode(s), GridTableTop::right, rng));
    CHECK(next.gripper == GridCell{3, 2});
    CHECK(next.object == GridCell{3, 2});
    CHECK(next.holding);
}

TEST_CASE("movement clips at the borders") {
    GridTableTop grid(4, 4);
    GridState s;
    s.gripper = {0, 0};
    s.object = {3, 3};
    Rng rng = make_rng(2);
    GridState next = grid.decode(grid.step(grid.encode(s), GridTableTop::left, rng));
    CHECK(next.gripper == GridCell{0, 0});
    next = grid.decode(grid.step(grid.encode(s), GridTableTop::down, rng));
    CHECK(next.gripper == GridCell{0, 0});
}

TEST_CASE("toggle grips only when co-located and dropping ends success") {
    GridTableTop grid(5, 5);
    Rng rng = make_rng(3);
    GridState apart;
    apart.gripper = {1, 1};
    apart.object = {3, 3};
    GridState after = grid.decode(grid.step(grid.encode(apart), GridTableTop::toggle_grip, rng));
    CHECK_FALSE(after.holding);

    GridState together;
    together.gripper = {3, 3};
    together.object = {3, 3};
    after = grid.decode(grid.step(grid.encode(together), GridTableTop::toggle_grip, rng));
    CHECK(after.holding);
}

TEST_CASE("grid reward is the dropped-at-goal indicator") {
    GridTableTop grid(5, 5);
    GoalId g = grid.cell_index({4, 4});
    GridState s;
    s.gripper = {0, 0};
    s.object = {4, 4};
    s.holding = false;
    CHECK(grid.reward(grid.encode(s), g) == 1.0);
    CHECK(grid.goal_reached(grid.encode(s), g));
    s.holding = true;
    s.gripper = {4, 4};
    CHECK(grid.reward(grid.encode(s), g) == 0.0);  // still held, not dropped
    s.holding = false;
    s.object = {3, 4};
    CHECK(grid.reward(grid.encode(s), g) == 0.0);
}

TEST_CASE("strict mode additionally requires the gripper parked at the center") {
    GridOptions opts;
    opts.require_gripper_home = true;
    GridTableTop grid(5, 5, {}, opts);
    GoalId g = grid.cell_index({0, 0});
    GridState s;
    s.object = {0, 0};
    s.holding = false;
    s.gripper = {0, 0};
    CHECK(grid.reward(grid.encode(s), g) == 0.0);
    s.gripper = {2, 2};
    CHECK(grid.reward(grid.encode(s), g) == 1.0);
}

TEST_CASE("object-and-gripper projection names both cells") {
    GridOptions opts;
    opts.projection = GridGoalProjection::object_and_gripper;
    GridTableTop grid(5, 5, {}, opts);
    CHECK(grid.num_goals() == 625);
    GridState s;
    s.object = {4, 0};
    s.gripper = {2, 2};
    s.holding = false;
    GoalId g = grid.goal_of(grid.encode(s));
    CHECK(grid.reward(grid.encode(s), g) == 1.0);
    // Task goals park the gripper at the center.
    for (GoalId task : grid.task_goals()) {
        CHECK(task % (5 * 5) == grid.cell_index({2, 2}));
    }
}

TEST_CASE("grid constructor validates shape and goal cells") {
    CHECK_THROWS_AS(GridTableTop(2, 5), std::invalid_argument);
    CHECK_THROWS_AS(GridTableTop(5, 5, {{5, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(GridTableTop(5, 5, {{1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("grid state encoding is a bijection on the encoding space") {
    GridTableTop grid(4, 3);
    for (StateId s = 0; s < grid.num_states(); ++s) {
        CHECK(grid.encode(grid.decode(s)) == s);
    }
}

TEST_CASE("optimal carry from the center to a corner takes six steps on 5x5") {
    GridTableTop grid(5, 5);
    StateId start = grid.initial_support().front();
    // grip, two moves right, two moves up, drop
    CHECK(bfs_optimal_steps(grid, start, grid.cell_index({4, 4})) == 6);
}

TEST_CASE("door steps decrement, increment and clip") {
    DoorChain door(10);
    Rng rng = make_rng(4);
    CHECK(door.step(3, DoorChain::close_step, rng) == 2);
    CHECK(door.step(3, DoorChain::open_step, rng) == 4);
    CHECK(door.step(0, DoorChain::close_step, rng) == 0);
    CHECK(door.step(9, DoorChain::open_step, rng) == 9);
    CHECK(door.step(5, DoorChain::no_op, rng) == 5);
    CHECK_THROWS_AS(DoorChain(1), std::invalid_argument);
}

TEST_CASE("optimal closing from the open door takes K-1 steps") {
    DoorChain door(10);
    CHECK(bfs_optimal_steps(door, door.initial_support().front(), 0) == 9);
}

TEST_CASE("environments are deterministic") {
    GridTableTop grid(5, 5);
    Rng r1 = make_rng(5), r2 = make_rng(99);
    for (StateId s = 0; s < grid.num_states(); s += 7) {
        for (ActionId a = 0; a < grid.num_actions(); ++a) {
            CHECK(grid.step(s, a, r1) == grid.step(s, a, r2));
        }
    }
}

TEST_CASE("rewards are binary and success implies terminal semantics") {
    GridTableTop grid(4, 4);
    for (StateId s = 0; s < grid.num_states(); s += 3) {
        for (GoalId g = 0; g < grid.num_goals(); g += 2) {
            double r = grid.reward(s, g);
            CHECK((r == 0.0 || r == 1.0));
            CHECK(grid.goal_reached(s, g) == (r == 1.0));
        }
    }
}

TEST_CASE("demo generation yields 24 trajectories on the default grid") {
    GridTableTop grid(5, 5);
    Rng rng = make_rng(6);
    DemoSet demos = generate_demos(grid, 3, 3, 0.0, rng);
    CHECK(demos.trajectories.size() == 24);
    int forward = 0, reverse = 0;
    for (const Trajectory& t : demos.trajectories) {
        (t.direction == DemoDirection::forward ? forward : reverse) += 1;
    }
    CHECK(forward == 12);
    CHECK(reverse == 12);
}

TEST_CASE("noise-free forward demos end in success and are optimal") {
    GridTableTop grid(5, 5);
    Rng rng = make_rng(7);
    DemoSet demos = generate_demos(grid, 3, 0, 0.0, rng);
    StateId start = grid.initial_support().front();
    for (const Trajectory& t : demos.trajectories) {
        REQUIRE(t.direction == DemoDirection::forward);
        CHECK(grid.reward(t.states.back(), t.goal) == 1.0);
        CHECK(static_cast<int>(t.actions.size()) == bfs_optimal_steps(grid, start, t.goal));
    }
}

TEST_CASE("noisy demos stay successful") {
    GridTableTop grid(5, 5);
    Rng rng = make_rng(8);
    DemoSet demos = generate_demos(grid, 3, 3, 0.3, rng);
    for (const Trajectory& t : demos.trajectories) {
        if (t.direction == DemoDirection::forward) {
            CHECK(grid.goal_reached(t.states.back(), t.goal));
        } else {
            CHECK(t.states.back() == grid.initial_support().front());
        }
    }
}

TEST_CASE("initial states carry step index zero") {
    DoorChain door(12);
    Rng rng = make_rng(9);
    DemoSet demos = generate_demos(door, 3, 3, 0.1, rng);
    CHECK(demos.step_index(door.initial_support().front()) == 0);
}

TEST_CASE("reverse demos are indexed in reverse order") {
    DoorChain door(8);
    Rng rng = make_rng(10);
    DemoSet demos = generate_demos(door, 0, 1, 0.0, rng);
    REQUIRE(demos.trajectories.size() == 1);
    const Trajectory& t = demos.trajectories.front();
    REQUIRE(t.direction == DemoDirection::reverse);
    // Closed door start, fully open end: the open end is the initial state.
    CHECK(t.states.front() == 0);
    CHECK(t.states.back() == 7);
    CHECK(demos.step_index(7) == 0);
    CHECK(demos.step_index(0) == static_cast<int>(t.actions.size()));
}

TEST_CASE("min step index takes the minimum over occurrences and is idempotent") {
    DemoSet demos;
    Trajectory a;
    a.direction = DemoDirection::forward;
    a.goal = 0;
    a.states = {10, 11, 7, 12};
    a.actions = {0, 0, 0};
    Trajectory b;
    b.direction = DemoDirection::forward;
    b.goal = 0;
    b.states = {10, 13, 14, 15, 16, 17, 18, 7};
    b.actions = {0, 0, 0, 0, 0, 0, 0};
    demos.ingest(a);
    demos.ingest(b);
    CHECK(demos.step_index(7) == 2);  // occurs at indices 2 and 7
    CHECK(demos.step_index(10) == 0);
    CHECK_FALSE(demos.step_index(999).has_value());

    auto before = demos.min_step_index;
    demos.ingest(a);
    demos.ingest(b);
    CHECK(demos.min_step_index == before);
}

TEST_CASE("demo files round-trip through the line format") {
    GridTableTop grid(5, 5);
    Rng rng = make_rng(11);
    DemoSet demos = generate_demos(grid, 2, 2, 0.1, rng);
    std::filesystem::path path = std::filesystem::temp_directory_path() / "prl_demos_test.txt";
    save_demos(demos, path.string());
    DemoSet loaded = load_demos(path.string(), grid);
    REQUIRE(loaded.trajectories.size() == demos.trajectories.size());
    for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
        CHECK(loaded.trajectories[i].direction == demos.trajectories[i].direction);
        CHECK(loaded.trajectories[i].goal == demos.trajectories[i].goal);
        CHECK(loaded.trajectories[i].states == demos.trajectories[i].states);
        CHECK(loaded.trajectories[i].actions == demos.trajectories[i].actions);
    }
    CHECK(loaded.min_step_index == demos.min_step_index);
    std::filesystem::remove(path);
}

TEST_CASE("demo noise outside [0,1) is rejected") {
    DoorChain door(6);
    Rng rng = make_rng(12);
    CHECK_THROWS_AS(generate_demos(door, 1, 1, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(generate_demos(door, 1, 1, -0.1, rng), std::invalid_argument);
}

TEST_CASE("trajectory transitions recompute rewards and terminals") {
    DoorChain door(5);
    Rng rng = make_rng(13);
    DemoSet demos = generate_demos(door, 1, 0, 0.0, rng);
    const Trajectory& t = demos.trajectories.front();
    std::vector<Transition> trs = trajectory_transitions(t, door);
    REQUIRE(trs.size() == t.actions.size());
    for (std::size_t i = 0; i + 1 < trs.size(); ++i) {
        CHECK(trs[i].reward == 0.0);
        CHECK_FALSE(trs[i].terminal);
    }
    CHECK(trs.back().reward == 1.0);
    CHECK(trs.back().terminal);
}

TEST_SUITE_END();
