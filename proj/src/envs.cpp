#include "prl/envs.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace prl {

// ── GridTableTop ────────────────────────────────────────────────────────────

GridTableTop::GridTableTop(int width, int height, std::vector<GridCell> goal_cells,
                           GridOptions opts)
    : width_(width), height_(height), num_cells_(width * height),
      goal_cells_(std::move(goal_cells)), opts_(opts) {
    if (width < 3 || height < 3) {
        throw std::invalid_argument("GridTableTop: width and height must be >= 3");
    }
    if (goal_cells_.empty()) {
        goal_cells_ = {{0, 0}, {width_ - 1, 0}, {0, height_ - 1}, {width_ - 1, height_ - 1}};
    }
    std::set<std::pair<int, int>> seen;
    for (const GridCell& c : goal_cells_) {
        if (c.x < 0 || c.x >= width_ || c.y < 0 || c.y >= height_) {
            throw std::invalid_argument("GridTableTop: goal cell out of bounds");
        }
        if (!seen.insert({c.x, c.y}).second) {
            throw std::invalid_argument("GridTableTop: duplicate goal cell");
        }
    }
}

StateId GridTableTop::encode(const GridState& s) const {
    return (cell_index(s.gripper) * num_cells_ + cell_index(s.object)) * 2 +
           (s.holding ? 1 : 0);
}

GridState GridTableTop::decode(StateId id) const {
    GridState s;
    s.holding = (id & 1) != 0;
    id >>= 1;
    s.object = cell_at(id % num_cells_);
    s.gripper = cell_at(id / num_cells_);
    return s;
}

int GridTableTop::num_goals() const {
    return opts_.projection == GridGoalProjection::object_cell ? num_cells_
                                                               : num_cells_ * num_cells_;
}

GoalId GridTableTop::goal_of(StateId sid) const {
    GridState s = decode(sid);
    if (opts_.projection == GridGoalProjection::object_cell) return cell_index(s.object);
    return cell_index(s.object) * num_cells_ + cell_index(s.gripper);
}

StateId GridTableTop::apply(GridState s, ActionId a) const {
    switch (a) {
        case up:
        case down:
        case left:
        case right: {
            int dx = a == left ? -1 : a == right ? 1 : 0;
            int dy = a == down ? -1 : a == up ? 1 : 0;
            s.gripper.x = std::clamp(s.gripper.x + dx, 0, width_ - 1);
            s.gripper.y = std::clamp(s.gripper.y + dy, 0, height_ - 1);
            if (s.holding) s.object = s.gripper;
            break;
        }
        case toggle_grip:
            if (s.holding) {
                s.holding = false;
            } else if (s.gripper == s.object) {
                s.holding = true;
            }
            break;
        default:
            throw std::out_of_range("GridTableTop: unknown action");
    }
    return encode(s);
}

std::vector<std::pair<StateId, double>> GridTableTop::transition(StateId s, ActionId a) const {
    return {{apply(decode(s), a), 1.0}};
}

StateId GridTableTop::step(StateId s, ActionId a, Rng&) const {
    return apply(decode(s), a);
}

double GridTableTop::reward(StateId sid, GoalId g) const {
    GridState s = decode(sid);
    if (s.holding) return 0.0;
    bool ok;
    if (opts_.projection == GridGoalProjection::object_cell) {
        ok = cell_index(s.object) == g;
        if (opts_.require_gripper_home) ok = ok && s.gripper == center();
    } else {
        ok = cell_index(s.object) == g / num_cells_ && cell_index(s.gripper) == g % num_cells_;
    }
    return ok ? 1.0 : 0.0;
}

std::vector<StateId> GridTableTop::initial_support() const {
    GridState s;
    s.gripper = center();
    s.object = center();
    s.holding = false;
    return {encode(s)};
}

std::vector<GoalId> GridTableTop::task_goals() const {
    std::vector<GoalId> goals;
    goals.reserve(goal_cells_.size());
    for (const GridCell& c : goal_cells_) {
        if (opts_.projection == GridGoalProjection::object_cell) {
            goals.push_back(cell_index(c));
        } else {
            goals.push_back(cell_index(c) * num_cells_ + cell_index(center()));
        }
    }
    return goals;
}

std::string GridTableTop::name() const {
    return "grid-tabletop-" + std::to_string(width_) + "x" + std::to_string(height_);
}

// ── DoorChain ───────────────────────────────────────────────────────────────

DoorChain::DoorChain(int angle_count, int eval_horizon, double discount)
    : angle_count_(angle_count), eval_horizon_(eval_horizon), discount_(discount) {
    if (angle_count < 2) throw std::invalid_argument("DoorChain: angle count must be >= 2");
}

std::vector<std::pair<StateId, double>> DoorChain::transition(StateId s, ActionId a) const {
    Rng unused;
    return {{step(s, a, unused), 1.0}};
}

StateId DoorChain::step(StateId s, ActionId a, Rng&) const {
    switch (a) {
        case close_step: return std::max(0, s - 1);
        case open_step: return std::min(angle_count_ - 1, s + 1);
        case no_op: return s;
        default: throw std::out_of_range("DoorChain: unknown action");
    }
}

std::string DoorChain::name() const {
    return "door-chain-" + std::to_string(angle_count_);
}

// ── Demonstrations ──────────────────────────────────────────────────────────

std::vector<Transition> trajectory_transitions(const Trajectory& traj,
                                               const GoalConditionedMdp& mdp) {
    std::vector<Transition> out;
    out.reserve(traj.actions.size());
    for (std::size_t i = 0; i < traj.actions.size(); ++i) {
        StateId next = traj.states[i + 1];
        out.push_back({traj.states[i], traj.actions[i], next, traj.goal,
                       mdp.reward(next, traj.goal), mdp.goal_reached(next, traj.goal)});
    }
    return out;
}

void DemoSet::ingest(const Trajectory& traj) {
    trajectories.push_back(traj);
    const int last = static_cast<int>(traj.states.size()) - 1;
    for (int i = 0; i <= last; ++i) {
        int label = traj.direction == DemoDirection::forward ? i : last - i;
        auto [it, inserted] = min_step_index.try_emplace(traj.states[i], label);
        if (!inserted && label < it->second) it->second = label;
    }
}

void DemoSet::ingest(const std::vector<Trajectory>& trajs) {
    for (const Trajectory& t : trajs) ingest(t);
}

std::optional<int> DemoSet::step_index(StateId s) const {
    auto it = min_step_index.find(s);
    if (it == min_step_index.end()) return std::nullopt;
    return it->second;
}

std::vector<StateId> DemoSet::unique_states() const {
    std::vector<StateId> out;
    out.reserve(min_step_index.size());
    for (const auto& [s, idx] : min_step_index) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t DemoSet::total_transitions() const {
    std::size_t n = 0;
    for (const Trajectory& t : trajectories) n += t.actions.size();
    return n;
}

DemoSet DemoSet::forward_only() const {
    DemoSet out;
    for (const Trajectory& t : trajectories) {
        if (t.direction == DemoDirection::forward) out.ingest(t);
    }
    return out;
}

namespace {

// Greedy descent on the BFS distance field, with a per-step chance of a
// random non-regressing substitute (distance does not increase).
Trajectory scripted_rollout(const GoalConditionedMdp& mdp, StateId start,
                            const std::vector<int>& dist, double noise, Rng& rng) {
    if (dist[start] < 0) {
        throw std::runtime_error("generate_demos: target unreachable from rollout start");
    }
    const long long limit = std::max<long long>(1, 10LL * dist[start]);
    Trajectory traj;
    traj.states.push_back(start);
    StateId s = start;
    Rng step_rng = rng;  // deterministic envs ignore it
    while (dist[s] != 0) {
        std::vector<ActionId> greedy, lateral;
        int best = dist[s];
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            StateId next = mdp.step(s, a, step_rng);
            int d = dist[next];
            if (d < 0) continue;
            if (d < best) {
                best = d;
                greedy.clear();
                greedy.push_back(a);
            } else if (d == best && !greedy.empty()) {
                greedy.push_back(a);
            }
            if (d <= dist[s]) lateral.push_back(a);
        }
        std::vector<ActionId>& pool =
            (!lateral.empty() && uniform01(rng) < noise) ? lateral : greedy;
        if (pool.empty()) {
            throw std::runtime_error("generate_demos: rollout stuck (no progressing action)");
        }
        ActionId a = pool[uniform_int(rng, 0, static_cast<int>(pool.size()) - 1)];
        s = mdp.step(s, a, step_rng);
        traj.actions.push_back(a);
        traj.states.push_back(s);
        if (static_cast<long long>(traj.actions.size()) > limit) {
            throw std::runtime_error(
                "generate_demos: rollout exceeded 10x the shortest-path length; lower the noise");
        }
    }
    return traj;
}

std::vector<char> success_mask(const GoalConditionedMdp& mdp, GoalId g) {
    std::vector<char> mask(mdp.num_states(), 0);
    for (StateId s = 0; s < mdp.num_states(); ++s) mask[s] = mdp.goal_reached(s, g) ? 1 : 0;
    return mask;
}

}  // namespace

StateId nearest_success_state(const GoalConditionedMdp& mdp, GoalId g) {
    std::vector<char> mask = success_mask(mdp, g);
    std::deque<StateId> frontier;
    std::vector<char> seen(mdp.num_states(), 0);
    Rng unused;
    for (StateId s : mdp.initial_support()) {
        if (mask[s]) return s;
        seen[s] = 1;
        frontier.push_back(s);
    }
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(s, a)) {
                if (p <= 0.0 || seen[next]) continue;
                if (mask[next]) return next;
                seen[next] = 1;
                frontier.push_back(next);
            }
        }
    }
    throw std::runtime_error("nearest_success_state: goal unreachable from initial support");
}

DemoSet generate_demos(const GoalConditionedMdp& mdp, int per_goal_forward,
                       int per_goal_reverse, double noise, Rng& rng) {
    if (noise < 0.0 || noise >= 1.0) {
        throw std::invalid_argument("generate_demos: noise must be in [0,1)");
    }
    std::vector<char> rho_mask(mdp.num_states(), 0);
    for (StateId s : mdp.initial_support()) rho_mask[s] = 1;
    const std::vector<int> dist_home = bfs_distances_to(mdp, rho_mask);

    DemoSet demos;
    for (GoalId g : mdp.task_goals()) {
        const std::vector<int> dist_goal = bfs_distances_to(mdp, success_mask(mdp, g));
        std::vector<StateId> reached_states;
        for (int j = 0; j < per_goal_forward; ++j) {
            Trajectory traj = scripted_rollout(mdp, mdp.sample_initial(rng), dist_goal, noise, rng);
            traj.direction = DemoDirection::forward;
            traj.goal = g;
            reached_states.push_back(traj.states.back());
            demos.ingest(traj);
        }
        for (int j = 0; j < per_goal_reverse; ++j) {
            StateId start = reached_states.empty()
                                ? nearest_success_state(mdp, g)
                                : reached_states[j % reached_states.size()];
            Trajectory traj = scripted_rollout(mdp, start, dist_home, noise, rng);
            traj.direction = DemoDirection::reverse;
            traj.goal = mdp.goal_of(traj.states.back());
            demos.ingest(traj);
        }
    }
    return demos;
}

void save_demos(const DemoSet& demos, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_demos: cannot open " + path);
    for (const Trajectory& t : demos.trajectories) {
        out << static_cast<int>(t.direction) << ' ' << t.goal;
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
            out << ' ' << t.states[i] << ' ' << t.actions[i];
        }
        out << '\n';
    }
}

DemoSet load_demos(const std::string& path, const GoalConditionedMdp& mdp) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_demos: cannot open " + path);
    DemoSet demos;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        int direction;
        Trajectory t;
        if (!(fields >> direction >> t.goal)) {
            throw std::runtime_error("load_demos: malformed line");
        }
        t.direction = static_cast<DemoDirection>(direction);
        StateId s;
        ActionId a;
        bool have_state = false;
        while (fields >> s >> a) {
            if (!have_state) {
                t.states.push_back(s);
                have_state = true;
            } else if (t.states.back() != s) {
                throw std::runtime_error("load_demos: inconsistent state sequence");
            }
            auto support = mdp.transition(s, a);
            if (support.size() != 1) {
                throw std::runtime_error("load_demos: requires a deterministic environment");
            }
            t.actions.push_back(a);
            t.states.push_back(support.front().first);
        }
        if (t.states.empty()) throw std::runtime_error("load_demos: empty trajectory");
        demos.ingest(t);
    }
    return demos;
}

}  // namespace prl
