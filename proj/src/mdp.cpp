#include "prl/mdp.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace prl {

StateId GoalConditionedMdp::step(StateId s, ActionId a, Rng& rng) const {
    auto support = transition(s, a);
    if (support.size() == 1) return support.front().first;
    double u = uniform01(rng);
    double acc = 0.0;
    for (const auto& [next, p] : support) {
        acc += p;
        if (u < acc) return next;
    }
    return support.back().first;
}

StateId GoalConditionedMdp::sample_initial(Rng& rng) const {
    auto support = initial_support();
    return support[uniform_int(rng, 0, static_cast<int>(support.size()) - 1)];
}

GoalId GoalConditionedMdp::sample_task_goal(Rng& rng) const {
    auto goals = task_goals();
    return goals[uniform_int(rng, 0, static_cast<int>(goals.size()) - 1)];
}

PersistentEnv::PersistentEnv(const GoalConditionedMdp& mdp, long long train_horizon, Rng rng)
    : mdp_(&mdp), train_horizon_(train_horizon), rng_(rng) {
    if (train_horizon < mdp.eval_horizon()) {
        throw std::invalid_argument("PersistentEnv: train horizon must be >= eval horizon");
    }
    state_ = mdp_->sample_initial(rng_);
}

StateId PersistentEnv::step(ActionId a) {
    if (pending_charge_) {
        ++interventions_;
        pending_charge_ = false;
    }
    StateId next = mdp_->step(state_, a, rng_);
    ++total_steps_;
    ++steps_since_reset_;
    state_ = next;
    just_reset_ = false;
    if (steps_since_reset_ >= train_horizon_) {
        state_ = mdp_->sample_initial(rng_);
        steps_since_reset_ = 0;
        pending_charge_ = true;
        just_reset_ = true;
    }
    return next;
}

void PersistentEnv::set_state(StateId s) {
    state_ = s;
    steps_since_reset_ = 0;
    pending_charge_ = false;
    just_reset_ = false;
    ++interventions_;
}

int run_evaluation(const std::function<ActionId(StateId, GoalId)>& policy,
                   const GoalConditionedMdp& mdp, int trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("run_evaluation: trials must be >= 1");
    int successes = 0;
    for (int trial = 0; trial < trials; ++trial) {
        StateId s = mdp.sample_initial(rng);
        GoalId g = mdp.sample_task_goal(rng);
        bool reached = mdp.goal_reached(s, g);
        for (int t = 0; t < mdp.eval_horizon() && !reached; ++t) {
            s = mdp.step(s, policy(s, g), rng);
            reached = mdp.goal_reached(s, g);
        }
        if (reached) ++successes;
    }
    return successes;
}

namespace {

// Forward closure from the initial support over the transition supports.
std::vector<StateId> forward_closure(const GoalConditionedMdp& mdp, std::size_t cap) {
    std::unordered_set<StateId> seen;
    std::deque<StateId> frontier;
    for (StateId s : mdp.initial_support()) {
        if (seen.insert(s).second) frontier.push_back(s);
    }
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(s, a)) {
                if (p <= 0.0) continue;
                if (seen.insert(next).second) {
                    if (seen.size() > cap) {
                        throw std::runtime_error("reachable state set exceeds enumeration cap");
                    }
                    frontier.push_back(next);
                }
            }
        }
    }
    std::vector<StateId> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<StateId> reachable_states(const GoalConditionedMdp& mdp, std::size_t cap) {
    return forward_closure(mdp, cap);
}

bool check_ergodic(const GoalConditionedMdp& mdp, std::size_t cap) {
    std::vector<StateId> states = forward_closure(mdp, cap);
    if (states.empty()) return true;
    const int n = static_cast<int>(states.size());
    std::unordered_map<StateId, int> index;
    index.reserve(states.size());
    for (int i = 0; i < n; ++i) index[states[i]] = i;

    std::vector<std::vector<int>> fwd(n), rev(n);
    for (int i = 0; i < n; ++i) {
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(states[i], a)) {
                if (p <= 0.0) continue;
                int j = index.at(next);  // forward-closed by construction
                fwd[i].push_back(j);
                rev[j].push_back(i);
            }
        }
    }

    auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n, 0);
        std::deque<int> frontier{0};
        seen[0] = 1;
        int count = 1;
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop_front();
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    frontier.push_back(w);
                }
            }
        }
        return count == n;
    };
    return reaches_all(fwd) && reaches_all(rev);
}

std::vector<int> bfs_distances_to(const GoalConditionedMdp& mdp, const std::vector<char>& target) {
    const int n = mdp.num_states();
    std::vector<std::vector<int>> rev(n);
    for (StateId s = 0; s < n; ++s) {
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(s, a)) {
                if (p > 0.0) rev[next].push_back(s);
            }
        }
    }
    std::vector<int> dist(n, -1);
    std::deque<StateId> frontier;
    for (StateId s = 0; s < n; ++s) {
        if (target[s]) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        for (StateId prev : rev[s]) {
            if (dist[prev] < 0) {
                dist[prev] = dist[s] + 1;
                frontier.push_back(prev);
            }
        }
    }
    return dist;
}

}  // namespace prl
