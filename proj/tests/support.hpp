#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>
#include <vector>

#include "prl/curriculum.hpp"
#include "prl/learner.hpp"
#include "prl/mdp.hpp"

namespace prl::test {

/// Wrapper that makes one state absorbing (every action self-loops), which
/// breaks reversibility.
class SinkMdp final : public GoalConditionedMdp {
public:
    SinkMdp(const GoalConditionedMdp& base, StateId sink) : base_(&base), sink_(sink) {}

    int num_states() const override { return base_->num_states(); }
    int num_actions() const override { return base_->num_actions(); }
    int num_goals() const override { return base_->num_goals(); }
    GoalId goal_of(StateId s) const override { return base_->goal_of(s); }
    std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const override {
        if (s == sink_) return {{s, 1.0}};
        return base_->transition(s, a);
    }
    double reward(StateId s, GoalId g) const override { return base_->reward(s, g); }
    std::vector<StateId> initial_support() const override { return base_->initial_support(); }
    std::vector<GoalId> task_goals() const override { return base_->task_goals(); }
    double discount() const override { return base_->discount(); }
    int eval_horizon() const override { return base_->eval_horizon(); }
    std::string name() const override { return base_->name() + "-sink"; }

private:
    const GoalConditionedMdp* base_;
    StateId sink_;
};

/// View of a base MDP under a state relabeling sigma and action relabeling
/// tau: transitions, rewards and supports are conjugated accordingly.
class PermutedMdp final : public GoalConditionedMdp {
public:
    PermutedMdp(const GoalConditionedMdp& base, std::vector<StateId> sigma,
                std::vector<ActionId> tau)
        : base_(&base), sigma_(std::move(sigma)), tau_(std::move(tau)),
          sigma_inv_(sigma_.size()) {
        for (std::size_t i = 0; i < sigma_.size(); ++i) sigma_inv_[sigma_[i]] = static_cast<StateId>(i);
    }

    int num_states() const override { return base_->num_states(); }
    int num_actions() const override { return base_->num_actions(); }
    int num_goals() const override { return base_->num_goals(); }
    GoalId goal_of(StateId s) const override { return base_->goal_of(sigma_inv_[s]); }
    std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const override {
        auto support = base_->transition(sigma_inv_[s], tau_[a]);
        for (auto& [next, p] : support) next = sigma_[next];
        return support;
    }
    double reward(StateId s, GoalId g) const override { return base_->reward(sigma_inv_[s], g); }
    std::vector<StateId> initial_support() const override {
        auto support = base_->initial_support();
        for (StateId& s : support) s = sigma_[s];
        return support;
    }
    std::vector<GoalId> task_goals() const override { return base_->task_goals(); }
    double discount() const override { return base_->discount(); }
    int eval_horizon() const override { return base_->eval_horizon(); }
    std::string name() const override { return base_->name() + "-permuted"; }

private:
    const GoalConditionedMdp* base_;
    std::vector<StateId> sigma_;
    std::vector<ActionId> tau_;
    std::vector<StateId> sigma_inv_;
};


/// View restricting the task goal distribution to a single goal (per-goal
/// evaluation of otherwise multi-goal environments).
class OneGoalMdp final : public GoalConditionedMdp {
public:
    OneGoalMdp(const GoalConditionedMdp& base, GoalId g) : base_(&base), g_(g) {}

    int num_states() const override { return base_->num_states(); }
    int num_actions() const override { return base_->num_actions(); }
    int num_goals() const override { return base_->num_goals(); }
    GoalId goal_of(StateId s) const override { return base_->goal_of(s); }
    std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const override {
        return base_->transition(s, a);
    }
    double reward(StateId s, GoalId g) const override { return base_->reward(s, g); }
    std::vector<StateId> initial_support() const override { return base_->initial_support(); }
    std::vector<GoalId> task_goals() const override { return {g_}; }
    double discount() const override { return base_->discount(); }
    int eval_horizon() const override { return base_->eval_horizon(); }
    std::string name() const override { return base_->name(); }

private:
    const GoalConditionedMdp* base_;
    GoalId g_;
};

inline std::uint64_t fnv1a(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t table_hash(const QTable& table) {
    return fnv1a(table.q.data(), table.q.size() * sizeof(double));
}

/// Independent brute-force enumeration of the curriculum selection: the full
/// set of optimal outputs (so random tie-breaking can be checked by
/// membership).
inline std::set<StateId> curriculum_optimal_set(GoalId g, const std::vector<StateId>& candidates,
                                                const QTable& table, double epsilon,
                                                const DistanceFn& distance) {
    std::set<StateId> feasible_best, fallback_best;
    double best_dist = 0.0;
    double best_value = 0.0;
    bool have_feasible = false, have_fallback = false;
    for (StateId s : candidates) {
        auto d = distance(s);
        if (!d) continue;
        double v = value(table, s, g);
        if (v >= epsilon) {
            if (!have_feasible || *d < best_dist) {
                best_dist = *d;
                feasible_best = {s};
                have_feasible = true;
            } else if (*d == best_dist) {
                feasible_best.insert(s);
            }
        }
        if (!have_fallback || v > best_value) {
            best_value = v;
            fallback_best = {s};
            have_fallback = true;
        } else if (v == best_value) {
            fallback_best.insert(s);
        }
    }
    return have_feasible ? feasible_best : fallback_best;
}

/// Independent strong-connectivity oracle: per-node forward BFS over the
/// reachable set.
inline bool strongly_connected_oracle(const GoalConditionedMdp& mdp) {
    std::vector<StateId> states = reachable_states(mdp);
    std::vector<int> index(mdp.num_states(), -1);
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = static_cast<int>(i);
    const int n = static_cast<int>(states.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& [next, p] : mdp.transition(states[i], a)) {
                if (p > 0.0) adj[i].push_back(index[next]);
            }
        }
    }
    for (int start = 0; start < n; ++start) {
        std::vector<char> seen(n, 0);
        std::deque<int> q{start};
        seen[start] = 1;
        int count = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    q.push_back(w);
                }
            }
        }
        if (count != n) return false;
    }
    return true;
}

inline double chi_square(const std::vector<long long>& observed,
                         const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double d = static_cast<double>(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

}  // namespace prl::test
