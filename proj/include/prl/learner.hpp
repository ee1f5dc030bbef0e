#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "prl/mdp.hpp"

namespace prl {

/// Dense goal-conditioned action-value table, initialized to zero.
struct QTable {
    int num_states = 0;
    int num_goals = 0;
    int num_actions = 0;
    double alpha = 0.1;
    double gamma = 0.99;
    double explore_eps = 0.1;
    std::vector<double> q;

    QTable() = default;
    QTable(int states, int goals, int actions, double alpha = 0.1, double gamma = 0.99,
           double explore_eps = 0.1);

    std::size_t index(StateId s, GoalId g, ActionId a) const {
        return (static_cast<std::size_t>(s) * num_goals + g) * num_actions + a;
    }
    double& at(StateId s, GoalId g, ActionId a) { return q[index(s, g, a)]; }
    double at(StateId s, GoalId g, ActionId a) const { return q[index(s, g, a)]; }
};

/// One-step Q-learning backup on a single stored transition. Terminal
/// transitions bootstrap zero.
void q_update(QTable& table, const Transition& t);

/// explore=true: epsilon-greedy with uniform random tie-breaking among
/// argmax actions. explore=false: deterministic argmax, lowest index wins.
ActionId policy_action(const QTable& table, StateId s, GoalId g, bool explore, Rng& rng);

/// Exact state value under the epsilon-greedy behavior policy:
/// (1 - eps) * max_a q + eps * mean_a q.
double value(const QTable& table, StateId s, GoalId g);

/// Unbounded insertion-ordered transition store (bounded only by the
/// configured memory guard).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t max_size = 10'000'000) : max_size_(max_size) {}

    void push(const Transition& t);
    const Transition& sample(Rng& rng) const;
    std::size_t size() const { return transitions_.size(); }
    bool empty() const { return transitions_.empty(); }
    std::size_t max_size() const { return max_size_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

private:
    std::vector<Transition> transitions_;
    std::size_t max_size_;
};

/// Bellman-optimal values for one goal under the environment's
/// termination-on-success semantics: states already satisfying the goal are
/// terminal with value 0 and the success reward is collected on the
/// transition entering them.
struct DpSolution {
    int num_actions = 0;
    std::vector<double> v;  // per state
    std::vector<double> q;  // s * num_actions + a

    double state_value(StateId s) const { return v[s]; }
    double action_value(StateId s, ActionId a) const {
        return q[static_cast<std::size_t>(s) * num_actions + a];
    }
    ActionId greedy_action(StateId s) const;
};

/// Exact value iteration for goal g, converged when successive sweeps differ
/// by less than tol in sup-norm. Throws when the state space exceeds cap.
DpSolution value_iteration(const GoalConditionedMdp& mdp, GoalId g, double tol = 1e-10,
                           std::size_t cap = 1u << 20);

/// Text snapshot: header with dimensions and hyperparameters, then one
/// "s g a value" record per nonzero entry.
void save_qtable(const QTable& table, const std::string& path);
QTable load_qtable(const std::string& path);

}  // namespace prl
