#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prl/rng.hpp"

namespace prl {

using StateId = int;
using ActionId = int;
using GoalId = int;

/// One stored experience tuple. `goal` is whatever goal the tuple is labeled
/// with (relabeling rewrites it); `reward` and `terminal` must always equal
/// the environment's reward / reached-predicate at (next_state, goal).
struct Transition {
    StateId state;
    ActionId action;
    StateId next_state;
    GoalId goal;
    double reward;
    bool terminal;
};

/// Finite goal-conditioned MDP with canonical integer encodings for states,
/// actions and goals. Goals are projections of states (`goal_of`); the
/// reward is a pure function of (state, goal). Stochastic transitions are
/// supported through `transition()`, but deterministic environments should
/// override `step()` with a direct computation.
class GoalConditionedMdp {
public:
    virtual ~GoalConditionedMdp() = default;

    virtual int num_states() const = 0;
    virtual int num_actions() const = 0;
    virtual int num_goals() const = 0;

    /// Canonical projection S -> G.
    virtual GoalId goal_of(StateId s) const = 0;

    /// Support of p(.|s,a) with probabilities (sums to 1).
    virtual std::vector<std::pair<StateId, double>> transition(StateId s, ActionId a) const = 0;

    /// Sample s' ~ p(.|s,a).
    virtual StateId step(StateId s, ActionId a, Rng& rng) const;

    virtual double reward(StateId s, GoalId g) const = 0;

    /// Success predicate. Sparse environments: the reward is the indicator.
    /// Dense-reward environments override this.
    virtual bool goal_reached(StateId s, GoalId g) const {
        return reward(s, g) >= 1.0 - 1e-9;
    }

    /// Support of the initial state distribution rho.
    virtual std::vector<StateId> initial_support() const = 0;
    virtual StateId sample_initial(Rng& rng) const;

    /// Task goal distribution p_g (uniform over task_goals by default).
    virtual std::vector<GoalId> task_goals() const = 0;
    virtual GoalId sample_task_goal(Rng& rng) const;

    virtual double discount() const = 0;
    virtual int eval_horizon() const = 0;
    virtual std::string name() const = 0;
};

/// Training wrapper that rations reset interventions: the state persists for
/// `train_horizon` steps between extrinsic resets to the initial
/// distribution. After any n calls to step(), intervention_count() equals
/// ceil(n / train_horizon): the sample that begins a block is charged on the
/// block's first step. set_state() (ablation-only teleport) breaks that
/// identity and charges immediately.
class PersistentEnv {
public:
    PersistentEnv(const GoalConditionedMdp& mdp, long long train_horizon, Rng rng);

    StateId state() const { return state_; }
    StateId step(ActionId a);

    /// True iff the previous step() ended with an extrinsic reset.
    bool just_reset() const { return just_reset_; }

    /// Simulation-only teleport used by the reset ablations. Counts as an
    /// intervention.
    void set_state(StateId s);

    long long total_steps() const { return total_steps_; }
    long long intervention_count() const { return interventions_; }
    long long steps_since_reset() const { return steps_since_reset_; }
    long long train_horizon() const { return train_horizon_; }

private:
    const GoalConditionedMdp* mdp_;
    long long train_horizon_;
    Rng rng_;
    StateId state_ = 0;
    long long total_steps_ = 0;
    long long steps_since_reset_ = 0;
    long long interventions_ = 0;
    bool pending_charge_ = true;
    bool just_reset_ = false;
};

/// Episodic evaluation: `trials` rollouts of at most eval_horizon greedy
/// steps each from s ~ rho, g ~ p_g. Returns the number of rollouts that
/// reach the goal. Touches nothing but the supplied rng.
int run_evaluation(const std::function<ActionId(StateId, GoalId)>& policy,
                   const GoalConditionedMdp& mdp, int trials, Rng& rng);

/// All states reachable from the initial support, in ascending encoding
/// order. Throws when the reachable set exceeds `cap`.
std::vector<StateId> reachable_states(const GoalConditionedMdp& mdp, std::size_t cap = 1u << 20);

/// True iff the transition graph restricted to states reachable from the
/// initial support is strongly connected (every state can be revisited from
/// every other under some policy).
bool check_ergodic(const GoalConditionedMdp& mdp, std::size_t cap = 1u << 20);

/// Length of the shortest action path from each state to the target set
/// (mask over the full encoding space); -1 where no path exists.
std::vector<int> bfs_distances_to(const GoalConditionedMdp& mdp, const std::vector<char>& target);

}  // namespace prl
