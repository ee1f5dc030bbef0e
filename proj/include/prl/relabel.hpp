#pragma once

#include <vector>

#include "prl/envs.hpp"
#include "prl/learner.hpp"
#include "prl/mdp.hpp"

namespace prl {

enum class PoolMode { demo_union_task, replay_union_task };

/// The set of goals relabeling draws from: the goal-projections of the
/// demonstration states (or of states in the replay buffer when no demos
/// exist) together with a draw from the task goal distribution. Relabel
/// goals deliberately need not occur in the relabeled trajectory at all.
class GoalPool {
public:
    GoalPool(const GoalConditionedMdp& mdp, const DemoSet* demos, const ReplayBuffer* buffer,
             PoolMode mode);

    GoalId sample(Rng& rng) const;

    /// Every goal the pool can emit (demo projections plus task goals);
    /// unbounded replay pools enumerate the projections currently stored.
    std::vector<GoalId> support() const;

    PoolMode mode() const { return mode_; }

private:
    const GoalConditionedMdp* mdp_;
    const ReplayBuffer* buffer_;
    PoolMode mode_;
    std::vector<GoalId> demo_goals_;  // unique projections of demo states
};

/// The original transition plus n copies relabeled with pool goals (sampled
/// with replacement); rewards and terminals recomputed for the new goal.
std::vector<Transition> relabel_online(const Transition& t, const GoalPool& pool, int n,
                                       const GoalConditionedMdp& mdp, Rng& rng);

/// Dense demonstration relabeling: for a trajectory over states s_0..s_T,
/// one relabeled copy per k in 0..T-1 with goal_of(s_k) as the goal. By
/// default each copy is truncated at its first success for the relabeled
/// goal (termination-on-success); keep_after_success retains the tail with
/// recomputed (zero) rewards instead.
std::vector<Trajectory> relabel_demos_dense(const Trajectory& traj,
                                            const GoalConditionedMdp& mdp,
                                            bool keep_after_success = false);

enum class IngestMode { dense, sampled };

/// Store the demonstrations plus their relabels in the buffer. dense:
/// relabel_demos_dense per trajectory; sampled: relabel_online with n pool
/// draws per transition. Original (unrelabeled) demo transitions are stored
/// in both modes. Returns the number of transitions inserted.
std::size_t ingest_demos(ReplayBuffer& buffer, const DemoSet& demos,
                         const GoalConditionedMdp& mdp, IngestMode mode, int n,
                         const GoalPool& pool, Rng& rng, bool keep_after_success = false);

/// Recomputable audit: every stored reward/terminal equals the environment's
/// reward/reached-predicate at (next_state, goal). Transitions labeled with
/// out-of-range pseudo-goals (intrinsic-reward phases) are skipped.
bool audit_rewards(const ReplayBuffer& buffer, const GoalConditionedMdp& mdp);

}  // namespace prl
