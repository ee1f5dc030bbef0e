#include "prl/relabel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prl {

GoalPool::GoalPool(const GoalConditionedMdp& mdp, const DemoSet* demos,
                   const ReplayBuffer* buffer, PoolMode mode)
    : mdp_(&mdp), buffer_(buffer), mode_(mode) {
    if (mode_ == PoolMode::demo_union_task) {
        if (demos == nullptr || demos->empty()) {
            throw std::invalid_argument("GoalPool: demo_union_task requires demonstrations");
        }
        for (StateId s : demos->unique_states()) demo_goals_.push_back(mdp.goal_of(s));
        std::sort(demo_goals_.begin(), demo_goals_.end());
        demo_goals_.erase(std::unique(demo_goals_.begin(), demo_goals_.end()),
                          demo_goals_.end());
    } else if (buffer_ == nullptr) {
        throw std::invalid_argument("GoalPool: replay_union_task requires a buffer");
    }
}

GoalId GoalPool::sample(Rng& rng) const {
    // One extra slot holds a fresh draw from the task goal distribution,
    // mirroring "demo states plus a task-goal sample".
    if (mode_ == PoolMode::demo_union_task) {
        int u = uniform_int(rng, 0, static_cast<int>(demo_goals_.size()));
        if (u < static_cast<int>(demo_goals_.size())) return demo_goals_[u];
        return mdp_->sample_task_goal(rng);
    }
    if (buffer_->empty()) return mdp_->sample_task_goal(rng);
    int u = uniform_int(rng, 0, static_cast<int>(buffer_->size()));
    if (u < static_cast<int>(buffer_->size())) {
        return mdp_->goal_of(buffer_->transitions()[u].next_state);
    }
    return mdp_->sample_task_goal(rng);
}

std::vector<GoalId> GoalPool::support() const {
    std::vector<GoalId> out = demo_goals_;
    if (mode_ == PoolMode::replay_union_task) {
        for (const Transition& t : buffer_->transitions()) {
            out.push_back(mdp_->goal_of(t.next_state));
        }
    }
    for (GoalId g : mdp_->task_goals()) out.push_back(g);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Transition> relabel_online(const Transition& t, const GoalPool& pool, int n,
                                       const GoalConditionedMdp& mdp, Rng& rng) {
    if (n < 0) throw std::invalid_argument("relabel_online: n must be >= 0");
    std::vector<Transition> out;
    out.reserve(n + 1);
    out.push_back(t);
    for (int i = 0; i < n; ++i) {
        Transition copy = t;
        copy.goal = pool.sample(rng);
        copy.reward = mdp.reward(copy.next_state, copy.goal);
        copy.terminal = mdp.goal_reached(copy.next_state, copy.goal);
        out.push_back(copy);
    }
    return out;
}

std::vector<Trajectory> relabel_demos_dense(const Trajectory& traj,
                                            const GoalConditionedMdp& mdp,
                                            bool keep_after_success) {
    if (traj.actions.empty()) {
        throw std::invalid_argument("relabel_demos_dense: trajectory must have length >= 1");
    }
    const std::size_t transitions = traj.actions.size();
    std::vector<Trajectory> out;
    out.reserve(transitions);
    for (std::size_t k = 0; k < transitions; ++k) {
        Trajectory copy = traj;
        copy.goal = mdp.goal_of(traj.states[k]);
        if (!keep_after_success) {
            for (std::size_t i = 0; i < copy.actions.size(); ++i) {
                if (mdp.goal_reached(copy.states[i + 1], copy.goal)) {
                    copy.actions.resize(i + 1);
                    copy.states.resize(i + 2);
                    break;
                }
            }
        }
        out.push_back(std::move(copy));
    }
    return out;
}

std::size_t ingest_demos(ReplayBuffer& buffer, const DemoSet& demos,
                         const GoalConditionedMdp& mdp, IngestMode mode, int n,
                         const GoalPool& pool, Rng& rng, bool keep_after_success) {
    std::size_t inserted = 0;
    for (const Trajectory& traj : demos.trajectories) {
        for (const Transition& t : trajectory_transitions(traj, mdp)) {
            if (mode == IngestMode::dense) {
                buffer.push(t);
                ++inserted;
            } else {
                for (const Transition& r : relabel_online(t, pool, n, mdp, rng)) {
                    buffer.push(r);
                    ++inserted;
                }
            }
        }
        if (mode == IngestMode::dense) {
            for (const Trajectory& r : relabel_demos_dense(traj, mdp, keep_after_success)) {
                for (const Transition& t : trajectory_transitions(r, mdp)) {
                    buffer.push(t);
                    ++inserted;
                }
            }
        }
    }
    return inserted;
}

bool audit_rewards(const ReplayBuffer& buffer, const GoalConditionedMdp& mdp) {
    for (const Transition& t : buffer.transitions()) {
        if (t.goal < 0 || t.goal >= mdp.num_goals()) continue;  // intrinsic pseudo-goal
        if (t.reward != mdp.reward(t.next_state, t.goal)) return false;
        if (t.terminal != mdp.goal_reached(t.next_state, t.goal)) return false;
    }
    return true;
}

}  // namespace prl
