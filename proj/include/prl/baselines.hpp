#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prl/curriculum.hpp"
#include "prl/envs.hpp"
#include "prl/learner.hpp"
#include "prl/mdp.hpp"

namespace prl {

/// A goal/reward scheduling strategy over the shared learner, buffer,
/// relabeler and persistent environment. next_goal() must be called exactly
/// once per environment step, before acting; label() turns the raw
/// (s, a, s') into the stored transition for the goal (or intrinsic reward)
/// active this step.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual GoalId next_goal(StateId s, Rng& rng) = 0;
    virtual Transition label(StateId s, ActionId a, StateId next) const;
    virtual void observe(const Transition&) {}
    virtual void on_env_reset(StateId) {}
    virtual std::string name() const = 0;

    GoalId current_goal() const { return current_; }

protected:
    explicit Strategy(const GoalConditionedMdp& mdp) : mdp_(&mdp) {}
    const GoalConditionedMdp* mdp_;
    GoalId current_ = -1;
};

/// Computes the curriculum subgoal state for a task goal and records the
/// selection (with its normalization anchors) for the curriculum trace.
/// Shared between the VaPRL strategy and the teleport-reset ablation.
class CurriculumSelector {
public:
    CurriculumSelector(const GoalConditionedMdp& mdp, const QTable& table,
                       const DemoSet* demos, const ReplayBuffer* buffer,
                       CurriculumConfig cfg);

    StateId choose_state(GoalId task_goal, Rng& rng);

    void set_step(long long step) { step_ = step; }
    const std::vector<SubgoalEvent>& events() const { return events_; }
    double last_normalized_distance() const;

private:
    std::vector<StateId> gather_candidates(Rng& rng) const;
    std::optional<double> distance(StateId s) const;

    const GoalConditionedMdp* mdp_;
    const QTable* table_;
    const ReplayBuffer* buffer_;
    CurriculumConfig cfg_;
    DemoSet curriculum_demos_;  // reverse demos dropped when configured
    std::vector<StateId> demo_candidates_;
    std::vector<StateId> rho_samples_;
    long long step_ = 0;
    std::vector<SubgoalEvent> events_;
};

/// Value-thresholded curriculum of starting states: each cycle first pursues
/// the curriculum subgoal for the sampled task goal, then the task goal.
class VaprlStrategy final : public Strategy {
public:
    VaprlStrategy(const GoalConditionedMdp& mdp, const QTable& table, const DemoSet* demos,
                  const ReplayBuffer* buffer, CurriculumConfig cfg);

    GoalId next_goal(StateId s, Rng& rng) override;
    void on_env_reset(StateId) override { started_ = false; }
    std::string name() const override { return "vaprl"; }

    const std::vector<SubgoalEvent>& events() const { return selector_.events(); }
    double last_normalized_distance() const { return selector_.last_normalized_distance(); }
    const GoalPhase& phase() const { return phase_; }

private:
    CurriculumSelector selector_;
    GoalPhase phase_;
    SubgoalPicker picker_;
    long long step_ = 0;
    bool started_ = false;
};

/// Forward-backward controller: alternates task-goal phases with phases
/// targeting the projection of a fresh initial-state sample.
class FbrlStrategy final : public Strategy {
public:
    FbrlStrategy(const GoalConditionedMdp& mdp, bool early_switch = true);

    GoalId next_goal(StateId s, Rng& rng) override;
    void on_env_reset(StateId) override { started_ = false; }
    std::string name() const override { return "fbrl"; }

    bool task_phase_active() const { return phase_index_ % 2 == 0; }

private:
    bool early_switch_;
    long long phase_index_ = 0;
    int steps_in_phase_ = 0;
    bool started_ = false;
};

/// A fresh task goal every eval_horizon steps; never targets the initial
/// distribution.
class NaiveStrategy final : public Strategy {
public:
    NaiveStrategy(const GoalConditionedMdp& mdp, bool early_switch = true,
                  std::string label = "naive");

    GoalId next_goal(StateId s, Rng& rng) override;
    void on_env_reset(StateId) override { started_ = false; }
    std::string name() const override { return label_; }

private:
    bool early_switch_;
    std::string label_;
    int steps_in_phase_ = 0;
    bool started_ = false;
};

/// Perturbation controller: task phases alternate with phases trained on a
/// count-based novelty reward under a reserved pseudo-goal index, spreading
/// state visitation instead of recovering the initial distribution. The
/// pseudo-goal row is seeded optimistically at the intrinsic return bound
/// 1/(1-gamma); zero initialization would make the positive novelty rewards
/// anti-optimistic and the controller would camp on its own beaten path.
class R3lStrategy final : public Strategy {
public:
    R3lStrategy(const GoalConditionedMdp& mdp, QTable& table, bool early_switch = true);

    GoalId next_goal(StateId s, Rng& rng) override;
    Transition label(StateId s, ActionId a, StateId next) const override;
    void observe(const Transition& t) override;
    void on_env_reset(StateId) override { started_ = false; }
    std::string name() const override { return "r3l"; }

    GoalId novelty_goal() const { return mdp_->num_goals(); }
    double novelty_reward(StateId s) const;
    const std::vector<long long>& visit_counts() const { return visits_; }
    bool perturbation_phase_active() const { return phase_index_ % 2 == 1; }

private:
    bool early_switch_;
    long long phase_index_ = 0;
    int steps_in_phase_ = 0;
    bool started_ = false;
    std::vector<long long> visits_;
};

/// Episodic reference: the naive schedule run against a training horizon
/// equal to the evaluation horizon, so the environment resets each episode.
std::unique_ptr<Strategy> make_oracle_strategy(const GoalConditionedMdp& mdp,
                                               bool early_switch = true);

}  // namespace prl
