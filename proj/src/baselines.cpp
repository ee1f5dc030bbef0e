#include "prl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prl {

Transition Strategy::label(StateId s, ActionId a, StateId next) const {
    if (current_ < 0) throw std::logic_error("Strategy: label() before next_goal()");
    return {s, a, next, current_, mdp_->reward(next, current_),
            mdp_->goal_reached(next, current_)};
}

// ── CurriculumSelector ──────────────────────────────────────────────────────

CurriculumSelector::CurriculumSelector(const GoalConditionedMdp& mdp, const QTable& table,
                                       const DemoSet* demos, const ReplayBuffer* buffer,
                                       CurriculumConfig cfg)
    : mdp_(&mdp), table_(&table), buffer_(buffer), cfg_(cfg),
      rho_samples_(mdp.initial_support()) {
    if (cfg_.candidate_source == CandidateSource::demo_states) {
        if (demos == nullptr || demos->empty()) {
            throw std::invalid_argument(
                "CurriculumSelector: demo_states candidate source requires demonstrations");
        }
    }
    if (demos != nullptr && !demos->empty()) {
        curriculum_demos_ = cfg_.include_reverse_demos ? *demos : demos->forward_only();
        demo_candidates_ = curriculum_demos_.unique_states();
    }
    if (cfg_.distance_mode == DistanceMode::step_index && curriculum_demos_.empty()) {
        throw std::invalid_argument(
            "CurriculumSelector: step_index distance requires demonstrations");
    }
    if (cfg_.candidate_source == CandidateSource::replay_sample) {
        if (buffer_ == nullptr) {
            throw std::invalid_argument(
                "CurriculumSelector: replay_sample candidate source requires a buffer");
        }
        if (cfg_.candidate_sample_size < 1) {
            throw std::invalid_argument(
                "CurriculumSelector: candidate_sample_size must be >= 1");
        }
    }
}

std::optional<double> CurriculumSelector::distance(StateId s) const {
    if (cfg_.distance_mode == DistanceMode::step_index) {
        auto idx = curriculum_demos_.step_index(s);
        if (!idx) return std::nullopt;
        return static_cast<double>(*idx);
    }
    return distance_value(s, *table_, rho_samples_, *mdp_);
}

std::vector<StateId> CurriculumSelector::gather_candidates(Rng& rng) const {
    if (cfg_.candidate_source == CandidateSource::demo_states) return demo_candidates_;
    std::vector<StateId> out;
    if (buffer_->empty()) return demo_candidates_;
    out.reserve(cfg_.candidate_sample_size);
    for (int i = 0; i < cfg_.candidate_sample_size; ++i) {
        out.push_back(buffer_->sample(rng).next_state);
    }
    return out;
}

StateId CurriculumSelector::choose_state(GoalId task_goal, Rng& rng) {
    std::vector<StateId> candidates = gather_candidates(rng);
    DistanceFn dist = [this](StateId s) { return distance(s); };
    StateId chosen = curriculum_goal(task_goal, candidates, *table_, cfg_.epsilon, dist, rng);

    SubgoalEvent event;
    event.step = step_;
    event.task_goal = task_goal;
    event.chosen_state = chosen;
    event.raw_distance = distance(chosen).value_or(0.0);
    double d_min = std::numeric_limits<double>::infinity();
    double d_goal = -std::numeric_limits<double>::infinity();
    double d_max = -std::numeric_limits<double>::infinity();
    for (StateId s : candidates) {
        auto d = distance(s);
        if (!d) continue;
        d_min = std::min(d_min, *d);
        d_max = std::max(d_max, *d);
        if (mdp_->goal_reached(s, task_goal)) d_goal = std::max(d_goal, *d);
    }
    event.d_init = std::isfinite(d_min) ? d_min : 0.0;
    // No candidate satisfies the task goal outright: fall back to the
    // farthest candidate as the unit anchor.
    event.d_goal = std::isfinite(d_goal) ? d_goal : (std::isfinite(d_max) ? d_max : 0.0);
    events_.push_back(event);
    return chosen;
}

double CurriculumSelector::last_normalized_distance() const {
    if (events_.empty()) return std::numeric_limits<double>::quiet_NaN();
    return normalized_distance(events_.back());
}

// ── VaPRL ───────────────────────────────────────────────────────────────────

VaprlStrategy::VaprlStrategy(const GoalConditionedMdp& mdp, const QTable& table,
                             const DemoSet* demos, const ReplayBuffer* buffer,
                             CurriculumConfig cfg)
    : Strategy(mdp), selector_(mdp, table, demos, buffer, cfg) {
    picker_ = [this](GoalId task_goal, Rng& rng) {
        return mdp_->goal_of(selector_.choose_state(task_goal, rng));
    };
}

GoalId VaprlStrategy::next_goal(StateId s, Rng& rng) {
    selector_.set_step(step_);
    if (!started_) {
        phase_ = start_goal_phase(*mdp_, picker_, rng);
        started_ = true;
    }
    current_ = goal_generator(s, phase_, *mdp_, mdp_->eval_horizon(), picker_, rng);
    ++step_;
    return current_;
}

// ── FBRL ────────────────────────────────────────────────────────────────────

FbrlStrategy::FbrlStrategy(const GoalConditionedMdp& mdp, bool early_switch)
    : Strategy(mdp), early_switch_(early_switch) {}

GoalId FbrlStrategy::next_goal(StateId s, Rng& rng) {
    bool boundary = !started_ || steps_in_phase_ >= mdp_->eval_horizon() ||
                    (early_switch_ && mdp_->goal_reached(s, current_));
    if (boundary) {
        phase_index_ = started_ ? phase_index_ + 1 : 0;
        started_ = true;
        steps_in_phase_ = 0;
        if (task_phase_active()) {
            current_ = mdp_->sample_task_goal(rng);
        } else {
            current_ = mdp_->goal_of(mdp_->sample_initial(rng));
        }
    }
    ++steps_in_phase_;
    return current_;
}

// ── Naive ───────────────────────────────────────────────────────────────────

NaiveStrategy::NaiveStrategy(const GoalConditionedMdp& mdp, bool early_switch,
                             std::string label)
    : Strategy(mdp), early_switch_(early_switch), label_(std::move(label)) {}

GoalId NaiveStrategy::next_goal(StateId s, Rng& rng) {
    bool boundary = !started_ || steps_in_phase_ >= mdp_->eval_horizon() ||
                    (early_switch_ && mdp_->goal_reached(s, current_));
    if (boundary) {
        started_ = true;
        steps_in_phase_ = 0;
        current_ = mdp_->sample_task_goal(rng);
    }
    ++steps_in_phase_;
    return current_;
}

// ── R3L surrogate ───────────────────────────────────────────────────────────

R3lStrategy::R3lStrategy(const GoalConditionedMdp& mdp, QTable& table, bool early_switch)
    : Strategy(mdp), early_switch_(early_switch), visits_(mdp.num_states(), 0) {
    if (table.num_goals != mdp.num_goals() + 1) {
        throw std::invalid_argument(
            "R3lStrategy: the table must reserve one pseudo-goal row beyond the goal space");
    }
    double bound = 1.0 / (1.0 - table.gamma);
    for (StateId s = 0; s < table.num_states; ++s) {
        for (ActionId a = 0; a < table.num_actions; ++a) {
            table.at(s, novelty_goal(), a) = bound;
        }
    }
}

double R3lStrategy::novelty_reward(StateId s) const {
    return 1.0 / std::sqrt(1.0 + static_cast<double>(visits_[s]));
}

GoalId R3lStrategy::next_goal(StateId s, Rng& rng) {
    bool reached = started_ && !perturbation_phase_active() &&
                   mdp_->goal_reached(s, current_);
    bool boundary = !started_ || steps_in_phase_ >= mdp_->eval_horizon() ||
                    (early_switch_ && reached);
    if (boundary) {
        phase_index_ = started_ ? phase_index_ + 1 : 0;
        started_ = true;
        steps_in_phase_ = 0;
        current_ = perturbation_phase_active() ? novelty_goal() : mdp_->sample_task_goal(rng);
    }
    ++steps_in_phase_;
    return current_;
}

Transition R3lStrategy::label(StateId s, ActionId a, StateId next) const {
    if (current_ == novelty_goal()) {
        return {s, a, next, current_, novelty_reward(next), false};
    }
    return Strategy::label(s, a, next);
}

void R3lStrategy::observe(const Transition& t) { ++visits_[t.next_state]; }

std::unique_ptr<Strategy> make_oracle_strategy(const GoalConditionedMdp& mdp,
                                               bool early_switch) {
    return std::make_unique<NaiveStrategy>(mdp, early_switch, "oracle");
}

}  // namespace prl
