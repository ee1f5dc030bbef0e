#include "prl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace prl {

QTable::QTable(int states, int goals, int actions, double alpha, double gamma,
               double explore_eps)
    : num_states(states), num_goals(goals), num_actions(actions), alpha(alpha),
      gamma(gamma), explore_eps(explore_eps),
      q(static_cast<std::size_t>(states) * goals * actions, 0.0) {}

void q_update(QTable& table, const Transition& t) {
    double bootstrap = 0.0;
    if (!t.terminal) {
        double best = -std::numeric_limits<double>::infinity();
        for (ActionId a = 0; a < table.num_actions; ++a) {
            best = std::max(best, table.at(t.next_state, t.goal, a));
        }
        bootstrap = table.gamma * best;
    }
    double& entry = table.at(t.state, t.goal, t.action);
    entry += table.alpha * (t.reward + bootstrap - entry);
}

namespace {

// Argmax actions (exact ties) for one (s, g) row.
void argmax_set(const QTable& table, StateId s, GoalId g, std::vector<ActionId>& out) {
    out.clear();
    double best = -std::numeric_limits<double>::infinity();
    for (ActionId a = 0; a < table.num_actions; ++a) {
        double v = table.at(s, g, a);
        if (v > best) {
            best = v;
            out.clear();
            out.push_back(a);
        } else if (v == best) {
            out.push_back(a);
        }
    }
}

}  // namespace

ActionId policy_action(const QTable& table, StateId s, GoalId g, bool explore, Rng& rng) {
    if (explore && uniform01(rng) < table.explore_eps) {
        return uniform_int(rng, 0, table.num_actions - 1);
    }
    thread_local std::vector<ActionId> best;
    argmax_set(table, s, g, best);
    if (!explore) return best.front();  // lowest index
    return best[uniform_int(rng, 0, static_cast<int>(best.size()) - 1)];
}

double value(const QTable& table, StateId s, GoalId g) {
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (ActionId a = 0; a < table.num_actions; ++a) {
        double v = table.at(s, g, a);
        best = std::max(best, v);
        sum += v;
    }
    double mean = sum / table.num_actions;
    return (1.0 - table.explore_eps) * best + table.explore_eps * mean;
}

void ReplayBuffer::push(const Transition& t) {
    if (transitions_.size() >= max_size_) {
        throw std::runtime_error("ReplayBuffer: memory guard breached (" +
                                 std::to_string(max_size_) + " transitions)");
    }
    transitions_.push_back(t);
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    if (transitions_.empty()) throw std::runtime_error("ReplayBuffer: sample from empty buffer");
    return transitions_[uniform_int(rng, 0, static_cast<int>(transitions_.size()) - 1)];
}

ActionId DpSolution::greedy_action(StateId s) const {
    ActionId best = 0;
    double best_v = action_value(s, 0);
    for (ActionId a = 1; a < num_actions; ++a) {
        double v = action_value(s, a);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

DpSolution value_iteration(const GoalConditionedMdp& mdp, GoalId g, double tol,
                           std::size_t cap) {
    if (tol <= 0.0) throw std::invalid_argument("value_iteration: tol must be > 0");
    const int n = mdp.num_states();
    const int num_actions = mdp.num_actions();
    if (static_cast<std::size_t>(n) > cap) {
        throw std::runtime_error("value_iteration: state space exceeds enumeration cap");
    }

    std::vector<char> terminal(n, 0);
    for (StateId s = 0; s < n; ++s) terminal[s] = mdp.goal_reached(s, g) ? 1 : 0;

    // Cache the (small, deterministic-friendly) transition supports once.
    std::vector<std::vector<std::pair<StateId, double>>> support(
        static_cast<std::size_t>(n) * num_actions);
    for (StateId s = 0; s < n; ++s) {
        for (ActionId a = 0; a < num_actions; ++a) {
            support[static_cast<std::size_t>(s) * num_actions + a] = mdp.transition(s, a);
        }
    }

    const double gamma = mdp.discount();
    DpSolution sol;
    sol.num_actions = num_actions;
    sol.v.assign(n, 0.0);

    const long long max_sweeps = 1'000'000;
    for (long long sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (StateId s = 0; s < n; ++s) {
            if (terminal[s]) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < num_actions; ++a) {
                double q = 0.0;
                for (const auto& [next, p] :
                     support[static_cast<std::size_t>(s) * num_actions + a]) {
                    q += p * (mdp.reward(next, g) +
                              (terminal[next] ? 0.0 : gamma * sol.v[next]));
                }
                best = std::max(best, q);
            }
            delta = std::max(delta, std::abs(best - sol.v[s]));
            sol.v[s] = best;
        }
        if (delta < tol) break;
        if (sweep + 1 == max_sweeps) {
            throw std::runtime_error("value_iteration: failed to converge");
        }
    }

    sol.q.assign(static_cast<std::size_t>(n) * num_actions, 0.0);
    for (StateId s = 0; s < n; ++s) {
        if (terminal[s]) continue;
        for (ActionId a = 0; a < num_actions; ++a) {
            double q = 0.0;
            for (const auto& [next, p] : support[static_cast<std::size_t>(s) * num_actions + a]) {
                q += p * (mdp.reward(next, g) + (terminal[next] ? 0.0 : gamma * sol.v[next]));
            }
            sol.q[static_cast<std::size_t>(s) * num_actions + a] = q;
        }
    }
    return sol;
}

void save_qtable(const QTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_qtable: cannot open " + path);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", table.alpha, table.gamma,
                  table.explore_eps);
    out << "qtable v1 " << table.num_states << ' ' << table.num_goals << ' '
        << table.num_actions << ' ' << buf << '\n';
    for (StateId s = 0; s < table.num_states; ++s) {
        for (GoalId g = 0; g < table.num_goals; ++g) {
            for (ActionId a = 0; a < table.num_actions; ++a) {
                double v = table.at(s, g, a);
                if (v == 0.0) continue;
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << s << ' ' << g << ' ' << a << ' ' << buf << '\n';
            }
        }
    }
}

QTable load_qtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_qtable: cannot open " + path);
    std::string tag, version;
    int states, goals, actions;
    double alpha, gamma, eps;
    if (!(in >> tag >> version >> states >> goals >> actions >> alpha >> gamma >> eps) ||
        tag != "qtable" || version != "v1") {
        throw std::runtime_error("load_qtable: bad header in " + path);
    }
    QTable table(states, goals, actions, alpha, gamma, eps);
    StateId s;
    GoalId g;
    ActionId a;
    double v;
    while (in >> s >> g >> a >> v) {
        if (s < 0 || s >= states || g < 0 || g >= goals || a < 0 || a >= actions) {
            throw std::runtime_error("load_qtable: record out of range");
        }
        table.at(s, g, a) = v;
    }
    return table;
}

}  // namespace prl
