#include "jamdec/tabular.hpp"

#include <algorithm>
#include <cmath>

namespace jamdec {

double LearningSchedule::tau(std::int64_t t) const {
    return tau0 * std::pow(static_cast<double>(t), -omega);
}

double LearningSchedule::epsilon(std::int64_t t) const {
    if (epsilon_decay_steps <= 0 || t >= epsilon_decay_steps) return epsilon_end;
    double frac = static_cast<double>(t) / static_cast<double>(epsilon_decay_steps);
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void LearningSchedule::validate() const {
    if (!(tau0 >= 0.0 && tau0 < 1.0)) throw ConfigError("schedule.tau0 must be in [0,1)");
    if (!(omega > 0.5 && omega <= 1.0)) throw ConfigError("schedule.omega must be in (0.5,1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("schedule.gamma must be in [0,1)");
    for (double e : {epsilon_start, epsilon_end})
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("schedule.epsilon must be in [0,1]");
}

double max_masked(std::span<const double> values, ActionMask feasible) {
    double best = 0.0;
    bool any = false;
    for (std::size_t code = 0; code < values.size(); ++code) {
        if (!(feasible >> code & 1u)) continue;
        if (!any || values[code] > best) best = values[code];
        any = true;
    }
    return best;
}

void q_update(QTable& table, const Transition& tr, double tau, double gamma) {
    int s = table.index_of(tr.state);
    int s2 = table.index_of(tr.next_state);
    double target = tr.reward + gamma * max_masked(table.row(s2), tr.next_feasible);
    double& cell = table.at(s, tr.action.code);
    cell += tau * (target - cell);
}

Action epsilon_greedy(std::span<const double> values, ActionMask feasible, double epsilon,
                      std::mt19937_64& rng) {
    int count = mask_count(feasible);
    if (count == 0) throw ContractViolation("epsilon_greedy: empty feasible set");
    if (uniform01(rng) < epsilon) {
        int pick = uniform_below(rng, count);
        for (std::size_t code = 0; code < values.size(); ++code) {
            if (!(feasible >> code & 1u)) continue;
            if (pick-- == 0) return Action{static_cast<int>(code)};
        }
    }
    int best = -1;
    for (std::size_t code = 0; code < values.size(); ++code) {
        if (!(feasible >> code & 1u)) continue;
        if (best < 0 || values[code] > values[best]) best = static_cast<int>(code);
    }
    return Action{best};
}

ValueIterationResult value_iteration(const MdpModel& model, double gamma, double tol,
                                     int max_sweeps) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ContractViolation("value_iteration: gamma must be in [0,1)");
    if (!(tol > 0.0)) throw ContractViolation("value_iteration: tol must be > 0");

    ValueIterationResult res;
    res.values.assign(model.n_states, 0.0);
    res.q.assign(static_cast<std::size_t>(model.n_states) * model.n_actions, 0.0);
    res.greedy.assign(model.n_states, -1);

    for (res.sweeps = 1; res.sweeps <= max_sweeps; ++res.sweeps) {
        double delta = 0.0;
        for (int s = 0; s < model.n_states; ++s) {
            if (model.feasible[s] == 0) continue;
            double best = 0.0;
            bool any = false;
            for (int code = 0; code < model.n_actions; ++code) {
                const ModelRow* row = model.row(s, Action{code});
                if (!row) continue;
                double q = row->expected_reward;
                for (const TransitionEntry& t : row->transitions)
                    q += gamma * t.prob * res.values[t.next_state];
                if (!any || q > best) best = q;
                any = true;
            }
            delta = std::max(delta, std::abs(best - res.values[s]));
            res.values[s] = best;
        }
        if (delta < tol) {
            // Final Q and greedy extraction from the converged values.
            for (int s = 0; s < model.n_states; ++s) {
                if (model.feasible[s] == 0) continue;
                int best_code = -1;
                for (int code = 0; code < model.n_actions; ++code) {
                    const ModelRow* row = model.row(s, Action{code});
                    if (!row) continue;
                    double q = row->expected_reward;
                    for (const TransitionEntry& t : row->transitions)
                        q += gamma * t.prob * res.values[t.next_state];
                    res.q[static_cast<std::size_t>(s) * model.n_actions + code] = q;
                    if (best_code < 0 ||
                        q > res.q[static_cast<std::size_t>(s) * model.n_actions + best_code])
                        best_code = code;
                }
                res.greedy[s] = best_code;
            }
            return res;
        }
    }
    throw ConvergenceError("value_iteration: no convergence within " +
                           std::to_string(max_sweeps) + " sweeps");
}

QTrainResult train_q(Env& env, const LearningSchedule& schedule, std::int64_t iterations,
                     std::uint64_t seed, ActionMask allowed, std::int64_t sample_every,
                     const QSampleHook& hook) {
    schedule.validate();
    QTrainResult res;
    res.table = QTable(env.params());
    if (iterations <= 0) return res;
    if (sample_every <= 0) sample_every = iterations;

    std::mt19937_64 explore(seed);
    std::int64_t window_slots = 0;
    std::int64_t window_updates = 0;
    double window_delivered = 0.0;
    double window_abs_td = 0.0;

    for (std::int64_t t = 1; t <= iterations; ++t) {
        SystemState s = env.state();
        int si = res.table.index_of(s);
        ActionMask feas = env.feasible() & allowed;
        double eps = schedule.epsilon(t);
        Action a = epsilon_greedy(res.table.row(si), feas, eps, explore);

        StepOutcome out = env.step(a);
        ActionMask next_feas = env.feasible() & allowed;
        Transition tr{s, a, out.reward, out.next_state, next_feas};

        int s2 = res.table.index_of(out.next_state);
        double target =
            tr.reward + schedule.gamma * max_masked(res.table.row(s2), next_feas);
        double tau = schedule.tau(t);
        double& cell = res.table.at(si, a.code);
        window_abs_td += std::abs(target - cell);
        cell += tau * (target - cell);
        ++window_updates;

        window_delivered += out.reward;
        if (out.slot_complete) ++window_slots;

        if (t % sample_every == 0 || t == iterations) {
            TrainSample sample;
            sample.iteration = t;
            sample.window_throughput =
                window_slots > 0 ? window_delivered / window_slots : 0.0;
            sample.window_loss = window_updates > 0 ? window_abs_td / window_updates : 0.0;
            sample.epsilon = eps;
            res.series.push_back(sample);
            if (hook) hook(sample, res.table);
            window_slots = window_updates = 0;
            window_delivered = window_abs_td = 0.0;
        }
    }
    return res;
}

}  // namespace jamdec
