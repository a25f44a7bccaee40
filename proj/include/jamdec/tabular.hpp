#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jamdec/env.hpp"
#include "jamdec/model.hpp"

namespace jamdec {

// Flat action-value table over the (f, j, d, e) grid, all zeros initially.
struct QTable {
    int queue_cap = 0;
    int energy_cap = 0;
    int n_actions = 0;
    std::vector<double> values;

    QTable() = default;
    explicit QTable(const EnvParams& p)
        : queue_cap(p.queue_capacity),
          energy_cap(p.energy_capacity),
          n_actions(p.num_actions()),
          values(static_cast<std::size_t>(state_space_size(queue_cap, energy_cap)) * n_actions,
                 0.0) {}

    int n_states() const { return state_space_size(queue_cap, energy_cap); }
    double& at(int state, int action) {
        return values[static_cast<std::size_t>(state) * n_actions + action];
    }
    double at(int state, int action) const {
        return values[static_cast<std::size_t>(state) * n_actions + action];
    }
    std::span<const double> row(int state) const {
        return {values.data() + static_cast<std::size_t>(state) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }
    int index_of(const SystemState& s) const { return state_index(s, queue_cap, energy_cap); }
};

// Decaying learning rate tau(t) = tau0 * t^-omega plus a linear exploration
// schedule. omega in (0.5, 1] keeps the usual stochastic-approximation sums
// divergent/summable as required for convergence.
struct LearningSchedule {
    double tau0 = 0.9;
    double omega = 0.65;
    double epsilon_start = 1.0;
    double epsilon_end = 0.1;
    std::int64_t epsilon_decay_steps = 1;
    double gamma = 0.95;

    double tau(std::int64_t t) const;      // t >= 1
    double epsilon(std::int64_t t) const;  // linear from start to end
    void validate() const;
};

// Masked maximum of a value row; 0 over an empty mask.
double max_masked(std::span<const double> values, ActionMask feasible);

// One temporal-difference update; the bootstrap max ranges over
// tr.next_feasible only.
void q_update(QTable& table, const Transition& tr, double tau, double gamma);

// Uniform over the feasible set with probability epsilon, otherwise the
// masked argmax with ties broken toward the lowest action code. Consumes
// exactly one draw in the greedy branch so trajectories stay reproducible.
Action epsilon_greedy(std::span<const double> values, ActionMask feasible, double epsilon,
                      std::mt19937_64& rng);

struct ValueIterationResult {
    std::vector<double> values;   // V* per state
    std::vector<double> q;        // Q* flattened [state][action]
    std::vector<int> greedy;      // action code per state, -1 where none feasible
    int sweeps = 0;

    double q_at(const MdpModel& m, int state, Action a) const {
        return q[static_cast<std::size_t>(state) * m.n_actions + a.code];
    }
};

// Exact Bellman-optimality iteration on an enumerated model. Throws
// ConvergenceError when the sup-norm change fails to drop below tol within
// max_sweeps.
ValueIterationResult value_iteration(const MdpModel& model, double gamma, double tol,
                                     int max_sweeps = 100000);

// Periodic snapshot of training progress.
struct TrainSample {
    std::int64_t iteration = 0;
    double window_throughput = 0.0;  // packets per completed slot since last sample
    double window_loss = 0.0;        // mean |TD error| (deep: mean minibatch loss)
    double epsilon = 0.0;
};

using QSampleHook = std::function<void(const TrainSample&, const QTable&)>;

struct QTrainResult {
    QTable table;
    std::vector<TrainSample> series;
};

// Epsilon-greedy Q-learning over per-epoch transitions (deception slots
// contribute two updates). `allowed` restricts the action set for both
// selection and bootstrap; `seed` drives exploration, independent of the
// environment's generator.
QTrainResult train_q(Env& env, const LearningSchedule& schedule, std::int64_t iterations,
                     std::uint64_t seed, ActionMask allowed = ~ActionMask{0},
                     std::int64_t sample_every = 0, const QSampleHook& hook = {});

}  // namespace jamdec
