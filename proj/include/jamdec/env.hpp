#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "jamdec/errors.hpp"
#include "jamdec/rng.hpp"

namespace jamdec {

// Queue/energy/rate constants of the simulated transmitter. Defaults are the
// reference configuration used throughout the experiments.
struct EnvParams {
    int queue_capacity = 10;               // D, packets
    int energy_capacity = 10;              // E, energy units
    int arrival_batch = 3;                 // K, packets per arrival event
    double arrival_prob = 0.7;             // lambda
    int ambient_harvest = 1;               // e_v, units per ambient event
    double ambient_prob = 0.5;             // p_e
    int deception_cost = 1;                // e_f, units per deception
    int energy_per_packet = 1;             // e_r
    int max_active_packets = 4;            // cap on a full-slot transmission
    int max_post_deception_packets = 3;    // cap on a post-deception transmission
    double miss_detection_prob = 0.01;     // p_miss
    int backscatter_rate = 3;              // fixed backscatter send rate, packets

    // Indexed by jammer power level (index 0 = no attack).
    std::vector<int> harvest_per_level = {0, 2, 3, 4};
    std::vector<int> backscatter_per_level = {0, 1, 2, 3};
    // Indexed by rate choice m = 1..M; entry m-1 is the packet count for
    // rate-adapted transmission m. M equals the number of nonzero power levels.
    std::vector<int> rate_packets = {2, 1, 0};

    int num_rates() const { return static_cast<int>(rate_packets.size()); }
    int num_actions() const { return 5 + num_rates(); }

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Reactive jammer: power levels, attack strategy and power budget.
struct JammerConfig {
    std::vector<double> power_levels = {0.0, 4.0, 10.0, 15.0};  // watts, index 0 is 0 W
    std::vector<double> attack_probs;                           // x, sums to 1
    double avg_power_budget = 8.0;                              // time-average constraint, W
    double max_avg_power = 10.0;                                // hardware ceiling on the average, W
    double peak_power = 15.0;                                   // W
    double attenuation = 1.0;                                   // channel factor in [0,1]
    double noise_var = 1.0;                                     // AWGN variance

    JammerConfig();

    int num_levels() const { return static_cast<int>(power_levels.size()); }
    double attack_probability() const;  // P(level > 0)

    void validate() const;
};

// Probability vector {1 - r, 0.5 r, 0.3 r, 0.2 r} with r = avg_power / max_avg_power.
// Requires exactly four power levels.
std::vector<double> derive_attack_probs(double avg_power, double max_avg_power);

// MDP state. The pair (deception=0, jammed=1) is not part of the state space.
struct SystemState {
    int deception = 0;  // f
    int jammed = 0;     // j
    int queue = 0;      // d
    int energy = 0;     // e

    bool operator==(const SystemState&) const = default;
};

// Action encoding: 0 idle, 1 deceive, 2 transmit, 3 harvest, 4 backscatter,
// 4+m rate-adapted transmission m (m = 1..M).
struct Action {
    int code = 0;

    static constexpr int kIdle = 0;
    static constexpr int kDeceive = 1;
    static constexpr int kTransmit = 2;
    static constexpr int kHarvest = 3;
    static constexpr int kBackscatter = 4;

    static Action idle() { return {kIdle}; }
    static Action deceive() { return {kDeceive}; }
    static Action transmit() { return {kTransmit}; }
    static Action harvest() { return {kHarvest}; }
    static Action backscatter() { return {kBackscatter}; }
    static Action rate_adapt(int m) { return {kBackscatter + m}; }

    bool is_rate_adapt() const { return code > kBackscatter; }
    int rate_index() const { return code - kBackscatter; }  // m, 1-based

    bool operator==(const Action&) const = default;
};

// Flat index over the full (f, j, d, e) grid; the (0,1,.,.) rows stay unused.
inline int state_space_size(int queue_cap, int energy_cap) {
    return 4 * (queue_cap + 1) * (energy_cap + 1);
}
inline int state_index(const SystemState& s, int queue_cap, int energy_cap) {
    return ((s.deception * 2 + s.jammed) * (queue_cap + 1) + s.queue) * (energy_cap + 1) +
           s.energy;
}
inline SystemState state_at(int idx, int queue_cap, int energy_cap) {
    SystemState s;
    s.energy = idx % (energy_cap + 1);
    idx /= energy_cap + 1;
    s.queue = idx % (queue_cap + 1);
    idx /= queue_cap + 1;
    s.jammed = idx % 2;
    s.deception = idx / 2;
    return s;
}

// Feasible-action sets are small; one bit per action code.
using ActionMask = std::uint32_t;

inline ActionMask mask_of(Action a) { return ActionMask{1} << a.code; }
inline bool mask_has(ActionMask m, Action a) { return (m >> a.code) & 1u; }
inline int mask_count(ActionMask m) { return __builtin_popcount(m); }

// Feasibility rules per decision epoch. Idle is always feasible. Throws
// ContractViolation for an (epoch, state) combination that cannot occur.
ActionMask feasible_actions(const EnvParams& p, const SystemState& s, int epoch);

// Reactive jammer draw. Returns 0 when no transmitter activity is detected,
// otherwise a power level index sampled from the attack probabilities.
int sample_jammer(const JammerConfig& cfg, bool detected_activity, std::mt19937_64& rng);

// Received SINR under jamming power level n.
double sinr(double received_power, int level, const JammerConfig& cfg);

// Per-epoch bookkeeping; enough to audit packet and energy conservation.
struct StepDiagnostics {
    int jammer_level = -1;        // power index drawn this epoch, -1 if none
    int dropped_overflow = 0;     // arrivals beyond queue capacity
    int dropped_jamming = 0;      // transmitted packets destroyed by an attack
    int dropped_miss = 0;         // rate-adapted packets lost to miss detection
    int dropped_backscatter = 0;  // backscatter shortfall below the fixed rate
    int arrived = 0;              // packets arriving at slot end
    int harvested_jammer = 0;     // energy stored from the jamming signal
    int wasted_jammer = 0;        // jammer-harvest clamp loss
    int harvested_ambient = 0;    // energy stored from ambient RF
    int wasted_ambient = 0;       // ambient clamp loss
    int energy_spent = 0;

    int dropped_total() const {
        return dropped_overflow + dropped_jamming + dropped_miss + dropped_backscatter;
    }
};

struct StepOutcome {
    int reward = 0;  // packets delivered this epoch
    SystemState next_state;
    bool slot_complete = false;
    StepDiagnostics diag;
};

// One learning sample. next_feasible is the feasible mask at next_state
// (already intersected with any policy restriction).
struct Transition {
    SystemState state;
    Action action;
    int reward = 0;
    SystemState next_state;
    ActionMask next_feasible = 0;
};

// Discrete-time environment: one instance runs strictly sequentially; all
// randomness comes from the seeded generator injected at construction.
//
// Draw order within a step is fixed: jammer level, then miss detection,
// then arrival, then ambient harvest.
class Env {
public:
    Env(EnvParams params, JammerConfig jammer, std::uint64_t seed);

    const EnvParams& params() const { return params_; }
    const JammerConfig& jammer() const { return jammer_; }
    const SystemState& state() const { return state_; }
    int epoch() const { return epoch_; }
    int stored_level() const { return stored_level_; }

    ActionMask feasible() const { return feasible_actions(params_, state_, epoch_); }

    StepOutcome step(Action a);

    // Restart from a slot-start state.
    void reset(const SystemState& s = {});
    // Test/evaluation hook: force a mid-slot state. A jammed epoch-2 state
    // needs the power level drawn at deception time.
    void reset_to(const SystemState& s, int epoch, int stored_level = 0);

private:
    StepOutcome finish_slot(StepOutcome out);

    EnvParams params_;
    JammerConfig jammer_;
    SystemState state_;
    int epoch_ = 1;
    int stored_level_ = -1;
    std::mt19937_64 rng_;
};

}  // namespace jamdec
