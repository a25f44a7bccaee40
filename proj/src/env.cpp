#include "jamdec/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jamdec {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(std::string(field) + " " + what);
}

}  // namespace

void EnvParams::validate() const {
    require(queue_capacity >= 1, "env.D", "must be >= 1");
    require(energy_capacity >= 1, "env.E", "must be >= 1");
    require(arrival_batch >= 0, "env.K", "must be >= 0");
    require(arrival_prob >= 0.0 && arrival_prob <= 1.0, "env.lambda", "must be in [0,1]");
    require(ambient_harvest >= 0, "env.e_v", "must be >= 0");
    require(ambient_prob >= 0.0 && ambient_prob <= 1.0, "env.p_e", "must be in [0,1]");
    require(deception_cost > 0 && deception_cost <= energy_capacity, "env.e_f",
            "must satisfy 0 < e_f <= E");
    require(energy_per_packet > 0 && energy_per_packet <= energy_capacity, "env.e_r",
            "must satisfy 0 < e_r <= E");
    require(max_active_packets >= 1, "env.d_hat_a", "must be >= 1");
    require(max_post_deception_packets >= 0, "env.d_hat_de", "must be >= 0");
    require(max_post_deception_packets < max_active_packets, "env.d_hat_de",
            "must be < d_hat_a");
    require(miss_detection_prob >= 0.0 && miss_detection_prob <= 1.0, "env.p_miss",
            "must be in [0,1]");
    require(backscatter_rate >= 0, "env.d_max", "must be >= 0");
    require(!harvest_per_level.empty(), "env.e_harvest", "must be non-empty");
    require(harvest_per_level.size() == backscatter_per_level.size(), "env.d_backscatter",
            "must have one entry per jammer power level");
    require(harvest_per_level[0] == 0, "env.e_harvest", "entry for level 0 must be 0");
    require(backscatter_per_level[0] == 0, "env.d_backscatter", "entry for level 0 must be 0");
    for (int v : harvest_per_level)
        require(v >= 0, "env.e_harvest", "entries must be >= 0");
    for (int v : backscatter_per_level)
        require(v >= 0 && v <= backscatter_rate, "env.d_backscatter",
                "entries must be in [0, d_max]");
    require(rate_packets.size() + 1 == harvest_per_level.size(), "env.d_rate",
            "must have one entry per nonzero jammer power level");
    for (int v : rate_packets)
        require(v >= 0, "env.d_rate", "entries must be >= 0");
}

JammerConfig::JammerConfig() {
    attack_probs = derive_attack_probs(avg_power_budget, max_avg_power);
}

double JammerConfig::attack_probability() const {
    double p = 0.0;
    for (std::size_t n = 1; n < attack_probs.size(); ++n) p += attack_probs[n];
    return p;
}

std::vector<double> derive_attack_probs(double avg_power, double max_avg_power) {
    if (max_avg_power <= 0.0)
        throw ConfigError("jammer.P_dagger must be > 0");
    double r = avg_power / max_avg_power;
    if (r < 0.0 || r > 1.0)
        throw ConfigError("jammer.P_avg must be in [0, P_dagger]");
    return {1.0 - r, 0.5 * r, 0.3 * r, 0.2 * r};
}

void JammerConfig::validate() const {
    require(!power_levels.empty(), "jammer.P_J", "must be non-empty");
    require(power_levels[0] == 0.0, "jammer.P_J", "level 0 must be 0 W");
    require(attack_probs.size() == power_levels.size(), "jammer.x",
            "must have one entry per power level");
    double sum = 0.0, avg = 0.0;
    for (std::size_t n = 0; n < attack_probs.size(); ++n) {
        require(attack_probs[n] >= 0.0 && attack_probs[n] <= 1.0, "jammer.x",
                "entries must be in [0,1]");
        sum += attack_probs[n];
        avg += attack_probs[n] * power_levels[n];
    }
    require(std::abs(sum - 1.0) <= 1e-9, "jammer.x", "must sum to 1");
    require(avg <= avg_power_budget + 1e-9, "jammer.x",
            "expected attack power must not exceed P_avg");
    require(avg_power_budget <= peak_power + 1e-9, "jammer.P_avg", "must be <= P_max");
    for (double p : power_levels)
        require(p >= 0.0 && p <= peak_power + 1e-9, "jammer.P_J", "levels must be in [0, P_max]");
    require(attenuation >= 0.0 && attenuation <= 1.0, "jammer.phi", "must be in [0,1]");
    require(noise_var >= 0.0, "jammer.rho_sq", "must be >= 0");
}

ActionMask feasible_actions(const EnvParams& p, const SystemState& s, int epoch) {
    if (epoch != 1 && epoch != 2)
        throw ContractViolation("feasible_actions: epoch must be 1 or 2");
    if (s.deception == 0 && s.jammed == 1)
        throw ContractViolation("feasible_actions: state (f=0, j=1) is not in the state space");
    if (s.queue < 0 || s.queue > p.queue_capacity || s.energy < 0 || s.energy > p.energy_capacity)
        throw ContractViolation("feasible_actions: queue/energy out of range");

    ActionMask m = mask_of(Action::idle());
    if (epoch == 1) {
        if (s.deception != 0)
            throw ContractViolation("feasible_actions: f must be 0 at epoch 1");
        if (s.energy >= p.deception_cost) m |= mask_of(Action::deceive());
        if (s.queue > 0 && s.energy > p.energy_per_packet) m |= mask_of(Action::transmit());
        return m;
    }
    if (s.deception != 1)
        throw ContractViolation("feasible_actions: f must be 1 at epoch 2");
    if (s.jammed == 0) {
        if (s.queue > 0 && s.energy > p.energy_per_packet) m |= mask_of(Action::transmit());
        return m;
    }
    if (s.energy < p.energy_capacity) m |= mask_of(Action::harvest());
    if (s.queue > 0) m |= mask_of(Action::backscatter());
    if (s.queue > 0 && s.energy > p.energy_per_packet)
        for (int r = 1; r <= p.num_rates(); ++r) m |= mask_of(Action::rate_adapt(r));
    return m;
}

int sample_jammer(const JammerConfig& cfg, bool detected_activity, std::mt19937_64& rng) {
    if (!detected_activity) return 0;
    double u = uniform01(rng);
    double acc = 0.0;
    int last = cfg.num_levels() - 1;
    for (int n = 0; n < last; ++n) {
        acc += cfg.attack_probs[n];
        if (u < acc) return n;
    }
    return last;
}

double sinr(double received_power, int level, const JammerConfig& cfg) {
    if (received_power < 0.0)
        throw ContractViolation("sinr: received power must be >= 0");
    if (level < 0 || level >= cfg.num_levels())
        throw ContractViolation("sinr: power level out of range");
    double denom = cfg.attenuation * cfg.power_levels[level] + cfg.noise_var;
    if (denom == 0.0)
        throw std::domain_error("sinr: degenerate denominator (phi*P_J + rho_sq = 0)");
    return received_power / denom;
}

Env::Env(EnvParams params, JammerConfig jammer, std::uint64_t seed)
    : params_(std::move(params)), jammer_(std::move(jammer)), rng_(seed) {
    params_.validate();
    jammer_.validate();
    if (params_.harvest_per_level.size() != static_cast<std::size_t>(jammer_.num_levels()))
        throw ConfigError("env.e_harvest must match the number of jammer power levels");
}

void Env::reset(const SystemState& s) {
    if (s.deception != 0 || s.jammed != 0)
        throw ContractViolation("Env::reset: slot-start states have f = j = 0");
    state_ = s;
    epoch_ = 1;
    stored_level_ = -1;
}

void Env::reset_to(const SystemState& s, int epoch, int stored_level) {
    if (epoch == 1) {
        reset(s);
        return;
    }
    if (epoch != 2 || s.deception != 1)
        throw ContractViolation("Env::reset_to: epoch-2 states have f = 1");
    if ((s.jammed == 1) != (stored_level > 0))
        throw ContractViolation("Env::reset_to: stored level inconsistent with jammed flag");
    if (stored_level >= jammer_.num_levels())
        throw ContractViolation("Env::reset_to: stored level out of range");
    state_ = s;
    epoch_ = 2;
    stored_level_ = stored_level;
}

StepOutcome Env::step(Action a) {
    ActionMask feas = feasible();
    if (a.code < 0 || a.code >= params_.num_actions() || !mask_has(feas, a))
        throw ContractViolation("Env::step: action " + std::to_string(a.code) +
                                " infeasible in the current state");

    const EnvParams& p = params_;
    StepOutcome out;
    bool complete = true;

    if (epoch_ == 1) {
        switch (a.code) {
            case Action::kIdle:
                break;
            case Action::kTransmit: {
                int n = sample_jammer(jammer_, true, rng_);
                out.diag.jammer_level = n;
                int attempted = std::min({state_.queue, p.max_active_packets,
                                          state_.energy / p.energy_per_packet});
                state_.queue -= attempted;
                state_.energy -= attempted * p.energy_per_packet;
                out.diag.energy_spent = attempted * p.energy_per_packet;
                if (n > 0)
                    out.diag.dropped_jamming = attempted;  // energy already spent
                else
                    out.reward = attempted;
                break;
            }
            case Action::kDeceive: {
                int n = sample_jammer(jammer_, true, rng_);
                out.diag.jammer_level = n;
                state_.energy -= p.deception_cost;
                out.diag.energy_spent = p.deception_cost;
                state_.deception = 1;
                state_.jammed = n > 0 ? 1 : 0;
                stored_level_ = n;
                epoch_ = 2;
                complete = false;
                break;
            }
            default:
                throw ContractViolation("Env::step: unreachable epoch-1 action");
        }
    } else {
        int n = stored_level_;
        out.diag.jammer_level = n;
        switch (a.code) {
            case Action::kIdle:
                break;
            case Action::kTransmit: {
                int attempted = std::min({state_.queue, p.max_post_deception_packets,
                                          state_.energy / p.energy_per_packet});
                state_.queue -= attempted;
                state_.energy -= attempted * p.energy_per_packet;
                out.diag.energy_spent = attempted * p.energy_per_packet;
                out.reward = attempted;
                break;
            }
            case Action::kHarvest: {
                int gain = p.harvest_per_level[n];
                int stored = std::min(gain, p.energy_capacity - state_.energy);
                state_.energy += stored;
                out.diag.harvested_jammer = stored;
                out.diag.wasted_jammer = gain - stored;
                break;
            }
            case Action::kBackscatter: {
                int sent = std::min(state_.queue, p.backscatter_rate);
                int delivered = std::min(state_.queue, p.backscatter_per_level[n]);
                state_.queue -= sent;
                out.reward = delivered;
                out.diag.dropped_backscatter = sent - delivered;
                break;
            }
            default: {
                int attempted = std::min({state_.queue, p.rate_packets[a.rate_index() - 1],
                                          state_.energy / p.energy_per_packet});
                state_.queue -= attempted;
                state_.energy -= attempted * p.energy_per_packet;
                out.diag.energy_spent = attempted * p.energy_per_packet;
                if (bernoulli(rng_, p.miss_detection_prob))
                    out.diag.dropped_miss = attempted;
                else
                    out.reward = attempted;
                break;
            }
        }
    }

    if (complete) return finish_slot(std::move(out));
    out.slot_complete = false;
    out.next_state = state_;
    return out;
}

// End-of-slot dynamics: arrivals first, then ambient harvest; both clamped.
StepOutcome Env::finish_slot(StepOutcome out) {
    const EnvParams& p = params_;
    if (bernoulli(rng_, p.arrival_prob)) {
        out.diag.arrived = p.arrival_batch;
        int stored = std::min(p.arrival_batch, p.queue_capacity - state_.queue);
        state_.queue += stored;
        out.diag.dropped_overflow = p.arrival_batch - stored;
    }
    if (bernoulli(rng_, p.ambient_prob)) {
        int stored = std::min(p.ambient_harvest, p.energy_capacity - state_.energy);
        state_.energy += stored;
        out.diag.harvested_ambient = stored;
        out.diag.wasted_ambient = p.ambient_harvest - stored;
    }
    state_.deception = 0;
    state_.jammed = 0;
    epoch_ = 1;
    stored_level_ = -1;
    out.slot_complete = true;
    out.next_state = state_;
    return out;
}

}  // namespace jamdec
