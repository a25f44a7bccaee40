#pragma once

#include <cstddef>
#include <vector>

#include "jamdec/env.hpp"

namespace jamdec {

struct TransitionEntry {
    int next_state = 0;
    double prob = 0.0;
};

// One (state, action) row of the exact model.
struct ModelRow {
    double expected_reward = 0.0;
    std::vector<TransitionEntry> transitions;  // probabilities sum to 1
};

// Explicit transition/reward tables over the full (f, j, d, e) index space.
// The decision epoch is implied by f, so states double as (state, epoch)
// pairs. Index layout: ((f*2 + j)*(D+1) + d)*(E+1) + e. Rows for the excluded
// (0,1,.,.) combination and for infeasible actions are empty.
struct MdpModel {
    int n_states = 0;
    int n_actions = 0;
    int queue_cap = 0;
    int energy_cap = 0;
    std::vector<ActionMask> feasible;       // per state; 0 for excluded states
    std::vector<std::vector<ModelRow>> rows;  // [state][action]

    int index_of(const SystemState& s) const { return state_index(s, queue_cap, energy_cap); }
    SystemState state_of(int idx) const { return state_at(idx, queue_cap, energy_cap); }
    int epoch_of(int idx) const { return state_of(idx).deception == 1 ? 2 : 1; }
    bool excluded(int idx) const {
        SystemState s = state_of(idx);
        return s.deception == 0 && s.jammed == 1;
    }
    const ModelRow* row(int s, Action a) const {
        if (!mask_has(feasible[s], a)) return nullptr;
        return &rows[s][a.code];
    }
};

// Builds the exact model consistent with Env::step's stochastic semantics.
// Throws CapacityError when 2*2*(D+1)*(E+1) exceeds max_states.
MdpModel enumerate_model(const EnvParams& params, const JammerConfig& jammer,
                         std::size_t max_states = 200000);

struct CommunicatingClasses {
    bool irreducible = false;                // one class covers every reachable state
    std::vector<int> reachable;              // states reachable from the initial state
    std::vector<std::vector<int>> classes;   // strongly connected components
    std::vector<bool> closed;                // class has no outgoing edge
};

// Reachability analysis under the union of feasible actions.
CommunicatingClasses check_irreducible(const MdpModel& model,
                                       const SystemState& initial = {});

}  // namespace jamdec
