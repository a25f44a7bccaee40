#include "jamdec/model.hpp"

#include <algorithm>
#include <map>
#include <stack>

namespace jamdec {

namespace {

// Accumulates (next state, probability) pairs, merging duplicates.
class RowBuilder {
public:
    void add(int next, double prob) {
        if (prob > 0.0) acc_[next] += prob;
    }
    ModelRow finish(double expected_reward) const {
        ModelRow row;
        row.expected_reward = expected_reward;
        row.transitions.reserve(acc_.size());
        for (auto& [next, prob] : acc_) row.transitions.push_back({next, prob});
        return row;
    }

private:
    std::map<int, double> acc_;
};

// Adds the four arrival/ambient end-of-slot branches from (queue, energy).
void add_slot_end(RowBuilder& b, const MdpModel& m, const EnvParams& p, int queue, int energy,
                  double prob) {
    const double pa = p.arrival_prob, pe = p.ambient_prob;
    const double branch[4] = {(1 - pa) * (1 - pe), (1 - pa) * pe, pa * (1 - pe), pa * pe};
    for (int k = 0; k < 4; ++k) {
        if (branch[k] == 0.0) continue;
        SystemState next;
        next.queue = (k & 2) ? std::min(queue + p.arrival_batch, p.queue_capacity) : queue;
        next.energy = (k & 1) ? std::min(energy + p.ambient_harvest, p.energy_capacity) : energy;
        b.add(m.index_of(next), prob * branch[k]);
    }
}

}  // namespace

MdpModel enumerate_model(const EnvParams& params, const JammerConfig& jammer,
                         std::size_t max_states) {
    params.validate();
    jammer.validate();

    MdpModel m;
    m.queue_cap = params.queue_capacity;
    m.energy_cap = params.energy_capacity;
    m.n_states = 2 * 2 * (params.queue_capacity + 1) * (params.energy_capacity + 1);
    m.n_actions = params.num_actions();
    if (static_cast<std::size_t>(m.n_states) > max_states)
        throw CapacityError("enumerate_model: " + std::to_string(m.n_states) +
                            " states exceed the bound of " + std::to_string(max_states));
    m.feasible.assign(m.n_states, 0);
    m.rows.assign(m.n_states, std::vector<ModelRow>(m.n_actions));

    const EnvParams& p = params;
    const int levels = jammer.num_levels();
    const double attack = jammer.attack_probability();

    // Level distribution conditioned on an attack. States (1,1,.,.) are
    // unreachable when the attack probability is zero; a uniform convention
    // keeps their rows well formed.
    std::vector<double> cond(levels, 0.0);
    for (int n = 1; n < levels; ++n)
        cond[n] = attack > 0.0 ? jammer.attack_probs[n] / attack : 1.0 / (levels - 1);

    for (int idx = 0; idx < m.n_states; ++idx) {
        if (m.excluded(idx)) continue;
        SystemState s = m.state_of(idx);
        int epoch = m.epoch_of(idx);
        ActionMask feas = feasible_actions(p, s, epoch);
        m.feasible[idx] = feas;

        for (int code = 0; code < m.n_actions; ++code) {
            Action a{code};
            if (!mask_has(feas, a)) continue;
            RowBuilder b;
            double reward = 0.0;

            if (epoch == 1) {
                switch (code) {
                    case Action::kIdle:
                        add_slot_end(b, m, p, s.queue, s.energy, 1.0);
                        break;
                    case Action::kTransmit: {
                        int att = std::min({s.queue, p.max_active_packets,
                                            s.energy / p.energy_per_packet});
                        reward = att * jammer.attack_probs[0];
                        add_slot_end(b, m, p, s.queue - att,
                                     s.energy - att * p.energy_per_packet, 1.0);
                        break;
                    }
                    case Action::kDeceive: {
                        SystemState mid{1, 0, s.queue, s.energy - p.deception_cost};
                        b.add(m.index_of(mid), 1.0 - attack);
                        mid.jammed = 1;
                        b.add(m.index_of(mid), attack);
                        break;
                    }
                }
            } else if (s.jammed == 0) {
                if (code == Action::kIdle) {
                    add_slot_end(b, m, p, s.queue, s.energy, 1.0);
                } else {  // transmit
                    int att = std::min({s.queue, p.max_post_deception_packets,
                                        s.energy / p.energy_per_packet});
                    reward = att;
                    add_slot_end(b, m, p, s.queue - att, s.energy - att * p.energy_per_packet,
                                 1.0);
                }
            } else {
                switch (code) {
                    case Action::kIdle:
                        add_slot_end(b, m, p, s.queue, s.energy, 1.0);
                        break;
                    case Action::kHarvest:
                        for (int n = 1; n < levels; ++n) {
                            int e2 = std::min(s.energy + p.harvest_per_level[n],
                                              p.energy_capacity);
                            add_slot_end(b, m, p, s.queue, e2, cond[n]);
                        }
                        break;
                    case Action::kBackscatter: {
                        int sent = std::min(s.queue, p.backscatter_rate);
                        for (int n = 1; n < levels; ++n)
                            reward += cond[n] * std::min(s.queue, p.backscatter_per_level[n]);
                        add_slot_end(b, m, p, s.queue - sent, s.energy, 1.0);
                        break;
                    }
                    default: {  // rate adaptation; miss detection affects reward only
                        int att = std::min({s.queue, p.rate_packets[a.rate_index() - 1],
                                            s.energy / p.energy_per_packet});
                        reward = (1.0 - p.miss_detection_prob) * att;
                        add_slot_end(b, m, p, s.queue - att, s.energy - att * p.energy_per_packet,
                                     1.0);
                        break;
                    }
                }
            }
            m.rows[idx][code] = b.finish(reward);
        }
    }
    return m;
}

CommunicatingClasses check_irreducible(const MdpModel& model, const SystemState& initial) {
    CommunicatingClasses result;
    const int n = model.n_states;
    const int start = model.index_of(initial);

    // Union-of-actions adjacency, restricted to reachable states (BFS).
    std::vector<std::vector<int>> adj(n);
    std::vector<char> seen(n, 0);
    std::vector<int> queueize{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queueize.size(); ++head) {
        int u = queueize[head];
        std::vector<int>& out = adj[u];
        for (int code = 0; code < model.n_actions; ++code) {
            const ModelRow* row = model.row(u, Action{code});
            if (!row) continue;
            for (const TransitionEntry& t : row->transitions) {
                if (std::find(out.begin(), out.end(), t.next_state) == out.end())
                    out.push_back(t.next_state);
                if (!seen[t.next_state]) {
                    seen[t.next_state] = 1;
                    queueize.push_back(t.next_state);
                }
            }
        }
    }
    result.reachable = queueize;
    std::sort(result.reachable.begin(), result.reachable.end());

    // Iterative Tarjan over the reachable subgraph.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> scc_stack;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t child;
    };
    for (int root : result.reachable) {
        if (index[root] != -1) continue;
        std::stack<Frame> frames;
        frames.push({root, 0});
        index[root] = low[root] = next_index++;
        scc_stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.top();
            if (f.child < adj[f.node].size()) {
                int v = adj[f.node][f.child++];
                if (index[v] == -1) {
                    index[v] = low[v] = next_index++;
                    scc_stack.push_back(v);
                    on_stack[v] = 1;
                    frames.push({v, 0});
                } else if (on_stack[v]) {
                    low[f.node] = std::min(low[f.node], index[v]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    std::vector<int> members;
                    int v;
                    do {
                        v = scc_stack.back();
                        scc_stack.pop_back();
                        on_stack[v] = 0;
                        comp[v] = static_cast<int>(result.classes.size());
                        members.push_back(v);
                    } while (v != f.node);
                    std::sort(members.begin(), members.end());
                    result.classes.push_back(std::move(members));
                }
                int node = f.node;
                frames.pop();
                if (!frames.empty())
                    low[frames.top().node] = std::min(low[frames.top().node], low[node]);
            }
        }
    }

    result.closed.assign(result.classes.size(), true);
    for (int u : result.reachable)
        for (int v : adj[u])
            if (comp[u] != comp[v]) result.closed[comp[u]] = false;

    result.irreducible = result.classes.size() == 1;
    return result;
}

}  // namespace jamdec
