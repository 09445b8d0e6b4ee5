// ============================================================================
// tempagent/unroll.hpp: explicit finite unrollings of a frame
// ============================================================================
//
// Copy t of the unrolling realizes time index t while t < T, and
// L + (t - L) mod P afterwards when the frame loops.  The chains of the gap
// after copy t are materialized only when copy t+1 exists, so every chain
// state has its Next-successors inside the graph.
//
// Relations (all over unrolled states):
//   q_rel       universal inside every cluster copy, forward inside each chain,
//               C(t) -> first cluster of each chain of gap t,
//               last cluster of each chain -> C(t+1),
//               C(t) x C(t+1) when gaps are bridged
//   r_rel       q_rel⁺
//   r_strict    r_rel minus its symmetric part
//   next_rel    C(t) and the chains of gap t -> C(t+1)
//   agent_rel   per-cluster equivalence of each agent
//
// ============================================================================

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/frame.hpp"
#include "tempagent/relation.hpp"

namespace tempagent {

struct UnrollOptions {
    /// Add C(i) x C(i+1) to Q; keeps consecutive time clusters R-connected
    /// across empty gaps.
    bool bridge_gaps = true;
};

struct UnrolledState {
    std::size_t quotient;  // FrameLayout state id
    std::size_t copy;
};

class UnrolledGraph {
public:
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<UnrolledState>& states() const noexcept { return states_; }
    const FrameLayout& layout() const noexcept { return *layout_; }

    const Relation& next_rel() const noexcept { return next_; }
    const Relation& q_rel() const noexcept { return q_; }
    const Relation& r_rel() const noexcept { return r_; }
    const Relation& r_strict() const noexcept { return r_strict_; }
    /// Agents are 1-based.
    const Relation& agent_rel(std::size_t agent) const { return agent_.at(agent - 1); }

    /// Cluster-copy instance of a state; equal ids mean the same C(a).
    std::size_t cluster_instance(std::size_t s) const { return instance_[s]; }

    /// Unrolled state for (quotient, copy), if materialized.
    std::optional<std::size_t> find(std::size_t quotient, std::size_t copy) const {
        if (copy >= by_copy_.size()) return std::nullopt;
        auto id = by_copy_[copy][quotient];
        if (id == npos) return std::nullopt;
        return id;
    }

    std::string state_name(std::size_t s) const {
        const auto& st = states_[s];
        std::string n = layout_->state_name(st.quotient);
        if (st.copy != layout_->time_of(st.quotient)) n += ".c" + std::to_string(st.copy);
        return n;
    }

    /// Time index realized by copy t.
    static std::size_t time_at(const FrameLayout& layout, std::size_t t) {
        const std::size_t T = layout.time_count();
        if (t < T || !layout.loop()) return t;
        const std::size_t L = *layout.loop();
        return L + (t - L) % layout.period();
    }

private:
    friend UnrolledGraph unroll(const FrameLayout&, std::size_t, UnrollOptions);
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    const FrameLayout* layout_ = nullptr;
    std::size_t horizon_ = 0;
    std::vector<UnrolledState> states_;
    std::vector<std::size_t> instance_;
    std::vector<std::vector<std::size_t>> by_copy_;
    Relation next_, q_, r_, r_strict_;
    std::vector<Relation> agent_;
};

/// The layout must outlive the returned graph.
inline UnrolledGraph unroll(const FrameLayout& layout, std::size_t horizon, UnrollOptions opts = {}) {
    if (horizon == 0) throw EvalError("unroll: horizon must be positive");
    const std::size_t T = layout.time_count();
    if (!layout.loop() && horizon > T) {
        throw EvalError("unroll: horizon " + std::to_string(horizon) + " exceeds the " + std::to_string(T) +
                        " time clusters of a loop-free frame");
    }

    UnrolledGraph g;
    g.layout_ = &layout;
    g.horizon_ = horizon;
    g.by_copy_.assign(horizon, std::vector<std::size_t>(layout.state_count(), UnrolledGraph::npos));

    // Per copy: state ids of the time-cluster copy, and of each chain's clusters.
    std::vector<std::vector<std::size_t>> time_states(horizon);
    std::vector<std::vector<std::vector<std::vector<std::size_t>>>> chain_states(horizon);
    std::vector<std::vector<std::size_t>> instances;

    auto add_cluster = [&](std::size_t cluster, std::size_t copy) {
        std::vector<std::size_t> ids;
        const std::size_t inst = instances.size();
        for (auto q : layout.clusters()[cluster].states) {
            const std::size_t id = g.states_.size();
            g.states_.push_back({q, copy});
            g.instance_.push_back(inst);
            g.by_copy_[copy][q] = id;
            ids.push_back(id);
        }
        instances.push_back(ids);
        return ids;
    };

    for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t i = UnrolledGraph::time_at(layout, t);
        time_states[t] = add_cluster(layout.time_cluster(i), t);
        if (layout.has_gap(i) && t + 1 < horizon) {
            for (const auto& chain : layout.gap_chains(i)) {
                std::vector<std::vector<std::size_t>> per_pos;
                for (auto c : chain) per_pos.push_back(add_cluster(c, t));
                chain_states[t].push_back(std::move(per_pos));
            }
        }
    }

    const std::size_t n = g.states_.size();
    g.q_ = Relation(n);
    g.next_ = Relation(n);
    g.agent_.assign(layout.agents(), Relation(n));

    auto link = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to, Relation& rel) {
        for (auto a : from)
            for (auto b : to) rel.insert(a, b);
    };

    for (const auto& inst : instances) {
        link(inst, inst, g.q_);
        const auto& info = layout.cluster_of(g.states_[inst.front()].quotient);
        for (std::size_t j = 0; j < layout.agents(); ++j) {
            for (std::size_t x = 0; x < inst.size(); ++x)
                for (std::size_t y = 0; y < inst.size(); ++y)
                    if (info.blocks[j][x] == info.blocks[j][y]) g.agent_[j].insert(inst[x], inst[y]);
        }
    }

    for (std::size_t t = 0; t < horizon; ++t) {
        const bool has_next = t + 1 < horizon;
        for (const auto& chain : chain_states[t]) {
            for (std::size_t p = 0; p < chain.size(); ++p)
                for (std::size_t p2 = p + 1; p2 < chain.size(); ++p2) link(chain[p], chain[p2], g.q_);
            link(time_states[t], chain.front(), g.q_);
            link(chain.back(), time_states[t + 1], g.q_);
            for (const auto& cl : chain) link(cl, time_states[t + 1], g.next_);
        }
        if (has_next && layout.has_gap(UnrolledGraph::time_at(layout, t))) {
            if (opts.bridge_gaps) link(time_states[t], time_states[t + 1], g.q_);
            link(time_states[t], time_states[t + 1], g.next_);
        }
    }

    g.r_ = g.q_.transitive_closure();
    g.r_strict_ = g.r_.strict_part();
    return g;
}

/// (R^<)^k; k = 0 gives the identity.
inline Relation strict_power(const UnrolledGraph& g, std::size_t k) { return g.r_strict().power(k); }

} // namespace tempagent
