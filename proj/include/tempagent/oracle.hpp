// tempagent/oracle.hpp: literal reference evaluator
//
// Expands every truth clause over the explicit relations of an unrolled graph:
// K_i over agent_rel, N over next_rel, Until by enumerating every Next*-reachable
// witness b and every c with a Next* c Next⁺ b, D_k over (R^<)^k, KnI by
// walking agent relations inside the cluster copy.  Truth is computed for the
// readout states only; a state at a copy past the readout window takes the
// truth of the readout state it repeats.  Slow on purpose.
//
// Up to 64 valuations of one frame are evaluated together, one per bit lane;
// each clause is the same quantifier expansion with && / || read lane-wise.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/model.hpp"
#include "tempagent/semantics.hpp"
#include "tempagent/unroll.hpp"

namespace tempagent {

/// Valuation-independent part of the oracle: an unrolling and its derived
/// relations.  Keeps a reference to `layout`.
class OracleFrame {
public:
    OracleFrame(const FrameLayout& layout, bool bridge_gaps, std::size_t horizon)
        : graph_(unroll(layout, horizon, UnrollOptions{bridge_gaps})),
          next_plus_(graph_.next_rel().transitive_closure()),
          next_star_(next_plus_) {
        for (std::size_t u = 0; u < graph_.size(); ++u) next_star_.insert(u, u);
        for (std::size_t q = 0; q < layout.state_count(); ++q) {
            auto u = graph_.find(q, layout.time_of(q));
            if (!u) throw EvalError("oracle: horizon too short to contain every readout state");
            readout_.push_back(*u);
        }
        // a R_{i1} a1 R_{i2} a2 ... R_{ik} ak with k >= 1, all inside C(a).
        const std::size_t n = graph_.size();
        const std::uint32_t agents = layout.spec().agents;
        for (std::size_t a = 0; a < n; ++a) {
            std::vector<char> seen(n, 0);
            std::vector<std::size_t> frontier{a};
            while (!frontier.empty()) {
                std::size_t x = frontier.back();
                frontier.pop_back();
                for (std::uint32_t j = 1; j <= agents; ++j) {
                    const Relation& r = graph_.agent_rel(j);
                    for (std::size_t y = 0; y < n; ++y) {
                        if (seen[y] || !r.contains(x, y)) continue;
                        if (graph_.cluster_instance(y) != graph_.cluster_instance(a)) continue;
                        seen[y] = 1;
                        frontier.push_back(y);
                    }
                }
            }
            std::vector<std::size_t> reach;
            for (std::size_t y = 0; y < n; ++y)
                if (seen[y]) reach.push_back(y);
            interaction_.push_back(std::move(reach));
        }
    }

    const UnrolledGraph& graph() const noexcept { return graph_; }
    const FrameLayout& layout() const noexcept { return graph_.layout(); }
    const std::vector<std::size_t>& readout() const noexcept { return readout_; }

private:
    friend class OracleEvaluator;

    const Relation& power(std::size_t k) const {
        auto it = powers_.find(k);
        if (it == powers_.end()) it = powers_.emplace(k, strict_power(graph_, k)).first;
        return it->second;
    }

    UnrolledGraph graph_;
    Relation next_plus_;
    Relation next_star_;
    std::vector<std::size_t> readout_;
    std::vector<std::vector<std::size_t>> interaction_;
    mutable std::map<std::size_t, Relation> powers_;
};

/// Truth of formulas under up to 64 valuations of one frame.
class OracleEvaluator {
public:
    using Lanes = std::uint64_t;

    OracleEvaluator(const OracleFrame& frame, std::vector<const Valuation*> lanes)
        : frame_(frame), lanes_(std::move(lanes)) {
        if (lanes_.empty() || lanes_.size() > 64) throw std::invalid_argument("oracle: 1 to 64 valuations per pass");
        full_ = lanes_.size() == 64 ? ~Lanes{0} : (Lanes{1} << lanes_.size()) - 1;
    }

    /// Lane mask per readout (quotient) state.
    const std::vector<Lanes>& truth(const Formula& f) {
        auto it = memo_.find(f);
        if (it != memo_.end()) return it->second;
        if (f.op() == Op::Know && f.index() > frame_.layout().spec().agents)
            throw EvalError("agent " + std::to_string(f.index()) + " exceeds the model's agents");
        std::vector<Lanes> out(frame_.readout().size());
        for (std::size_t q = 0; q < out.size(); ++q) out[q] = holds(frame_.readout()[q], f);
        return memo_.emplace(f, std::move(out)).first->second;
    }

private:
    Lanes at(std::size_t u, const Formula& f) { return truth(f)[frame_.graph().states()[u].quotient]; }

    Lanes holds(std::size_t a, const Formula& f) {
        const auto& g = frame_.graph();
        const std::size_t n = g.size();
        switch (f.op()) {
        case Op::Var: {
            Lanes m = 0;
            for (std::size_t k = 0; k < lanes_.size(); ++k) {
                auto it = lanes_[k]->find(f.index());
                if (it != lanes_[k]->end() && it->second.count(g.states()[a].quotient)) m |= Lanes{1} << k;
            }
            return m;
        }
        case Op::Top: return full_;
        case Op::Bot: return 0;
        case Op::Not: return ~at(a, f.child()) & full_;
        case Op::And: return at(a, f.lhs()) & at(a, f.rhs());
        case Op::Or: return at(a, f.lhs()) | at(a, f.rhs());
        case Op::Implies: return (~at(a, f.lhs()) | at(a, f.rhs())) & full_;
        case Op::Know: {
            const Relation& r = g.agent_rel(f.index());
            Lanes m = full_;
            for (std::size_t b = 0; b < n && m; ++b)
                if (r.contains(a, b)) m &= at(b, f.child());
            return m;
        }
        case Op::Next: {
            Lanes m = full_;
            for (std::size_t b = 0; b < n && m; ++b)
                if (g.next_rel().contains(a, b)) m &= at(b, f.child());
            return m;
        }
        case Op::Until: {
            Lanes m = 0;
            for (std::size_t b = 0; b < n && m != full_; ++b) {
                if (!frame_.next_star_.contains(a, b)) continue;
                Lanes guarded = at(b, f.rhs()) & ~m;
                for (std::size_t c = 0; c < n && guarded; ++c)
                    if (frame_.next_star_.contains(a, c) && frame_.next_plus_.contains(c, b)) guarded &= at(c, f.lhs());
                m |= guarded;
            }
            return m;
        }
        case Op::Dist: {
            const Relation& p = frame_.power(f.index());
            Lanes m = 0;
            for (std::size_t b = 0; b < n && m != full_; ++b)
                if (p.contains(a, b)) m |= at(b, f.child());
            return m;
        }
        case Op::Today: {
            Lanes m = full_;
            for (std::size_t b = 0; b < n && m; ++b)
                if (g.cluster_instance(b) == g.cluster_instance(a)) m &= at(b, f.child());
            return m;
        }
        case Op::KnI: return interaction_reaches(a, f.child());
        case Op::Unc: return interaction_reaches(a, f.child()) & interaction_reaches(a, neg(f.child()));
        }
        return 0;
    }

    Lanes interaction_reaches(std::size_t a, const Formula& f) {
        Lanes m = 0;
        for (auto y : frame_.interaction_[a]) m |= at(y, f);
        return m;
    }

    const OracleFrame& frame_;
    std::vector<const Valuation*> lanes_;
    Lanes full_ = 0;
    std::map<Formula, std::vector<Lanes>> memo_;
};

/// Unrolling length the oracle uses for f: T for loop-free frames,
/// stable_horizon (or the given value, at least T + 1) for loops.
inline std::size_t oracle_horizon(const Model& model, const Formula& f, std::optional<std::size_t> horizon = {}) {
    const auto& layout = model.layout();
    const std::size_t T = layout.time_count();
    if (!layout.loop()) {
        if (horizon && *horizon != T) throw EvalError("oracle: a loop-free frame is evaluated on its time clusters");
        return T;
    }
    const std::size_t h = horizon.value_or(stable_horizon(model, f));
    if (h < T + 1) throw EvalError("oracle: horizon below " + std::to_string(T + 1));
    return h;
}

/// Literal evaluation on an explicit unrolling of `horizon` copies
/// (default: T for loop-free frames, stable_horizon for loops).
inline TruthAssignment oracle_eval(const Model& model, const Formula& f, std::optional<std::size_t> horizon = {}) {
    detail::check_agents(model, metrics(f).max_agent);
    OracleFrame frame(model.layout(), model.bridge_gaps(), oracle_horizon(model, f, horizon));
    OracleEvaluator ev(frame, {&model.valuation()});
    TruthAssignment t;
    for (auto m : ev.truth(f)) t.values.push_back(m & 1u);
    for (std::size_t s = 0; s < model.layout().state_count(); ++s) t.states.push_back(model.layout().state_name(s));
    return t;
}

} // namespace tempagent
