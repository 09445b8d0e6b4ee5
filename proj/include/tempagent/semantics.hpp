// ============================================================================
// tempagent/semantics.hpp: truth-value computation over models
// ============================================================================
//
// Truth sets are bitsets over the quotient states of a frame.  Every operator
// only looks into the current cluster or into the future, so on a looping
// frame the truth of any formula at copy t >= L equals its truth at copy
// t + P.  The evaluator therefore works on one period directly:
//
//   K_i      the R_i-class of the state is contained in the operand
//   Today    the state's own cluster is contained in the operand
//   KnI      the interaction component (union of agent blocks, transitively,
//            inside the cluster) meets the operand
//   Unc      KnI p and KnI ~p
//   N        every state of the next time cluster satisfies the operand
//   Until    least fixpoint over time clusters:
//              W(X) = (psi somewhere in X) or (phi everywhere in X and W(next X))
//            a |= phi Until psi  iff  psi(a) or (phi(a) and W(next cluster of a))
//   D_k      k preimage steps of R^<; the strict future of each state is read
//            off an unrolled window of T + P + 1 copies and folded back
//
// ============================================================================

#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/frame.hpp"
#include "tempagent/model.hpp"
#include "tempagent/unroll.hpp"

namespace tempagent {

/// A formula (or several sharing subformulas) flattened into slots, children
/// before parents.  Var slots refer to positions in variables().
class CompiledFormula {
public:
    struct Instr {
        Op op;
        std::uint32_t index;  // agent / distance; dense variable position for Var
        std::uint32_t lhs;
        std::uint32_t rhs;
    };

    explicit CompiledFormula(const Formula& f) : CompiledFormula(std::vector<Formula>{f}) {}

    explicit CompiledFormula(const std::vector<Formula>& roots) {
        std::set<std::uint32_t> vars;
        for (const auto& r : roots) {
            auto m = metrics(r);
            vars.insert(m.variables.begin(), m.variables.end());
            max_agent_ = std::max(max_agent_, m.max_agent);
            max_dist_ = std::max(max_dist_, m.max_dist);
        }
        variables_.assign(vars.begin(), vars.end());
        std::map<Formula, std::uint32_t> slot;
        for (const auto& r : roots) {
            for (const auto& s : subformulas(r)) {
                if (slot.count(s)) continue;
                Instr in{s.op(), s.index(), 0, 0};
                if (s.op() == Op::Var) {
                    in.index = static_cast<std::uint32_t>(
                        std::lower_bound(variables_.begin(), variables_.end(), s.index()) - variables_.begin());
                }
                if (s.arity() >= 1) in.lhs = slot.at(s.lhs());
                if (s.arity() == 2) in.rhs = slot.at(s.rhs());
                slot.emplace(s, static_cast<std::uint32_t>(code_.size()));
                code_.push_back(in);
            }
            roots_.push_back(slot.at(r));
        }
    }

    const std::vector<Instr>& code() const noexcept { return code_; }
    const std::vector<std::uint32_t>& roots() const noexcept { return roots_; }
    const std::vector<std::uint32_t>& variables() const noexcept { return variables_; }
    std::uint32_t max_agent() const noexcept { return max_agent_; }
    std::uint32_t max_dist() const noexcept { return max_dist_; }

private:
    std::vector<Instr> code_;
    std::vector<std::uint32_t> roots_;
    std::vector<std::uint32_t> variables_;
    std::uint32_t max_agent_ = 0;
    std::uint32_t max_dist_ = 0;
};

/// Smallest horizon accepted by eval for this formula on this frame.
inline std::size_t min_eval_horizon(const FrameLayout& layout, std::uint32_t max_dist) {
    const std::size_t T = layout.time_count();
    if (!layout.loop() || max_dist == 0) return T;
    return T + layout.period() + 1;
}

/// Frame structure precomputed as bitsets of quotient states.
template <std::size_t N>
class FrameKernel {
public:
    using Mask = std::bitset<N>;

    /// `window` is the unrolling used for strict futures; 0 skips them.
    FrameKernel(const FrameLayout& layout, bool bridge_gaps, std::size_t window)
        : n_(layout.state_count()), agents_(layout.agents()) {
        if (n_ > N) throw EvalError("frame kernel: too many states");
        for (std::size_t s = 0; s < n_; ++s) all_.set(s);

        const auto& clusters = layout.clusters();
        cluster_masks_.resize(clusters.size());
        agent_classes_.resize(agents_);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto& info = clusters[c];
            for (auto s : info.states) cluster_masks_[c].set(s);
            for (std::size_t j = 0; j < agents_; ++j) {
                std::vector<Mask> cls(info.block_count(j + 1));
                for (std::size_t x = 0; x < info.states.size(); ++x) cls[info.blocks[j][x]].set(info.states[x]);
                for (auto& m : cls) agent_classes_[j].push_back(m);
            }
            // Interaction components: union-find over members, joining
            // members that share a block for some agent.
            std::vector<std::size_t> parent(info.states.size());
            std::iota(parent.begin(), parent.end(), 0);
            auto find = [&](std::size_t x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            for (std::size_t j = 0; j < agents_; ++j) {
                std::vector<std::size_t> first(info.states.size(), SIZE_MAX);
                for (std::size_t x = 0; x < info.states.size(); ++x) {
                    auto b = info.blocks[j][x];
                    if (first[b] == SIZE_MAX) first[b] = x;
                    else parent[find(x)] = find(first[b]);
                }
            }
            std::map<std::size_t, Mask> comps;
            for (std::size_t x = 0; x < info.states.size(); ++x) comps[find(x)].set(info.states[x]);
            for (auto& [root, m] : comps) components_.push_back(m);
        }

        const std::size_t T = layout.time_count();
        time_masks_.resize(T);
        group_masks_.resize(T);
        successor_.resize(T);
        for (std::size_t i = 0; i < T; ++i) {
            time_masks_[i] = cluster_masks_[layout.time_cluster(i)];
            group_masks_[i] = time_masks_[i];
            if (layout.has_gap(i))
                for (const auto& chain : layout.gap_chains(i))
                    for (auto c : chain) group_masks_[i] |= cluster_masks_[c];
            successor_[i] = layout.successor_time(i);
        }

        if (window > 0) {
            UnrolledGraph g = unroll(layout, window, UnrollOptions{bridge_gaps});
            strict_future_.resize(n_);
            const Relation& strict = g.r_strict();
            for (std::size_t q = 0; q < n_; ++q) {
                auto u = g.find(q, layout.time_of(q));
                if (!u) throw EvalError("frame kernel: window too short for strict futures");
                for (std::size_t v = 0; v < g.size(); ++v)
                    if (strict.contains(*u, v)) strict_future_[q].set(g.states()[v].quotient);
            }
        }
    }

    std::size_t state_count() const noexcept { return n_; }
    const Mask& all() const noexcept { return all_; }
    bool has_strict_future() const noexcept { return !strict_future_.empty(); }
    const std::vector<Mask>& cluster_masks() const noexcept { return cluster_masks_; }

    /// Truth sets of every slot; `vars` is aligned with f.variables().
    void run(const CompiledFormula& f, std::span<const Mask> vars, std::vector<Mask>& slots) const {
        const auto& code = f.code();
        slots.resize(code.size());
        for (std::size_t i = 0; i < code.size(); ++i) {
            const auto& in = code[i];
            Mask& out = slots[i];
            switch (in.op) {
            case Op::Var: out = vars[in.index]; break;
            case Op::Top: out = all_; break;
            case Op::Bot: out.reset(); break;
            case Op::Not: out = all_ & ~slots[in.lhs]; break;
            case Op::And: out = slots[in.lhs] & slots[in.rhs]; break;
            case Op::Or: out = slots[in.lhs] | slots[in.rhs]; break;
            case Op::Implies: out = (all_ & ~slots[in.lhs]) | slots[in.rhs]; break;
            case Op::Know: out = knows(in.index, slots[in.lhs]); break;
            case Op::Today: out = today(slots[in.lhs]); break;
            case Op::KnI: out = interaction(slots[in.lhs]); break;
            case Op::Unc: out = interaction(slots[in.lhs]) & interaction(all_ & ~slots[in.lhs]); break;
            case Op::Next: out = next(slots[in.lhs]); break;
            case Op::Until: out = until(slots[in.lhs], slots[in.rhs]); break;
            case Op::Dist: out = distance(in.index, slots[in.lhs]); break;
            }
        }
    }

    Mask knows(std::size_t agent, const Mask& a) const {
        if (agent < 1 || agent > agents_) throw EvalError("agent K" + std::to_string(agent) + " exceeds model agents");
        Mask out;
        for (const auto& cls : agent_classes_[agent - 1])
            if ((cls & ~a).none()) out |= cls;
        return out;
    }

    Mask today(const Mask& a) const {
        Mask out;
        for (const auto& c : cluster_masks_)
            if ((c & ~a).none()) out |= c;
        return out;
    }

    Mask interaction(const Mask& a) const {
        Mask out;
        for (const auto& c : components_)
            if ((c & a).any()) out |= c;
        return out;
    }

    Mask next(const Mask& a) const {
        Mask out;
        for (std::size_t i = 0; i < group_masks_.size(); ++i) {
            if (!successor_[i] || (time_masks_[*successor_[i]] & ~a).none()) out |= group_masks_[i];
        }
        return out;
    }

    Mask until(const Mask& phi, const Mask& psi) const {
        const std::size_t T = time_masks_.size();
        std::vector<char> w(T, 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = T; k-- > 0;) {
                if (w[k]) continue;
                const bool witness = (time_masks_[k] & psi).any();
                const bool carried = (time_masks_[k] & ~phi).none() && successor_[k] && w[*successor_[k]];
                if (witness || carried) {
                    w[k] = 1;
                    changed = true;
                }
            }
        }
        Mask out = psi;
        for (std::size_t i = 0; i < T; ++i)
            if (successor_[i] && w[*successor_[i]]) out |= group_masks_[i] & phi;
        return out;
    }

    Mask distance(std::uint64_t k, const Mask& a) const {
        if (k == 0) return a;
        if (!has_strict_future()) throw EvalError("frame kernel built without strict futures");
        Mask e = a;
        for (std::uint64_t step = 1; step <= k; ++step) {
            Mask pre;
            for (std::size_t x = 0; x < n_; ++x)
                if ((strict_future_[x] & e).any()) pre.set(x);
            // From the first step on the sets only shrink; stop at the fixpoint.
            if (step > 1 && pre == e) break;
            e = pre;
        }
        return e;
    }

private:
    std::size_t n_;
    std::size_t agents_;
    Mask all_;
    std::vector<Mask> cluster_masks_;
    std::vector<std::vector<Mask>> agent_classes_;
    std::vector<Mask> components_;
    std::vector<Mask> time_masks_;
    std::vector<Mask> group_masks_;  // C(i) plus the chains of gap i
    std::vector<std::optional<std::size_t>> successor_;
    std::vector<Mask> strict_future_;
};

// ── truth assignments ───────────────────────────────────────────────────────

/// Truth per readout state (the quotient states, each at its own copy).
struct TruthAssignment {
    std::vector<std::string> states;
    std::vector<bool> values;

    std::size_t size() const noexcept { return values.size(); }
    bool all() const { return std::all_of(values.begin(), values.end(), [](bool b) { return b; }); }

    bool at(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return values[i];
        throw EvalError("unknown state \"" + name + "\"");
    }

    Json to_json() const {
        Json j = Json::object();
        for (std::size_t i = 0; i < states.size(); ++i) j[states[i]] = static_cast<bool>(values[i]);
        return j;
    }

    friend bool operator==(const TruthAssignment&, const TruthAssignment&) = default;
};

/// Default unrolling length for a looping model:
/// prefix + (dist_weight + next_count + until_count + 2) * period.
inline std::size_t stable_horizon(const Model& model, const Formula& f) {
    if (!model.spec().loop) throw EvalError("stable_horizon: model has no loop");
    auto m = metrics(f);
    return model.spec().prefix() + (m.dist_weight + m.next_count + m.until_count + 2) * model.spec().period();
}

namespace detail {

inline void check_agents(const Model& model, std::uint32_t max_agent) {
    if (max_agent > model.agents()) {
        throw EvalError("formula mentions agent " + std::to_string(max_agent) + " but the model has " +
                        std::to_string(model.agents()));
    }
}

template <std::size_t N>
std::vector<std::vector<bool>> eval_roots_with(const Model& model, const CompiledFormula& cf, std::size_t window) {
    FrameKernel<N> kernel(model.layout(), model.bridge_gaps(), window);
    std::vector<std::bitset<N>> vars(cf.variables().size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        auto it = model.valuation().find(cf.variables()[i]);
        if (it != model.valuation().end())
            for (auto s : it->second) vars[i].set(s);
    }
    std::vector<std::bitset<N>> slots;
    kernel.run(cf, vars, slots);
    std::vector<std::vector<bool>> out;
    for (auto r : cf.roots()) {
        std::vector<bool> v(kernel.state_count());
        for (std::size_t s = 0; s < v.size(); ++s) v[s] = slots[r].test(s);
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<std::vector<bool>> eval_roots(const Model& model, const CompiledFormula& cf, std::size_t window) {
    const std::size_t n = model.layout().state_count();
    if (n <= 64) return eval_roots_with<64>(model, cf, window);
    if (n <= 256) return eval_roots_with<256>(model, cf, window);
    if (n <= 1024) return eval_roots_with<1024>(model, cf, window);
    if (n <= 4096) return eval_roots_with<4096>(model, cf, window);
    throw EvalError("model has more than 4096 states");
}

/// Checks the requested horizon and returns the strict-future window (0 = none).
/// Largest default horizon over `fs`; every horizon at or above a formula's
/// own is stable for it, so one window serves the whole list.
inline std::size_t stable_horizon_all(const FrameSpec& spec, std::span<const Formula> fs) {
    std::size_t weight = 0;
    for (const auto& f : fs) {
        auto m = metrics(f);
        weight = std::max(weight, m.dist_weight + m.next_count + m.until_count);
    }
    return spec.prefix() + (weight + 2) * spec.period();
}

inline std::size_t resolve_window(const Model& model, std::span<const Formula> fs, std::uint32_t max_dist,
                                  std::optional<std::size_t> horizon) {
    const auto& layout = model.layout();
    const std::size_t T = layout.time_count();
    if (!layout.loop()) {
        if (horizon && *horizon != T) {
            throw EvalError("horizon " + std::to_string(*horizon) + " invalid: a loop-free frame is evaluated on its " +
                            std::to_string(T) + " time clusters");
        }
        return max_dist > 0 ? T : 0;
    }
    const std::size_t h = horizon.value_or(stable_horizon_all(model.spec(), fs));
    const std::size_t min = min_eval_horizon(layout, max_dist);
    if (h < min) {
        throw EvalError("horizon " + std::to_string(h) + " below the minimum " + std::to_string(min) +
                        " for this model and formula");
    }
    return max_dist > 0 ? h : 0;
}

} // namespace detail

inline TruthAssignment eval(const Model& model, const Formula& f, std::optional<std::size_t> horizon = {}) {
    CompiledFormula cf(f);
    detail::check_agents(model, cf.max_agent());
    const std::size_t window = detail::resolve_window(model, std::span(&f, 1), cf.max_dist(), horizon);
    TruthAssignment t;
    t.values = std::move(detail::eval_roots(model, cf, window).front());
    for (std::size_t s = 0; s < model.layout().state_count(); ++s) t.states.push_back(model.layout().state_name(s));
    return t;
}

/// Truth vectors (indexed by quotient state) of several formulas at once.
inline std::vector<std::vector<bool>> eval_many(const Model& model, const std::vector<Formula>& fs,
                                                std::optional<std::size_t> horizon = {}) {
    if (fs.empty()) return {};
    CompiledFormula cf(fs);
    detail::check_agents(model, cf.max_agent());
    const std::size_t window = detail::resolve_window(model, fs, cf.max_dist(), horizon);
    return detail::eval_roots(model, cf, window);
}

/// Evaluates a fixed list of formulas under many valuations of one frame,
/// building the frame kernel once.  Uses the default horizon of eval_many.
class FrameEvaluator {
public:
    FrameEvaluator(const FrameLayout& layout, bool bridge_gaps, const std::vector<Formula>& fs) : cf_(fs) {
        if (cf_.max_agent() > layout.agents()) {
            throw EvalError("formula mentions agent " + std::to_string(cf_.max_agent()) + " but the frame has " +
                            std::to_string(layout.agents()));
        }
        std::size_t window = 0;
        if (cf_.max_dist() > 0) {
            window = layout.time_count();
            if (layout.loop()) window = detail::stable_horizon_all(layout.spec(), fs);
        }
        const std::size_t n = layout.state_count();
        if (n <= 64) kernel_.emplace<FrameKernel<64>>(layout, bridge_gaps, window);
        else if (n <= 256) kernel_.emplace<FrameKernel<256>>(layout, bridge_gaps, window);
        else throw EvalError("frame evaluator: more than 256 states");
    }

    /// Truth vectors (indexed by quotient state), one per formula.
    std::vector<std::vector<bool>> operator()(const Valuation& v) const {
        if (auto* k = std::get_if<FrameKernel<64>>(&kernel_)) return run(*k, v);
        return run(std::get<FrameKernel<256>>(kernel_), v);
    }

private:
    CompiledFormula cf_;
    std::variant<std::monostate, FrameKernel<64>, FrameKernel<256>> kernel_;

    template <std::size_t N>
    std::vector<std::vector<bool>> run(const FrameKernel<N>& kernel, const Valuation& v) const {
        std::vector<std::bitset<N>> vars(cf_.variables().size()), slots;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            auto it = v.find(cf_.variables()[i]);
            if (it == v.end()) continue;
            for (auto s : it->second) {
                if (s >= kernel.state_count()) throw EvalError("valuation: unknown state id");
                vars[i].set(s);
            }
        }
        kernel.run(cf_, vars, slots);
        std::vector<std::vector<bool>> out;
        for (auto r : cf_.roots()) {
            std::vector<bool> t(kernel.state_count());
            for (std::size_t s = 0; s < t.size(); ++s) t[s] = slots[r].test(s);
            out.push_back(std::move(t));
        }
        return out;
    }
};

inline bool holds_at(const Model& model, const std::string& state, const Formula& f) {
    if (!model.layout().find_state(state)) throw EvalError("unknown state \"" + state + "\"");
    return eval(model, f).at(state);
}

inline bool valid_in_model(const Model& model, const Formula& f, std::optional<std::size_t> horizon = {}) {
    return eval(model, f, horizon).all();
}

} // namespace tempagent
