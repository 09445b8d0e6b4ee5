// tempagent/decide.hpp: bounded satisfiability, theoremhood and rule refutation
//
// Frames come from FrameEnumerator in canonical order; for each frame every
// valuation of the query's variables is tried.  Renaming states inside one
// cluster is a frame automorphism, so per cluster only the lexicographically
// greatest coloring of each orbit is visited (prune_symmetry).  The first hit in
// that order is the witness, which makes results deterministic.

#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tempagent/enumerate.hpp"
#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/model.hpp"
#include "tempagent/rules.hpp"
#include "tempagent/semantics.hpp"

namespace tempagent {

inline constexpr unsigned long long default_search_cap = 1ull << 30;

struct SearchOptions {
    bool prune_symmetry = true;
    bool bridge_gaps = true;
    unsigned long long cap = default_search_cap;  // candidate models (frame, valuation)
};

struct Witness {
    Model model;
    std::string state;
};

struct ExhaustedBounds {
    SearchBounds bounds;
};

struct SearchOutcome {
    std::variant<Witness, ExhaustedBounds> verdict;
    SearchBounds bounds;
    std::uint64_t frames_checked = 0;
    std::uint64_t candidates = 0;

    bool found() const noexcept { return std::holds_alternative<Witness>(verdict); }
    const Witness& witness() const { return std::get<Witness>(verdict); }
};

inline Json bounds_to_json(const SearchBounds& b) {
    return Json{{"max_time_clusters", b.max_time_clusters}, {"max_cluster_size", b.max_cluster_size},
                {"max_chains_per_gap", b.max_chains_per_gap}, {"max_chain_length", b.max_chain_length},
                {"allow_loop", b.allow_loop}, {"agents", b.agents}};
}

inline Json outcome_to_json(const SearchOutcome& o) {
    Json j;
    if (o.found()) {
        j["verdict"] = "witness";
        j["state"] = o.witness().state;
        j["model"] = model_to_json(o.witness().model);
    } else {
        j["verdict"] = "exhausted_bounds";
    }
    j["bounds"] = bounds_to_json(o.bounds);
    j["frames_checked"] = o.frames_checked;
    j["candidates"] = o.candidates;
    return j;
}

/// Default bounds for a query mentioning agents up to `max_agent`.
inline SearchBounds default_bounds(std::uint32_t max_agent) {
    SearchBounds b;
    b.agents = std::max<std::uint32_t>(1, max_agent);
    return b;
}

namespace detail {

/// Per cluster type and variable count: one coloring per orbit of the
/// automorphism group (its lexicographically greatest member), each coloring
/// a vector of per-state variable bits.
class ColoringTable {
public:
    ColoringTable(const ClusterCatalog& catalog, std::size_t vars, bool prune) {
        const std::uint32_t colors = 1u << vars;
        for (const auto& t : catalog.types()) {
            std::vector<std::vector<std::uint32_t>> reps;
            std::vector<std::uint32_t> c(t.size, 0);
            for (;;) {
                bool rep = true;
                if (prune) {
                    for (const auto& p : t.automorphisms) {
                        std::vector<std::uint32_t> img(t.size);
                        for (std::size_t x = 0; x < t.size; ++x) img[p[x]] = c[x];
                        if (img > c) {
                            rep = false;
                            break;
                        }
                    }
                }
                if (rep) reps.push_back(c);
                std::size_t k = t.size;
                // Odometer with the last state fastest, so reps come out sorted.
                while (k > 0 && ++c[k - 1] == colors) c[--k] = 0;
                if (k == 0) break;
            }
            table_.push_back(std::move(reps));
        }
    }

    const std::vector<std::vector<std::uint32_t>>& operator[](std::size_t type) const { return table_[type]; }

private:
    std::vector<std::vector<std::vector<std::uint32_t>>> table_;
};

/// What a candidate (frame, valuation) must exhibit, given the truth sets.
template <std::size_t N>
using Checker = std::function<std::optional<std::size_t>(const std::vector<std::bitset<N>>& slots,
                                                         const std::bitset<N>& all)>;

template <std::size_t N>
SearchOutcome search(const CompiledFormula& cf, const std::vector<std::uint32_t>& variables, const SearchBounds& bounds,
                     const SearchOptions& opts, const Checker<N>& check) {
    using Mask = std::bitset<N>;
    FrameEnumerator frames(bounds);
    ColoringTable colorings(frames.catalog(), variables.size(), opts.prune_symmetry);
    SearchOutcome out{ExhaustedBounds{bounds}, bounds};

    // Variables of the compiled formula that are search variables.
    std::vector<std::size_t> slot_of(cf.variables().size());
    for (std::size_t i = 0; i < cf.variables().size(); ++i) {
        auto it = std::find(variables.begin(), variables.end(), cf.variables()[i]);
        if (it == variables.end()) throw std::logic_error("search: variable outside the valuation scope");
        slot_of[i] = static_cast<std::size_t>(it - variables.begin());
    }

    std::optional<Witness> found;
    frames.for_each([&](const FrameShape& shape) {
        ++out.frames_checked;
        FrameSpec spec = build_spec(shape, frames.catalog());
        FrameLayout layout(spec);
        const std::size_t window = cf.max_dist() > 0 ? min_eval_horizon(layout, cf.max_dist()) : 0;
        FrameKernel<N> kernel(layout, opts.bridge_gaps, window);

        // Cluster types in layout order (C(0), gap-0 chains, C(1), ...).
        std::vector<std::size_t> types;
        for (std::size_t i = 0; i < shape.time.size(); ++i) {
            types.push_back(shape.time[i]);
            if (i < shape.gaps.size())
                for (const auto& ch : shape.gaps[i].chains) types.insert(types.end(), ch.begin(), ch.end());
        }
        // contrib[c][d][v]: states of cluster c where variable v holds under coloring d.
        const auto& clusters = layout.clusters();
        std::vector<std::vector<std::vector<Mask>>> contrib(types.size());
        for (std::size_t c = 0; c < types.size(); ++c) {
            for (const auto& col : colorings[types[c]]) {
                std::vector<Mask> per_var(variables.size());
                for (std::size_t x = 0; x < col.size(); ++x)
                    for (std::size_t v = 0; v < variables.size(); ++v)
                        if ((col[x] >> v) & 1u) per_var[v].set(clusters[c].states[x]);
                contrib[c].push_back(std::move(per_var));
            }
        }
        std::vector<std::size_t> digit(types.size(), 0);
        std::vector<Mask> var_masks(variables.size()), inputs(cf.variables().size()), slots;
        for (;;) {
            if (++out.candidates > opts.cap) throw CapExceeded("candidate models (frame x valuation)", opts.cap);
            for (std::size_t v = 0; v < variables.size(); ++v) {
                var_masks[v].reset();
                for (std::size_t c = 0; c < types.size(); ++c) var_masks[v] |= contrib[c][digit[c]][v];
            }
            for (std::size_t i = 0; i < inputs.size(); ++i) inputs[i] = var_masks[slot_of[i]];
            kernel.run(cf, inputs, slots);
            if (auto state = check(slots, kernel.all())) {
                Valuation val;
                for (std::size_t v = 0; v < variables.size(); ++v)
                    for (std::size_t s = 0; s < layout.state_count(); ++s)
                        if (var_masks[v].test(s)) val[variables[v]].insert(s);
                found = Witness{Model(spec, std::move(val), opts.bridge_gaps), layout.state_name(*state)};
                return false;
            }
            std::size_t k = types.size();
            while (k > 0 && ++digit[k - 1] == colorings[types[k - 1]].size()) digit[--k] = 0;
            if (k == 0) break;
        }
        return true;
    });
    if (found) out.verdict = std::move(*found);
    return out;
}

template <std::size_t N>
std::optional<std::size_t> first_set(const std::bitset<N>& m) {
    if (m.none()) return std::nullopt;
    for (std::size_t s = 0; s < N; ++s)
        if (m.test(s)) return s;
    return std::nullopt;
}

/// Runs `body<N>()` with the smallest bitset width covering the bounds.
template <class Body>
SearchOutcome dispatch_width(const SearchBounds& bounds, Body&& body) {
    bounds.check();
    const std::size_t n = bounds.max_states();
    if (n <= 64) return body.template operator()<64>();
    if (n <= 256) return body.template operator()<256>();
    throw std::invalid_argument("bounds allow more than 256 states per frame");
}

inline void check_bound_agents(const SearchBounds& bounds, std::uint32_t max_agent) {
    if (max_agent > bounds.agents) {
        throw EvalError("query mentions agent " + std::to_string(max_agent) + " but the bounds allow " +
                        std::to_string(bounds.agents));
    }
}

inline std::vector<std::uint32_t> sorted_vars(const std::set<std::uint32_t>& s) { return {s.begin(), s.end()}; }

} // namespace detail

/// A model and state where f holds.
inline SearchOutcome sat_bounded(const Formula& f, const SearchBounds& bounds, const SearchOptions& opts = {}) {
    CompiledFormula cf(f);
    detail::check_bound_agents(bounds, cf.max_agent());
    const auto root = cf.roots().front();
    return detail::dispatch_width(bounds, [&]<std::size_t N>() {
        detail::Checker<N> check = [root](const std::vector<std::bitset<N>>& slots, const std::bitset<N>&) {
            return detail::first_set(slots[root]);
        };
        return detail::search<N>(cf, cf.variables(), bounds, opts, check);
    });
}

inline SearchOutcome sat_bounded(const Formula& f, const SearchOptions& opts = {}) {
    return sat_bounded(f, default_bounds(metrics(f).max_agent), opts);
}

/// A countermodel: a model and state where f fails.
inline SearchOutcome theorem_bounded(const Formula& f, const SearchBounds& bounds, const SearchOptions& opts = {}) {
    CompiledFormula cf(f);
    detail::check_bound_agents(bounds, cf.max_agent());
    const auto root = cf.roots().front();
    return detail::dispatch_width(bounds, [&]<std::size_t N>() {
        detail::Checker<N> check = [root](const std::vector<std::bitset<N>>& slots, const std::bitset<N>& all) {
            return detail::first_set(all & ~slots[root]);
        };
        return detail::search<N>(cf, cf.variables(), bounds, opts, check);
    });
}

inline SearchOutcome theorem_bounded(const Formula& f, const SearchOptions& opts = {}) {
    return theorem_bounded(f, default_bounds(metrics(f).max_agent), opts);
}

/// A model where every premise holds everywhere and the conclusion fails
/// somewhere; the witness state is the first failing one.
inline SearchOutcome refute_rule_bounded(const InferenceRule& r, const SearchBounds& bounds,
                                         const SearchOptions& opts = {}) {
    std::vector<Formula> roots = r.premises;
    roots.push_back(r.conclusion);
    CompiledFormula cf(roots);
    detail::check_bound_agents(bounds, cf.max_agent());
    const auto vars = detail::sorted_vars(r.variables());
    return detail::dispatch_width(bounds, [&]<std::size_t N>() {
        const auto rs = cf.roots();
        detail::Checker<N> check = [rs](const std::vector<std::bitset<N>>& slots,
                                        const std::bitset<N>& all) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i + 1 < rs.size(); ++i)
                if (slots[rs[i]] != all) return std::nullopt;
            return detail::first_set(all & ~slots[rs.back()]);
        };
        return detail::search<N>(cf, vars, bounds, opts, check);
    });
}

inline SearchOutcome refute_rule_bounded(const ReducedNormalFormRule& rnf, const SearchBounds& bounds,
                                         const SearchOptions& opts = {}) {
    std::vector<Formula> roots;
    for (const auto& a : rnf.atoms()) roots.push_back(a.formula());
    CompiledFormula cf(roots);
    detail::check_bound_agents(bounds, cf.max_agent());
    std::vector<std::uint32_t> vars(rnf.variable_count());
    std::iota(vars.begin(), vars.end(), 1u);
    const std::size_t x1 = 0;  // atom 0 is x1 in schema order
    return detail::dispatch_width(bounds, [&]<std::size_t N>() {
        const auto rs = cf.roots();
        detail::Checker<N> check = [&rnf, rs, x1](const std::vector<std::bitset<N>>& slots,
                                                  const std::bitset<N>& all) -> std::optional<std::size_t> {
            auto failing = all & ~slots[rs[x1]];
            if (failing.none()) return std::nullopt;
            std::vector<std::uint64_t> row(rnf.words());
            for (std::size_t s = 0; s < N && s < all.size(); ++s) {
                if (!all.test(s)) break;
                std::fill(row.begin(), row.end(), 0);
                for (std::size_t a = 0; a < rs.size(); ++a)
                    if (slots[rs[a]].test(s)) row[a / 64] |= 1ull << (a % 64);
                if (!rnf.contains(row)) return std::nullopt;
            }
            return detail::first_set(failing);
        };
        return detail::search<N>(cf, vars, bounds, opts, check);
    });
}

} // namespace tempagent
