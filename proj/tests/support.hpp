// Shared generators and corpora for the test suites.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tempagent/formula.hpp"
#include "tempagent/frame.hpp"
#include "tempagent/model.hpp"
#include "tempagent/parser.hpp"

namespace tempagent::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random formula with at most `budget` nodes over x1..x<vars>, agents 1..agents.
inline Formula random_formula(Rng& rng, std::size_t budget, std::uint32_t vars, std::uint32_t agents,
                              std::uint32_t max_k = 2) {
    if (budget <= 1) {
        auto r = pick(rng, 0, 9);
        if (r == 0) return top();
        if (r == 1) return bot();
        return var(static_cast<std::uint32_t>(pick(rng, 1, vars)));
    }
    auto choice = pick(rng, 0, 12);
    if (budget == 2 && choice >= 9) choice = pick(rng, 0, 8);
    switch (choice) {
    case 0: return neg(random_formula(rng, budget - 1, vars, agents, max_k));
    case 1: return knows(static_cast<std::uint32_t>(pick(rng, 1, agents)), random_formula(rng, budget - 1, vars, agents, max_k));
    case 2: return next(random_formula(rng, budget - 1, vars, agents, max_k));
    case 3: return dist(static_cast<std::uint32_t>(pick(rng, 0, max_k)), random_formula(rng, budget - 1, vars, agents, max_k));
    case 4: return today(random_formula(rng, budget - 1, vars, agents, max_k));
    case 5: return kni(random_formula(rng, budget - 1, vars, agents, max_k));
    case 6: return unc(random_formula(rng, budget - 1, vars, agents, max_k));
    case 7: return neg(random_formula(rng, budget - 1, vars, agents, max_k));
    case 8: return random_formula(rng, 1, vars, agents, max_k);
    default: {
        std::size_t left = pick(rng, 1, budget - 2);
        Formula a = random_formula(rng, left, vars, agents, max_k);
        Formula b = random_formula(rng, budget - 1 - left, vars, agents, max_k);
        switch (choice) {
        case 9: return conj(a, b);
        case 10: return disj(a, b);
        case 11: return implies(a, b);
        default: return until(a, b);
        }
    }
    }
}

inline Cluster random_cluster(Rng& rng, std::size_t size, std::uint32_t agents, std::string prefix) {
    Cluster c;
    for (std::size_t i = 0; i < size; ++i) c.states.push_back(prefix + std::to_string(i));
    for (std::uint32_t j = 0; j < agents; ++j) {
        std::vector<std::size_t> label(size);
        std::size_t blocks = 0;
        for (std::size_t i = 0; i < size; ++i) {
            label[i] = pick(rng, 0, blocks);  // restricted growth string
            if (label[i] == blocks) ++blocks;
        }
        Partition p(blocks);
        for (std::size_t i = 0; i < size; ++i) p[label[i]].push_back(c.states[i]);
        c.partitions.push_back(std::move(p));
    }
    return c;
}

struct RandomModelShape {
    std::size_t max_states = 12;
    std::uint32_t max_agents = 3;
    std::size_t max_time = 3;
    std::size_t max_chains = 1;
    std::size_t max_chain_length = 1;
    bool allow_loop = true;
    bool force_loop = false;
    std::uint32_t vars = 2;
};

/// Random model within the shape; the total state count never exceeds max_states.
inline Model random_model(Rng& rng, const RandomModelShape& shape = {}) {
    FrameSpec spec;
    spec.agents = static_cast<std::uint32_t>(pick(rng, 1, shape.max_agents));
    const std::size_t T = pick(rng, 1, shape.max_time);
    const bool loop = shape.force_loop || (shape.allow_loop && pick(rng, 0, 1) == 1);
    if (loop) spec.loop = pick(rng, 0, T - 1);
    const std::size_t gaps = loop ? T : T - 1;

    std::size_t budget = shape.max_states;
    // Reserve one state per time cluster so every cluster gets at least one.
    std::vector<std::size_t> sizes(T, 1);
    budget -= T;
    for (auto& s : sizes) {
        std::size_t extra = pick(rng, 0, std::min<std::size_t>(budget, 2));
        s += extra;
        budget -= extra;
    }
    for (std::size_t i = 0; i < T; ++i)
        spec.time_clusters.push_back(random_cluster(rng, sizes[i], spec.agents, "s"));
    for (std::size_t g = 0; g < gaps; ++g) {
        Gap gap;
        std::size_t chains = pick(rng, 0, shape.max_chains);
        for (std::size_t c = 0; c < chains && budget > 0; ++c) {
            Chain chain;
            std::size_t len = pick(rng, 1, shape.max_chain_length);
            for (std::size_t p = 0; p < len && budget > 0; ++p) {
                std::size_t sz = pick(rng, 1, std::min<std::size_t>(budget, 2));
                budget -= sz;
                chain.clusters.push_back(random_cluster(rng, sz, spec.agents, "c"));
            }
            gap.chains.push_back(std::move(chain));
        }
        spec.gaps.push_back(std::move(gap));
    }

    FrameLayout layout(spec);
    Valuation v;
    for (std::uint32_t x = 1; x <= shape.vars; ++x) {
        for (std::size_t s = 0; s < layout.state_count(); ++s)
            if (pick(rng, 0, 1)) v[x].insert(s);
    }
    return Model(std::move(spec), std::move(v));
}

/// Fixed corpus covering every connective, over x1, x2 and agent 1.
inline const std::vector<std::string>& formula_corpus() {
    static const std::vector<std::string> c{
        "x1", "~x1", "true", "false", "x1 & x2", "x1 | x2", "x1 -> x2", "x1 -> x1",
        "K1 x1", "K1 x1 -> x1", "x1 -> K1 x1", "~K1 ~x1", "N x1", "N ~x1", "N N x1",
        "N false", "x1 Until x2", "x2 Until x1", "true Until x1", "x1 Until false",
        "true Until N false", "D0 x1", "D1 x1", "D2 x1", "D1 ~x1", "D1 D1 x1",
        "Today x1", "Today x1 -> x1", "~Today ~x1", "KnI x1", "x1 -> KnI x1", "KnI ~x1",
        "Unc x1", "Unc x1 -> ~Today x1", "Unc (x1 & x2)", "Unc true",
        "K1 (x1 Until x2)", "N (x1 Until Unc x2)", "Today (D1 x1 | N x2)", "KnI (x1 & N ~x2) & Unc x2",
    };
    return c;
}

/// Rules whose reduced normal forms stay under the default cap.
inline const std::vector<std::string>& rule_corpus() {
    static const std::vector<std::string> rules = {
        "x1 -> x1 |- x1",          "x1 |- x1",                "x1 -> x1 |- x2 | ~x2",
        "x1 |- K1 x1",             "K1 x1 |- x1",             "x1 |- N x1",
        "N x1 |- x1",              "x1 |- Unc x1",            "Unc x1 |- x1",
        "x1 |- KnI x1",            "KnI x1 |- x1",            "x1 |- Today x1",
        "Today x1 |- x1",          "x1 |- D1 x1",             "D1 x1 |- x1",
        "x1 |- D0 x1",             "x2 |- x1",                "x1 ; x2 |- x1",
        "~x1 |- x1",               "x1 |- ~x1",               "x1 |- x1 Until x1",
        "x1 Until x1 |- x1",       "x1 |- ~~x1",              "x1 & x2 |- x1",
        "x1 | x2 |- x1",           "x1 -> x1 |- true",        "x1 -> x1 |- false",
        "true |- x1",              "false |- x1",             "K1 x1 |- K1 x1",
        "x1 ; ~x1 |- x1",          "x1 -> x1 |- K1 x1 -> x1", "x1 -> x1 |- x1 -> K1 x1",
        "x1 |- x1 Until x2",       "x1 Until x2 |- x2",       "x1 |- N N x1",
        "Unc x1 |- KnI x1",        "KnI x1 |- Unc x1",        "x1 ; N x1 |- D1 x1",
        "x1 & K1 x1 |- Today x1",  "Today x1 |- K1 x1",       "N false |- x1",
        "x1 -> x1 |- N true",      "x1 -> x1 |- ~Today x1 | x1", "K1 x1 |- K1 K1 x1",
        "~K1 x1 |- K1 ~K1 x1",     "x1 |- Unc x1 | Today x1", "D1 x1 |- N x1",
        "N x1 |- D1 x1",           "x1 -> x1 |- Unc x1 -> ~Today x1",
    };
    return rules;
}

} // namespace tempagent::testing
