#include <gtest/gtest.h>

#include "support.hpp"
#include "tempagent/decide.hpp"
#include "tempagent/oracle.hpp"

using namespace tempagent;

namespace {

SearchBounds bounds(std::size_t T, std::size_t S, std::size_t C, std::size_t L, bool loop, std::uint32_t m = 1) {
    return {.max_time_clusters = T, .max_cluster_size = S, .max_chains_per_gap = C, .max_chain_length = L,
            .allow_loop = loop, .agents = m};
}

const SearchBounds tiny = bounds(2, 2, 0, 1, true);
const SearchBounds small = bounds(2, 3, 1, 1, true);

bool sat(const std::string& f, const SearchBounds& b = small) { return sat_bounded(parse(f), b).found(); }
bool countermodel(const std::string& f, const SearchBounds& b = small) { return theorem_bounded(parse(f), b).found(); }

// Witness checks through the oracle, which shares no code with the search kernel.
void expect_sat_witness(const Formula& f, const SearchOutcome& o) {
    ASSERT_TRUE(o.found());
    EXPECT_TRUE(oracle_eval(o.witness().model, f).at(o.witness().state)) << to_string(f);
    EXPECT_TRUE(holds_at(o.witness().model, o.witness().state, f)) << to_string(f);
}

void expect_countermodel(const Formula& f, const SearchOutcome& o) {
    ASSERT_TRUE(o.found());
    EXPECT_FALSE(oracle_eval(o.witness().model, f).at(o.witness().state)) << to_string(f);
}

void expect_rule_refutation(const InferenceRule& r, const SearchOutcome& o) {
    ASSERT_TRUE(o.found());
    const Model& m = o.witness().model;
    for (const auto& p : r.premises) EXPECT_TRUE(oracle_eval(m, p).all()) << to_string(r);
    EXPECT_FALSE(oracle_eval(m, r.conclusion).at(o.witness().state)) << to_string(r);
}

} // namespace

TEST(Sat, ContradictionIsExhausted) {
    for (const auto& b : {tiny, small, bounds(3, 2, 1, 1, true)}) {
        auto o = sat_bounded(parse("x1 & ~x1"), b);
        EXPECT_FALSE(o.found());
        EXPECT_EQ(o.frames_checked, FrameEnumerator(b).count());
        EXPECT_EQ(std::get<ExhaustedBounds>(o.verdict).bounds, b);
    }
}

TEST(Sat, UncertaintyWitness) {
    auto f = parse("Unc x1");
    auto o = sat_bounded(f, default_bounds(1));
    expect_sat_witness(f, o);
    const auto& spec = o.witness().model.spec();
    ASSERT_EQ(spec.time_count(), 1u);
    EXPECT_FALSE(spec.loop);
    EXPECT_EQ(spec.time_clusters[0].states, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(spec.time_clusters[0].partitions[0], (Partition{{"a", "b"}}));
    EXPECT_EQ(o.witness().model.valuation(), (Valuation{{1, {0}}}));
    EXPECT_EQ(o.witness().state, "t0.a");
}

TEST(Sat, UncertaintyWithKnowledgeIsExhaustedForOneAgent) {
    EXPECT_FALSE(sat("Unc x1 & K1 x1"));
    EXPECT_FALSE(sat("Unc x1 & K1 x1", bounds(1, 4, 0, 1, false)));
    // Two agents can disagree: agent 2 links the x1-state to a ~x1-state.
    auto o = sat_bounded(parse("Unc x1 & K1 x1"), bounds(1, 3, 0, 1, false, 2));
    expect_sat_witness(parse("Unc x1 & K1 x1"), o);
}

TEST(Theorem, ReflexivityHolds) {
    EXPECT_FALSE(countermodel("K1 x1 -> x1"));
    EXPECT_FALSE(countermodel("Today x1 -> x1"));
    EXPECT_FALSE(countermodel("x1 -> KnI x1", bounds(2, 2, 1, 1, true)));
    EXPECT_FALSE(countermodel("Unc x1 -> ~Today x1", bounds(2, 2, 1, 1, true)));
    EXPECT_FALSE(countermodel("x2 -> x1 Until x2", bounds(2, 2, 1, 1, true)));
}

TEST(Theorem, KnowledgeIsNotTruth) {
    auto f = parse("x1 -> K1 x1");
    auto o = theorem_bounded(f, default_bounds(1));
    expect_countermodel(f, o);
    const auto& spec = o.witness().model.spec();
    ASSERT_EQ(spec.time_count(), 1u);
    EXPECT_EQ(spec.time_clusters[0].states.size(), 2u);
    EXPECT_EQ(spec.time_clusters[0].partitions[0], (Partition{{"a", "b"}}));
    EXPECT_EQ(o.witness().model.valuation(), (Valuation{{1, {0}}}));
    EXPECT_EQ(o.witness().state, "t0.a");
}

TEST(Theorem, AgentsDoNotShareKnowledge) {
    auto f = parse("K1 x1 -> K2 x1");
    expect_countermodel(f, theorem_bounded(f, default_bounds(2)));
}

TEST(Theorem, QueryAgentsMustFitBounds) {
    EXPECT_THROW(theorem_bounded(parse("K2 x1"), tiny), EvalError);
    EXPECT_THROW(sat_bounded(parse("K1 x1"), bounds(0, 1, 0, 1, false)), std::invalid_argument);
}

TEST(Theorem, NextNeedsTheLoop) {
    // On loop-free frames the last cluster makes N false true somewhere.
    EXPECT_TRUE(sat("N false", tiny));
    EXPECT_FALSE(countermodel("~N false | N true", tiny));
    EXPECT_TRUE(countermodel("~N false", bounds(2, 2, 0, 1, false)));
}

TEST(Rules, IdentityRuleIsNotRefuted) {
    EXPECT_FALSE(refute_rule_bounded(parse_rule("x1 |- x1"), small).found());
}

TEST(Rules, TautologyPremiseRefutedByEmptyValuation) {
    auto r = parse_rule("x1 -> x1 |- x1");
    auto o = refute_rule_bounded(r, small);
    expect_rule_refutation(r, o);
    EXPECT_EQ(o.witness().model.layout().state_count(), 1u);
    EXPECT_TRUE(o.witness().model.valuation().empty());
    EXPECT_EQ(o.frames_checked, 1u);
}

TEST(Rules, ReducedFormAgreesAtTinyBounds) {
    for (const auto& text : tempagent::testing::rule_corpus()) {
        auto r = parse_rule(text);
        auto rnf = to_reduced_normal_form(r);
        auto b = tiny;
        b.agents = std::max<std::uint32_t>(1, r.max_agent());
        auto a = refute_rule_bounded(r, b);
        auto c = refute_rule_bounded(rnf, b);
        ASSERT_EQ(a.found(), c.found()) << text;
        if (a.found()) expect_rule_refutation(r, a);
        if (c.found()) {
            const Model& m = c.witness().model;
            EXPECT_FALSE(rnf_valid_in_model(m, rnf)) << text;
        }
    }
}

// ── properties over the formula corpus ──────────────────────────────────────

TEST(Search, PruningPreservesVerdicts) {
    for (const auto& text : tempagent::testing::formula_corpus()) {
        Formula f = parse(text);
        for (const auto& b : {tiny, bounds(1, 3, 0, 1, true), bounds(2, 1, 1, 1, true)}) {
            auto pruned = sat_bounded(f, b);
            auto full = sat_bounded(f, b, {.prune_symmetry = false});
            ASSERT_EQ(pruned.found(), full.found()) << text;
            if (!pruned.found()) {
                EXPECT_LE(pruned.candidates, full.candidates);
            }
            auto tp = theorem_bounded(f, b);
            auto tf = theorem_bounded(f, b, {.prune_symmetry = false});
            ASSERT_EQ(tp.found(), tf.found()) << text;
            // Symmetric orbits never change the first frame that has a witness.
            if (pruned.found()) {
                EXPECT_EQ(pruned.witness().model.spec(), full.witness().model.spec()) << text;
            }
        }
    }
}

TEST(Search, WitnessesRevalidate) {
    for (const auto& text : tempagent::testing::formula_corpus()) {
        Formula f = parse(text);
        auto s = sat_bounded(f, small);
        if (s.found()) expect_sat_witness(f, s);
        auto t = theorem_bounded(f, small);
        if (t.found()) expect_countermodel(f, t);
    }
}

TEST(Search, SatIsDualToCountermodel) {
    for (const auto& text : tempagent::testing::formula_corpus()) {
        Formula f = parse(text);
        ASSERT_EQ(sat_bounded(f, small).found(), theorem_bounded(neg(f), small).found()) << text;
        ASSERT_EQ(sat_bounded(neg(f), small).found(), theorem_bounded(f, small).found()) << text;
    }
}

TEST(Search, LargerBoundsNeverLoseWitnesses) {
    const std::vector<SearchBounds> chain = {bounds(1, 1, 0, 1, false), bounds(1, 2, 0, 1, false), tiny,
                                             bounds(2, 2, 1, 1, true), small};
    for (const auto& text : tempagent::testing::formula_corpus()) {
        Formula f = parse(text);
        bool seen_sat = false, seen_cm = false;
        for (const auto& b : chain) {
            bool s = sat_bounded(f, b).found(), c = theorem_bounded(f, b).found();
            ASSERT_TRUE(s || !seen_sat) << text;
            ASSERT_TRUE(c || !seen_cm) << text;
            seen_sat = s;
            seen_cm = c;
        }
    }
}

TEST(Search, TheoremMatchesRuleRefutation) {
    for (const auto& text : tempagent::testing::formula_corpus()) {
        Formula f = parse(text);
        ASSERT_EQ(theorem_bounded(f, tiny).found(), refute_rule_bounded(formula_to_rule(f), tiny).found()) << text;
    }
}

TEST(Search, Deterministic) {
    for (const auto& text : {"Unc x1", "x1 Until x2", "N (x1 Until Unc x2)", "D1 D1 x1"}) {
        auto a = sat_bounded(parse(text), small);
        auto b = sat_bounded(parse(text), small);
        EXPECT_EQ(outcome_to_json(a).dump(), outcome_to_json(b).dump()) << text;
    }
}

TEST(Search, CapIsEnforced) {
    EXPECT_THROW(sat_bounded(parse("x1 & ~x1"), small, {.cap = 100}), CapExceeded);
    EXPECT_NO_THROW(sat_bounded(parse("Unc x1"), small, {.cap = 100}));
}

TEST(Search, WithoutGapBridging) {
    SearchOptions opts{.bridge_gaps = false};
    auto f = parse("x1 Until x2");
    auto o = sat_bounded(f, small, opts);
    ASSERT_TRUE(o.found());
    EXPECT_FALSE(o.witness().model.bridge_gaps());
    EXPECT_TRUE(oracle_eval(o.witness().model, f).at(o.witness().state));
}

TEST(Outcome, JsonShape) {
    auto w = outcome_to_json(sat_bounded(parse("Unc x1"), small));
    EXPECT_EQ(w["verdict"], "witness");
    EXPECT_EQ(w["state"], "t0.a");
    EXPECT_EQ(model_from_json(w["model"]).layout().state_count(), 2u);
    EXPECT_EQ(w["bounds"]["max_cluster_size"], 3);
    auto e = outcome_to_json(sat_bounded(parse("false"), tiny));
    EXPECT_EQ(e["verdict"], "exhausted_bounds");
    EXPECT_FALSE(e.contains("model"));
    EXPECT_EQ(e["frames_checked"], FrameEnumerator(tiny).count());
}
