#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "tempagent/enumerate.hpp"
#include "tempagent/model.hpp"

using namespace tempagent;

namespace {

SearchBounds bounds(std::size_t T, std::size_t S, std::size_t C, std::size_t L, bool loop, std::uint32_t m = 1) {
    return {.max_time_clusters = T, .max_cluster_size = S, .max_chains_per_gap = C, .max_chain_length = L,
            .allow_loop = loop, .agents = m};
}

// ── independent brute-force generator ───────────────────────────────────────
// A labeled cluster is n states 0..n-1 and one set partition per agent; its
// canonical key is the least relabeled form over all n! renamings.

using Blocks = std::vector<std::vector<int>>;
using LabeledCluster = std::vector<Blocks>;

std::vector<Blocks> set_partitions(int n) {
    std::vector<Blocks> out;
    Blocks cur;
    std::function<void(int)> go = [&](int i) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (std::size_t k = 0; k < cur.size(); ++k) {
            cur[k].push_back(i);
            go(i + 1);
            cur[k].pop_back();
        }
        cur.push_back({i});
        go(i + 1);
        cur.pop_back();
    };
    go(0);
    return out;
}

Blocks normalize(Blocks b) {
    for (auto& x : b) std::sort(x.begin(), x.end());
    std::sort(b.begin(), b.end());
    return b;
}

std::vector<LabeledCluster> canonical_clusters(int max_size, std::uint32_t agents) {
    std::set<std::pair<int, LabeledCluster>> keys;
    for (int n = 1; n <= max_size; ++n) {
        auto parts = set_partitions(n);
        std::vector<std::size_t> pick(agents, 0);
        for (;;) {
            LabeledCluster c;
            for (auto p : pick) c.push_back(normalize(parts[p]));
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::optional<LabeledCluster> best;
            do {
                LabeledCluster r;
                for (const auto& blocks : c) {
                    Blocks rb = blocks;
                    for (auto& b : rb)
                        for (auto& s : b) s = perm[s];
                    r.push_back(normalize(rb));
                }
                if (!best || r < *best) best = r;
            } while (std::next_permutation(perm.begin(), perm.end()));
            keys.insert({n, *best});
            std::size_t k = 0;
            while (k < agents && ++pick[k] == parts.size()) pick[k++] = 0;
            if (k == agents) break;
        }
    }
    std::vector<LabeledCluster> out;
    for (const auto& [n, c] : keys) out.push_back(c);
    return out;
}

// Frames up to per-cluster renaming; chains within a gap form a multiset.
std::size_t brute_force_count(const SearchBounds& b) {
    const auto types = canonical_clusters(static_cast<int>(b.max_cluster_size), b.agents);
    const std::size_t K = types.size();
    // Distinct chains: sequences of 1..L types; gap options: multisets of 0..C chains.
    std::vector<std::vector<std::size_t>> chains;
    std::function<void(std::vector<std::size_t>&)> grow = [&](std::vector<std::size_t>& cur) {
        if (!cur.empty()) chains.push_back(cur);
        if (cur.size() == b.max_chain_length) return;
        for (std::size_t t = 0; t < K; ++t) {
            cur.push_back(t);
            grow(cur);
            cur.pop_back();
        }
    };
    std::vector<std::size_t> cur;
    grow(cur);
    std::set<std::vector<std::size_t>> gap_options;
    std::function<void(std::vector<std::size_t>&, std::size_t)> gaps = [&](std::vector<std::size_t>& g, std::size_t from) {
        gap_options.insert(g);
        if (g.size() == b.max_chains_per_gap) return;
        for (std::size_t c = from; c < chains.size(); ++c) {
            g.push_back(c);
            gaps(g, c);
            g.pop_back();
        }
    };
    std::vector<std::size_t> g;
    gaps(g, 0);

    auto power = [](std::size_t base, std::size_t e) {
        std::size_t r = 1;
        while (e--) r *= base;
        return r;
    };
    std::size_t total = 0;
    for (std::size_t T = 1; T <= b.max_time_clusters; ++T) {
        total += power(K, T) * power(gap_options.size(), T - 1);
        if (b.allow_loop) total += T * power(K, T) * power(gap_options.size(), T);
    }
    return total;
}

std::size_t state_count(const FrameSpec& s) { return FrameLayout(s).state_count(); }

} // namespace

TEST(Enumerate, SingletonOnly) {
    auto frames = enumerate_frames(bounds(1, 1, 0, 1, false));
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].time_clusters[0].states, std::vector<std::string>{"a"});
}

TEST(Enumerate, TwoStatePartitions) {
    auto frames = enumerate_frames(bounds(1, 2, 0, 1, false));
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_EQ(state_count(frames[0]), 1u);
    std::set<Partition> seen;
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_EQ(frames[i].time_clusters[0].states, (std::vector<std::string>{"a", "b"}));
        seen.insert(frames[i].time_clusters[0].partitions[0]);
    }
    EXPECT_EQ(seen, (std::set<Partition>{{{"a", "b"}}, {{"a"}, {"b"}}}));
}

TEST(Enumerate, LoopDoublesTheSingleton) {
    auto frames = enumerate_frames(bounds(1, 1, 0, 1, true));
    ASSERT_EQ(frames.size(), 2u);
    EXPECT_FALSE(frames[0].loop);
    EXPECT_EQ(frames[1].loop, std::optional<std::size_t>(0));
}

TEST(Enumerate, CountMatchesBruteForce) {
    for (bool loop : {false, true}) {
        auto b = bounds(2, 2, 1, 1, loop);
        EXPECT_EQ(FrameEnumerator(b).count(), brute_force_count(b)) << loop;
        EXPECT_EQ(enumerate_frames(b).size(), brute_force_count(b)) << loop;
    }
    for (const auto& b : {bounds(2, 3, 1, 1, true), bounds(2, 2, 2, 2, true), bounds(3, 2, 1, 1, false),
                          bounds(1, 3, 0, 1, true, 2), bounds(2, 2, 1, 1, true, 2)})
        EXPECT_EQ(FrameEnumerator(b).count(), brute_force_count(b));
}

TEST(Enumerate, ClusterCatalogMatchesBruteForce) {
    for (std::uint32_t m : {1u, 2u, 3u})
        for (std::size_t s : {1u, 2u, 3u, 4u})
            EXPECT_EQ(ClusterCatalog(s, m).types().size(), canonical_clusters(static_cast<int>(s), m).size())
                << s << " " << m;
}

TEST(Enumerate, AutomorphismsFixTheCluster) {
    ClusterCatalog cat(4, 2);
    for (const auto& t : cat.types()) {
        ASSERT_FALSE(t.automorphisms.empty());
        for (const auto& p : t.automorphisms)
            for (const auto& rgs : t.partitions) EXPECT_EQ(detail::rename(rgs, p), rgs);
    }
}

TEST(Enumerate, EverySpecValidatesAndIsDistinct) {
    auto b = bounds(2, 2, 1, 2, true, 2);
    auto frames = enumerate_frames(b);
    std::set<std::string> seen;
    for (const auto& s : frames) {
        ASSERT_TRUE(validate(s).empty());
        EXPECT_LE(s.time_count(), b.max_time_clusters);
        EXPECT_EQ(s.agents, b.agents);
        for (const auto& g : s.gaps) {
            EXPECT_LE(g.chains.size(), b.max_chains_per_gap);
            for (const auto& c : g.chains) EXPECT_LE(c.clusters.size(), b.max_chain_length);
        }
        EXPECT_TRUE(seen.insert(frame_to_json(s).dump()).second);
    }
}

TEST(Enumerate, OrderIsDeterministicAndMonotoneInStates) {
    auto b = bounds(3, 2, 1, 1, true);
    auto first = enumerate_frames(b);
    EXPECT_EQ(first, enumerate_frames(b));
    for (std::size_t i = 1; i < first.size(); ++i) ASSERT_LE(state_count(first[i - 1]), state_count(first[i])) << i;
}

TEST(Enumerate, EarlyStop) {
    FrameEnumerator e(bounds(3, 3, 1, 1, true));
    std::size_t n = 0;
    e.for_each([&](const FrameShape&) { return ++n < 5; });
    EXPECT_EQ(n, 5u);
}

TEST(Enumerate, BadBoundsRejected) {
    EXPECT_THROW(enumerate_frames(bounds(0, 1, 0, 1, false)), std::invalid_argument);
    EXPECT_THROW(enumerate_frames(bounds(1, 0, 0, 1, false)), std::invalid_argument);
    EXPECT_THROW(enumerate_frames(bounds(1, 1, 0, 0, false)), std::invalid_argument);
    EXPECT_THROW(enumerate_frames(bounds(1, 1, 0, 1, false, 0)), std::invalid_argument);
}
