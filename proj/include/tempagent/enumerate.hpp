// tempagent/enumerate.hpp: canonical enumeration of bounded frames
//
// A cluster of size s with m agents is a tuple of m set partitions of
// {0..s-1}, each written as a restricted growth string.  Renaming states
// gives isomorphic clusters; a tuple is canonical when it is the
// lexicographic minimum of its renamings.  Frames are sequences of canonical
// cluster types with gaps filled by multisets of chains.
//
// Order: total state count, then T, then loop (none first, then L = 0, 1, ..),
// then the items C(0), gap 0, C(1), gap 1, ... each by its catalog position.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/frame.hpp"

namespace tempagent {

struct SearchBounds {
    std::size_t max_time_clusters = 3;
    std::size_t max_cluster_size = 3;
    std::size_t max_chains_per_gap = 1;
    std::size_t max_chain_length = 1;
    bool allow_loop = true;
    std::uint32_t agents = 1;

    void check() const {
        if (max_time_clusters < 1) throw std::invalid_argument("bounds: max_time_clusters must be >= 1");
        if (max_cluster_size < 1) throw std::invalid_argument("bounds: max_cluster_size must be >= 1");
        if (max_chain_length < 1) throw std::invalid_argument("bounds: max_chain_length must be >= 1");
        if (agents < 1) throw std::invalid_argument("bounds: agents must be >= 1");
        if (max_cluster_size > 8) throw std::invalid_argument("bounds: max_cluster_size above 8 is not supported");
    }

    /// Largest possible state count of a frame within these bounds.
    std::size_t max_states() const {
        const std::size_t T = max_time_clusters;
        return T * max_cluster_size + T * max_chains_per_gap * max_chain_length * max_cluster_size;
    }

    friend bool operator==(const SearchBounds&, const SearchBounds&) = default;
};

using Rgs = std::vector<std::uint8_t>;
using Permutation = std::vector<std::uint8_t>;

struct ClusterType {
    std::size_t size;
    std::vector<Rgs> partitions;            // one restricted growth string per agent
    std::vector<Permutation> automorphisms;  // includes the identity
};

namespace detail {

inline std::vector<Rgs> all_rgs(std::size_t n) {
    std::vector<Rgs> out;
    Rgs cur(n, 0);
    std::function<void(std::size_t, std::uint8_t)> rec = [&](std::size_t i, std::uint8_t blocks) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (std::uint8_t b = 0; b <= blocks; ++b) {
            cur[i] = b;
            rec(i + 1, b == blocks ? blocks + 1 : blocks);
        }
    };
    if (n > 0) {
        cur[0] = 0;
        rec(1, 1);
    }
    return out;
}

/// The partition with state p[x] in place of x, as a restricted growth string.
inline Rgs rename(const Rgs& r, const Permutation& p) {
    const std::size_t n = r.size();
    std::vector<std::uint8_t> at(n);  // at[y]: original block of the state renamed to y
    for (std::size_t x = 0; x < n; ++x) at[p[x]] = r[x];
    std::vector<int> relabel(n, -1);
    Rgs out(n);
    std::uint8_t next = 0;
    for (std::size_t y = 0; y < n; ++y) {
        if (relabel[at[y]] < 0) relabel[at[y]] = next++;
        out[y] = static_cast<std::uint8_t>(relabel[at[y]]);
    }
    return out;
}

inline std::vector<Permutation> all_permutations(std::size_t n) {
    std::vector<Permutation> out;
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline std::string state_letter(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "s" + std::to_string(i);
}

} // namespace detail

/// Canonical cluster types ordered by size, then partition tuple.
class ClusterCatalog {
public:
    ClusterCatalog(std::size_t max_size, std::uint32_t agents) : agents_(agents) {
        for (std::size_t s = 1; s <= max_size; ++s) {
            const auto rgs = detail::all_rgs(s);
            const auto perms = detail::all_permutations(s);
            std::vector<std::size_t> digit(agents, 0);
            for (;;) {
                std::vector<Rgs> tuple;
                for (auto d : digit) tuple.push_back(rgs[d]);
                bool canonical = true;
                std::vector<Permutation> autos;
                for (const auto& p : perms) {
                    std::vector<Rgs> img;
                    for (const auto& r : tuple) img.push_back(detail::rename(r, p));
                    if (img < tuple) {
                        canonical = false;
                        break;
                    }
                    if (img == tuple) autos.push_back(p);
                }
                if (canonical) types_.push_back({s, std::move(tuple), std::move(autos)});
                std::size_t k = 0;
                while (k < agents && ++digit[k] == rgs.size()) digit[k++] = 0;
                if (k == agents) break;
            }
        }
        // The odometer above varies agent 1 fastest; restore lexicographic order.
        std::stable_sort(types_.begin(), types_.end(), [](const ClusterType& a, const ClusterType& b) {
            if (a.size != b.size) return a.size < b.size;
            return a.partitions < b.partitions;
        });
    }

    std::uint32_t agents() const noexcept { return agents_; }
    const std::vector<ClusterType>& types() const noexcept { return types_; }
    const ClusterType& operator[](std::size_t i) const { return types_[i]; }

    Cluster build(std::size_t type) const {
        const auto& t = types_[type];
        Cluster c;
        for (std::size_t x = 0; x < t.size; ++x) c.states.push_back(detail::state_letter(x));
        for (const auto& r : t.partitions) {
            Partition p(*std::max_element(r.begin(), r.end()) + 1);
            for (std::size_t x = 0; x < t.size; ++x) p[r[x]].push_back(c.states[x]);
            c.partitions.push_back(std::move(p));
        }
        return c;
    }

private:
    std::uint32_t agents_;
    std::vector<ClusterType> types_;
};

struct GapShape {
    std::vector<std::vector<std::size_t>> chains;  // cluster types, chains in nondecreasing order
    std::size_t states = 0;
    friend bool operator==(const GapShape&, const GapShape&) = default;
};

struct FrameShape {
    std::vector<std::size_t> time;  // cluster type per time cluster
    std::vector<GapShape> gaps;
    std::optional<std::size_t> loop;
    std::size_t states = 0;
    friend bool operator==(const FrameShape&, const FrameShape&) = default;
};

inline FrameSpec build_spec(const FrameShape& shape, const ClusterCatalog& catalog) {
    FrameSpec spec;
    spec.agents = catalog.agents();
    spec.loop = shape.loop;
    for (auto t : shape.time) spec.time_clusters.push_back(catalog.build(t));
    for (const auto& g : shape.gaps) {
        Gap gap;
        for (const auto& ch : g.chains) {
            Chain chain;
            for (auto t : ch) chain.clusters.push_back(catalog.build(t));
            gap.chains.push_back(std::move(chain));
        }
        spec.gaps.push_back(std::move(gap));
    }
    return spec;
}

/// Streams every frame within the bounds, once per isomorphism class of the
/// cluster labelings, in canonical order.  `fn` returns false to stop.
class FrameEnumerator {
public:
    explicit FrameEnumerator(const SearchBounds& b) : bounds_(b), catalog_(b.max_cluster_size, b.agents) {
        b.check();
        build_chains();
        build_gaps();
    }

    const ClusterCatalog& catalog() const noexcept { return catalog_; }
    const std::vector<GapShape>& gap_options() const noexcept { return gaps_; }

    void for_each(const std::function<bool(const FrameShape&)>& fn) const {
        const std::size_t max_n = bounds_.max_states();
        for (std::size_t n = 1; n <= max_n; ++n) {
            for (std::size_t T = 1; T <= bounds_.max_time_clusters && T <= n; ++T) {
                std::vector<std::optional<std::size_t>> loops{std::nullopt};
                if (bounds_.allow_loop)
                    for (std::size_t L = 0; L < T; ++L) loops.push_back(L);
                for (const auto& loop : loops) {
                    FrameShape shape;
                    shape.loop = loop;
                    shape.states = n;
                    const std::size_t gaps = loop ? T : T - 1;
                    if (!place(shape, T, gaps, 0, n, fn)) return;
                }
            }
        }
    }

    std::size_t count() const {
        std::size_t c = 0;
        for_each([&](const FrameShape&) {
            ++c;
            return true;
        });
        return c;
    }

private:
    // Items alternate cluster, gap, cluster, ...; item k is a cluster when even.
    bool place(FrameShape& shape, std::size_t T, std::size_t gaps, std::size_t item, std::size_t budget,
               const std::function<bool(const FrameShape&)>& fn) const {
        const std::size_t items = T + gaps;
        if (item == items) return budget == 0 ? fn(shape) : true;
        const std::size_t clusters_left = T - (item + 1) / 2;  // clusters at positions >= item
        if (item % 2 == 0) {
            const std::size_t reserve = clusters_left - 1;
            for (std::size_t t = 0; t < catalog_.types().size(); ++t) {
                const std::size_t s = catalog_[t].size;
                if (s + reserve > budget) continue;
                shape.time.push_back(t);
                bool go = place(shape, T, gaps, item + 1, budget - s, fn);
                shape.time.pop_back();
                if (!go) return false;
            }
        } else {
            for (const auto& g : gaps_) {
                if (g.states + clusters_left > budget) continue;
                shape.gaps.push_back(g);
                bool go = place(shape, T, gaps, item + 1, budget - g.states, fn);
                shape.gaps.pop_back();
                if (!go) return false;
            }
        }
        return true;
    }

    void build_chains() {
        // All sequences of 1..max_chain_length cluster types, by length then lexicographically.
        std::vector<std::vector<std::size_t>> layer{{}};
        for (std::size_t len = 1; len <= bounds_.max_chain_length; ++len) {
            std::vector<std::vector<std::size_t>> next;
            for (const auto& c : layer)
                for (std::size_t t = 0; t < catalog_.types().size(); ++t) {
                    auto d = c;
                    d.push_back(t);
                    next.push_back(d);
                }
            chains_.insert(chains_.end(), next.begin(), next.end());
            layer = std::move(next);
        }
    }

    void build_gaps() {
        const std::size_t max_gap_states = bounds_.max_chains_per_gap * bounds_.max_chain_length * bounds_.max_cluster_size;
        GapShape cur;
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            gaps_.push_back(cur);
            if (cur.chains.size() == bounds_.max_chains_per_gap) return;
            for (std::size_t c = from; c < chains_.size(); ++c) {
                std::size_t s = 0;
                for (auto t : chains_[c]) s += catalog_[t].size;
                if (cur.states + s > max_gap_states) continue;
                cur.chains.push_back(chains_[c]);
                cur.states += s;
                rec(c);
                cur.states -= s;
                cur.chains.pop_back();
            }
        };
        rec(0);
        std::stable_sort(gaps_.begin(), gaps_.end(), [](const GapShape& a, const GapShape& b) {
            if (a.chains.size() != b.chains.size()) return a.chains.size() < b.chains.size();
            return false;
        });
    }

    SearchBounds bounds_;
    ClusterCatalog catalog_;
    std::vector<std::vector<std::size_t>> chains_;
    std::vector<GapShape> gaps_;
};

/// Materialized frame specs, in stream order.
inline std::vector<FrameSpec> enumerate_frames(const SearchBounds& bounds) {
    FrameEnumerator e(bounds);
    std::vector<FrameSpec> out;
    e.for_each([&](const FrameShape& s) {
        out.push_back(build_spec(s, e.catalog()));
        return true;
    });
    return out;
}

} // namespace tempagent
