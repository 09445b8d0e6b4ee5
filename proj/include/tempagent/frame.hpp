// ============================================================================
// tempagent/frame.hpp: finite descriptions of cluster-and-chain frames
// ============================================================================
//
// A frame is a sequence of time clusters C(0), C(1), ... with a collection of
// chains filling each gap between C(i) and C(i+1).  Every cluster carries one
// equivalence relation per agent, given as a partition of its states; the
// temporal relation inside a cluster is universal and never stored.
//
// The countable sequence is represented as T time clusters plus an optional
// loop index L: time index T-1 is followed by L again, so the frame is
// ultimately periodic with prefix L and period T-L.  Without a loop the frame
// simply ends at C(T-1).
//
// FrameLayout numbers the states of one period ("quotient states"): C(0),
// the chains of gap 0, C(1), the chains of gap 1, and so on.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tempagent/error.hpp"

namespace tempagent {

using Block = std::vector<std::string>;
using Partition = std::vector<Block>;

struct Cluster {
    std::vector<std::string> states;
    std::vector<Partition> partitions;  // one per agent

    friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct Chain {
    std::vector<Cluster> clusters;
    friend bool operator==(const Chain&, const Chain&) = default;
};

struct Gap {
    std::vector<Chain> chains;
    friend bool operator==(const Gap&, const Gap&) = default;
};

struct FrameSpec {
    std::uint32_t agents = 1;
    std::vector<Cluster> time_clusters;
    std::vector<Gap> gaps;
    std::optional<std::size_t> loop;

    std::size_t time_count() const noexcept { return time_clusters.size(); }
    std::size_t prefix() const noexcept { return loop.value_or(time_clusters.size()); }
    std::size_t period() const noexcept { return loop ? time_clusters.size() - *loop : 0; }

    friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

struct Violation {
    std::string location;
    std::string message;
};

namespace detail {

inline void validate_cluster(const Cluster& c, std::uint32_t agents, const std::string& where,
                             std::vector<Violation>& out) {
    if (c.states.empty()) out.push_back({where, "cluster has no states"});
    std::set<std::string> names;
    for (const auto& s : c.states) {
        if (s.empty()) out.push_back({where, "empty state name"});
        if (!names.insert(s).second) out.push_back({where, "duplicate state '" + s + "'"});
    }
    if (c.partitions.size() != agents) {
        out.push_back({where, "expected " + std::to_string(agents) + " partitions, found " +
                                  std::to_string(c.partitions.size())});
    }
    for (std::size_t j = 0; j < c.partitions.size(); ++j) {
        std::string loc = where + ".partitions[" + std::to_string(j) + "]";
        std::set<std::string> covered;
        bool disjoint = true;
        for (const auto& block : c.partitions[j]) {
            if (block.empty()) out.push_back({loc, "empty block"});
            for (const auto& s : block) {
                if (!names.count(s)) out.push_back({loc, "unknown state '" + s + "' in block"});
                if (!covered.insert(s).second) disjoint = false;
            }
        }
        if (!disjoint) out.push_back({loc, "blocks not disjoint"});
        for (const auto& s : names)
            if (!covered.count(s)) {
                out.push_back({loc, "blocks do not cover state '" + s + "'"});
            }
    }
}

} // namespace detail

/// Every structural problem of the spec; empty means valid.
inline std::vector<Violation> validate(const FrameSpec& spec) {
    std::vector<Violation> out;
    if (spec.agents < 1) out.push_back({"agents", "at least one agent required"});
    const std::size_t T = spec.time_clusters.size();
    if (T == 0) out.push_back({"time_clusters", "at least one time cluster required"});
    for (std::size_t i = 0; i < T; ++i) {
        detail::validate_cluster(spec.time_clusters[i], spec.agents,
                                 "time_clusters[" + std::to_string(i) + "]", out);
    }
    if (spec.loop && *spec.loop >= T) {
        out.push_back({"loop", "loop index out of range"});
    }
    const std::size_t want_gaps = T == 0 ? 0 : (spec.loop ? T : T - 1);
    if (spec.gaps.size() != want_gaps) {
        out.push_back({"gaps", "expected " + std::to_string(want_gaps) + " gaps, found " +
                                   std::to_string(spec.gaps.size())});
    }
    for (std::size_t g = 0; g < spec.gaps.size(); ++g) {
        for (std::size_t c = 0; c < spec.gaps[g].chains.size(); ++c) {
            std::string where = "gaps[" + std::to_string(g) + "].chains[" + std::to_string(c) + "]";
            const auto& chain = spec.gaps[g].chains[c];
            if (chain.clusters.empty()) out.push_back({where, "chain has no clusters"});
            for (std::size_t p = 0; p < chain.clusters.size(); ++p) {
                detail::validate_cluster(chain.clusters[p], spec.agents,
                                         where + ".clusters[" + std::to_string(p) + "]", out);
            }
        }
    }
    return out;
}

inline void require_valid(const FrameSpec& spec) {
    auto v = validate(spec);
    if (!v.empty()) throw ModelError("invalid frame: " + v.front().location + ": " + v.front().message);
}

enum class ClusterKind : std::uint8_t { Time, Chain };

/// Position of a cluster: C(time) or position `pos` of chain `chain` in gap `time`.
struct ClusterLocator {
    ClusterKind kind = ClusterKind::Time;
    std::size_t time = 0;  // time index, or gap index for chain clusters
    std::size_t chain = 0;
    std::size_t pos = 0;

    friend bool operator==(const ClusterLocator&, const ClusterLocator&) = default;
};

struct StateInfo {
    std::size_t cluster;  // index into FrameLayout::clusters()
    std::string name;     // local name inside the cluster
};

struct ClusterInfo {
    ClusterLocator where;
    std::vector<std::size_t> states;              // quotient ids, in declaration order
    std::vector<std::vector<std::size_t>> blocks;  // blocks[agent-1][i]: block of the i-th member
    std::size_t block_count(std::size_t agent) const;
};

/// Quotient states of a validated spec and their cluster structure.
class FrameLayout {
public:
    explicit FrameLayout(const FrameSpec& spec) : spec_(spec) {
        require_valid(spec);
        const std::size_t T = spec.time_count();
        time_cluster_.resize(T);
        gap_clusters_.resize(spec.gaps.size());
        for (std::size_t i = 0; i < T; ++i) {
            time_cluster_[i] = add_cluster(spec.time_clusters[i], {ClusterKind::Time, i, 0, 0});
            if (i < spec.gaps.size()) {
                const auto& gap = spec.gaps[i];
                for (std::size_t c = 0; c < gap.chains.size(); ++c) {
                    std::vector<std::size_t> ids;
                    for (std::size_t p = 0; p < gap.chains[c].clusters.size(); ++p) {
                        ids.push_back(add_cluster(gap.chains[c].clusters[p], {ClusterKind::Chain, i, c, p}));
                    }
                    gap_clusters_[i].push_back(std::move(ids));
                }
            }
        }
    }

    const FrameSpec& spec() const noexcept { return spec_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    std::size_t agents() const noexcept { return spec_.agents; }
    std::size_t time_count() const noexcept { return spec_.time_count(); }
    std::optional<std::size_t> loop() const noexcept { return spec_.loop; }
    std::size_t period() const noexcept { return spec_.period(); }

    const std::vector<StateInfo>& states() const noexcept { return states_; }
    const std::vector<ClusterInfo>& clusters() const noexcept { return clusters_; }
    const ClusterInfo& cluster_of(std::size_t state) const { return clusters_[states_[state].cluster]; }

    std::size_t time_cluster(std::size_t i) const { return time_cluster_[i]; }
    /// gap_chains(i)[c][p] -> cluster id.
    const std::vector<std::vector<std::size_t>>& gap_chains(std::size_t i) const { return gap_clusters_[i]; }
    bool has_gap(std::size_t i) const noexcept { return i < gap_clusters_.size(); }

    /// Time index following i, if any.
    std::optional<std::size_t> successor_time(std::size_t i) const noexcept {
        if (i + 1 < time_count()) return i + 1;
        return spec_.loop;
    }

    /// Time index of the cluster containing the state (gap index for chain states).
    std::size_t time_of(std::size_t state) const { return cluster_of(state).where.time; }

    std::string state_name(std::size_t state) const {
        const auto& info = states_[state];
        const auto& w = clusters_[info.cluster].where;
        if (w.kind == ClusterKind::Time) return "t" + std::to_string(w.time) + "." + info.name;
        return "g" + std::to_string(w.time) + "." + std::to_string(w.chain) + "." +
               std::to_string(w.pos) + "." + info.name;
    }

    std::optional<std::size_t> find_state(const std::string& qualified) const {
        auto it = by_name_.find(qualified);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::size_t add_cluster(const Cluster& c, ClusterLocator where) {
        ClusterInfo info;
        info.where = where;
        std::map<std::string, std::size_t> local;
        const std::size_t id = clusters_.size();
        for (const auto& s : c.states) {
            local[s] = info.states.size();
            info.states.push_back(states_.size());
            states_.push_back({id, s});
        }
        for (const auto& part : c.partitions) {
            std::vector<std::size_t> block_of(c.states.size(), 0);
            for (std::size_t b = 0; b < part.size(); ++b)
                for (const auto& s : part[b]) block_of[local.at(s)] = b;
            info.blocks.push_back(std::move(block_of));
        }
        clusters_.push_back(std::move(info));
        for (auto q : clusters_.back().states) by_name_[state_name(q)] = q;
        return id;
    }

    FrameSpec spec_;
    std::vector<StateInfo> states_;
    std::vector<ClusterInfo> clusters_;
    std::vector<std::size_t> time_cluster_;
    std::vector<std::vector<std::vector<std::size_t>>> gap_clusters_;
    std::map<std::string, std::size_t> by_name_;
};

inline std::size_t ClusterInfo::block_count(std::size_t agent) const {
    std::size_t n = 0;
    for (auto b : blocks[agent - 1]) n = std::max(n, b + 1);
    return n;
}

} // namespace tempagent
