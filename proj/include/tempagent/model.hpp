// ============================================================================
// tempagent/model.hpp: Kripke models and the JSON model-file format
// ============================================================================
//
//   { "agents": m,
//     "time_clusters": [ { "states": ["a","b"],
//                          "partitions": [ [["a","b"]], [["a"],["b"]] ] }, ... ],
//     "gaps": [ { "chains": [ { "clusters": [ {cluster}, ... ] }, ... ] }, ... ],
//     "loop": null | L,
//     "valuation": { "x1": ["t0.a", "g0.0.0.c"], ... } }
//
// State names: "t{i}.{name}" for time clusters, "g{gap}.{chain}.{pos}.{name}"
// for chain clusters, all indices 0-based.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempagent/error.hpp"
#include "tempagent/frame.hpp"

namespace tempagent {

using Json = nlohmann::ordered_json;

/// Variable index -> quotient states where it holds.  Absent means empty.
using Valuation = std::map<std::uint32_t, std::set<std::size_t>>;

class Model {
public:
    Model(FrameSpec spec, Valuation valuation = {}, bool bridge_gaps = true)
        : layout_(std::make_shared<const FrameLayout>(std::move(spec))),
          valuation_(std::move(valuation)),
          bridge_gaps_(bridge_gaps) {
        for (auto it = valuation_.begin(); it != valuation_.end();) {
            if (it->first == 0) throw ModelError("valuation: variable index must be >= 1");
            for (auto s : it->second)
                if (s >= layout_->state_count()) throw ModelError("valuation: unknown state id " + std::to_string(s));
            if (it->second.empty()) it = valuation_.erase(it);
            else ++it;
        }
    }

    const FrameSpec& spec() const noexcept { return layout_->spec(); }
    const FrameLayout& layout() const noexcept { return *layout_; }
    const Valuation& valuation() const noexcept { return valuation_; }
    std::uint32_t agents() const noexcept { return layout_->spec().agents; }
    bool bridge_gaps() const noexcept { return bridge_gaps_; }
    void set_bridge_gaps(bool b) noexcept { bridge_gaps_ = b; }

    bool holds(std::uint32_t variable, std::size_t state) const {
        auto it = valuation_.find(variable);
        return it != valuation_.end() && it->second.count(state) > 0;
    }

    friend bool operator==(const Model& a, const Model& b) {
        return a.spec() == b.spec() && a.valuation_ == b.valuation_;
    }

private:
    std::shared_ptr<const FrameLayout> layout_;
    Valuation valuation_;
    bool bridge_gaps_;
};

// ── JSON ────────────────────────────────────────────────────────────────────

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& msg) {
    throw ModelError("model schema: " + (path.empty() ? std::string("/") : path) + ": " + msg);
}

inline const Json& member(const Json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing \"") + key + "\"");
    return *it;
}

inline std::string string_at(const Json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected string");
    return j.get<std::string>();
}

inline std::vector<std::string> strings_at(const Json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string_at(j[i], path + "/" + std::to_string(i)));
    return out;
}

inline Cluster cluster_from_json(const Json& j, std::uint32_t agents, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected cluster object");
    Cluster c;
    c.states = strings_at(member(j, "states", path), path + "/states");
    const Json& parts = member(j, "partitions", path);
    if (!parts.is_array()) schema_error(path + "/partitions", "expected array");
    if (parts.size() != agents) {
        schema_error(path + "/partitions", "agent-count mismatch: expected " + std::to_string(agents) +
                                               " partitions, found " + std::to_string(parts.size()));
    }
    for (std::size_t a = 0; a < parts.size(); ++a) {
        std::string pp = path + "/partitions/" + std::to_string(a);
        if (!parts[a].is_array()) schema_error(pp, "expected array of blocks");
        Partition p;
        for (std::size_t b = 0; b < parts[a].size(); ++b) p.push_back(strings_at(parts[a][b], pp + "/" + std::to_string(b)));
        c.partitions.push_back(std::move(p));
    }
    return c;
}

inline Json cluster_to_json(const Cluster& c) {
    Json j;
    j["states"] = c.states;
    Json parts = Json::array();
    for (const auto& p : c.partitions) parts.push_back(p);
    j["partitions"] = parts;
    return j;
}

inline std::uint32_t variable_from_key(const std::string& key, const std::string& path) {
    if (key.size() < 2 || key[0] != 'x') schema_error(path, "valuation key must be x<n>");
    std::uint64_t v = 0;
    for (std::size_t i = 1; i < key.size(); ++i) {
        if (key[i] < '0' || key[i] > '9') schema_error(path, "valuation key must be x<n>");
        v = v * 10 + static_cast<std::uint64_t>(key[i] - '0');
        if (v > 0xffffffffu) schema_error(path, "variable index too large");
    }
    if (v == 0) schema_error(path, "variable index must be >= 1");
    return static_cast<std::uint32_t>(v);
}

} // namespace detail

inline FrameSpec frame_from_json(const Json& j) {
    using namespace detail;
    if (!j.is_object()) schema_error("", "expected object");
    FrameSpec spec;
    const Json& agents = member(j, "agents", "");
    if (!agents.is_number_integer() || agents.get<long long>() < 1) schema_error("/agents", "expected integer >= 1");
    if (agents.get<long long>() > 64) schema_error("/agents", "at most 64 agents supported");
    spec.agents = static_cast<std::uint32_t>(agents.get<long long>());

    const Json& tcs = member(j, "time_clusters", "");
    if (!tcs.is_array() || tcs.empty()) schema_error("/time_clusters", "expected nonempty array");
    for (std::size_t i = 0; i < tcs.size(); ++i)
        spec.time_clusters.push_back(cluster_from_json(tcs[i], spec.agents, "/time_clusters/" + std::to_string(i)));

    if (auto it = j.find("loop"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 0) schema_error("/loop", "expected null or integer >= 0");
        spec.loop = static_cast<std::size_t>(it->get<long long>());
    }

    const Json& gaps = j.contains("gaps") ? j["gaps"] : Json::array();
    if (!gaps.is_array()) schema_error("/gaps", "expected array");
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        std::string gp = "/gaps/" + std::to_string(g);
        if (!gaps[g].is_object()) schema_error(gp, "expected gap object");
        const Json& chains = member(gaps[g], "chains", gp);
        if (!chains.is_array()) schema_error(gp + "/chains", "expected array");
        Gap gap;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            std::string cp = gp + "/chains/" + std::to_string(c);
            if (!chains[c].is_object()) schema_error(cp, "expected chain object");
            const Json& cls = member(chains[c], "clusters", cp);
            if (!cls.is_array()) schema_error(cp + "/clusters", "expected array");
            Chain chain;
            for (std::size_t p = 0; p < cls.size(); ++p)
                chain.clusters.push_back(cluster_from_json(cls[p], spec.agents, cp + "/clusters/" + std::to_string(p)));
            gap.chains.push_back(std::move(chain));
        }
        spec.gaps.push_back(std::move(gap));
    }

    auto violations = validate(spec);
    if (!violations.empty()) schema_error(violations.front().location, violations.front().message);
    return spec;
}

inline Json frame_to_json(const FrameSpec& spec) {
    Json j;
    j["agents"] = spec.agents;
    Json tcs = Json::array();
    for (const auto& c : spec.time_clusters) tcs.push_back(detail::cluster_to_json(c));
    j["time_clusters"] = tcs;
    Json gaps = Json::array();
    for (const auto& g : spec.gaps) {
        Json chains = Json::array();
        for (const auto& ch : g.chains) {
            Json cls = Json::array();
            for (const auto& c : ch.clusters) cls.push_back(detail::cluster_to_json(c));
            chains.push_back(Json{{"clusters", cls}});
        }
        gaps.push_back(Json{{"chains", chains}});
    }
    j["gaps"] = gaps;
    j["loop"] = spec.loop ? Json(*spec.loop) : Json(nullptr);
    return j;
}

/// Resolves qualified state names against the layout.
inline Valuation valuation_from_names(const FrameLayout& layout,
                                      const std::map<std::uint32_t, std::vector<std::string>>& named) {
    Valuation v;
    for (const auto& [var, names] : named) {
        auto& set = v[var];
        for (const auto& n : names) {
            auto id = layout.find_state(n);
            if (!id) throw ModelError("valuation for x" + std::to_string(var) + ": unknown state \"" + n + "\"");
            set.insert(*id);
        }
    }
    return v;
}

inline Model model_from_json(const Json& j, bool bridge_gaps = true) {
    FrameSpec spec = frame_from_json(j);
    FrameLayout layout(spec);
    std::map<std::uint32_t, std::vector<std::string>> named;
    if (auto it = j.find("valuation"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) detail::schema_error("/valuation", "expected object");
        for (auto kv = it->begin(); kv != it->end(); ++kv) {
            std::string path = "/valuation/" + kv.key();
            auto var = detail::variable_from_key(kv.key(), path);
            named[var] = detail::strings_at(kv.value(), path);
        }
    }
    return Model(std::move(spec), valuation_from_names(layout, named), bridge_gaps);
}

inline Json model_to_json(const Model& m) {
    Json j = frame_to_json(m.spec());
    Json val = Json::object();
    for (const auto& [var, states] : m.valuation()) {
        Json names = Json::array();
        for (auto s : states) names.push_back(m.layout().state_name(s));
        val["x" + std::to_string(var)] = names;
    }
    j["valuation"] = val;
    return j;
}

inline Model load_model(const std::string& path, bool bridge_gaps = true) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j, bridge_gaps);
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file '" + path + "'");
    out << model_to_json(m).dump(2) << "\n";
    if (!out) throw ModelError("write failed for '" + path + "'");
}

} // namespace tempagent
