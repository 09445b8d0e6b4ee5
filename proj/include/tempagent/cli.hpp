// tempagent/cli.hpp: the `tempagent` command line, callable in-process
//
// Exit codes: 0 success / valid / no countermodel within bounds,
// 1 countermodel / refuted / unsatisfiable within bounds, 2 syntax or usage,
// 3 model file, schema or evaluation error, 4 resource cap.

#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempagent/decide.hpp"
#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/model.hpp"
#include "tempagent/parser.hpp"
#include "tempagent/rules.hpp"
#include "tempagent/semantics.hpp"

namespace tempagent::cli {

enum ExitCode : int { Ok = 0, Refuted = 1, Syntax = 2, Io = 3, Cap = 4 };

struct Config {
    std::string command;
    std::string text;       // formula or rule, "-" for stdin
    std::string text_file;  // alternative to `text`
    std::string model_path;
    std::string bounds;     // "T,S,C,L"
    std::optional<bool> loop;
    std::optional<std::uint32_t> agents;
    std::optional<std::size_t> horizon;
    bool bridge_gaps = true;
    std::string format = "human";
    unsigned jobs = 1;
    std::optional<unsigned long long> cap;
    std::string output;     // witness model file
    bool rnf = false;       // rule-check the reduced normal form instead
};

namespace detail {

inline std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string input_text(const Config& c, std::istream& in) {
    if (!c.text_file.empty()) {
        std::ifstream f(c.text_file);
        if (!f) throw ModelError("cannot open '" + c.text_file + "'");
        return read_all(f);
    }
    if (c.text == "-") return read_all(in);
    return c.text;
}

inline SearchBounds make_bounds(const Config& c, std::uint32_t max_agent) {
    SearchBounds b = default_bounds(max_agent);
    if (!c.bounds.empty()) {
        std::vector<std::size_t> v;
        std::stringstream ss(c.bounds);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t pos = 0;
            unsigned long long n = 0;
            try {
                n = std::stoull(item, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (item.empty() || pos != item.size()) throw std::invalid_argument("--bounds expects T,S,C,L");
            v.push_back(static_cast<std::size_t>(n));
        }
        if (v.size() != 4) throw std::invalid_argument("--bounds expects four numbers T,S,C,L");
        b.max_time_clusters = v[0];
        b.max_cluster_size = v[1];
        b.max_chains_per_gap = v[2];
        b.max_chain_length = v[3];
    }
    if (c.loop) b.allow_loop = *c.loop;
    if (c.agents) b.agents = *c.agents;
    b.check();
    return b;
}

inline SearchOptions make_options(const Config& c) {
    SearchOptions o;
    o.bridge_gaps = c.bridge_gaps;
    if (c.cap) {
        o.cap = *c.cap;
    } else if (const char* env = std::getenv("TEMPAGENT_CAP")) {
        try {
            std::size_t pos = 0;
            o.cap = std::stoull(env, &pos);
            if (pos != std::string(env).size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("TEMPAGENT_CAP must be a non-negative integer");
        }
    }
    return o;
}

inline void print_truth(std::ostream& out, const TruthAssignment& t) {
    std::size_t w = 0;
    for (const auto& s : t.states) w = std::max(w, s.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out << std::left << std::setw(static_cast<int>(w)) << t.states[i] << "  " << (t.values[i] ? "true" : "false")
            << "\n";
}

inline void print_bounds(std::ostream& out, const SearchBounds& b) {
    out << "bounds: T<=" << b.max_time_clusters << " size<=" << b.max_cluster_size << " chains<=" << b.max_chains_per_gap
        << " length<=" << b.max_chain_length << " loop=" << (b.allow_loop ? "yes" : "no") << " agents=" << b.agents
        << "\n";
}

/// Shared reporting for sat / theorem / rule-check searches.
inline int report_search(const Config& c, const SearchOutcome& o, std::ostream& out, const std::string& found_msg,
                         const std::string& exhausted_msg, int found_code, int exhausted_code) {
    if (o.found() && !c.output.empty()) save_model(o.witness().model, c.output);
    if (c.format == "json") {
        Json j = outcome_to_json(o);
        j["message"] = o.found() ? found_msg : exhausted_msg;
        out << j.dump(2) << "\n";
    } else {
        out << (o.found() ? found_msg : exhausted_msg) << "\n";
        print_bounds(out, o.bounds);
        out << "frames checked: " << o.frames_checked << ", candidates: " << o.candidates << "\n";
        if (o.found()) {
            out << "state: " << o.witness().state << "\n";
            out << model_to_json(o.witness().model).dump(2) << "\n";
        }
    }
    return o.found() ? found_code : exhausted_code;
}

inline Model require_model(const Config& c) {
    if (c.model_path.empty()) throw std::invalid_argument(c.command + " requires --model PATH");
    return load_model(c.model_path, c.bridge_gaps);
}

inline int cmd_parse(const Config& c, std::istream& in, std::ostream& out) {
    Formula f = parse(input_text(c, in));
    auto m = metrics(f);
    Json vars = Json::array();
    for (auto v : m.variables) vars.push_back("x" + std::to_string(v));
    if (c.format == "json") {
        out << Json{{"formula", to_string(f)}, {"size", m.size}, {"variables", vars}, {"max_agent", m.max_agent},
                    {"max_dist", m.max_dist}, {"dist_weight", m.dist_weight}, {"next_count", m.next_count},
                    {"until_count", m.until_count}}
                   .dump(2)
            << "\n";
    } else {
        out << to_string(f) << "\n";
        out << "size " << m.size << ", variables " << vars.dump() << ", max_agent " << m.max_agent << ", max_dist "
            << m.max_dist << ", dist_weight " << m.dist_weight << ", next_count " << m.next_count << ", until_count "
            << m.until_count << "\n";
    }
    return Ok;
}

inline int cmd_eval(const Config& c, std::istream& in, std::ostream& out, bool validity) {
    Model model = require_model(c);
    Formula f = parse(input_text(c, in));
    TruthAssignment t = eval(model, f, c.horizon);
    const bool valid = t.all();
    if (c.format == "json") {
        Json j{{"formula", to_string(f)}, {"truth", t.to_json()}};
        if (validity) j["valid"] = valid;
        out << j.dump(2) << "\n";
    } else {
        print_truth(out, t);
        if (validity) out << (valid ? "valid in model" : "not valid in model") << "\n";
    }
    return validity && !valid ? Refuted : Ok;
}

inline int cmd_sat(const Config& c, std::istream& in, std::ostream& out) {
    Formula f = parse(input_text(c, in));
    auto b = make_bounds(c, metrics(f).max_agent);
    auto o = sat_bounded(f, b, make_options(c));
    return report_search(c, o, out, "satisfiable: witness found", "no satisfying model within bounds", Ok, Refuted);
}

inline int cmd_theorem(const Config& c, std::istream& in, std::ostream& out) {
    Formula f = parse(input_text(c, in));
    auto b = make_bounds(c, metrics(f).max_agent);
    auto o = theorem_bounded(f, b, make_options(c));
    return report_search(c, o, out, "countermodel found", "no countermodel within bounds (theorem up to bounds)", Refuted,
                         Ok);
}

inline int cmd_nf(const Config& c, std::istream& in, std::ostream& out) {
    InferenceRule r = parse_rule(input_text(c, in));
    auto rnf = to_reduced_normal_form(r, c.cap.value_or(default_rnf_cap));
    Json j = rnf.to_json();
    if (c.format == "json") {
        out << j.dump(2) << "\n";
        return Ok;
    }
    out << "rule: " << to_string(r) << "\n";
    for (const auto& [name, label] : j["labels"].items()) out << name << " := " << label.get<std::string>() << "\n";
    out << "atoms (" << rnf.atoms().size() << "):";
    for (const auto& a : j["atoms"]) out << " [" << a.get<std::string>() << "]";
    out << "\ndisjuncts: " << rnf.disjunct_count() << "\n";
    for (std::size_t d = 0; d < rnf.disjunct_count(); ++d) {
        for (std::size_t a = 0; a < rnf.atoms().size(); ++a) out << (rnf.value(d, a) ? '1' : '0');
        out << "\n";
    }
    return Ok;
}

inline int cmd_rule_check(const Config& c, std::istream& in, std::ostream& out) {
    InferenceRule r = parse_rule(input_text(c, in));
    std::optional<ReducedNormalFormRule> rnf;
    if (c.rnf) rnf = to_reduced_normal_form(r, c.cap.value_or(default_rnf_cap));
    if (!c.model_path.empty()) {
        Model model = require_model(c);
        const bool valid = rnf ? rnf_valid_in_model(model, *rnf) : rule_valid_in_model(model, r);
        if (c.format == "json") out << Json{{"rule", to_string(r)}, {"rnf", c.rnf}, {"valid", valid}}.dump(2) << "\n";
        else out << (valid ? "rule valid in model" : "rule refuted in model") << "\n";
        return valid ? Ok : Refuted;
    }
    const std::uint32_t agents = rnf ? rnf->max_agent() : r.max_agent();
    auto b = make_bounds(c, agents);
    auto o = rnf ? refute_rule_bounded(*rnf, b, make_options(c)) : refute_rule_bounded(r, b, make_options(c));
    return report_search(c, o, out, "rule refuted", "rule not refuted within bounds", Refuted, Ok);
}

} // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bounded model checking and decision tool for a temporal multi-agent logic of knowledge"};
    app.name("tempagent");
    app.require_subcommand(1, 1);
    Config cfg;

    auto text_args = [&](CLI::App* sub, const char* what) {
        sub->add_option("text", cfg.text, std::string(what) + " text, or - for stdin");
        sub->add_option("--file", cfg.text_file, std::string("read the ") + what + " from a file");
    };
    auto search_args = [&](CLI::App* sub) {
        sub->add_option("--bounds", cfg.bounds, "T,S,C,L: time clusters, cluster size, chains per gap, chain length");
        sub->add_flag("--loop,!--no-loop", cfg.loop, "allow or forbid looping frames");
        sub->add_option("--agents", cfg.agents, "number of agents (default: largest agent in the query, at least 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--jobs", cfg.jobs, "worker limit (the search runs in canonical order on one worker)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--cap", cfg.cap, "candidate limit (also TEMPAGENT_CAP)");
        sub->add_option("--output", cfg.output, "write the witness model to this file");
    };
    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"human", "json"}));
        sub->add_option("--bridge-gaps", cfg.bridge_gaps, "relate C(i) directly to C(i+1) (true|false)");
    };

    auto* p = app.add_subcommand("parse", "print the canonical form and metrics of a formula");
    text_args(p, "formula");
    common(p);
    auto* e = app.add_subcommand("eval", "truth table of a formula in a model");
    auto* v = app.add_subcommand("valid", "whether a formula holds at every state of a model");
    for (auto* sub : {e, v}) {
        text_args(sub, "formula");
        sub->add_option("--model", cfg.model_path, "model file")->required();
        sub->add_option("--horizon", cfg.horizon, "unrolling length for looping models");
        common(sub);
    }
    auto* s = app.add_subcommand("sat", "search for a satisfying model within bounds");
    auto* t = app.add_subcommand("theorem", "search for a countermodel within bounds");
    for (auto* sub : {s, t}) {
        text_args(sub, "formula");
        search_args(sub);
        common(sub);
    }
    auto* n = app.add_subcommand("nf", "reduced normal form of a rule");
    text_args(n, "rule");
    n->add_option("--cap", cfg.cap, "candidate table limit");
    common(n);
    auto* r = app.add_subcommand("rule-check", "check a rule in a model, or search for a refutation");
    text_args(r, "rule");
    r->add_option("--model", cfg.model_path, "model file (otherwise bounded search)");
    r->add_flag("--rnf", cfg.rnf, "check the reduced normal form of the rule instead");
    search_args(r);
    common(r);

    std::vector<std::string> argv_store{"tempagent"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& ex) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp& ex) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return Syntax;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.text.empty() && cfg.text_file.empty()) {
        err << "usage error: " << cfg.command << " needs a " << (cfg.command == "nf" || cfg.command == "rule-check" ? "rule" : "formula")
            << " argument or --file\n";
        return Syntax;
    }

    try {
        if (cfg.command == "parse") return detail::cmd_parse(cfg, in, out);
        if (cfg.command == "eval") return detail::cmd_eval(cfg, in, out, false);
        if (cfg.command == "valid") return detail::cmd_eval(cfg, in, out, true);
        if (cfg.command == "sat") return detail::cmd_sat(cfg, in, out);
        if (cfg.command == "theorem") return detail::cmd_theorem(cfg, in, out);
        if (cfg.command == "nf") return detail::cmd_nf(cfg, in, out);
        return detail::cmd_rule_check(cfg, in, out);
    } catch (const ParseError& ex) {
        err << "syntax error: " << ex.what() << "\n";
        return Syntax;
    } catch (const CapExceeded& ex) {
        err << ex.what() << "\n";
        return Cap;
    } catch (const ModelError& ex) {
        err << "model error: " << ex.what() << "\n";
        return Io;
    } catch (const EvalError& ex) {
        err << "evaluation error: " << ex.what() << "\n";
        return Io;
    } catch (const std::invalid_argument& ex) {
        err << "usage error: " << ex.what() << "\n";
        return Syntax;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return Io;
    }
}

} // namespace tempagent::cli
