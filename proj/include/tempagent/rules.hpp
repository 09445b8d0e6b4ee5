// tempagent/rules.hpp: inference rules and their reduced normal form
//
// A rule  p1 ; ... ; pl |- c  is valid in a model when "every premise holds
// everywhere" implies "the conclusion holds everywhere".
//
// Reduced normal form: every distinct subformula ψ of the rule gets a label
// variable (the conclusion gets x1).  Each disjunct θ is a complete 0/1 table
// over the atoms
//
//   x_i, N x_i, K_l x_i, D_l x_i, x_i Until x_l, KnI x_i, Unc x_i
//
// (plus Today x_i when the rule uses Today), listed per label in that order.
// The disjuncts are exactly the tables in which every label agrees with its
// defining equation and every premise label is 1.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"
#include "tempagent/model.hpp"
#include "tempagent/parser.hpp"
#include "tempagent/semantics.hpp"

namespace tempagent {

struct InferenceRule {
    std::vector<Formula> premises;
    Formula conclusion;

    InferenceRule(std::vector<Formula> ps, Formula c) : premises(std::move(ps)), conclusion(std::move(c)) {
        if (premises.empty()) throw std::invalid_argument("a rule needs at least one premise");
    }

    std::set<std::uint32_t> variables() const {
        auto vs = metrics(conclusion).variables;
        for (const auto& p : premises) {
            auto m = metrics(p);
            vs.insert(m.variables.begin(), m.variables.end());
        }
        return vs;
    }

    std::uint32_t max_agent() const {
        std::uint32_t a = metrics(conclusion).max_agent;
        for (const auto& p : premises) a = std::max(a, metrics(p).max_agent);
        return a;
    }

    friend bool operator==(const InferenceRule&, const InferenceRule&) = default;
};

inline std::string to_string(const InferenceRule& r) {
    std::string s;
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
        if (i) s += " ; ";
        s += to_string(r.premises[i]);
    }
    return s + " |- " + to_string(r.conclusion);
}

inline InferenceRule parse_rule(std::string_view text) {
    auto [ps, c] = parse_rule_text(text);
    return InferenceRule(std::move(ps), std::move(c));
}

/// The rule  x1 -> x1 |- f  : valid in a model iff f is.
inline InferenceRule formula_to_rule(const Formula& f) { return InferenceRule({implies(var(1), var(1))}, f); }

inline bool rule_valid_in_model(const Model& model, const InferenceRule& r) {
    std::vector<Formula> fs = r.premises;
    fs.push_back(r.conclusion);
    auto truth = eval_many(model, fs);
    for (std::size_t i = 0; i + 1 < truth.size(); ++i)
        if (std::find(truth[i].begin(), truth[i].end(), false) != truth[i].end()) return true;
    return std::find(truth.back().begin(), truth.back().end(), false) == truth.back().end();
}

// ── reduced normal form ─────────────────────────────────────────────────────

enum class AtomKind : std::uint8_t { Var, Next, Know, Dist, Until, KnI, Unc, Today };

struct Atom {
    AtomKind kind;
    std::uint32_t var;        // label variable, 1-based
    std::uint32_t index = 0;  // agent, distance, or the right-hand label of Until

    Formula formula() const {
        Formula x = tempagent::var(var);
        switch (kind) {
        case AtomKind::Var: return x;
        case AtomKind::Next: return next(x);
        case AtomKind::Know: return knows(index, x);
        case AtomKind::Dist: return dist(index, x);
        case AtomKind::Until: return until(x, tempagent::var(index));
        case AtomKind::KnI: return kni(x);
        case AtomKind::Unc: return unc(x);
        case AtomKind::Today: return today(x);
        }
        return x;
    }

    friend bool operator==(const Atom&, const Atom&) = default;
};

inline constexpr unsigned long long default_rnf_cap = 1ull << 20;

class ReducedNormalFormRule {
public:
    std::uint32_t variable_count() const noexcept { return static_cast<std::uint32_t>(labels_.size()); }
    /// labels()[i] is the subformula named by x_{i+1}.
    const std::vector<Formula>& labels() const noexcept { return labels_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t disjunct_count() const noexcept { return words_ ? rows_.size() / words_ : 0; }
    std::uint32_t max_agent() const noexcept { return max_agent_; }

    bool value(std::size_t j, std::size_t atom) const {
        return (rows_[j * words_ + atom / 64] >> (atom % 64)) & 1u;
    }

    std::vector<bool> disjunct(std::size_t j) const {
        std::vector<bool> out(atoms_.size());
        for (std::size_t a = 0; a < out.size(); ++a) out[a] = value(j, a);
        return out;
    }

    /// Whether a full atom table (packed, atoms_.size() bits) is one of the disjuncts.
    bool contains(const std::vector<std::uint64_t>& row) const {
        std::size_t lo = 0, hi = disjunct_count();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int c = compare_row(mid, row);
            if (c == 0) return true;
            if (c < 0) lo = mid + 1;
            else hi = mid;
        }
        return false;
    }

    std::size_t words() const noexcept { return words_; }

    /// ⋁_j θ_j as a formula; only sensible for small tables.
    Formula premise_formula() const {
        std::vector<Formula> ds;
        for (std::size_t j = 0; j < disjunct_count(); ++j) {
            std::vector<Formula> lits;
            for (std::size_t a = 0; a < atoms_.size(); ++a)
                lits.push_back(value(j, a) ? atoms_[a].formula() : neg(atoms_[a].formula()));
            ds.push_back(conj_all(lits));
        }
        if (ds.empty()) return bot();
        Formula acc = ds.front();
        for (std::size_t i = 1; i < ds.size(); ++i) acc = disj(acc, ds[i]);
        return acc;
    }

    Json to_json() const {
        Json j;
        Json vars = Json::array(), labels = Json::object(), atoms = Json::array(), rows = Json::array();
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            std::string name = "x" + std::to_string(i + 1);
            vars.push_back(name);
            labels[name] = tempagent::to_string(labels_[i]);
        }
        for (const auto& a : atoms_) atoms.push_back(tempagent::to_string(a.formula()));
        for (std::size_t r = 0; r < disjunct_count(); ++r) {
            Json row = Json::array();
            for (std::size_t a = 0; a < atoms_.size(); ++a) row.push_back(value(r, a) ? 1 : 0);
            rows.push_back(row);
        }
        j["variables"] = vars;
        j["labels"] = labels;
        j["conclusion"] = "x1";
        j["atoms"] = atoms;
        j["disjuncts"] = rows;
        return j;
    }

private:
    friend ReducedNormalFormRule to_reduced_normal_form(const InferenceRule&, unsigned long long);

    int compare_row(std::size_t j, const std::vector<std::uint64_t>& row) const {
        for (std::size_t w = 0; w < words_; ++w) {
            auto a = rows_[j * words_ + w];
            if (a != row[w]) return a < row[w] ? -1 : 1;
        }
        return 0;
    }

    std::vector<Formula> labels_;
    std::vector<Atom> atoms_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> rows_;  // disjunct_count() rows of words_ words, sorted
    std::uint32_t max_agent_ = 0;
};

/// Which modal atom families a table carries.  A family whose connective
/// never occurs in the rule would only contribute unconstrained coefficients,
/// so it is left out; the disjunction is unchanged.
struct AtomFamilies {
    bool next = false;
    std::uint32_t agents = 0;
    std::optional<std::uint32_t> max_dist;
    bool until = false;
    bool kni = false;
    bool unc = false;
    bool today = false;

    static AtomFamilies all(std::uint32_t agents, std::optional<std::uint32_t> max_dist = {}, bool today = false) {
        return {true, agents, max_dist, true, true, true, today};
    }
};

/// Builds the atom schema for n labels.
inline std::vector<Atom> rnf_schema(std::uint32_t n, const AtomFamilies& fam) {
    std::vector<Atom> atoms;
    for (std::uint32_t i = 1; i <= n; ++i) {
        atoms.push_back({AtomKind::Var, i});
        if (fam.next) atoms.push_back({AtomKind::Next, i});
        for (std::uint32_t l = 1; l <= fam.agents; ++l) atoms.push_back({AtomKind::Know, i, l});
        if (fam.max_dist)
            for (std::uint32_t l = 0; l <= *fam.max_dist; ++l) atoms.push_back({AtomKind::Dist, i, l});
        if (fam.until)
            for (std::uint32_t l = 1; l <= n; ++l) atoms.push_back({AtomKind::Until, i, l});
        if (fam.kni) atoms.push_back({AtomKind::KnI, i});
        if (fam.unc) atoms.push_back({AtomKind::Unc, i});
        if (fam.today) atoms.push_back({AtomKind::Today, i});
    }
    return atoms;
}

inline ReducedNormalFormRule to_reduced_normal_form(const InferenceRule& r, unsigned long long cap = default_rnf_cap) {
    // Labels: conclusion first, then the remaining subformulas children-first.
    std::vector<Formula> order;  // topological, children before parents
    std::map<Formula, std::uint32_t> label;
    std::vector<Formula> labels{r.conclusion};
    label.emplace(r.conclusion, 1);
    AtomFamilies fam;
    auto absorb = [&](const Formula& root) {
        for (const auto& s : subformulas(root)) {
            if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
            if (!label.count(s)) {
                labels.push_back(s);
                label.emplace(s, static_cast<std::uint32_t>(labels.size()));
            }
            switch (s.op()) {
            case Op::Next: fam.next = true; break;
            case Op::Know: fam.agents = std::max(fam.agents, s.index()); break;
            case Op::Dist: fam.max_dist = std::max(fam.max_dist.value_or(0), s.index()); break;
            case Op::Until: fam.until = true; break;
            case Op::KnI: fam.kni = true; break;
            case Op::Unc: fam.unc = true; break;
            case Op::Today: fam.today = true; break;
            default: break;
            }
        }
    };
    for (const auto& p : r.premises) absorb(p);
    absorb(r.conclusion);

    ReducedNormalFormRule out;
    out.labels_ = labels;
    out.max_agent_ = fam.agents;
    const auto n = static_cast<std::uint32_t>(labels.size());
    out.atoms_ = rnf_schema(n, fam);
    out.words_ = (out.atoms_.size() + 63) / 64;

    auto atom_index = [&](AtomKind kind, std::uint32_t v, std::uint32_t idx = 0) {
        for (std::size_t a = 0; a < out.atoms_.size(); ++a) {
            const auto& at = out.atoms_[a];
            if (at.kind == kind && at.var == v && at.index == idx) return a;
        }
        throw std::logic_error("atom missing from schema");
    };

    // For each non-variable label, the atom its x-value is read from (modal)
    // or the boolean equation computing it.
    struct Def {
        Op op;
        std::size_t target;   // atom index of x_ψ
        std::size_t a = 0;    // operand atom(s)
        std::size_t b = 0;
    };
    std::vector<Def> defs;
    std::vector<char> determined(out.atoms_.size(), 0);
    for (const auto& s : order) {
        const std::uint32_t v = label.at(s);
        const std::size_t x = atom_index(AtomKind::Var, v);
        Def d{s.op(), x};
        auto xl = [&](const Formula& c) { return atom_index(AtomKind::Var, label.at(c)); };
        switch (s.op()) {
        case Op::Var: continue;
        case Op::Top: case Op::Bot: break;
        case Op::Not: d.a = xl(s.lhs()); break;
        case Op::And: case Op::Or: case Op::Implies: d.a = xl(s.lhs()); d.b = xl(s.rhs()); break;
        case Op::Next: d.a = atom_index(AtomKind::Next, label.at(s.lhs())); break;
        case Op::Know: d.a = atom_index(AtomKind::Know, label.at(s.lhs()), s.index()); break;
        case Op::Dist: d.a = atom_index(AtomKind::Dist, label.at(s.lhs()), s.index()); break;
        case Op::Until: d.a = atom_index(AtomKind::Until, label.at(s.lhs()), label.at(s.rhs())); break;
        case Op::KnI: d.a = atom_index(AtomKind::KnI, label.at(s.lhs())); break;
        case Op::Unc: d.a = atom_index(AtomKind::Unc, label.at(s.lhs())); break;
        case Op::Today: d.a = atom_index(AtomKind::Today, label.at(s.lhs())); break;
        }
        determined[x] = 1;
        defs.push_back(d);
    }
    std::vector<std::size_t> premise_atoms;
    for (const auto& p : r.premises) premise_atoms.push_back(atom_index(AtomKind::Var, label.at(p)));

    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < out.atoms_.size(); ++a)
        if (!determined[a]) free.push_back(a);
    if (free.size() >= 63 || (1ull << free.size()) > cap) {
        throw CapExceeded("reduced normal form: 2^" + std::to_string(free.size()) + " candidate tables", cap);
    }

    std::vector<std::uint64_t> row(out.words_);
    auto get = [&](std::size_t a) { return ((row[a / 64] >> (a % 64)) & 1u) != 0; };
    auto put = [&](std::size_t a, bool v) {
        if (v) row[a / 64] |= 1ull << (a % 64);
        else row[a / 64] &= ~(1ull << (a % 64));
    };
    std::vector<std::vector<std::uint64_t>> rows;
    const std::uint64_t total = 1ull << free.size();
    for (std::uint64_t c = 0; c < total; ++c) {
        std::fill(row.begin(), row.end(), 0);
        for (std::size_t k = 0; k < free.size(); ++k) put(free[k], (c >> k) & 1u);
        for (const auto& d : defs) {
            bool v = false;
            switch (d.op) {
            case Op::Top: v = true; break;
            case Op::Bot: v = false; break;
            case Op::Not: v = !get(d.a); break;
            case Op::And: v = get(d.a) && get(d.b); break;
            case Op::Or: v = get(d.a) || get(d.b); break;
            case Op::Implies: v = !get(d.a) || get(d.b); break;
            default: v = get(d.a); break;
            }
            put(d.target, v);
        }
        bool ok = true;
        for (auto p : premise_atoms) ok = ok && get(p);
        if (ok) rows.push_back(row);
    }
    if (rows.empty()) {
        // Premises never satisfiable together: the rule is valid in every
        // frame.  The single table "x1 and every other atom false" keeps the
        // disjunction nonempty and is just as valid, since it forces x1.
        std::fill(row.begin(), row.end(), 0);
        put(atom_index(AtomKind::Var, 1), true);
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end());
    out.rows_.reserve(rows.size() * out.words_);
    for (const auto& r2 : rows) out.rows_.insert(out.rows_.end(), r2.begin(), r2.end());
    return out;
}

/// Packed atom rows, one per quotient state, computed by evaluating every atom.
inline std::vector<std::vector<std::uint64_t>> rnf_atom_rows(const Model& model, const ReducedNormalFormRule& rnf) {
    std::vector<Formula> fs;
    for (const auto& a : rnf.atoms()) fs.push_back(a.formula());
    auto truth = eval_many(model, fs);
    const std::size_t n = model.layout().state_count();
    std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(rnf.words()));
    for (std::size_t a = 0; a < truth.size(); ++a)
        for (std::size_t s = 0; s < n; ++s)
            if (truth[a][s]) rows[s][a / 64] |= 1ull << (a % 64);
    return rows;
}

/// The model's valuation is read over the label variables x1..xn.
inline bool rnf_valid_in_model(const Model& model, const ReducedNormalFormRule& rnf) {
    auto rows = rnf_atom_rows(model, rnf);
    for (const auto& row : rows)
        if (!rnf.contains(row)) return true;
    for (std::size_t s = 0; s < rows.size(); ++s)
        if (!model.holds(1, s)) return false;
    return true;
}

} // namespace tempagent
