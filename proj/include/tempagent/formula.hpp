// ============================================================================
// tempagent/formula.hpp: formulas of the temporal agent-knowledge language
// ============================================================================
//
// A Formula is an immutable tree handle.  Copies share structure, so passing
// formulas by value is cheap and sharing them across threads is safe.
//
// Node kinds and their concrete tokens:
//
//   Var(i)        x<i>           i >= 1
//   Top / Bot     true / false
//   Not           ~
//   And / Or      &  /  |
//   Implies       ->
//   Know(i, .)    K<i>           agent i >= 1
//   Next          N
//   Until         Until          binary
//   Dist(k, .)    D<k>           k >= 0, "holds in k strict steps"
//   Today         Today
//   KnI           KnI            knowledge by interaction
//   Unc           Unc            uncertainty (KnI p & KnI ~p)
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempagent {

enum class Op : std::uint8_t {
    Var, Top, Bot,
    Not, Know, Next, Dist, Today, KnI, Unc,
    And, Or, Implies, Until,
};

inline bool is_leaf(Op op) noexcept { return op == Op::Var || op == Op::Top || op == Op::Bot; }
inline bool is_binary(Op op) noexcept {
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}
inline bool is_unary(Op op) noexcept { return !is_leaf(op) && !is_binary(op); }

class Formula {
public:
    struct Node;

    /// Default-constructed formula is `true`.
    Formula();

    Op op() const noexcept;
    /// Variable index for Var, agent for Know, distance for Dist; 0 otherwise.
    std::uint32_t index() const noexcept;
    /// Sole child of a unary node, left child of a binary node.
    const Formula& lhs() const;
    const Formula& rhs() const;
    const Formula& child() const { return lhs(); }

    std::size_t arity() const noexcept {
        return is_leaf(op()) ? 0 : (is_binary(op()) ? 2 : 1);
    }

    /// Node count of the tree.
    std::uint32_t size() const noexcept;

    const Node* id() const noexcept { return node_.get(); }

    friend int compare(const Formula& a, const Formula& b) noexcept;
    friend bool operator==(const Formula& a, const Formula& b) noexcept { return compare(a, b) == 0; }
    friend bool operator!=(const Formula& a, const Formula& b) noexcept { return compare(a, b) != 0; }
    friend bool operator<(const Formula& a, const Formula& b) noexcept { return compare(a, b) < 0; }

    static Formula make(Op op, std::uint32_t index, Formula lhs, Formula rhs);

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    explicit Formula(std::nullptr_t) {}
    bool empty() const noexcept { return !node_; }
    std::shared_ptr<const Node> node_;
};

struct Formula::Node {
    Op op;
    std::uint32_t index;
    std::uint32_t size;  // node count of the subtree
    Formula lhs{nullptr};
    Formula rhs{nullptr};
};

namespace detail {
inline const std::shared_ptr<const Formula::Node>& top_node() {
    static const auto n = std::make_shared<const Formula::Node>(Formula::Node{Op::Top, 0, 1});
    return n;
}
} // namespace detail

inline Formula::Formula() : node_(detail::top_node()) {}

inline Op Formula::op() const noexcept { return node_->op; }
inline std::uint32_t Formula::index() const noexcept { return node_->index; }
inline std::uint32_t Formula::size() const noexcept { return node_->size; }

inline const Formula& Formula::lhs() const {
    if (node_->lhs.empty()) throw std::logic_error("formula node has no children");
    return node_->lhs;
}

inline const Formula& Formula::rhs() const {
    if (node_->rhs.empty()) throw std::logic_error("formula node has no right child");
    return node_->rhs;
}

inline Formula Formula::make(Op op, std::uint32_t index, Formula lhs, Formula rhs) {
    Node n{op, index, 1};
    if (!is_leaf(op)) {
        n.size += lhs.node_->size;
        n.lhs = std::move(lhs);
    }
    if (is_binary(op)) {
        n.size += rhs.node_->size;
        n.rhs = std::move(rhs);
    }
    return Formula(std::make_shared<const Node>(std::move(n)));
}

inline int compare(const Formula& a, const Formula& b) noexcept {
    const Formula::Node* x = a.node_.get();
    const Formula::Node* y = b.node_.get();
    // Iterative on the right spine, recursive on the left.
    while (x != y) {
        if (x->op != y->op) return x->op < y->op ? -1 : 1;
        if (x->index != y->index) return x->index < y->index ? -1 : 1;
        if (x->size != y->size) return x->size < y->size ? -1 : 1;
        if (x->lhs.empty()) return 0;
        if (x->rhs.empty()) {
            x = x->lhs.node_.get();
            y = y->lhs.node_.get();
            continue;
        }
        int c = compare(x->lhs, y->lhs);
        if (c != 0) return c;
        x = x->rhs.node_.get();
        y = y->rhs.node_.get();
    }
    return 0;
}

// ── constructors ────────────────────────────────────────────────────────────

inline Formula var(std::uint32_t i) {
    if (i == 0) throw std::invalid_argument("variable index must be >= 1");
    return Formula::make(Op::Var, i, {}, {});
}
inline Formula top() { return Formula(); }
inline Formula bot() { return Formula::make(Op::Bot, 0, {}, {}); }
inline Formula neg(Formula f) { return Formula::make(Op::Not, 0, std::move(f), {}); }
inline Formula conj(Formula a, Formula b) { return Formula::make(Op::And, 0, std::move(a), std::move(b)); }
inline Formula disj(Formula a, Formula b) { return Formula::make(Op::Or, 0, std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) {
    return Formula::make(Op::Implies, 0, std::move(a), std::move(b));
}
inline Formula knows(std::uint32_t agent, Formula f) {
    if (agent == 0) throw std::invalid_argument("agent index must be >= 1");
    return Formula::make(Op::Know, agent, std::move(f), {});
}
inline Formula next(Formula f) { return Formula::make(Op::Next, 0, std::move(f), {}); }
inline Formula until(Formula a, Formula b) { return Formula::make(Op::Until, 0, std::move(a), std::move(b)); }
inline Formula dist(std::uint32_t k, Formula f) { return Formula::make(Op::Dist, k, std::move(f), {}); }
inline Formula today(Formula f) { return Formula::make(Op::Today, 0, std::move(f), {}); }
inline Formula kni(Formula f) { return Formula::make(Op::KnI, 0, std::move(f), {}); }
inline Formula unc(Formula f) { return Formula::make(Op::Unc, 0, std::move(f), {}); }

/// Conjunction of a nonempty list, left-nested.
inline Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}

// ── printing ────────────────────────────────────────────────────────────────

namespace detail {

inline void print_to(std::string& out, const Formula& f);

inline void print_operand(std::string& out, const Formula& parent, const Formula& c, bool right) {
    bool parens = false;
    if (is_binary(c.op())) {
        if (is_unary(parent.op())) {
            parens = true;
        } else if (c.op() != parent.op()) {
            parens = true;
        } else {
            // Same operator: only the associative side goes bare.
            bool right_assoc = parent.op() == Op::Implies;
            parens = right != right_assoc;
        }
    }
    if (parens) out += '(';
    print_to(out, c);
    if (parens) out += ')';
}

inline void print_to(std::string& out, const Formula& f) {
    switch (f.op()) {
    case Op::Var: out += 'x'; out += std::to_string(f.index()); return;
    case Op::Top: out += "true"; return;
    case Op::Bot: out += "false"; return;
    case Op::Not: out += '~'; break;
    case Op::Know: out += 'K'; out += std::to_string(f.index()); out += ' '; break;
    case Op::Next: out += "N "; break;
    case Op::Dist: out += 'D'; out += std::to_string(f.index()); out += ' '; break;
    case Op::Today: out += "Today "; break;
    case Op::KnI: out += "KnI "; break;
    case Op::Unc: out += "Unc "; break;
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until: {
        print_operand(out, f, f.lhs(), false);
        switch (f.op()) {
        case Op::And: out += " & "; break;
        case Op::Or: out += " | "; break;
        case Op::Implies: out += " -> "; break;
        default: out += " Until "; break;
        }
        print_operand(out, f, f.rhs(), true);
        return;
    }
    }
    print_operand(out, f, f.child(), false);
}

} // namespace detail

inline std::string to_string(const Formula& f) {
    std::string out;
    detail::print_to(out, f);
    return out;
}

// ── structure ───────────────────────────────────────────────────────────────

struct FormulaMetrics {
    std::set<std::uint32_t> variables;
    std::uint32_t max_agent = 0;
    std::uint64_t dist_weight = 0;
    std::uint32_t max_dist = 0;
    std::uint64_t next_count = 0;
    std::uint64_t until_count = 0;
    std::uint64_t size = 0;
};

template <class Fn>
void visit_preorder(const Formula& f, Fn&& fn) {
    std::vector<const Formula*> stack{&f};
    while (!stack.empty()) {
        const Formula* g = stack.back();
        stack.pop_back();
        fn(*g);
        if (is_binary(g->op())) stack.push_back(&g->rhs());
        if (!is_leaf(g->op())) stack.push_back(&g->lhs());
    }
}

inline FormulaMetrics metrics(const Formula& f) {
    FormulaMetrics m;
    visit_preorder(f, [&](const Formula& g) {
        ++m.size;
        switch (g.op()) {
        case Op::Var: m.variables.insert(g.index()); break;
        case Op::Know: m.max_agent = std::max(m.max_agent, g.index()); break;
        case Op::Dist:
            m.dist_weight += g.index();
            m.max_dist = std::max(m.max_dist, g.index());
            break;
        case Op::Next: ++m.next_count; break;
        case Op::Until: ++m.until_count; break;
        default: break;
        }
    });
    return m;
}

/// Distinct subtrees of f, children before parents, f last.
inline std::vector<Formula> subformulas(const Formula& f) {
    std::vector<Formula> out;
    std::set<Formula> seen;
    // Explicit post-order; the second field marks "children already pushed".
    std::vector<std::pair<const Formula*, bool>> stack{{&f, false}};
    while (!stack.empty()) {
        auto [g, expanded] = stack.back();
        stack.pop_back();
        if (seen.count(*g)) continue;
        if (expanded || is_leaf(g->op())) {
            seen.insert(*g);
            out.push_back(*g);
            continue;
        }
        stack.emplace_back(g, true);
        if (is_binary(g->op())) stack.emplace_back(&g->rhs(), false);
        stack.emplace_back(&g->lhs(), false);
    }
    return out;
}

} // namespace tempagent
