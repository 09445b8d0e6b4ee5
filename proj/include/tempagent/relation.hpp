// tempagent/relation.hpp: dense binary relations over {0..n-1}

#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace tempagent {

/// Row-major bit matrix; row a holds the successors of a.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

    static Relation identity(std::size_t n) {
        Relation r(n);
        for (std::size_t i = 0; i < n; ++i) r.insert(i, i);
        return r;
    }

    std::size_t size() const noexcept { return n_; }

    bool contains(std::size_t a, std::size_t b) const noexcept {
        return (bits_[a * words_ + b / 64] >> (b % 64)) & 1u;
    }
    void insert(std::size_t a, std::size_t b) noexcept {
        bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
    }
    void erase(std::size_t a, std::size_t b) noexcept {
        bits_[a * words_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
    }

    std::size_t pair_count() const noexcept {
        std::size_t c = 0;
        for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool empty() const noexcept { return pair_count() == 0; }

    std::vector<std::size_t> successors(std::size_t a) const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < n_; ++b)
            if (contains(a, b)) out.push_back(b);
        return out;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (contains(a, b)) out.emplace_back(a, b);
        return out;
    }

    Relation& operator|=(const Relation& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
        return *this;
    }
    Relation& operator&=(const Relation& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
        return *this;
    }

    Relation converse() const {
        Relation r(n_);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (contains(a, b)) r.insert(b, a);
        return r;
    }

    /// this ∘ o in diagrammatic order: a (this;o) c iff ∃b. a this b ∧ b o c.
    Relation then(const Relation& o) const {
        Relation r(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            std::uint64_t* dst = &r.bits_[a * words_];
            for (std::size_t b = 0; b < n_; ++b) {
                if (!contains(a, b)) continue;
                const std::uint64_t* src = &o.bits_[b * words_];
                for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
            }
        }
        return r;
    }

    /// R⁺ by Warshall's algorithm over bit rows.
    Relation transitive_closure() const {
        Relation r = *this;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::uint64_t* row_k = &r.bits_[k * words_];
            for (std::size_t a = 0; a < n_; ++a) {
                if (!r.contains(a, k)) continue;
                std::uint64_t* row_a = &r.bits_[a * words_];
                for (std::size_t w = 0; w < words_; ++w) row_a[w] |= row_k[w];
            }
        }
        return r;
    }

    /// R^< : pairs of R whose converse is not in R.
    Relation strict_part() const {
        Relation r(n_);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (contains(a, b) && !contains(b, a)) r.insert(a, b);
        return r;
    }

    /// Rⁿ with R⁰ the identity.
    Relation power(std::size_t k) const {
        Relation r = identity(n_);
        for (std::size_t i = 0; i < k; ++i) r = r.then(*this);
        return r;
    }

    bool is_transitive() const { return then(*this).subset_of(*this); }
    bool subset_of(const Relation& o) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~o.bits_[i]) return false;
        return true;
    }

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

} // namespace tempagent
