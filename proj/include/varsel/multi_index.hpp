#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "varsel/common.hpp"

namespace varsel {

// Integer frequency vector indexing one trigonometric basis function.
// The sign pattern doubles as the basis-type tag: an index whose first
// nonzero entry is positive denotes a cosine, its negation the matching
// sine, and the zero index the constant.
struct MultiIndex {
    std::vector<std::int32_t> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<std::int32_t> e) : entries(std::move(e)) {}
    MultiIndex(std::initializer_list<std::int32_t> e) : entries(e) {}

    static MultiIndex zero(int dim) {
        return MultiIndex(std::vector<std::int32_t>(static_cast<std::size_t>(dim), 0));
    }
    static MultiIndex unit(int dim, int j, std::int32_t value = 1) {
        MultiIndex k = zero(dim);
        k.entries.at(static_cast<std::size_t>(j)) = value;
        return k;
    }

    int dim() const { return static_cast<int>(entries.size()); }
    std::int32_t operator[](int j) const { return entries[static_cast<std::size_t>(j)]; }

    bool is_zero() const {
        for (auto e : entries)
            if (e != 0) return false;
        return true;
    }

    // ||k||_0
    int weight() const {
        int w = 0;
        for (auto e : entries) w += (e != 0);
        return w;
    }

    // ||k||_2^2, exact integer arithmetic
    std::int64_t norm_sq() const {
        std::int64_t s = 0;
        for (auto e : entries) s += static_cast<std::int64_t>(e) * e;
        return s;
    }

    std::vector<int> support() const {
        std::vector<int> out;
        for (int j = 0; j < dim(); ++j)
            if (entries[static_cast<std::size_t>(j)] != 0) out.push_back(j);
        return out;
    }

    // True when the first nonzero entry is positive (cosine-type index).
    // The zero index is neither sign.
    bool sign_canonical() const {
        for (auto e : entries) {
            if (e > 0) return true;
            if (e < 0) return false;
        }
        return false;
    }

    MultiIndex negated() const {
        MultiIndex k(*this);
        for (auto& e : k.entries) e = -e;
        return k;
    }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    // Lexicographic; shorter vectors first on dimension mismatch.
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
        if (auto c = a.entries.size() <=> b.entries.size(); c != 0) return c;
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            if (auto c = a.entries[i] <=> b.entries[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }
};

}  // namespace varsel
