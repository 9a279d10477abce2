#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace klqds {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;

/// A finite word, as symbol indices into the owning alphabet.
using Word = std::vector<SymbolId>;

/// Fixed-universe bit set of automaton states.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe)
        : universe_(universe), bits_((universe + 63) / 64, 0) {}

    static StateSet singleton(std::size_t universe, StateId q) {
        StateSet s(universe);
        s.insert(q);
        return s;
    }

    static StateSet full(std::size_t universe) {
        StateSet s(universe);
        for (std::size_t q = 0; q < universe; ++q) s.insert(static_cast<StateId>(q));
        return s;
    }

    std::size_t universe() const { return universe_; }

    void insert(StateId q) { bits_[q >> 6] |= std::uint64_t{1} << (q & 63); }
    void erase(StateId q) { bits_[q >> 6] &= ~(std::uint64_t{1} << (q & 63)); }
    bool contains(StateId q) const {
        return q < universe_ && ((bits_[q >> 6] >> (q & 63)) & 1U) != 0;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool empty() const {
        for (auto w : bits_)
            if (w != 0) return false;
        return true;
    }

    bool intersects(const StateSet& other) const {
        for (std::size_t i = 0; i < bits_.size() && i < other.bits_.size(); ++i)
            if ((bits_[i] & other.bits_[i]) != 0) return true;
        return false;
    }

    StateSet& operator|=(const StateSet& other) {
        for (std::size_t i = 0; i < bits_.size() && i < other.bits_.size(); ++i)
            bits_[i] |= other.bits_[i];
        return *this;
    }

    StateSet& operator&=(const StateSet& other) {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            bits_[i] &= i < other.bits_.size() ? other.bits_[i] : 0;
        return *this;
    }

    friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
    friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }

    bool operator==(const StateSet&) const = default;
    auto operator<=>(const StateSet&) const = default;

    /// Calls f(q) for each member in increasing order.
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            std::uint64_t w = bits_[i];
            while (w != 0) {
                const int b = std::countr_zero(w);
                f(static_cast<StateId>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    std::vector<StateId> to_vector() const {
        std::vector<StateId> out;
        for_each([&](StateId q) { out.push_back(q); });
        return out;
    }

    std::optional<StateId> first() const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] != 0)
                return static_cast<StateId>(i * 64 + static_cast<std::size_t>(std::countr_zero(bits_[i])));
        return std::nullopt;
    }

    std::size_t hash() const {
        std::size_t h = universe_;
        for (auto w : bits_) h = h * 0x9E3779B97F4A7C15ULL ^ (w + (h >> 7));
        return h;
    }

private:
    std::size_t universe_ = 0;
    std::vector<std::uint64_t> bits_;
};

} // namespace klqds

template <>
struct std::hash<klqds::StateSet> {
    std::size_t operator()(const klqds::StateSet& s) const noexcept { return s.hash(); }
};
