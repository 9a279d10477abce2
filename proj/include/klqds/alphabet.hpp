#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "klqds/error.hpp"
#include "klqds/state_set.hpp"

namespace klqds {

namespace detail {

inline bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) != 0) ++i;
        std::size_t j = i;
        while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j])) == 0) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace detail

/// Ordered, explicitly declared set of symbols. The declaration order is
/// the order used for word enumeration and for every serialized table.
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            const auto& s = symbols_[i];
            if (s.empty() || detail::has_space(s))
                throw InputError("invalid symbol '" + s + "': symbols are non-empty tokens without whitespace");
            if (!index_.emplace(s, static_cast<SymbolId>(i)).second)
                throw InputError("duplicate symbol '" + s + "'");
        }
    }

    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    const std::vector<std::string>& symbols() const { return symbols_; }
    const std::string& name(SymbolId a) const { return symbols_.at(a); }

    std::optional<SymbolId> find(std::string_view s) const {
        auto it = index_.find(std::string(s));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    SymbolId id(std::string_view s) const {
        if (auto a = find(s)) return *a;
        throw InputError("unknown symbol '" + std::string(s) + "'");
    }

    bool single_char() const {
        return std::all_of(symbols_.begin(), symbols_.end(), [](const std::string& s) { return s.size() == 1; });
    }

    /// Whitespace-separated text is read token by token; otherwise the text
    /// is split greedily into the longest declared symbols.
    Word parse_word(std::string_view text) const {
        Word w;
        if (detail::has_space(text)) {
            for (const auto& tok : detail::split_ws(text)) w.push_back(id(tok));
            return w;
        }
        std::size_t longest = 0;
        for (const auto& s : symbols_) longest = std::max(longest, s.size());
        std::size_t i = 0;
        while (i < text.size()) {
            std::optional<SymbolId> hit;
            std::size_t len = std::min(longest, text.size() - i);
            for (; len > 0; --len) {
                if ((hit = find(text.substr(i, len)))) break;
            }
            if (!hit) throw InputError("unknown symbol '" + std::string(text.substr(i, 1)) + "' in word '" + std::string(text) + "'");
            w.push_back(*hit);
            i += len;
        }
        return w;
    }

    /// Concatenation when every symbol is one character, space-joined otherwise.
    std::string format(const Word& w) const {
        std::string out;
        const bool compact = single_char();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!compact && i > 0) out += ' ';
            out += name(w[i]);
        }
        return out;
    }

    bool contains_all(const Word& w) const {
        return std::all_of(w.begin(), w.end(), [&](SymbolId a) { return a < symbols_.size(); });
    }

    void require_word(const Word& w) const {
        for (auto a : w)
            if (a >= symbols_.size()) throw InputError("symbol index " + std::to_string(a) + " outside the alphabet");
    }

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, SymbolId> index_;
};

/// Compact spelling of a word for use inside identifiers: `_` for the
/// empty word, plain concatenation for one-character symbols, `.`-joined
/// otherwise.
inline std::string word_token(const Alphabet& alphabet, const Word& w) {
    if (w.empty()) return "_";
    std::string out;
    const bool compact = alphabet.single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!compact && i > 0) out += '.';
        out += alphabet.name(w[i]);
    }
    return out;
}

/// Calls f(w) for every word of length n over an alphabet of the given size,
/// in lexicographic order of symbol indices.
template <class F>
void for_each_word(std::size_t alphabet_size, std::size_t n, F&& f) {
    Word w(n, 0);
    if (n > 0 && alphabet_size == 0) return;
    while (true) {
        f(static_cast<const Word&>(w));
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++w[i] < alphabet_size) break;
            w[i] = 0;
            if (i == 0) return;
        }
        if (n == 0) return;
    }
}

/// Every word of length at most n, shortest first.
template <class F>
void for_each_word_upto(std::size_t alphabet_size, std::size_t n, F&& f) {
    for (std::size_t len = 0; len <= n; ++len) for_each_word(alphabet_size, len, f);
}

} // namespace klqds
