#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace occulex {

using Letter = int;

// Compact text form: digits when every letter fits in one digit (k <= 9),
// comma-separated integers otherwise.
inline std::vector<Letter> parse_letters(std::string_view text) {
    std::vector<Letter> out;
    if (text.empty() || text == "e" || text == "eps") return out;
    if (text.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto comma = text.find(',', start);
            auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            if (piece.empty()) throw invalid_argument("empty letter in '" + std::string(text) + "'");
            int value = 0;
            for (char c : piece) {
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    throw invalid_argument("bad letter in '" + std::string(text) + "'");
                value = value * 10 + (c - '0');
            }
            out.push_back(value);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    } else {
        for (char c : text) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw invalid_argument("bad letter in '" + std::string(text) + "'");
            out.push_back(c - '0');
        }
    }
    for (Letter a : out)
        if (a < 1) throw invalid_argument("letters are 1-based: '" + std::string(text) + "'");
    return out;
}

inline std::string format_letters(std::span<const Letter> letters, int k = 0) {
    int top = k;
    for (Letter a : letters) top = std::max(top, a);
    std::string out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        if (top > 9 && i > 0) out += ',';
        out += std::to_string(letters[i]);
    }
    return out;
}

class Word {
public:
    Word() = default;
    Word(std::vector<Letter> letters, int k) : letters_(std::move(letters)), k_(k) {
        if (k_ < 1) throw invalid_argument("alphabet size must be positive");
        for (Letter a : letters_)
            if (a < 1 || a > k_)
                throw invalid_argument("letter " + std::to_string(a) + " outside [" + std::to_string(k_) + "]");
    }

    static Word parse(std::string_view text, int k) { return Word(parse_letters(text), k); }

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    int k() const noexcept { return k_; }
    Letter operator[](std::size_t i) const { return letters_[i]; }
    std::span<const Letter> letters() const noexcept { return letters_; }

    Word concat(const Word& other) const {
        std::vector<Letter> joined = letters_;
        joined.insert(joined.end(), other.letters_.begin(), other.letters_.end());
        return Word(std::move(joined), std::max(k_, other.k_));
    }

    std::string str() const { return format_letters(letters_, k_); }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<Letter> letters_;
    int k_ = 1;
};

// A word pattern. Only its order type matters for occurrences, so the pattern
// also caches the rank of each letter among its distinct letters and the
// order in which distinct letters first appear.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::vector<Letter> letters) : letters_(std::move(letters)) {
        if (letters_.empty()) throw invalid_argument("pattern must be non-empty");
        for (Letter a : letters_)
            if (a < 1) throw invalid_argument("pattern letters are 1-based");
        std::set<Letter> distinct(letters_.begin(), letters_.end());
        std::vector<Letter> sorted(distinct.begin(), distinct.end());
        distinct_ = static_cast<int>(sorted.size());
        ranks_.reserve(letters_.size());
        for (Letter a : letters_)
            ranks_.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), a) - sorted.begin()));
        std::vector<bool> seen(sorted.size(), false);
        for (int rank : ranks_) {
            if (!seen[rank]) {
                seen[rank] = true;
                first_seen_.push_back(rank);
            }
        }
        max_letter_ = sorted.back();
    }

    static Pattern parse(std::string_view text) { return Pattern(parse_letters(text)); }

    std::size_t length() const noexcept { return letters_.size(); }
    int distinct() const noexcept { return distinct_; }
    Letter max_letter() const noexcept { return max_letter_; }
    std::span<const Letter> letters() const noexcept { return letters_; }
    // 0-based rank of letter i among the distinct letters.
    int rank(std::size_t i) const { return ranks_[i]; }
    std::span<const int> ranks() const noexcept { return ranks_; }
    // Ranks of distinct letters in order of first appearance.
    std::span<const int> first_seen() const noexcept { return first_seen_; }

    void require_alphabet(int k) const {
        if (k < max_letter_)
            throw invalid_argument("alphabet size " + std::to_string(k) + " smaller than pattern letter " +
                                   std::to_string(max_letter_));
    }

    std::string str() const { return format_letters(letters_); }

    friend bool operator==(const Pattern& a, const Pattern& b) { return a.letters_ == b.letters_; }

private:
    std::vector<Letter> letters_;
    std::vector<int> ranks_;
    std::vector<int> first_seen_;
    int distinct_ = 0;
    Letter max_letter_ = 0;
};

inline bool is_order_isomorphic(std::span<const Letter> a, std::span<const Letter> b) {
    if (a.size() != b.size()) throw invalid_argument("order isomorphism needs equal lengths");
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = p + 1; q < a.size(); ++q) {
            if ((a[p] < a[q]) != (b[p] < b[q])) return false;
            if ((a[p] == a[q]) != (b[p] == b[q])) return false;
        }
    return true;
}

} // namespace occulex
