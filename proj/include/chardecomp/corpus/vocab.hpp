#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chardecomp/corpus/word.hpp"
#include "chardecomp/utf8.hpp"

namespace chardecomp {

/// Character to id mapping. Ids 0-3 are reserved; real characters follow in
/// code-point order so the mapping does not depend on corpus order.
class CharVocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnknown = 1;
    static constexpr int kStart = 2;
    static constexpr int kEnd = 3;
    static constexpr int kFirstCharId = 4;

    CharVocab() = default;

    explicit CharVocab(std::vector<char32_t> chars) : chars_(std::move(chars)) {
        std::sort(chars_.begin(), chars_.end());
        chars_.erase(std::unique(chars_.begin(), chars_.end()), chars_.end());
        for (std::size_t i = 0; i < chars_.size(); ++i) ids_[chars_[i]] = kFirstCharId + static_cast<int>(i);
    }

    static CharVocab build(std::span<const WordSample> samples) {
        std::set<char32_t> seen;
        for (const auto& w : samples) seen.insert(w.surface.begin(), w.surface.end());
        return CharVocab(std::vector<char32_t>(seen.begin(), seen.end()));
    }

    std::size_t size() const noexcept { return chars_.size() + kFirstCharId; }
    const std::vector<char32_t>& chars() const noexcept { return chars_; }

    bool contains(char32_t c) const { return ids_.count(c) != 0; }

    int id(char32_t c) const {
        auto it = ids_.find(c);
        return it == ids_.end() ? kUnknown : it->second;
    }

    static bool is_reserved(int id) noexcept { return id < kFirstCharId; }

    char32_t character(int id) const {
        if (is_reserved(id) || static_cast<std::size_t>(id) >= size()) {
            throw std::out_of_range("character(): id " + std::to_string(id) + " is not a real character");
        }
        return chars_[static_cast<std::size_t>(id - kFirstCharId)];
    }

    /// Display form of an id; boundaries render as "^" and "$".
    std::string render(int id) const {
        switch (id) {
            case kPad: return "<pad>";
            case kUnknown: return "<unk>";
            case kStart: return "^";
            case kEnd: return "$";
            default: return utf8::encode(character(id));
        }
    }

    friend bool operator==(const CharVocab& a, const CharVocab& b) { return a.chars_ == b.chars_; }

private:
    std::vector<char32_t> chars_;
    std::map<char32_t, int> ids_;
};

/// [start] + character ids + [end], right-padded with kPad up to min_len.
inline std::vector<int> encode_word(std::u32string_view surface, const CharVocab& vocab, std::size_t min_len = 0) {
    std::vector<int> ids;
    ids.reserve(std::max(surface.size() + 2, min_len));
    ids.push_back(CharVocab::kStart);
    for (char32_t c : surface) ids.push_back(vocab.id(c));
    ids.push_back(CharVocab::kEnd);
    while (ids.size() < min_len) ids.push_back(CharVocab::kPad);
    return ids;
}

/// Inverse of encode_word for in-vocabulary words: reserved ids are dropped.
inline std::u32string decode_word(std::span<const int> ids, const CharVocab& vocab) {
    std::u32string out;
    for (int id : ids) {
        if (!CharVocab::is_reserved(id)) out.push_back(vocab.character(id));
    }
    return out;
}

/// Number of non-pad positions in an encoded word (surface length + 2).
inline std::size_t unpadded_length(std::span<const int> ids) {
    std::size_t n = ids.size();
    while (n > 0 && ids[n - 1] == CharVocab::kPad) --n;
    return n;
}

}  // namespace chardecomp
