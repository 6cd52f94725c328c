#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chardecomp/cd/cnn.hpp"
#include "chardecomp/error.hpp"

namespace chardecomp {

enum class CandidateMode { Consecutive, All };

inline std::string to_string(CandidateMode m) { return m == CandidateMode::Consecutive ? "consecutive" : "all"; }

inline CandidateMode parse_candidate_mode(std::string_view s) {
    if (s == "consecutive" || s == "cons") return CandidateMode::Consecutive;
    if (s == "all") return CandidateMode::All;
    throw std::invalid_argument("unknown candidate mode '" + std::string(s) + "' (expected consecutive or all)");
}

/// Words longer than this get every subset only up to kCappedMaxCardinality.
inline constexpr std::size_t kAllSubsetsMaxLength = 16;
inline constexpr std::size_t kCappedMaxCardinality = 4;

struct CandidateList {
    std::vector<cd::IndexSet> sets;
    /// True when the cap replaced k-subsets by windows.
    bool capped = false;
};

namespace detail {

inline void windows(std::size_t length, std::size_t k, std::size_t offset, std::vector<cd::IndexSet>& out) {
    for (std::size_t s = 0; s + k <= length; ++s) {
        cd::IndexSet set(k);
        for (std::size_t i = 0; i < k; ++i) set[i] = offset + s + i;
        out.push_back(std::move(set));
    }
}

inline void combinations(std::size_t length, std::size_t k, std::size_t offset, std::vector<cd::IndexSet>& out) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        cd::IndexSet set(k);
        for (std::size_t i = 0; i < k; ++i) set[i] = offset + idx[i];
        out.push_back(std::move(set));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == length - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// Candidate sets of cardinality k over positions offset .. offset+length-1,
/// in lexicographic order. With `strict`, hitting the cap throws CapExceeded
/// instead of falling back to windows.
inline CandidateList enumerate_candidates(std::size_t length, std::size_t k, CandidateMode mode, std::size_t offset = 0,
                                          bool strict = false) {
    if (k == 0 || k > length) {
        throw std::invalid_argument("enumerate_candidates: cardinality " + std::to_string(k) +
                                    " outside 1.." + std::to_string(length));
    }
    CandidateList out;
    if (mode == CandidateMode::Consecutive) {
        detail::windows(length, k, offset, out.sets);
    } else if (length <= kAllSubsetsMaxLength || k <= kCappedMaxCardinality) {
        detail::combinations(length, k, offset, out.sets);
    } else {
        if (strict) {
            throw CapExceeded("all " + std::to_string(k) + "-subsets of a " + std::to_string(length) +
                              "-character word exceed the enumeration cap");
        }
        detail::windows(length, k, offset, out.sets);
        out.capped = true;
    }
    return out;
}

/// Every nonempty candidate of any cardinality, smallest cardinality first.
inline CandidateList enumerate_all_sizes(std::size_t length, std::size_t offset = 0, bool strict = false) {
    CandidateList out;
    for (std::size_t k = 1; k <= length; ++k) {
        CandidateList part = enumerate_candidates(length, k, CandidateMode::All, offset, strict);
        out.capped = out.capped || part.capped;
        for (auto& s : part.sets) out.sets.push_back(std::move(s));
    }
    return out;
}

}  // namespace chardecomp
