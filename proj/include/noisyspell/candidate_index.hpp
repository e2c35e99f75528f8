#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "noisyspell/corpus.hpp"

namespace noisyspell {

/// Deletion-neighbourhood index over a fixed vocabulary. Every word is stored
/// under each string reachable by deleting up to `max_distance` of its
/// characters; a query probes the query's own deletion neighbourhood and
/// verifies hits with the exact distance. Two strings within restricted
/// Damerau-Levenshtein distance k always share a k-deletion descendant, so
/// lookups are exact.
class CandidateIndex {
public:
    using WordId = std::uint32_t;

    CandidateIndex() = default;
    explicit CandidateIndex(const Vocabulary& vocab, std::size_t max_distance = 2);

    /// All vocabulary words within distance k of `word` (k <= max_distance),
    /// sorted by id, which is ascending word order.
    std::vector<WordId> query_ids(std::u32string_view word, std::size_t k) const;
    std::vector<std::string> query(std::string_view word, std::size_t k) const;

    bool contains(const std::string& word) const { return ids_.count(word) != 0; }
    const std::string& word(WordId id) const { return words_[id]; }
    const std::u32string& symbols(WordId id) const { return symbols_[id]; }
    Count count(WordId id) const { return counts_[id]; }
    std::size_t size() const { return words_.size(); }
    std::size_t max_distance() const { return max_distance_; }

private:
    std::size_t max_distance_ = 2;
    std::vector<std::string> words_;
    std::vector<std::u32string> symbols_;
    std::vector<Count> counts_;
    std::unordered_map<std::string, WordId> ids_;
    std::unordered_map<std::u32string, std::vector<WordId>> deletes_;
};

/// Distinct strings obtained by deleting between 0 and `depth` characters.
std::vector<std::u32string> deletion_neighbourhood(std::u32string_view word, std::size_t depth);

} // namespace noisyspell
