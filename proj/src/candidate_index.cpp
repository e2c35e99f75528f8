#include "noisyspell/candidate_index.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "noisyspell/utf8.hpp"

namespace noisyspell {

std::vector<std::u32string> deletion_neighbourhood(std::u32string_view word, std::size_t depth) {
    std::unordered_set<std::u32string> seen{std::u32string(word)};
    std::vector<std::u32string> frontier{std::u32string(word)};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::u32string> next;
        for (const auto& s : frontier) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                std::u32string shorter = s.substr(0, i) + s.substr(i + 1);
                if (seen.insert(shorter).second) {
                    next.push_back(std::move(shorter));
                }
            }
        }
        frontier = std::move(next);
    }
    std::vector<std::u32string> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

CandidateIndex::CandidateIndex(const Vocabulary& vocab, std::size_t max_distance) : max_distance_(max_distance) {
    words_.reserve(vocab.size());
    for (const auto& [w, c] : vocab.counts) {
        const auto id = static_cast<WordId>(words_.size());
        words_.push_back(w);
        symbols_.push_back(decode_utf8(w));
        counts_.push_back(c);
        ids_.emplace(w, id);
        for (auto& key : deletion_neighbourhood(symbols_.back(), max_distance_)) {
            deletes_[std::move(key)].push_back(id);
        }
    }
}

std::vector<CandidateIndex::WordId> CandidateIndex::query_ids(std::u32string_view word, std::size_t k) const {
    if (k > max_distance_) {
        throw std::invalid_argument("query distance exceeds the index depth");
    }
    std::vector<WordId> hits;
    for (const auto& key : deletion_neighbourhood(word, k)) {
        auto it = deletes_.find(key);
        if (it == deletes_.end()) {
            continue;
        }
        for (WordId id : it->second) {
            const auto& cand = symbols_[id];
            const std::size_t diff = cand.size() > word.size() ? cand.size() - word.size() : word.size() - cand.size();
            // A word deeper than k deletions from the shared key cannot be in range.
            if (diff > k || cand.size() - key.size() > k) {
                continue;
            }
            hits.push_back(id);
        }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    std::erase_if(hits, [&](WordId id) { return damerau_distance_bounded(word, symbols_[id], k) > k; });
    return hits;
}

std::vector<std::string> CandidateIndex::query(std::string_view word, std::size_t k) const {
    std::vector<std::string> out;
    for (WordId id : query_ids(decode_utf8(word), k)) {
        out.push_back(words_[id]);
    }
    return out;
}

} // namespace noisyspell
