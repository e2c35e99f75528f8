#pragma once

// Slow, transparent reference implementations. Tests and `selfcheck` compare
// the library against these.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "noisyspell/candidate_index.hpp"
#include "noisyspell/channel.hpp"
#include "noisyspell/langmodel.hpp"
#include "noisyspell/textcore.hpp"

namespace noisyspell::oracle {

/// Restricted Damerau-Levenshtein distance straight from its definition:
/// the cheapest way to cut both strings into aligned blocks, each block being
/// a match, substitution, deletion, insertion or swap of two adjacent
/// characters. Top-down recursion with a memo.
std::size_t osa_distance(const std::u32string& a, const std::u32string& b);

/// Unrestricted Damerau-Levenshtein distance by breadth-first search over
/// edit sequences. Only usable for short strings over small alphabets.
std::size_t bfs_edit_distance(const std::u32string& a, const std::u32string& b, std::size_t max_depth);

/// Every single-character alignment of `candidate` onto `observed`, as pairs
/// (source from candidate, target from observed).
std::vector<std::vector<AlignedPair>> all_alignments(const std::u32string& candidate, const std::u32string& observed);

/// Maximum over all_alignments of the summed floored log probabilities.
LogProb bm_likelihood_by_enumeration(const std::u32string& observed, const std::u32string& candidate,
                                     const ConfusionModel& model);

/// Every string over `alphabet` of length 0..max_len.
std::vector<std::u32string> all_strings(const std::u32string& alphabet, std::size_t max_len);

/// Linear-scan candidate generation following the published heuristic,
/// with no index. Returns the word list (observed last) and whether the
/// phonetic filter was applied.
struct CandidateList {
    std::vector<std::string> words;
    bool filtered = false;
};
CandidateList candidates_by_scan(const std::string& observed, const std::vector<std::string>& vocab,
                                 const ScriptProfile& profile);

/// Outcome of one self-check suite.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The oracle suites run by `selfcheck`: distances, alignments, channel
/// likelihood, model normalization and candidate generation.
std::vector<SuiteResult> run_self_checks(std::uint64_t seed);

} // namespace noisyspell::oracle
