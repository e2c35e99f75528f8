#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "noisyspell/corpus.hpp"
#include "noisyspell/textcore.hpp"

namespace noisyspell {

using LogProb = double;

/// Per-factor floor applied to every log edit probability.
inline constexpr LogProb kLogProbFloor = -25.0;
inline constexpr LogProb kImpossible = -std::numeric_limits<double>::infinity();
inline constexpr double kDefaultSmoothingK = 0.1;

/// A (correct, misspelled, frequency) observation mined from a corpus.
struct Triple {
    std::string correct;
    std::string misspelled;
    Count frequency = 1;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Pairs (c, m) within `max_ed` where count(c) >= ratio * count(m). Output
/// is sorted by (correct, misspelled), so it does not depend on the order
/// in which the corpus was read.
std::vector<Triple> extract_triples(const FrequencyTable& table, std::size_t max_ed = 2, double ratio = 5.0);

void write_triples_tsv(std::ostream& out, std::span<const Triple> triples);
std::vector<Triple> read_triples_tsv(std::istream& in);

/// Every character appearing in the triples.
std::set<Symbol> triple_alphabet(std::span<const Triple> triples);

/// Single-character edit probabilities P(target | source) over the alphabet
/// plus the empty partition. Row `kEpsilon` is the distribution of inserted
/// characters; column `kEpsilon` is deletion.
class ConfusionModel {
public:
    ConfusionModel() = default;

    /// Counts aligned pairs (identity pairs included) weighted by triple
    /// frequency, then normalizes every source row with add-k smoothing.
    static ConfusionModel train(std::span<const Triple> triples, const std::set<Symbol>& alphabet,
                                double smoothing_k = kDefaultSmoothingK);

    double prob(Symbol source, Symbol target) const;
    /// Floored log probability; unknown symbols get the floor.
    LogProb log_prob(Symbol source, Symbol target) const;

    /// Share of a character's source mass spent on non-identity edits. The
    /// kEpsilon entry is the insertion rate per interior gap.
    double char_error_freq(Symbol s) const;

    const std::set<Symbol>& alphabet() const { return alphabet_; }
    /// Row/column order: kEpsilon first, then the alphabet ascending.
    const std::vector<Symbol>& symbols() const { return symbols_; }
    double smoothing_k() const { return smoothing_k_; }
    bool smoothing_only() const { return smoothing_only_; }

    /// Dense index of a symbol, or npos.
    std::size_t index_of(Symbol s) const;
    LogProb log_prob_at(std::size_t src, std::size_t tgt) const { return log_prob_[src * symbols_.size() + tgt]; }
    double prob_at(std::size_t src, std::size_t tgt) const { return prob_[src * symbols_.size() + tgt]; }

    nlohmann::json to_json() const;
    static ConfusionModel from_json(const nlohmann::json& j);

    /// Sealed file form (schema version + content hash).
    nlohmann::json to_file_json() const;
    static ConfusionModel from_file_json(const nlohmann::json& sealed);
    std::string content_hash() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    void rebuild_index();

    std::set<Symbol> alphabet_;
    std::vector<Symbol> symbols_;
    std::unordered_map<Symbol, std::size_t> index_;
    std::vector<double> prob_;
    std::vector<LogProb> log_prob_;
    std::map<Symbol, double> error_freq_;
    double smoothing_k_ = kDefaultSmoothingK;
    bool smoothing_only_ = false;
};

/// log P(observed | candidate): best single-character alignment, scored by a
/// max-product edit DP in log space.
LogProb bm_likelihood(std::u32string_view observed, std::u32string_view candidate, const ConfusionModel& model);
LogProb bm_likelihood(std::string_view observed, std::string_view candidate, const ConfusionModel& model);

/// Constant-distributive channel parameter: probability that the observed
/// word is what was intended.
struct CDParams {
    double alpha = 0.65;
};

/// log alpha for the observed word, log((1-alpha)/(|C|-1)) for other members
/// of the candidate set, kImpossible otherwise.
LogProb cd_likelihood(const std::string& observed, const std::string& candidate,
                      std::span<const std::string> candidates, const CDParams& params);

using WordScorer = std::function<LogProb(const std::string& observed, const std::string& candidate)>;

/// Sum of per-word channel log-likelihoods; both sentences must have the
/// same length.
LogProb sentence_likelihood(std::span<const std::string> observed, std::span<const std::string> candidate,
                            const WordScorer& scorer);

/// CSV heat map: one row per requested source character, one column per
/// target in the full alphabet (empty partition first, labelled `<eps>`).
std::string export_heatmap(const ConfusionModel& model, std::span<const Symbol> chars);

} // namespace noisyspell
