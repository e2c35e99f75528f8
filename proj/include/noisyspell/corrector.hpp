#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisyspell/candidate_index.hpp"
#include "noisyspell/channel.hpp"
#include "noisyspell/langmodel.hpp"
#include "noisyspell/metaphone.hpp"
#include "noisyspell/textcore.hpp"

namespace noisyspell {

struct ScoredCandidate {
    std::string word;
    LogProb channel_logp = 0;
    LogProb prior_logp = 0;
    LogProb posterior_logp = 0;
};

/// Candidates for one observed token. After scoring, sorted by posterior
/// (ties: higher channel score, then word order).
struct CandidateSet {
    std::string observed;
    std::vector<ScoredCandidate> candidates;
    bool filtered_by_metaphone = false;

    const ScoredCandidate& best() const { return candidates.front(); }
    nlohmann::json to_json() const;
};

/// Edit-distance bound for a word: 1 up to three characters, else 2.
std::size_t candidate_distance_bound(std::u32string_view word);

/// Candidate generation over a fixed vocabulary. Phonetic keys of the whole
/// vocabulary are computed up front so generation is read-only.
class CandidateGenerator {
public:
    /// Lists shorter than this are returned without phonetic filtering.
    static constexpr std::size_t kFilterThreshold = 5;

    CandidateGenerator(const CandidateIndex& index, const ScriptProfile& profile,
                       std::size_t metaphone_length = kDefaultMetaphoneLength);

    /// Vocabulary words within the length-dependent distance; when there are
    /// at least kFilterThreshold of them, only those whose phonetic key is
    /// closest to the observed word's key. The observed word itself is left
    /// out of that selection and appended last. Scores are zero.
    CandidateSet generate(const std::string& observed) const;

    const CandidateIndex& index() const { return index_; }
    std::string phonetic_key(std::string_view word) const;

private:
    const CandidateIndex& index_;
    const ScriptProfile& profile_;
    std::size_t metaphone_length_;
    std::vector<std::string> keys_;
};

enum class CorrectionMode { Word, Sentence };
enum class ErrorModelKind { BrillMoore, ConstantDistributive };

std::string to_string(CorrectionMode m);
std::string to_string(ErrorModelKind k);
CorrectionMode parse_mode(std::string_view s);
ErrorModelKind parse_error_model(std::string_view s);

struct CorrectionConfig {
    double lambda = 1.0;
    CorrectionMode mode = CorrectionMode::Word;
    ErrorModelKind error_model = ErrorModelKind::BrillMoore;
    CDParams cd;
    std::size_t per_word_cap = 8;
    std::size_t beam_width = 16;
    /// Sentence mode enumerates exactly while the candidate product stays at
    /// or below this.
    std::size_t enumeration_limit = 10000;
    bool ablation = false;
    LogProb oov_penalty_logp = -50.0;
    std::shared_ptr<const Vocabulary> ablation_vocab;
    /// Score with the fallback prior when the primary prior fails.
    bool prior_fallback = false;

    void validate() const;
    nlohmann::json to_json() const;
};

struct CorrectionResult {
    std::vector<std::string> original;
    std::vector<std::string> corrected;
    std::vector<CandidateSet> traces;
    std::vector<std::size_t> changed;
    /// Channel + lambda * prior of the corrected sentence (sentence mode), or
    /// the sum of the chosen words' posteriors (word mode).
    LogProb score = 0;

    /// One JSON object per token.
    std::vector<nlohmann::json> trace_lines() const;
};

/// Noisy-channel ranking: channel log-likelihood plus lambda times the prior.
///
/// In ablation mode the prior is uniform, candidates come from the ablation
/// vocabulary, and an observed word missing from that vocabulary has the OOV
/// penalty added to its channel score.
class Corrector {
public:
    /// `confusion` may be null only for the constant-distributive channel.
    Corrector(const CandidateIndex& index, const ScriptProfile& profile, const ConfusionModel* confusion,
              PriorModel& prior, CorrectionConfig config);
    ~Corrector();
    Corrector(const Corrector&) = delete;
    Corrector& operator=(const Corrector&) = delete;

    void set_fallback_prior(PriorModel* fallback) { fallback_ = fallback; }

    CandidateSet generate_candidates(const std::string& observed) const;
    CandidateSet correct_word(const std::string& observed, std::span<const std::string> left,
                              std::span<const std::string> right);

    /// Dispatches on the configured mode.
    CorrectionResult correct(std::span<const std::string> tokens);
    /// Each token ranked on its own, with the observed neighbours as context.
    CorrectionResult correct_words(std::span<const std::string> tokens);
    /// Joint ranking of candidate sentences.
    CorrectionResult correct_sentence(std::span<const std::string> tokens);

    const CorrectionConfig& config() const { return config_; }
    /// Number of prior queries answered by the fallback.
    std::size_t fallback_uses() const { return fallback_uses_; }

private:
    struct Option {
        std::string word;
        LogProb channel = 0;
    };

    std::vector<Option> channel_options(const CandidateSet& set) const;
    std::vector<LogProb> prior_scores(const LMQuery& query);
    void rank(CandidateSet& set, const std::vector<Option>& options, const std::vector<LogProb>& prior) const;
    CandidateSet score_in_context(const CandidateSet& generated, const std::vector<Option>& options,
                                  std::span<const std::string> left, std::span<const std::string> right);

    const ScriptProfile& profile_;
    const ConfusionModel* confusion_;
    PriorModel* prior_;
    PriorModel* fallback_ = nullptr;
    CorrectionConfig config_;
    std::unique_ptr<CandidateIndex> ablation_index_;
    std::unique_ptr<CandidateGenerator> generator_;
    std::unique_ptr<PriorModel> uniform_;
    std::size_t fallback_uses_ = 0;
};

/// Error-model-only correction over `config.ablation_vocab`.
CorrectionResult ablation_correct(std::span<const std::string> tokens, const ConfusionModel* confusion,
                                  const ScriptProfile& profile, CorrectionConfig config);

} // namespace noisyspell
