#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisyspell/corrector.hpp"
#include "noisyspell/noiser.hpp"

namespace noisyspell {

/// Position-mismatch word error rate. Token counts must match.
double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis);

/// Share of error words (noisy != clean) that the correction restored.
/// Empty when there are no error words.
std::optional<double> word_accuracy(std::span<const std::string> clean, std::span<const std::string> noisy,
                                    std::span<const std::string> corrected);

/// Per word, error characters before correction are the non-identity pairs
/// of align(noisy, clean) and after correction those of align(corrected,
/// clean); credit is max(0, before - after). Empty when nothing was wrong.
std::optional<double> char_accuracy(std::span<const std::string> clean, std::span<const std::string> noisy,
                                    std::span<const std::string> corrected);

struct MetricCounts {
    std::size_t total_words = 0;
    std::size_t hypothesis_errors = 0;
    std::size_t error_words = 0;
    std::size_t corrected_words = 0;
    std::size_t error_chars = 0;
    std::size_t corrected_chars = 0;
    /// Error words whose noisy form is itself a vocabulary word.
    std::size_t real_word_errors = 0;
    std::size_t real_words_corrected = 0;
    /// Clean words the corrector changed.
    std::size_t broken_words = 0;

    /// `is_real_word` may be empty, in which case real-word counts stay 0.
    void add(std::span<const std::string> clean, std::span<const std::string> noisy,
             std::span<const std::string> corrected, const std::function<bool(const std::string&)>& is_real_word = {});
    MetricCounts& operator+=(const MetricCounts& o);
    nlohmann::json to_json() const;
};

struct EvalReport {
    std::string error_model;
    std::string lm;
    std::string mode;
    bool ablation = false;
    double wer = 0;
    std::optional<double> word_accuracy;
    std::optional<double> char_accuracy;
    std::optional<double> real_word_accuracy;
    MetricCounts counts;
    nlohmann::json config;

    static EvalReport from_counts(const MetricCounts& c);
    nlohmann::json to_json() const;
};

/// Raised when the dataset was generated with the corrector's own channel.
class SameModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedPrior {
    std::string name;
    PriorModel* prior = nullptr;
};

struct EvalModels {
    const CandidateIndex* index = nullptr;
    const ScriptProfile* profile = nullptr;
    const ConfusionModel* confusion = nullptr;
    std::vector<NamedPrior> priors;
    /// Also the reference for real-word errors when given; otherwise the
    /// candidate vocabulary is.
    std::shared_ptr<const Vocabulary> ablation_vocab;
};

struct EvalOptions {
    CorrectionConfig base;
    std::vector<ErrorModelKind> error_models{ErrorModelKind::BrillMoore, ErrorModelKind::ConstantDistributive};
    std::vector<CorrectionMode> modes{CorrectionMode::Word, CorrectionMode::Sentence};
    bool include_ablation = true;
    bool allow_same_model = false;
    /// Receives one JSON object per (cell, sentence).
    std::function<void(const nlohmann::json&)> diagnostics;
};

struct EvalTable {
    double uncorrected_wer = 0;
    std::size_t sentences = 0;
    std::vector<EvalReport> rows;

    const EvalReport* find(const std::string& error_model, const std::string& lm, const std::string& mode,
                           bool ablation) const;
    nlohmann::json to_json() const;
    /// Aligned plain-text tables: the error model by LM grid per mode, then
    /// the ablation rows.
    std::string to_text() const;
};

/// Scores one corrector configuration over the dataset. `is_real_word`
/// decides which error words count as real-word errors.
EvalReport evaluate_cell(const EvalDataset& data, Corrector& corrector,
                         const std::function<bool(const std::string&)>& is_real_word = {},
                         const std::function<void(const nlohmann::json&)>& diagnostics = {});

/// Every (error model, prior, mode) cell plus, when requested, ablation rows
/// for each (error model, mode).
EvalTable evaluate(const EvalDataset& data, const EvalModels& models, const EvalOptions& options);

} // namespace noisyspell
