#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisyspell/channel.hpp"
#include "noisyspell/textcore.hpp"

namespace noisyspell {

/// Placeholder interleaved between characters; a fired marker becomes an
/// inserted character.
inline constexpr Symbol kNoiseMarker = kEpsilon;

/// mt19937_64 with a hand-rolled uniform double so draws are identical on
/// every standard library.
class NoiseRng {
public:
    explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 mix of (seed, index); gives each sentence its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct NoiseModel {
    /// Per-symbol firing probability; kNoiseMarker holds the insertion rate.
    std::map<Symbol, double> count_probab;
    /// Replacement distribution per symbol, identity removed. A kEpsilon
    /// target on a character row is a deletion.
    std::map<Symbol, std::vector<std::pair<Symbol, double>>> dict_selector;
    double rate_scale = 1.0;
    std::uint64_t seed = 0;
    std::string source_model_hash;

    double fire_probability(Symbol s) const;
    nlohmann::json to_json() const;
};

NoiseModel derive_noise_model(const ConfusionModel& model, double rate_scale, std::uint64_t seed);

/// Word with a marker between consecutive characters unless either of them
/// is a modifier. No marker follows the last character.
std::u32string interleave_markers(std::u32string_view word, const ScriptProfile& profile);

/// One pass over the interleaved word. Every position consumes exactly two
/// draws (fire, replacement) whether or not it fires, so runs at different
/// rate scales share their randomness. A word whose corruption would leave
/// it empty is returned unchanged.
std::string corrupt_word(const std::string& word, const NoiseModel& nm, const ScriptProfile& profile, NoiseRng& rng);

std::vector<std::string> corrupt_tokens(std::span<const std::string> tokens, const NoiseModel& nm,
                                        const ScriptProfile& profile, NoiseRng& rng);
/// Seeded from nm.seed.
std::vector<std::string> corrupt_tokens(std::span<const std::string> tokens, const NoiseModel& nm,
                                        const ScriptProfile& profile);

using Sentence = std::vector<std::string>;

/// Sentence i is corrupted with its own stream derive_seed(nm.seed, i).
std::vector<Sentence> corrupt_sentences(std::span<const Sentence> sentences, const NoiseModel& nm,
                                        const ScriptProfile& profile);

/// Fraction of tokens changed.
double token_corruption_rate(std::span<const Sentence> clean, std::span<const Sentence> noisy);

struct Calibration {
    double rate_scale = 0;
    double achieved_rate = 0;
    int iterations = 0;
};

/// Bisection on rate_scale until the token corruption rate of `sample`
/// reaches `target` within `tolerance`, or the bracket collapses.
Calibration calibrate_rate_scale(std::span<const Sentence> sample, const ConfusionModel& model,
                                 const ScriptProfile& profile, double target, std::uint64_t seed,
                                 double tolerance = 0.002, int max_iterations = 60);

struct EvalDataset {
    std::vector<Sentence> noisy;
    std::vector<Sentence> clean;
    std::uint64_t seed = 0;
    double rate_scale = 0;
    std::string source_model_hash;

    std::size_t size() const { return clean.size(); }
    double uncorrected_wer() const { return token_corruption_rate(clean, noisy); }

    /// `noisy<TAB>clean`, tokens joined by single spaces.
    void write_tsv(std::ostream& out) const;
    nlohmann::json sidecar() const;
    static EvalDataset read(std::istream& tsv, const nlohmann::json& sidecar);
};

EvalDataset build_eval_dataset(std::span<const Sentence> clean, const NoiseModel& nm, const ScriptProfile& profile);

} // namespace noisyspell
