#pragma once

// The synthetic end-to-end benchmark: two training corpora drawn from one
// synthetic language, a generator channel trained on the first, a corrector
// channel and bigram model trained on the second, and a noised evaluation
// set of clean held-out sentences.

#include <memory>
#include <optional>
#include <string>

#include "noisyspell/candidate_index.hpp"
#include "noisyspell/channel.hpp"
#include "noisyspell/langmodel.hpp"
#include "noisyspell/noiser.hpp"
#include "support/synthetic.hpp"

struct BenchmarkParams {
    std::uint64_t seed = 20240611;
    std::size_t corpus_sentences = 40000;
    double corpus_error_rate = 0.02;
    std::size_t eval_sentences = 2000;
    double target_wer = 0.25;
    noisyspell::Count lm_vocab_cutoff = 2;
    noisyspell::Count candidate_cutoff = 3;
};

struct Benchmark {
    BenchmarkParams params;
    synth::Language language;
    noisyspell::ScriptProfile profile;
    noisyspell::ConfusionModel generator_channel;
    noisyspell::ConfusionModel corrector_channel;
    std::size_t generator_triples = 0;
    std::size_t corrector_triples = 0;
    noisyspell::KNBigramModel lm;
    noisyspell::Vocabulary candidate_vocab;
    std::unique_ptr<noisyspell::CandidateIndex> index;
    std::shared_ptr<const noisyspell::Vocabulary> lexicon;
    noisyspell::Calibration calibration;
    noisyspell::EvalDataset dataset;
};

std::unique_ptr<Benchmark> build_benchmark(const BenchmarkParams& params = {});
