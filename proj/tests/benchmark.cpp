#include "benchmark.hpp"

#include <sstream>

#include "noisyspell/utf8.hpp"

using namespace noisyspell;

namespace {

struct TrainedChannel {
    ConfusionModel model;
    std::size_t triples = 0;
};

TrainedChannel train_channel(const std::string& text, const ScriptProfile& profile, const std::set<Symbol>& extra) {
    std::istringstream in(text);
    const FrequencyTable table = ingest(in, profile);
    const auto triples = extract_triples(table);
    auto alphabet = triple_alphabet(triples);
    alphabet.insert(extra.begin(), extra.end());
    return {ConfusionModel::train(triples, alphabet), triples.size()};
}

} // namespace

std::unique_ptr<Benchmark> build_benchmark(const BenchmarkParams& params) {
    auto b = std::make_unique<Benchmark>();
    b->params = params;
    b->profile = ScriptProfile::devanagari();
    b->language = synth::make_language(params.seed);

    std::set<Symbol> letters;
    for (const auto& w : b->language.words) {
        for (Symbol c : decode_utf8(w)) {
            letters.insert(c);
        }
    }

    const std::string corpus_a =
        synth::corpus_text(b->language, params.corpus_sentences, params.corpus_error_rate, params.seed + 1);
    const std::string corpus_b =
        synth::corpus_text(b->language, params.corpus_sentences, params.corpus_error_rate, params.seed + 2);

    auto gen = train_channel(corpus_a, b->profile, letters);
    b->generator_channel = std::move(gen.model);
    b->generator_triples = gen.triples;
    auto cor = train_channel(corpus_b, b->profile, letters);
    b->corrector_channel = std::move(cor.model);
    b->corrector_triples = cor.triples;

    std::istringstream lm_in(corpus_b);
    b->lm = KNBigramModel::train(lm_in, b->profile, kDefaultDiscount, params.lm_vocab_cutoff);
    for (const auto& w : b->lm.vocabulary()) {
        if (w == kSentenceEnd || w == kUnknownWord) {
            continue;
        }
        const Count c = b->lm.unigram_count(w);
        if (c >= params.candidate_cutoff) {
            b->candidate_vocab.counts[w] = c;
        }
    }
    b->index = std::make_unique<CandidateIndex>(b->candidate_vocab, 2);
    b->lexicon = std::make_shared<const Vocabulary>(b->language.vocabulary());

    const auto clean = b->language.sample(params.eval_sentences, params.seed + 3);
    b->calibration =
        calibrate_rate_scale(clean, b->generator_channel, b->profile, params.target_wer, params.seed + 4);
    const auto nm = derive_noise_model(b->generator_channel, b->calibration.rate_scale, params.seed + 4);
    b->dataset = build_eval_dataset(clean, nm, b->profile);
    return b;
}
