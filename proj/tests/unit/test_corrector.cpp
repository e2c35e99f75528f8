#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "noisyspell/corrector.hpp"
#include "noisyspell/oracles.hpp"
#include "support/synthetic.hpp"

using namespace noisyspell;

namespace {

using Words = std::vector<std::string>;

const ScriptProfile latin = ScriptProfile::latin();

Vocabulary vocab_of(const Words& words) {
    Vocabulary v;
    for (const auto& w : words) {
        v.counts[w] = 1;
    }
    return v;
}

Words words_of(const CandidateSet& s) {
    Words out;
    for (const auto& c : s.candidates) {
        out.push_back(c.word);
    }
    return out;
}

// A small world: a channel trained on typical slips and a bigram model in
// which "the cat sat" and "a dog ran" are common.
struct Fixture {
    ConfusionModel channel;
    KNBigramModel lm;
    Vocabulary vocab;
    std::unique_ptr<CandidateIndex> index;

    Fixture() {
        const std::vector<Triple> triples{{"cat", "cst", 5}, {"sat", "sst", 4},  {"the", "teh", 6},
                                          {"dog", "dg", 3},  {"ran", "rn", 2},   {"cot", "cat", 1},
                                          {"hello", "helo", 5}, {"help", "hlp", 2}, {"mat", "nat", 2}};
        std::set<Symbol> alpha;
        for (char c = 'a'; c <= 'z'; ++c) {
            alpha.insert(static_cast<Symbol>(c));
        }
        channel = ConfusionModel::train(triples, alpha);
        std::istringstream corpus(
            "the cat sat\nthe cat sat\nthe cat sat\na dog ran\na dog ran\nthe cot\nthe mat sat\na cat ran\n"
            "hello there\nhelp me\nthe hat sat\n");
        lm = KNBigramModel::train(corpus, latin);
        for (const auto& w : lm.vocabulary()) {
            if (w != kSentenceEnd && w != kUnknownWord) {
                vocab.counts[w] = lm.unigram_count(w);
            }
        }
        index = std::make_unique<CandidateIndex>(vocab, 2);
    }
};

// Brute force: every combination of generated candidates, scored with the
// channel and the whole-sentence prior.
Words best_sentence(const Fixture& f, PriorModel& prior, const Words& observed, double lambda) {
    CandidateGenerator gen(*f.index, latin);
    std::vector<Words> options;
    for (const auto& w : observed) {
        options.push_back(words_of(gen.generate(w)));
    }
    Words cur(observed.size());
    Words best;
    double best_score = -INFINITY;
    double best_channel = -INFINITY;
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == observed.size()) {
            double channel = 0;
            for (std::size_t k = 0; k < cur.size(); ++k) {
                channel += bm_likelihood(std::string_view(observed[k]), std::string_view(cur[k]), f.channel);
            }
            const double score = channel + lambda * sentence_logprob(prior, cur);
            if (score > best_score + 1e-12 || (std::abs(score - best_score) <= 1e-12 && channel > best_channel)) {
                best_score = score;
                best_channel = channel;
                best = cur;
            }
            return;
        }
        for (const auto& w : options[i]) {
            cur[i] = w;
            walk(i + 1);
        }
    };
    walk(0);
    return best;
}

// Self-probability 0.9 on every character, the rest spread evenly.
ConfusionModel dominant_model() {
    std::set<Symbol> alpha;
    for (char c = 'a'; c <= 'z'; ++c) {
        alpha.insert(static_cast<Symbol>(c));
    }
    auto j = ConfusionModel::train(std::vector<Triple>{}, alpha).to_json();
    for (auto& [src, row] : j["rows"].items()) {
        const double others = static_cast<double>(row.size() - 1);
        for (auto& [tgt, p] : row.items()) {
            p = src.empty() ? 1.0 / static_cast<double>(row.size()) : (src == tgt ? 0.9 : 0.1 / others);
        }
    }
    return ConfusionModel::from_json(j);
}

} // namespace

TEST_CASE("distance bound follows word length") {
    CHECK(candidate_distance_bound(U"abc") == 1);
    CHECK(candidate_distance_bound(U"कि") == 1);
    CHECK(candidate_distance_bound(U"abcd") == 2);
}

TEST_CASE("short words use distance one") {
    const CandidateIndex index(vocab_of({"bat", "cut", "cog"}), 2);
    const CandidateGenerator gen(index, latin);
    const auto s = gen.generate("cat");
    CHECK(words_of(s) == Words{"bat", "cut", "cat"});
    CHECK_FALSE(s.filtered_by_metaphone);
}

TEST_CASE("fewer than five neighbours are all kept") {
    const CandidateIndex index(vocab_of({"house", "horse", "hose", "mouse", "zebra"}), 2);
    const CandidateGenerator gen(index, latin);
    const auto s = gen.generate("housr");
    CHECK(words_of(s) == Words{"horse", "hose", "house", "mouse", "housr"});
    CHECK_FALSE(s.filtered_by_metaphone);
}

TEST_CASE("five or more neighbours are cut to the closest phonetic keys") {
    const Words vocab{"smyth", "smitt", "swith", "smish", "snith", "smithy", "mith", "smite", "smeth"};
    const CandidateIndex index(vocab_of(vocab), 2);
    const CandidateGenerator gen(index, latin);
    const auto s = gen.generate("smith");
    CHECK(s.filtered_by_metaphone);
    CHECK(words_of(s) == Words{"smeth", "smithy", "smyth", "smith"});
    for (const auto& w : {"smeth", "smithy", "smyth"}) {
        CHECK(gen.phonetic_key(w) == gen.phonetic_key("smith"));
    }
    const auto scan = oracle::candidates_by_scan("smith", vocab, latin);
    CHECK(scan.words == words_of(s));
}

TEST_CASE("the observed word is never counted as its own neighbour") {
    // Four other words plus the observed one: still below the threshold.
    const CandidateIndex index(vocab_of({"house", "horse", "hose", "mouse", "louse"}), 2);
    const CandidateGenerator gen(index, latin);
    const auto s = gen.generate("house");
    CHECK_FALSE(s.filtered_by_metaphone);
    CHECK(words_of(s) == Words{"horse", "hose", "louse", "mouse", "house"});
}

TEST_CASE("generation agrees with a linear scan on a synthetic language") {
    const auto lang = synth::make_language(5, {.base_words = 400});
    Words list(lang.words.begin(), lang.words.end());
    std::sort(list.begin(), list.end());
    const auto deva = ScriptProfile::devanagari();
    const CandidateIndex index(vocab_of(list), 2);
    const CandidateGenerator gen(index, deva);
    synth::Rng rng(6);
    for (int i = 0; i < 300; ++i) {
        const auto probe = synth::misspell(list[rng.below(list.size())], rng);
        const auto want = oracle::candidates_by_scan(probe, list, deva);
        const auto got = gen.generate(probe);
        REQUIRE(words_of(got) == want.words);
        REQUIRE(got.filtered_by_metaphone == want.filtered);
    }
}

TEST_CASE("configuration parsing and validation") {
    CHECK(parse_mode("word") == CorrectionMode::Word);
    CHECK(parse_mode("sentence") == CorrectionMode::Sentence);
    CHECK_THROWS(parse_mode("para"));
    CHECK(parse_error_model("bm") == ErrorModelKind::BrillMoore);
    CHECK(parse_error_model("cd") == ErrorModelKind::ConstantDistributive);
    CorrectionConfig c;
    CHECK_NOTHROW(c.validate());
    c.lambda = -1;
    CHECK_THROWS(c.validate());
    c = {};
    c.cd.alpha = 1.5;
    CHECK_THROWS(c.validate());
    c = {};
    c.ablation = true;
    CHECK_THROWS(c.validate());
    c = {};
    c.per_word_cap = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("out of vocabulary word is fixed when one neighbour fits the context") {
    const Fixture f;
    KnPrior prior(f.lm);
    Corrector c(*f.index, latin, &f.channel, prior, {});
    const Words left{"the"};
    const Words right{"sat"};
    const auto set = c.correct_word("czt", left, right);
    // Exhaustive scoring of the same candidates.
    std::string best;
    double best_score = -INFINITY;
    for (const auto& cand : set.candidates) {
        const double s = bm_likelihood(std::string_view("czt"), std::string_view(cand.word), f.channel) +
                         prior.score({left, {}, {cand.word}})[0];
        CHECK(cand.posterior_logp == doctest::Approx(s));
        if (s > best_score) {
            best_score = s;
            best = cand.word;
        }
    }
    CHECK(best == "cat");
    CHECK(set.best().word == "cat");
}

TEST_CASE("lambda moves the choice between channel and prior") {
    const Fixture f;
    KnPrior prior(f.lm);
    const Words left{"the"};
    const Words right;
    auto pick = [&](double lambda) {
        CorrectionConfig cfg;
        cfg.lambda = lambda;
        Corrector c(*f.index, latin, &f.channel, prior, cfg);
        return c.correct_word("cot", left, right);
    };
    const auto zero = pick(0);
    // At lambda 0 the order is the channel order.
    for (std::size_t i = 1; i < zero.candidates.size(); ++i) {
        CHECK(zero.candidates[i - 1].channel_logp >= zero.candidates[i].channel_logp);
    }
    CHECK(zero.best().word == "cot");

    const auto big = pick(1000);
    std::string prior_best;
    double prior_score = -INFINITY;
    for (const auto& cand : big.candidates) {
        if (cand.prior_logp > prior_score) {
            prior_score = cand.prior_logp;
            prior_best = cand.word;
        }
    }
    CHECK(big.best().word == prior_best);
    CHECK(big.best().word == "cat");
    CHECK(pick(10).best().word == "cat");
    CHECK(pick(1).best().word == pick(1).best().word);
}

TEST_CASE("posterior is channel plus lambda times prior") {
    const Fixture f;
    KnPrior prior(f.lm);
    CorrectionConfig cfg;
    cfg.lambda = 2.5;
    Corrector c(*f.index, latin, &f.channel, prior, cfg);
    const Words left{"a"};
    const auto set = c.correct_word("dg", left, {});
    for (const auto& cand : set.candidates) {
        CHECK(cand.posterior_logp == doctest::Approx(cand.channel_logp + 2.5 * cand.prior_logp));
    }
}

TEST_CASE("singleton candidate sets leave the sentence alone") {
    const CandidateIndex index(vocab_of({"alpha", "omega"}), 2);
    UniformPrior prior;
    CorrectionConfig cfg;
    cfg.mode = CorrectionMode::Sentence;
    const auto ch = ConfusionModel::train(std::vector<Triple>{{"ab", "b", 1}}, {U'a', U'b'});
    Corrector c(index, latin, &ch, prior, cfg);
    const Words in{"xyzzy", "qq", "wvut"};
    const auto r = c.correct(in);
    CHECK(r.corrected == in);
    CHECK(r.changed.empty());
}

TEST_CASE("single word sentence agrees with word mode") {
    const Fixture f;
    KnPrior prior(f.lm);
    CorrectionConfig sent;
    sent.mode = CorrectionMode::Sentence;
    Corrector s(*f.index, latin, &f.channel, prior, sent);
    Corrector w(*f.index, latin, &f.channel, prior, {});
    for (const auto& word : {"czt", "teh", "dg", "helo", "mat", "zzz"}) {
        const Words one{word};
        CHECK(s.correct(one).corrected == w.correct(one).corrected);
    }
}

TEST_CASE("sentence mode finds the joint best") {
    const Fixture f;
    KnPrior prior(f.lm);
    CorrectionConfig cfg;
    cfg.mode = CorrectionMode::Sentence;
    Corrector c(*f.index, latin, &f.channel, prior, cfg);
    const std::vector<Words> cases{
        {"teh", "cst", "sst"}, {"a", "dg", "rn"}, {"the", "cot", "sat"}, {"helo", "there"},
        {"tha", "mat", "sat"}, {"a", "cat", "ran"}, {"hlp", "me"},        {"the", "hat", "sst"},
    };
    for (const auto& in : cases) {
        CAPTURE(in);
        CHECK(c.correct(in).corrected == best_sentence(f, prior, in, 1.0));
    }
}

TEST_CASE("joint ranking repairs what word ranking cannot") {
    // "pit" opens more sentences than "pet" and "log" follows many words,
    // but "pet dog" is the only pair seen together. The channel is flat, so
    // word by word the picks are "pit" and "log".
    std::string text;
    for (int i = 0; i < 6; ++i) {
        text += "pet dog\n";
    }
    for (int i = 0; i < 8; ++i) {
        text += "pit\n";
    }
    for (const char* w : {"a", "b", "c", "e", "f", "g"}) {
        text += std::string(w) + " log\n";
    }
    std::istringstream corpus(text);
    const auto lm = KNBigramModel::train(corpus, latin);
    const CandidateIndex index(vocab_of({"pet", "pit", "dog", "log"}), 2);
    std::set<Symbol> alpha;
    for (char c = 'a'; c <= 'z'; ++c) {
        alpha.insert(static_cast<Symbol>(c));
    }
    const auto flat = ConfusionModel::train(std::vector<Triple>{}, alpha);
    KnPrior prior(lm);
    const Words in{"pat", "zog"};

    Corrector w(index, latin, &flat, prior, {});
    CHECK(w.correct(in).corrected == Words{"pit", "log"});

    CorrectionConfig sent;
    sent.mode = CorrectionMode::Sentence;
    Corrector s(index, latin, &flat, prior, sent);
    const auto joint = s.correct(in).corrected;
    CHECK(joint == Words{"pet", "dog"});

    // Brute force over the 3 x 3 product space.
    const Words first{"pet", "pit", "pat"};
    const Words second{"dog", "log", "zog"};
    Words best;
    double best_score = -INFINITY;
    for (const auto& a : first) {
        for (const auto& b : second) {
            const Words cand{a, b};
            const double score = bm_likelihood(std::string_view("pat"), std::string_view(a), flat) +
                                 bm_likelihood(std::string_view("zog"), std::string_view(b), flat) +
                                 sentence_logprob(prior, cand);
            if (score > best_score) {
                best_score = score;
                best = cand;
            }
        }
    }
    CHECK(joint == best);
}

TEST_CASE("beam search matches enumeration when wide enough") {
    const Fixture f;
    KnPrior prior(f.lm);
    CorrectionConfig exact;
    exact.mode = CorrectionMode::Sentence;
    CorrectionConfig beam = exact;
    beam.enumeration_limit = 1;
    beam.beam_width = 4096;
    Corrector a(*f.index, latin, &f.channel, prior, exact);
    Corrector b(*f.index, latin, &f.channel, prior, beam);
    const Words in{"teh", "cst", "sst", "a", "dg", "rn", "the", "mat"};
    CHECK(a.correct(in).corrected == b.correct(in).corrected);
    CHECK(a.correct(in).score == doctest::Approx(b.correct(in).score));
}

TEST_CASE("cap keeps the observed word") {
    const Fixture f;
    KnPrior prior(f.lm);
    CorrectionConfig cfg;
    cfg.mode = CorrectionMode::Sentence;
    cfg.per_word_cap = 1;
    Corrector c(*f.index, latin, &f.channel, prior, cfg);
    const Words in{"cot", "sat"};
    const auto r = c.correct(in);
    CHECK(r.corrected == in);
}

TEST_CASE("constant distributive channel scores") {
    const Fixture f;
    UniformPrior prior;
    CorrectionConfig cfg;
    cfg.error_model = ErrorModelKind::ConstantDistributive;
    Corrector c(*f.index, latin, nullptr, prior, cfg);
    const auto set = c.correct_word("cot", {}, {});
    const double n = static_cast<double>(set.candidates.size());
    for (const auto& cand : set.candidates) {
        CHECK(cand.channel_logp == doctest::Approx(cand.word == "cot" ? std::log(0.65) : std::log(0.35 / (n - 1))));
    }
    CHECK(set.best().word == "cot");
}

TEST_CASE("ablation keeps dictionary words") {
    const auto model = dominant_model();
    CorrectionConfig cfg;
    cfg.ablation = true;
    cfg.ablation_vocab = std::make_shared<const Vocabulary>(vocab_of({"hello", "help", "cat", "cot", "the"}));
    const Words in{"the", "cot", "cat", "help"};
    const auto r = ablation_correct(in, &model, latin, cfg);
    CHECK(r.corrected == in);
    // Exhaustive: the identity beats every other candidate.
    for (const auto& set : r.traces) {
        const double self = bm_likelihood(std::string_view(set.observed), std::string_view(set.observed), model);
        for (const auto& cand : set.candidates) {
            if (cand.word != set.observed) {
                CHECK(bm_likelihood(std::string_view(set.observed), std::string_view(cand.word), model) < self);
            }
        }
    }
}

TEST_CASE("ablation takes the channel argmax for unknown words") {
    const Fixture f;
    CorrectionConfig cfg;
    cfg.ablation = true;
    cfg.ablation_vocab = std::make_shared<const Vocabulary>(vocab_of({"hello", "help"}));
    const Words in{"helo"};
    const double to_hello = bm_likelihood(std::string_view("helo"), std::string_view("hello"), f.channel);
    const double to_help = bm_likelihood(std::string_view("helo"), std::string_view("help"), f.channel);
    const auto r = ablation_correct(in, &f.channel, latin, cfg);
    CHECK(r.corrected[0] == (to_hello >= to_help ? "hello" : "help"));
    const auto& trace = r.traces[0];
    for (const auto& cand : trace.candidates) {
        if (cand.word == "helo") {
            CHECK(cand.channel_logp ==
                  doctest::Approx(bm_likelihood(std::string_view("helo"), std::string_view("helo"), f.channel) - 50));
        }
    }
}

TEST_CASE("constant distributive ablation leaves a correct sentence alone") {
    CorrectionConfig cfg;
    cfg.ablation = true;
    cfg.error_model = ErrorModelKind::ConstantDistributive;
    cfg.ablation_vocab = std::make_shared<const Vocabulary>(vocab_of({"cat", "cot", "cut", "hat", "the", "sat"}));
    for (auto mode : {CorrectionMode::Word, CorrectionMode::Sentence}) {
        cfg.mode = mode;
        const Words in{"the", "cat", "sat"};
        CHECK(ablation_correct(in, nullptr, latin, cfg).corrected == in);
    }
}

TEST_CASE("traces carry every scored candidate") {
    const Fixture f;
    KnPrior prior(f.lm);
    Corrector c(*f.index, latin, &f.channel, prior, {});
    const Words in{"the", "czt"};
    const auto r = c.correct(in);
    REQUIRE(r.traces.size() == 2);
    const auto lines = r.trace_lines();
    REQUIRE(lines.size() == 2);
    CHECK(lines[1]["observed"] == "czt");
    CHECK(lines[1]["candidates"].size() == r.traces[1].candidates.size());
    CHECK(r.changed == std::vector<std::size_t>{1});
}

namespace {

class FailingPrior final : public PriorModel {
public:
    std::vector<LogProb> score(const LMQuery&) override { throw PriorError("backend down"); }
    std::string name() const override { return "failing"; }
};

} // namespace

TEST_CASE("prior failures propagate unless a fallback is set") {
    const Fixture f;
    FailingPrior bad;
    KnPrior good(f.lm);
    const Words in{"the", "czt"};
    Corrector strict(*f.index, latin, &f.channel, bad, {});
    CHECK_THROWS_AS(strict.correct(in), PriorError);

    CorrectionConfig cfg;
    cfg.prior_fallback = true;
    Corrector lenient(*f.index, latin, &f.channel, bad, cfg);
    lenient.set_fallback_prior(&good);
    Corrector reference(*f.index, latin, &f.channel, good, {});
    CHECK(lenient.correct(in).corrected == reference.correct(in).corrected);
    CHECK(lenient.fallback_uses() > 0);
}
