#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "noisyspell/langmodel.hpp"

using namespace noisyspell;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

KNBigramModel from_text(const std::string& text, Count cutoff = 1) {
    std::istringstream in(text);
    return KNBigramModel::train(in, ScriptProfile::latin(), 0.75, cutoff);
}

} // namespace

TEST_CASE("interpolated estimate by hand on a two-line corpus") {
    const auto m = from_text("a b\na b");
    // Bigram types: (<s>,a) (a,b) (b,</s>).
    CHECK(m.bigram_types() == 3);
    const double pcont_b = 1.0 / 3;
    CHECK(m.continuation_prob("b") == doctest::Approx(pcont_b));
    CHECK(m.prob("b", "a") == doctest::Approx((2 - 0.75) / 2 + (0.75 * 1 / 2) * pcont_b));
    // Unseen (b, a) keeps only the continuation share.
    const double back = m.prob("a", "b");
    CHECK(back > 0);
    CHECK(back == doctest::Approx((0.75 * 1 / 2) * m.continuation_prob("a")));
}

TEST_CASE("conditional distributions sum to one") {
    const auto m = from_text("a b c\nb c a d\na a b\nd\nc b a a", 1);
    auto vocab = m.vocabulary();
    std::vector<std::string> contexts = vocab;
    contexts.push_back(kSentenceStart);
    contexts.push_back("never");
    for (const auto& ctx : contexts) {
        double sum = 0;
        for (const auto& w : vocab) {
            sum += m.prob(w, ctx);
        }
        CHECK(sum == doctest::Approx(1).epsilon(1e-12));
    }
    double cont = 0;
    for (const auto& w : vocab) {
        cont += m.continuation_prob(w);
    }
    CHECK(cont == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("rare words fold into unk") {
    const auto m = from_text("a b\na c\na b", 2);
    CHECK(m.in_vocab("a"));
    CHECK(m.in_vocab("b"));
    CHECK_FALSE(m.in_vocab("c"));
    CHECK(m.unknown_types() == 1);
    CHECK(m.prob("c", "a") == m.prob(kUnknownWord, "a"));
    CHECK(m.prob("zzz", "a") == m.prob(kUnknownWord, "a"));
}

TEST_CASE("log probabilities are finite and negative") {
    const auto m = from_text("x y z\ny z x");
    for (const auto& w : std::vector<std::string>{"x", "y", "z", "q", kSentenceEnd}) {
        for (const auto& v : std::vector<std::string>{"x", "y", kSentenceStart, "q"}) {
            const double lp = m.logprob(w, v);
            CHECK(std::isfinite(lp));
            CHECK(lp < 0);
            CHECK(lp == m.logprob(w, v));
        }
    }
}

TEST_CASE("seen bigram beats a rare unseen word") {
    const auto m = from_text("a b\na b\nc z\nb c");
    CHECK(m.logprob("b", "a") > m.logprob("z", "a"));
}

TEST_CASE("sentence score sums per-position scores") {
    const auto m = from_text("a b\na b\na b\nb a");
    const std::vector<std::string> one{"a"};
    CHECK(sentence_logprob(m, one) == m.logprob("a", kSentenceStart));
    const std::vector<std::string> ab{"a", "b"};
    const std::vector<std::string> ba{"b", "a"};
    CHECK(sentence_logprob(m, ab) > sentence_logprob(m, ba));

    KnPrior prior(m);
    CHECK(sentence_logprob(prior, ab) == doctest::Approx(sentence_logprob(m, ab)));
    const auto pos = position_logprobs(prior, ab);
    REQUIRE(pos.size() == 2);
    CHECK(pos[0] == doctest::Approx(m.logprob("a", kSentenceStart)));
    CHECK(pos[1] == doctest::Approx(m.logprob("b", "a")));
}

TEST_CASE("kn prior splits unknown mass across folded types") {
    const auto m = from_text("a b\na c\na d\na b", 2);
    REQUIRE(m.unknown_types() == 2);
    KnPrior split(m);
    KnPrior whole(m, false);
    const LMQuery q{{"a"}, {}, {"b", "zz"}};
    const auto s = split.score(q);
    const auto w = whole.score(q);
    CHECK(s[0] == w[0]);
    CHECK(s[1] == doctest::Approx(w[1] - std::log(2.0)));
}

TEST_CASE("uniform prior is flat") {
    UniformPrior u;
    const auto s = u.score({{}, {}, {"a", "b", "c"}});
    CHECK(s[0] == s[1]);
    CHECK(s[1] == s[2]);
}

TEST_CASE("serialization round trip gives identical scores") {
    std::mt19937_64 rng(3);
    Sentences corpus;
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> s;
        for (std::size_t k = 1 + rng() % 8; k > 0; --k) {
            s.push_back("w" + std::to_string(rng() % 40));
        }
        corpus.push_back(std::move(s));
    }
    const auto m = KNBigramModel::train(corpus, 0.75, 2);
    const auto back = KNBigramModel::from_file_json(nlohmann::json::parse(m.to_file_json().dump()));
    for (int i = 0; i < 1000; ++i) {
        const std::string w = "w" + std::to_string(rng() % 45);
        const std::string v = i % 10 == 0 ? kSentenceStart : "w" + std::to_string(rng() % 45);
        REQUIRE(back.logprob(w, v) == m.logprob(w, v));
    }
}

TEST_CASE("training rejects bad input") {
    CHECK_THROWS(from_text(""));
    CHECK_THROWS(KNBigramModel::train(Sentences{{"a"}}, 1.0));
    CHECK_THROWS(KNBigramModel::train(Sentences{{"a"}}, 0.0));
}
