#include <doctest.h>

#include <sstream>

#include "noisyspell/corpus.hpp"
#include "noisyspell/utf8.hpp"

using namespace noisyspell;

namespace {

FrequencyTable ingest_text(const std::string& text) {
    std::istringstream in(text);
    return ingest(in, ScriptProfile::latin());
}

} // namespace

TEST_CASE("ingest counts tokens") {
    const auto t = ingest_text("a a b");
    CHECK(t.count("a") == 2);
    CHECK(t.count("b") == 1);
    CHECK(t.total_tokens() == 3);
    CHECK(ingest_text("").empty());
    CHECK(ingest_text("x.\n\ny, x").count("x") == 2);
}

TEST_CASE("ingest reports the byte offset of bad utf8") {
    std::string text(5000, 'a');
    text += " \xc3";
    try {
        ingest_text(text);
        FAIL("expected an error");
    } catch (const Utf8Error& e) {
        CHECK(e.offset() == 5001);
    }
}

TEST_CASE("frequency table sorting and round trip") {
    FrequencyTable t;
    t.add("b", 3);
    t.add("a", 3);
    t.add("c", 9);
    const auto s = t.sorted();
    REQUIRE(s.size() == 3);
    CHECK(s[0].first == "c");
    CHECK(s[1].first == "a");
    CHECK(s[2].first == "b");
    std::ostringstream out;
    t.write_tsv(out);
    std::istringstream in(out.str());
    CHECK(FrequencyTable::read_tsv(in) == t);
}

TEST_CASE("merging tables equals ingesting the concatenation") {
    auto a = ingest_text("x y z x");
    const auto b = ingest_text("y q");
    a.merge(b);
    CHECK(a == ingest_text("x y z x y q"));
}

TEST_CASE("vocabulary cutoff") {
    FrequencyTable t;
    t.add("a", 5);
    t.add("b", 1);
    const auto v2 = build_vocab(t, 2);
    CHECK(v2.contains("a"));
    CHECK_FALSE(v2.contains("b"));
    CHECK(build_vocab(t, 1).size() == 2);
}

TEST_CASE("wordlists accept an optional count column") {
    std::istringstream in("alpha\nbeta\t7\n\ngamma 3\n");
    const auto v = read_wordlist(in);
    CHECK(v.count("alpha") == 1);
    CHECK(v.count("beta") == 7);
    CHECK(v.size() == 3);
}

TEST_CASE("quartiles interpolate between order statistics") {
    // Positions (n-1)p over [2,19,47,100]: Q2 at 1.5 gives (19+47)/2.
    const Summary s = summarize({100, 2, 47, 19});
    CHECK(s.q2 == doctest::Approx(33));
    CHECK(s.q1 == doctest::Approx(2 + 0.75 * 17));
    CHECK(s.q3 == doctest::Approx(47 + 0.25 * 53));
    CHECK(s.mean == doctest::Approx(42));
    CHECK(s.max == 100);

    const Summary one = summarize({7});
    CHECK(one.q1 == 7);
    CHECK(one.q2 == 7);
    CHECK(one.q3 == 7);
    CHECK(one.mean == 7);
    CHECK(one.max == 7);
}

TEST_CASE("corpus stats over paragraphs") {
    std::istringstream in("a b. c d e.\n\nf g h!\n\n\ni j");
    const auto st = corpus_stats(in, ScriptProfile::latin(), {1, 2});
    CHECK(st.paragraphs == 3);
    CHECK(st.words_per_paragraph.max == 5);
    CHECK(st.sentences_per_paragraph.max == 2);
    REQUIRE(st.vocab_size_by_cutoff.size() == 2);
    CHECK(st.vocab_size_by_cutoff[0].second == 10);
    CHECK(st.vocab_size_by_cutoff[1].second == 0);
    const std::string csv = st.to_csv("toy");
    CHECK(csv.find("q1,q2,q3,mean,max") != std::string::npos);
}
