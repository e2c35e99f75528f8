#include "noisyspell/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "noisyspell/corrector.hpp"
#include "noisyspell/metaphone.hpp"
#include "noisyspell/utf8.hpp"

namespace noisyspell::oracle {

namespace {

constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

struct OsaMemo {
    const std::u32string& a;
    const std::u32string& b;
    std::vector<std::size_t> memo;

    std::size_t at(std::size_t i, std::size_t j) {
        std::size_t& slot = memo[i * (b.size() + 1) + j];
        if (slot != kUnset) {
            return slot;
        }
        if (i == a.size()) {
            return slot = b.size() - j;
        }
        if (j == b.size()) {
            return slot = a.size() - i;
        }
        std::size_t best = at(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
        best = std::min(best, at(i + 1, j) + 1);
        best = std::min(best, at(i, j + 1) + 1);
        if (i + 1 < a.size() && j + 1 < b.size() && a[i] == b[j + 1] && a[i + 1] == b[j]) {
            best = std::min(best, at(i + 2, j + 2) + 1);
        }
        return slot = best;
    }
};

void enumerate(const std::u32string& c, const std::u32string& o, std::size_t i, std::size_t j,
               std::vector<AlignedPair>& cur, std::vector<std::vector<AlignedPair>>& out) {
    if (i == c.size() && j == o.size()) {
        out.push_back(cur);
        return;
    }
    if (i < c.size() && j < o.size()) {
        cur.push_back({c[i], o[j]});
        enumerate(c, o, i + 1, j + 1, cur, out);
        cur.pop_back();
    }
    if (i < c.size()) {
        cur.push_back({c[i], kEpsilon});
        enumerate(c, o, i + 1, j, cur, out);
        cur.pop_back();
    }
    if (j < o.size()) {
        cur.push_back({kEpsilon, o[j]});
        enumerate(c, o, i, j + 1, cur, out);
        cur.pop_back();
    }
}

// Portable draws so the suites behave the same everywhere.
struct Draw {
    std::mt19937_64 engine;
    explicit Draw(std::uint64_t seed) : engine(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
};

std::u32string random_word(Draw& d, const std::u32string& alphabet, std::size_t min_len, std::size_t max_len) {
    std::u32string w;
    const std::size_t len = min_len + d.below(max_len - min_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        w.push_back(alphabet[d.below(alphabet.size())]);
    }
    return w;
}

SuiteResult check_distances() {
    SuiteResult r{"dl_distance vs definition, all strings <= 6 over {a,b,c}", true, ""};
    const auto strings = all_strings(U"abc", 6);
    std::size_t pairs = 0;
    std::size_t mismatches = 0;
    for (const auto& a : strings) {
        for (const auto& b : strings) {
            ++pairs;
            const std::size_t expect = osa_distance(a, b);
            const std::size_t got = damerau_distance(a, b);
            bool ok = got == expect;
            for (std::size_t bound = 0; bound <= 3 && ok; ++bound) {
                ok = damerau_distance_bounded(a, b, bound) == std::min(expect, bound + 1);
            }
            if (!ok) {
                if (mismatches == 0) {
                    r.detail = "first mismatch: '" + encode_utf8(a) + "' vs '" + encode_utf8(b) + "'";
                }
                ++mismatches;
            }
        }
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches" +
               (r.detail.empty() ? "" : "; " + r.detail);
    return r;
}

ConfusionModel random_model(std::uint64_t seed, const std::u32string& alphabet, std::size_t triples) {
    Draw d(seed);
    std::vector<Triple> ts;
    for (std::size_t i = 0; i < triples; ++i) {
        auto c = random_word(d, alphabet, 1, 5);
        auto m = random_word(d, alphabet, 1, 5);
        if (c != m) {
            ts.push_back({encode_utf8(c), encode_utf8(m), 1 + d.below(20)});
        }
    }
    std::set<Symbol> alpha(alphabet.begin(), alphabet.end());
    return ConfusionModel::train(ts, alpha, 0.1);
}

SuiteResult check_bm_likelihood(std::uint64_t seed) {
    SuiteResult r{"bm_likelihood vs alignment enumeration, all strings <= 4 over {a,b,c}", true, ""};
    const auto model = random_model(seed, U"abc", 60);
    const auto strings = all_strings(U"abc", 4);
    std::size_t pairs = 0;
    std::size_t mismatches = 0;
    double worst = 0;
    for (const auto& o : strings) {
        for (const auto& c : strings) {
            ++pairs;
            const double expect = bm_likelihood_by_enumeration(o, c, model);
            const double got = bm_likelihood(o, c, model);
            const double diff = std::abs(expect - got);
            worst = std::max(worst, diff);
            mismatches += diff > 1e-9;
        }
    }
    r.passed = mismatches == 0;
    std::ostringstream s;
    s << pairs << " pairs, " << mismatches << " mismatches, max |diff| " << worst;
    r.detail = s.str();
    return r;
}

SuiteResult check_alignments(std::uint64_t seed) {
    SuiteResult r{"alignment reconstruction and cost", true, ""};
    Draw d(seed);
    std::size_t bad = 0;
    const std::size_t trials = 20000;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto a = random_word(d, U"abcdक्िी", 0, 8);
        const auto b = random_word(d, U"abcdक्िी", 0, 8);
        const Alignment al = align(a, b);
        bool ok = al.source() == a && al.target() == b && al.cost() == levenshtein_distance(a, b);
        for (const auto& p : al.pairs) {
            ok = ok && !(p.source == kEpsilon && p.target == kEpsilon);
        }
        bad += !ok;
    }
    r.passed = bad == 0;
    r.detail = std::to_string(trials) + " random pairs, " + std::to_string(bad) + " failures";
    return r;
}

SuiteResult check_confusion_rows(std::uint64_t seed) {
    SuiteResult r{"confusion model rows sum to 1", true, ""};
    const auto model = random_model(seed, U"abcdefg", 500);
    const std::size_t n = model.symbols().size();
    double worst = 0;
    for (std::size_t s = 0; s < n; ++s) {
        double total = 0;
        for (std::size_t t = 0; t < n; ++t) {
            total += model.prob_at(s, t);
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    r.passed = worst <= 1e-9;
    std::ostringstream out;
    out << n << " rows, max |sum - 1| " << worst;
    r.detail = out.str();
    return r;
}

SuiteResult check_kn_normalization(std::uint64_t seed) {
    SuiteResult r{"Kneser-Ney conditional distributions sum to 1", true, ""};
    Draw d(seed);
    std::vector<std::string> words;
    for (int i = 0; i < 60; ++i) {
        words.push_back("w" + std::to_string(i));
    }
    std::vector<std::vector<std::string>> sentences;
    for (int s = 0; s < 400; ++s) {
        std::vector<std::string> sent;
        std::size_t w = d.below(words.size());
        const std::size_t len = 2 + d.below(8);
        for (std::size_t k = 0; k < len; ++k) {
            sent.push_back(words[w]);
            w = d.below(4) == 0 ? d.below(words.size()) : (w * 7 + 3) % words.size();
        }
        sentences.push_back(std::move(sent));
    }
    const auto model = KNBigramModel::train(sentences, 0.75, 2);
    auto vocab = model.vocabulary();
    std::vector<std::string> contexts = vocab;
    contexts.push_back(kSentenceStart);
    contexts.push_back("never-seen");
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto& ctx = contexts[d.below(contexts.size())];
        double total = 0;
        for (const auto& w : vocab) {
            total += model.prob(w, ctx);
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    r.passed = worst <= 1e-9;
    std::ostringstream out;
    out << "100 contexts over " << vocab.size() << " words, max |sum - 1| " << worst;
    r.detail = out.str();
    return r;
}

SuiteResult check_candidates(std::uint64_t seed) {
    SuiteResult r{"candidate generation vs linear scan", true, ""};
    Draw d(seed);
    const std::u32string letters = U"aeiostnrkmpl";
    std::set<std::string> words;
    while (words.size() < 500) {
        words.insert(encode_utf8(random_word(d, letters, 2, 7)));
    }
    Vocabulary vocab;
    for (const auto& w : words) {
        vocab.counts[w] = 1;
    }
    const std::vector<std::string> list(words.begin(), words.end());
    const auto profile = ScriptProfile::latin();
    const CandidateIndex index(vocab, 2);
    const CandidateGenerator gen(index, profile);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string probe;
        if (i % 2 == 0) {
            // Perturb a vocabulary word so probes land near real words.
            auto w = decode_utf8(list[d.below(list.size())]);
            const std::size_t pos = d.below(w.size());
            w[pos] = letters[d.below(letters.size())];
            probe = encode_utf8(w);
        } else {
            probe = encode_utf8(random_word(d, letters, 1, 8));
        }
        const auto expect = candidates_by_scan(probe, list, profile);
        const auto got = gen.generate(probe);
        std::vector<std::string> got_words;
        for (const auto& c : got.candidates) {
            got_words.push_back(c.word);
        }
        bad += got_words != expect.words || got.filtered_by_metaphone != expect.filtered;
    }
    r.passed = bad == 0;
    r.detail = "1000 probes over 500 words, " + std::to_string(bad) + " disagreements";
    return r;
}

} // namespace

std::size_t osa_distance(const std::u32string& a, const std::u32string& b) {
    OsaMemo m{a, b, std::vector<std::size_t>((a.size() + 1) * (b.size() + 1), kUnset)};
    return m.at(0, 0);
}

std::size_t bfs_edit_distance(const std::u32string& a, const std::u32string& b, std::size_t max_depth) {
    if (a == b) {
        return 0;
    }
    std::set<Symbol> alpha_set(a.begin(), a.end());
    alpha_set.insert(b.begin(), b.end());
    const std::vector<Symbol> alphabet(alpha_set.begin(), alpha_set.end());

    std::unordered_set<std::u32string> seen{a};
    std::vector<std::u32string> frontier{a};
    for (std::size_t depth = 1; depth <= max_depth; ++depth) {
        std::vector<std::u32string> next;
        auto visit = [&](std::u32string s) {
            if (seen.insert(s).second) {
                next.push_back(std::move(s));
            }
        };
        for (const auto& s : frontier) {
            for (std::size_t i = 0; i <= s.size(); ++i) {
                for (Symbol c : alphabet) {
                    std::u32string t = s;
                    t.insert(t.begin() + static_cast<std::ptrdiff_t>(i), c);
                    visit(std::move(t));
                }
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                std::u32string t = s;
                t.erase(i, 1);
                visit(std::move(t));
                for (Symbol c : alphabet) {
                    if (c != s[i]) {
                        std::u32string u = s;
                        u[i] = c;
                        visit(std::move(u));
                    }
                }
                if (i + 1 < s.size() && s[i] != s[i + 1]) {
                    std::u32string u = s;
                    std::swap(u[i], u[i + 1]);
                    visit(std::move(u));
                }
            }
        }
        if (seen.count(b)) {
            return depth;
        }
        frontier = std::move(next);
    }
    return max_depth + 1;
}

std::vector<std::vector<AlignedPair>> all_alignments(const std::u32string& candidate, const std::u32string& observed) {
    std::vector<std::vector<AlignedPair>> out;
    std::vector<AlignedPair> cur;
    enumerate(candidate, observed, 0, 0, cur, out);
    return out;
}

LogProb bm_likelihood_by_enumeration(const std::u32string& observed, const std::u32string& candidate,
                                     const ConfusionModel& model) {
    LogProb best = kImpossible;
    for (const auto& al : all_alignments(candidate, observed)) {
        LogProb total = 0;
        for (const auto& p : al) {
            total += std::max(model.log_prob(p.source, p.target), kLogProbFloor);
        }
        best = std::max(best, total);
    }
    return best;
}

std::vector<std::u32string> all_strings(const std::u32string& alphabet, std::size_t max_len) {
    std::vector<std::u32string> out{U""};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (Symbol c : alphabet) {
                out.push_back(out[i] + c);
            }
        }
        begin = end;
    }
    return out;
}

CandidateList candidates_by_scan(const std::string& observed, const std::vector<std::string>& vocab,
                                 const ScriptProfile& profile) {
    const auto obs = decode_utf8(observed);
    const std::size_t k = obs.size() <= 3 ? 1 : 2;
    std::vector<std::string> near;
    for (const auto& w : vocab) {
        if (w != observed && osa_distance(obs, decode_utf8(w)) <= k) {
            near.push_back(w);
        }
    }
    std::sort(near.begin(), near.end());
    CandidateList out;
    if (near.size() >= 5) {
        auto key = [&](const std::string& w) { return decode_utf8(double_metaphone(transliterate(w, profile))); };
        const auto obs_key = key(observed);
        std::vector<std::size_t> dist;
        for (const auto& w : near) {
            dist.push_back(osa_distance(obs_key, key(w)));
        }
        const std::size_t best = *std::min_element(dist.begin(), dist.end());
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < near.size(); ++i) {
            if (dist[i] == best) {
                kept.push_back(near[i]);
            }
        }
        near = std::move(kept);
        out.filtered = true;
    }
    out.words = std::move(near);
    out.words.push_back(observed);
    return out;
}

std::vector<SuiteResult> run_self_checks(std::uint64_t seed) {
    return {check_distances(),
            check_bm_likelihood(seed),
            check_alignments(seed + 1),
            check_confusion_rows(seed + 2),
            check_kn_normalization(seed + 3),
            check_candidates(seed + 4)};
}

} // namespace noisyspell::oracle
