#include "noisyspell/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "noisyspell/utf8.hpp"

namespace noisyspell {

namespace {

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.posterior_logp != b.posterior_logp) {
        return a.posterior_logp > b.posterior_logp;
    }
    if (a.channel_logp != b.channel_logp) {
        return a.channel_logp > b.channel_logp;
    }
    return a.word < b.word;
}

struct Hypothesis {
    std::vector<std::size_t> choice;
    std::vector<std::string> words;
    LogProb score = 0;
    LogProb channel = 0;
};

bool hypothesis_before(const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.channel != b.channel) {
        return a.channel > b.channel;
    }
    return a.words < b.words;
}

std::vector<std::string> tail(std::span<const std::string> words, std::size_t window) {
    const std::size_t n = std::min(window, words.size());
    return {words.end() - static_cast<std::ptrdiff_t>(n), words.end()};
}

} // namespace

nlohmann::json CandidateSet::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& c : candidates) {
        arr.push_back({{"word", c.word},
                       {"channel_logp", c.channel_logp},
                       {"prior_logp", c.prior_logp},
                       {"posterior_logp", c.posterior_logp}});
    }
    return {{"observed", observed}, {"filtered_by_metaphone", filtered_by_metaphone}, {"candidates", std::move(arr)}};
}

std::size_t candidate_distance_bound(std::u32string_view word) {
    return word.size() <= 3 ? 1 : 2;
}

CandidateGenerator::CandidateGenerator(const CandidateIndex& index, const ScriptProfile& profile,
                                       std::size_t metaphone_length)
    : index_(index), profile_(profile), metaphone_length_(metaphone_length) {
    if (index.max_distance() < 2) {
        throw std::invalid_argument("candidate generation needs an index built for distance 2");
    }
    keys_.reserve(index.size());
    for (CandidateIndex::WordId id = 0; id < index.size(); ++id) {
        keys_.push_back(phonetic_key(index.word(id)));
    }
}

std::string CandidateGenerator::phonetic_key(std::string_view word) const {
    return double_metaphone(transliterate(word, profile_), metaphone_length_);
}

CandidateSet CandidateGenerator::generate(const std::string& observed) const {
    const std::u32string symbols = decode_utf8(observed);
    std::vector<CandidateIndex::WordId> ids = index_.query_ids(symbols, candidate_distance_bound(symbols));
    std::erase_if(ids, [&](CandidateIndex::WordId id) { return index_.word(id) == observed; });

    CandidateSet set;
    set.observed = observed;
    if (ids.size() >= kFilterThreshold) {
        const std::string key = phonetic_key(observed);
        std::vector<std::size_t> dist;
        dist.reserve(ids.size());
        for (auto id : ids) {
            dist.push_back(damerau_distance(std::string_view(key), std::string_view(keys_[id])));
        }
        const std::size_t best = *std::min_element(dist.begin(), dist.end());
        std::vector<CandidateIndex::WordId> kept;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (dist[i] == best) {
                kept.push_back(ids[i]);
            }
        }
        ids = std::move(kept);
        set.filtered_by_metaphone = true;
    }
    for (auto id : ids) {
        set.candidates.push_back({index_.word(id)});
    }
    set.candidates.push_back({observed});
    return set;
}

std::string to_string(CorrectionMode m) {
    return m == CorrectionMode::Word ? "word" : "sentence";
}

std::string to_string(ErrorModelKind k) {
    return k == ErrorModelKind::BrillMoore ? "bm" : "cd";
}

CorrectionMode parse_mode(std::string_view s) {
    if (s == "word") {
        return CorrectionMode::Word;
    }
    if (s == "sentence") {
        return CorrectionMode::Sentence;
    }
    throw std::invalid_argument("mode must be 'word' or 'sentence', got '" + std::string(s) + "'");
}

ErrorModelKind parse_error_model(std::string_view s) {
    if (s == "bm") {
        return ErrorModelKind::BrillMoore;
    }
    if (s == "cd") {
        return ErrorModelKind::ConstantDistributive;
    }
    throw std::invalid_argument("error model must be 'bm' or 'cd', got '" + std::string(s) + "'");
}

void CorrectionConfig::validate() const {
    if (!(lambda >= 0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be a finite value >= 0");
    }
    if (!(cd.alpha > 0 && cd.alpha < 1)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (per_word_cap < 1 || beam_width < 1 || enumeration_limit < 1) {
        throw std::invalid_argument("per_word_cap, beam_width and enumeration_limit must be >= 1");
    }
    if (!std::isfinite(oov_penalty_logp) || oov_penalty_logp > 0) {
        throw std::invalid_argument("oov penalty must be a finite log-probability <= 0");
    }
    if (ablation && !ablation_vocab) {
        throw std::invalid_argument("ablation mode needs a vocabulary");
    }
}

nlohmann::json CorrectionConfig::to_json() const {
    return {{"lambda", lambda},
            {"mode", to_string(mode)},
            {"error_model", to_string(error_model)},
            {"alpha", cd.alpha},
            {"per_word_cap", per_word_cap},
            {"beam_width", beam_width},
            {"enumeration_limit", enumeration_limit},
            {"ablation", ablation},
            {"oov_penalty_logp", oov_penalty_logp},
            {"ablation_vocab_size", ablation_vocab ? ablation_vocab->size() : 0},
            {"prior_fallback", prior_fallback}};
}

std::vector<nlohmann::json> CorrectionResult::trace_lines() const {
    std::vector<nlohmann::json> out;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        auto j = traces[i].to_json();
        j["position"] = i;
        j["corrected"] = corrected[i];
        j["changed"] = corrected[i] != original[i];
        out.push_back(std::move(j));
    }
    return out;
}

Corrector::Corrector(const CandidateIndex& index, const ScriptProfile& profile, const ConfusionModel* confusion,
                     PriorModel& prior, CorrectionConfig config)
    : profile_(profile), confusion_(confusion), prior_(&prior), config_(std::move(config)) {
    config_.validate();
    if (config_.error_model == ErrorModelKind::BrillMoore && confusion_ == nullptr) {
        throw std::invalid_argument("the Brill-Moore channel needs a confusion model");
    }
    const CandidateIndex* source = &index;
    if (config_.ablation) {
        ablation_index_ = std::make_unique<CandidateIndex>(*config_.ablation_vocab, 2);
        source = ablation_index_.get();
        uniform_ = std::make_unique<UniformPrior>();
        prior_ = uniform_.get();
    }
    generator_ = std::make_unique<CandidateGenerator>(*source, profile_);
}

Corrector::~Corrector() = default;

CandidateSet Corrector::generate_candidates(const std::string& observed) const {
    return generator_->generate(observed);
}

std::vector<Corrector::Option> Corrector::channel_options(const CandidateSet& set) const {
    std::vector<std::string> words;
    words.reserve(set.candidates.size());
    for (const auto& c : set.candidates) {
        words.push_back(c.word);
    }
    const bool penalize = config_.ablation && !generator_->index().contains(set.observed);
    std::vector<Option> out;
    out.reserve(words.size());
    for (const auto& w : words) {
        LogProb ch = config_.error_model == ErrorModelKind::BrillMoore
                         ? bm_likelihood(std::string_view(set.observed), std::string_view(w), *confusion_)
                         : cd_likelihood(set.observed, w, words, config_.cd);
        // The OOV penalty travels with the channel score so that the
        // posterior stays channel + lambda * prior.
        if (penalize && w == set.observed) {
            ch += config_.oov_penalty_logp;
        }
        out.push_back({w, ch});
    }
    return out;
}

std::vector<LogProb> Corrector::prior_scores(const LMQuery& query) {
    std::vector<LogProb> scores;
    try {
        scores = prior_->score(query);
    } catch (const PriorError&) {
        if (!config_.prior_fallback || fallback_ == nullptr) {
            throw;
        }
        ++fallback_uses_;
        scores = fallback_->score(query);
    }
    if (scores.size() != query.candidates.size()) {
        throw PriorError("prior returned " + std::to_string(scores.size()) + " scores for " +
                         std::to_string(query.candidates.size()) + " candidates");
    }
    return scores;
}

void Corrector::rank(CandidateSet& set, const std::vector<Option>& options, const std::vector<LogProb>& prior) const {
    set.candidates.clear();
    for (std::size_t i = 0; i < options.size(); ++i) {
        const LogProb post = options[i].channel + config_.lambda * prior[i];
        set.candidates.push_back({options[i].word, options[i].channel, prior[i], post});
    }
    std::sort(set.candidates.begin(), set.candidates.end(), ranks_before);
}

CandidateSet Corrector::score_in_context(const CandidateSet& generated, const std::vector<Option>& options,
                                         std::span<const std::string> left, std::span<const std::string> right) {
    LMQuery q;
    q.left.assign(left.begin(), left.end());
    q.right.assign(right.begin(), right.end());
    for (const auto& o : options) {
        q.candidates.push_back(o.word);
    }
    CandidateSet set;
    set.observed = generated.observed;
    set.filtered_by_metaphone = generated.filtered_by_metaphone;
    rank(set, options, prior_scores(q));
    return set;
}

CandidateSet Corrector::correct_word(const std::string& observed, std::span<const std::string> left,
                                     std::span<const std::string> right) {
    const CandidateSet generated = generate_candidates(observed);
    return score_in_context(generated, channel_options(generated), left, right);
}

CorrectionResult Corrector::correct(std::span<const std::string> tokens) {
    return config_.mode == CorrectionMode::Word ? correct_words(tokens) : correct_sentence(tokens);
}

CorrectionResult Corrector::correct_words(std::span<const std::string> tokens) {
    CorrectionResult r;
    r.original.assign(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        r.traces.push_back(correct_word(tokens[i], tokens.first(i), tokens.subspan(i + 1)));
        const auto& best = r.traces.back().best();
        r.corrected.push_back(best.word);
        r.score += best.posterior_logp;
        if (best.word != tokens[i]) {
            r.changed.push_back(i);
        }
    }
    return r;
}

CorrectionResult Corrector::correct_sentence(std::span<const std::string> tokens) {
    CorrectionResult r;
    r.original.assign(tokens.begin(), tokens.end());
    if (tokens.empty()) {
        return r;
    }
    const std::size_t n = tokens.size();

    std::vector<CandidateSet> generated;
    std::vector<std::vector<Option>> full;
    std::vector<std::vector<Option>> options;
    for (const auto& t : tokens) {
        generated.push_back(generate_candidates(t));
        full.push_back(channel_options(generated.back()));
        std::vector<Option> opts = full.back();
        std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) {
            return a.channel != b.channel ? a.channel > b.channel : a.word < b.word;
        });
        if (opts.size() > config_.per_word_cap) {
            // Keep the observed word even when its channel score is low, so
            // the unchanged sentence is always reachable.
            auto obs = std::find_if(opts.begin(), opts.end(), [&](const Option& o) { return o.word == t; });
            const bool observed_cut = obs - opts.begin() >= static_cast<std::ptrdiff_t>(config_.per_word_cap);
            Option kept = *obs;
            opts.resize(config_.per_word_cap);
            if (observed_cut) {
                opts.back() = kept;
            }
        }
        options.push_back(std::move(opts));
    }

    std::size_t product = 1;
    bool exact = true;
    for (const auto& o : options) {
        if (product > config_.enumeration_limit / o.size()) {
            exact = false;
            break;
        }
        product *= o.size();
    }
    exact = exact && product <= config_.enumeration_limit;

    const bool left_only = !prior_->uses_right_context();
    const std::size_t window = prior_->left_window();

    // Prior scores for every option at position i given a left context.
    // Left-only priors depend on the last `window` words only; otherwise the
    // right context is the fixed observed suffix used during the beam.
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::vector<LogProb>> memo;
    auto position_prior = [&](std::size_t i, const Hypothesis& h,
                              std::span<const std::string> right) -> const std::vector<LogProb>& {
        const std::size_t k = std::min(window, h.choice.size());
        auto key = std::make_pair(i, std::vector<std::size_t>(h.choice.end() - static_cast<std::ptrdiff_t>(k),
                                                              h.choice.end()));
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        LMQuery q;
        q.left = tail(h.words, window);
        if (!left_only) {
            q.right.assign(right.begin(), right.end());
        }
        for (const auto& o : options[i]) {
            q.candidates.push_back(o.word);
        }
        return memo.emplace(std::move(key), prior_scores(q)).first->second;
    };

    // Full rescoring for priors that look at both sides.
    auto sentence_prior = [&](const std::vector<std::string>& words) {
        LogProb total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            LMQuery q;
            q.left.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(i));
            q.right.assign(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, words.end());
            q.candidates = {words[i]};
            total += prior_scores(q).at(0);
        }
        return total;
    };

    Hypothesis best;
    bool have_best = false;
    auto offer = [&](Hypothesis h) {
        if (!have_best || hypothesis_before(h, best)) {
            best = std::move(h);
            have_best = true;
        }
    };

    if (exact) {
        Hypothesis cur;
        auto dfs = [&](auto&& self, std::size_t i, LogProb score, LogProb channel) -> void {
            if (i == n) {
                cur.channel = channel;
                cur.score = left_only ? score : channel + config_.lambda * sentence_prior(cur.words);
                if (!have_best || hypothesis_before(cur, best)) {
                    best = cur;
                    have_best = true;
                }
                return;
            }
            const std::vector<LogProb>* prior = left_only ? &position_prior(i, cur, {}) : nullptr;
            for (std::size_t c = 0; c < options[i].size(); ++c) {
                const auto& o = options[i][c];
                const LogProb add = o.channel + (prior ? config_.lambda * (*prior)[c] : 0.0);
                cur.choice.push_back(c);
                cur.words.push_back(o.word);
                self(self, i + 1, score + add, channel + o.channel);
                cur.choice.pop_back();
                cur.words.pop_back();
            }
        };
        dfs(dfs, 0, 0.0, 0.0);
    } else {
        std::vector<Hypothesis> beam(1);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Hypothesis> next;
            for (const auto& h : beam) {
                // Until the sentence is complete, a bidirectional prior sees
                // the observed words on the right.
                const auto& prior = position_prior(i, h, tokens.subspan(i + 1));
                for (std::size_t c = 0; c < options[i].size(); ++c) {
                    Hypothesis e = h;
                    e.choice.push_back(c);
                    e.words.push_back(options[i][c].word);
                    e.channel += options[i][c].channel;
                    e.score += options[i][c].channel + config_.lambda * prior[c];
                    next.push_back(std::move(e));
                }
            }
            std::sort(next.begin(), next.end(), hypothesis_before);
            if (next.size() > config_.beam_width) {
                next.resize(config_.beam_width);
            }
            beam = std::move(next);
        }
        for (auto& h : beam) {
            if (!left_only) {
                h.score = h.channel + config_.lambda * sentence_prior(h.words);
            }
            offer(std::move(h));
        }
    }

    r.corrected = best.words;
    r.score = best.score;
    for (std::size_t i = 0; i < n; ++i) {
        if (r.corrected[i] != tokens[i]) {
            r.changed.push_back(i);
        }
        std::span<const std::string> chosen(r.corrected);
        r.traces.push_back(score_in_context(generated[i], full[i], chosen.first(i), chosen.subspan(i + 1)));
    }
    return r;
}

CorrectionResult ablation_correct(std::span<const std::string> tokens, const ConfusionModel* confusion,
                                  const ScriptProfile& profile, CorrectionConfig config) {
    config.ablation = true;
    UniformPrior unused;
    CandidateIndex empty;
    Corrector c(empty, profile, confusion, unused, std::move(config));
    return c.correct(tokens);
}

} // namespace noisyspell
