#include "noisyspell/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "noisyspell/io.hpp"
#include "noisyspell/utf8.hpp"

namespace noisyspell {

namespace {

// Returned for events the model assigns exactly zero probability (only
// possible for a never-observed <unk> or for <s> as a predicted word).
constexpr LogProb kZeroProbLog = -50.0;

} // namespace

std::vector<std::vector<std::string>> split_sentences(std::string_view line, const ScriptProfile& profile) {
    std::vector<std::vector<std::string>> out;
    std::u32string current;
    auto flush = [&] {
        auto toks = tokenize(encode_utf8(current), profile);
        if (!toks.empty()) {
            out.push_back(std::move(toks));
        }
        current.clear();
    };
    for (Symbol s : decode_utf8(line)) {
        if (is_sentence_delimiter(s)) {
            flush();
        } else {
            current.push_back(s);
        }
    }
    flush();
    return out;
}

KNBigramModel::WordId KNBigramModel::intern(const std::string& w) {
    auto [it, inserted] = ids_.emplace(w, static_cast<WordId>(words_.size()));
    if (inserted) {
        words_.push_back(w);
        unigram_.push_back(0);
        context_total_.push_back(0);
        followers_.push_back(0);
        left_neighbours_.push_back(0);
    }
    return it->second;
}

KNBigramModel::WordId KNBigramModel::lookup(const std::string& w) const {
    auto it = ids_.find(w);
    return it == ids_.end() ? kNoWord : it->second;
}

void KNBigramModel::add_bigram(WordId v, WordId w, Count n) {
    auto [it, inserted] = bigrams_.emplace(key(v, w), 0);
    if (inserted) {
        ++bigram_types_;
        ++followers_[v];
        ++left_neighbours_[w];
    }
    it->second += n;
    context_total_[v] += n;
}

KNBigramModel KNBigramModel::train(std::span<const std::vector<std::string>> sentences, double discount,
                                   Count vocab_cutoff) {
    if (!(discount > 0 && discount < 1)) {
        throw std::invalid_argument("discount must lie in (0, 1)");
    }
    if (vocab_cutoff < 1) {
        throw std::invalid_argument("vocabulary cutoff must be >= 1");
    }
    std::map<std::string, Count> raw;
    for (const auto& s : sentences) {
        for (const auto& w : s) {
            ++raw[w];
        }
    }
    if (raw.empty()) {
        throw std::invalid_argument("cannot train a language model on an empty corpus");
    }

    KNBigramModel m;
    m.discount_ = discount;
    m.vocab_cutoff_ = vocab_cutoff;
    const WordId start = m.intern(kSentenceStart);
    const WordId end = m.intern(kSentenceEnd);
    const WordId unk = m.intern(kUnknownWord);
    for (const auto& [w, c] : raw) {
        if (c >= vocab_cutoff && w != kSentenceStart && w != kSentenceEnd && w != kUnknownWord) {
            m.intern(w);
        } else {
            ++m.unknown_types_;
        }
    }
    for (const auto& s : sentences) {
        WordId prev = start;
        ++m.unigram_[start];
        for (const auto& w : s) {
            WordId id = m.lookup(w);
            if (id == kNoWord || id == start || id == end) {
                id = unk;
            }
            ++m.unigram_[id];
            m.add_bigram(prev, id, 1);
            prev = id;
        }
        ++m.unigram_[end];
        m.add_bigram(prev, end, 1);
    }
    return m;
}

KNBigramModel KNBigramModel::train(std::istream& corpus, const ScriptProfile& profile, double discount,
                                   Count vocab_cutoff) {
    std::vector<std::vector<std::string>> sentences;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(corpus, line)) {
        decode_utf8(line, offset);
        offset += line.size() + 1;
        for (auto& s : split_sentences(line, profile)) {
            sentences.push_back(std::move(s));
        }
    }
    return train(sentences, discount, vocab_cutoff);
}

double KNBigramModel::prob_ids(WordId w, WordId v) const {
    const double cont =
        bigram_types_ == 0 ? 0.0 : static_cast<double>(left_neighbours_[w]) / static_cast<double>(bigram_types_);
    const Count cv = context_total_[v];
    if (cv == 0) {
        return cont;
    }
    Count cvw = 0;
    if (auto it = bigrams_.find(key(v, w)); it != bigrams_.end()) {
        cvw = it->second;
    }
    const double c = static_cast<double>(cv);
    const double discounted = std::max(static_cast<double>(cvw) - discount_, 0.0) / c;
    const double backoff = discount_ * static_cast<double>(followers_[v]) / c;
    return discounted + backoff * cont;
}

double KNBigramModel::prob(const std::string& word, const std::string& prev) const {
    if (words_.empty()) {
        throw std::logic_error("language model is not trained");
    }
    const WordId unk = lookup(kUnknownWord);
    WordId w = lookup(word);
    WordId v = lookup(prev);
    return prob_ids(w == kNoWord ? unk : w, v == kNoWord ? unk : v);
}

LogProb KNBigramModel::logprob(const std::string& word, const std::string& prev) const {
    const double p = prob(word, prev);
    return p > 0 ? std::log(p) : kZeroProbLog;
}

bool KNBigramModel::in_vocab(const std::string& word) const {
    return ids_.count(word) != 0;
}

std::vector<std::string> KNBigramModel::vocabulary() const {
    std::vector<std::string> out;
    for (const auto& w : words_) {
        if (w != kSentenceStart) {
            out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Count KNBigramModel::unigram_count(const std::string& word) const {
    const WordId id = lookup(word);
    return id == kNoWord ? 0 : unigram_[id];
}

Count KNBigramModel::bigram_count(const std::string& prev, const std::string& word) const {
    const WordId v = lookup(prev);
    const WordId w = lookup(word);
    if (v == kNoWord || w == kNoWord) {
        return 0;
    }
    auto it = bigrams_.find(key(v, w));
    return it == bigrams_.end() ? 0 : it->second;
}

double KNBigramModel::continuation_prob(const std::string& word) const {
    const WordId w = lookup(word);
    if (w == kNoWord || bigram_types_ == 0) {
        return 0.0;
    }
    return static_cast<double>(left_neighbours_[w]) / static_cast<double>(bigram_types_);
}

nlohmann::json KNBigramModel::to_json() const {
    nlohmann::json j;
    j["order"] = 2;
    j["discount"] = discount_;
    j["vocab_cutoff"] = vocab_cutoff_;
    j["unknown_types"] = unknown_types_;
    auto uni = nlohmann::json::object();
    for (std::size_t i = 0; i < words_.size(); ++i) {
        uni[words_[i]] = unigram_[i];
    }
    j["unigrams"] = std::move(uni);
    std::vector<std::tuple<std::string, std::string, Count>> rows;
    rows.reserve(bigrams_.size());
    for (const auto& [k, c] : bigrams_) {
        rows.emplace_back(words_[k >> 32], words_[k & 0xFFFFFFFFu], c);
    }
    std::sort(rows.begin(), rows.end());
    auto bi = nlohmann::json::array();
    for (const auto& [v, w, c] : rows) {
        bi.push_back(nlohmann::json::array({v, w, c}));
    }
    j["bigrams"] = std::move(bi);
    return j;
}

KNBigramModel KNBigramModel::from_json(const nlohmann::json& j) {
    if (j.value("order", 2) != 2) {
        throw std::runtime_error("only bigram models are supported");
    }
    KNBigramModel m;
    m.discount_ = j.at("discount").get<double>();
    m.vocab_cutoff_ = j.at("vocab_cutoff").get<Count>();
    m.unknown_types_ = j.at("unknown_types").get<Count>();
    m.intern(kSentenceStart);
    m.intern(kSentenceEnd);
    m.intern(kUnknownWord);
    // Object keys come back sorted, which matches training's interning order
    // for ordinary words.
    for (const auto& [w, c] : j.at("unigrams").items()) {
        m.unigram_[m.intern(w)] = c.get<Count>();
    }
    for (const auto& row : j.at("bigrams")) {
        const auto v = m.lookup(row.at(0).get<std::string>());
        const auto w = m.lookup(row.at(1).get<std::string>());
        if (v == kNoWord || w == kNoWord) {
            throw std::runtime_error("bigram refers to a word without a unigram entry");
        }
        m.add_bigram(v, w, row.at(2).get<Count>());
    }
    return m;
}

nlohmann::json KNBigramModel::to_file_json() const {
    return seal_model("kn_bigram_model", to_json());
}

KNBigramModel KNBigramModel::from_file_json(const nlohmann::json& sealed) {
    return from_json(open_model("kn_bigram_model", sealed));
}

LogProb KnPrior::word_logprob(const std::string& word, const std::string& prev) const {
    if (split_unknown_ && !model_.in_vocab(word) && model_.unknown_types() > 0) {
        return model_.logprob(kUnknownWord, prev) - std::log(static_cast<double>(model_.unknown_types()));
    }
    return model_.logprob(word, prev);
}

std::vector<LogProb> KnPrior::score(const LMQuery& query) {
    const std::string& prev = query.left.empty() ? kSentenceStart : query.left.back();
    std::vector<LogProb> out;
    out.reserve(query.candidates.size());
    for (const auto& c : query.candidates) {
        out.push_back(word_logprob(c, prev));
    }
    return out;
}

std::vector<LogProb> UniformPrior::score(const LMQuery& query) {
    return std::vector<LogProb>(query.candidates.size(), 0.0);
}

std::vector<LogProb> position_logprobs(PriorModel& prior, std::span<const std::string> words) {
    if (words.empty()) {
        throw std::invalid_argument("cannot score an empty sentence");
    }
    std::vector<LogProb> out;
    out.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        LMQuery q;
        q.left.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(i));
        q.right.assign(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, words.end());
        q.candidates = {words[i]};
        out.push_back(prior.score(q).at(0));
    }
    return out;
}

LogProb sentence_logprob(PriorModel& prior, std::span<const std::string> words) {
    LogProb total = 0;
    for (LogProb lp : position_logprobs(prior, words)) {
        total += lp;
    }
    return total;
}

LogProb sentence_logprob(const KNBigramModel& model, std::span<const std::string> words) {
    if (words.empty()) {
        throw std::invalid_argument("cannot score an empty sentence");
    }
    LogProb total = 0;
    const std::string* prev = &kSentenceStart;
    for (const auto& w : words) {
        total += model.logprob(w, *prev);
        prev = &w;
    }
    return total;
}

} // namespace noisyspell
