#include "noisyspell/channel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "noisyspell/candidate_index.hpp"
#include "noisyspell/io.hpp"
#include "noisyspell/utf8.hpp"

namespace noisyspell {

std::vector<Triple> extract_triples(const FrequencyTable& table, std::size_t max_ed, double ratio) {
    // Only words with count >= ratio can play the correct role (the rarest
    // misspelling has count 1).
    Vocabulary frequent;
    for (const auto& [w, c] : table.counts()) {
        if (static_cast<double>(c) >= ratio) {
            frequent.counts.emplace(w, c);
        }
    }
    const CandidateIndex index(frequent, max_ed);

    std::vector<Triple> out;
    for (const auto& [m, m_count] : table.counts()) {
        for (auto id : index.query_ids(decode_utf8(m), max_ed)) {
            const auto& c = index.word(id);
            if (c == m) {
                continue;
            }
            if (static_cast<double>(index.count(id)) >= ratio * static_cast<double>(m_count)) {
                out.push_back({c, m, m_count});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) {
        return a.correct != b.correct ? a.correct < b.correct : a.misspelled < b.misspelled;
    });
    return out;
}

void write_triples_tsv(std::ostream& out, std::span<const Triple> triples) {
    for (const auto& t : triples) {
        out << t.correct << '\t' << t.misspelled << '\t' << t.frequency << '\n';
    }
}

std::vector<Triple> read_triples_tsv(std::istream& in) {
    std::vector<Triple> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw std::runtime_error("triples line " + std::to_string(line_no) + " needs three columns");
        }
        Triple t{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), 0};
        try {
            t.frequency = std::stoull(line.substr(t2 + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("bad frequency on triples line " + std::to_string(line_no));
        }
        if (t.frequency == 0 || t.correct == t.misspelled) {
            throw std::runtime_error("invalid triple on line " + std::to_string(line_no));
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::set<Symbol> triple_alphabet(std::span<const Triple> triples) {
    std::set<Symbol> a;
    for (const auto& t : triples) {
        for (Symbol s : decode_utf8(t.correct)) {
            a.insert(s);
        }
        for (Symbol s : decode_utf8(t.misspelled)) {
            a.insert(s);
        }
    }
    return a;
}

void ConfusionModel::rebuild_index() {
    symbols_.clear();
    symbols_.push_back(kEpsilon);
    symbols_.insert(symbols_.end(), alphabet_.begin(), alphabet_.end());
    index_.clear();
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        index_.emplace(symbols_[i], i);
    }
    log_prob_.resize(prob_.size());
    for (std::size_t i = 0; i < prob_.size(); ++i) {
        log_prob_[i] = prob_[i] > 0 ? std::max(std::log(prob_[i]), kLogProbFloor) : kLogProbFloor;
    }
}

ConfusionModel ConfusionModel::train(std::span<const Triple> triples, const std::set<Symbol>& alphabet,
                                     double smoothing_k) {
    if (alphabet.count(kEpsilon) != 0) {
        throw std::invalid_argument("alphabet must not contain the empty partition");
    }
    if (!(smoothing_k > 0)) {
        throw std::invalid_argument("smoothing_k must be positive");
    }
    ConfusionModel m;
    m.alphabet_ = alphabet;
    m.smoothing_k_ = smoothing_k;
    m.smoothing_only_ = triples.empty();
    m.prob_.assign((alphabet.size() + 1) * (alphabet.size() + 1), 0.0);
    m.rebuild_index();
    const std::size_t n = m.symbols_.size();

    std::vector<double> counts(n * n, 0.0);
    double gaps = 0;
    for (const auto& t : triples) {
        const auto correct = decode_utf8(t.correct);
        const auto observed = decode_utf8(t.misspelled);
        const double w = static_cast<double>(t.frequency);
        for (const auto& p : align(correct, observed).pairs) {
            const std::size_t si = m.index_of(p.source);
            const std::size_t ti = m.index_of(p.target);
            if (si == npos || ti == npos) {
                throw std::invalid_argument("triple character outside the alphabet in '" + t.correct + "' / '" +
                                            t.misspelled + "'");
            }
            counts[si * n + ti] += w;
        }
        if (correct.size() > 1) {
            gaps += w * static_cast<double>(correct.size() - 1);
        }
    }

    for (std::size_t s = 0; s < n; ++s) {
        double total = 0;
        for (std::size_t t = 0; t < n; ++t) {
            total += counts[s * n + t];
        }
        // The epsilon row has no (eps, eps) cell.
        const double cells = s == 0 ? static_cast<double>(n - 1) : static_cast<double>(n);
        for (std::size_t t = 0; t < n; ++t) {
            if (s == 0 && t == 0) {
                continue;
            }
            m.prob_[s * n + t] = (counts[s * n + t] + smoothing_k) / (total + smoothing_k * cells);
        }
        if (s == 0) {
            m.error_freq_[kEpsilon] = gaps > 0 ? std::min(1.0, total / gaps) : 0.0;
        } else {
            m.error_freq_[m.symbols_[s]] = total > 0 ? (total - counts[s * n + s]) / total : 0.0;
        }
    }
    m.rebuild_index();
    return m;
}

std::size_t ConfusionModel::index_of(Symbol s) const {
    auto it = index_.find(s);
    return it == index_.end() ? npos : it->second;
}

double ConfusionModel::prob(Symbol source, Symbol target) const {
    const auto si = index_of(source);
    const auto ti = index_of(target);
    return si == npos || ti == npos ? 0.0 : prob_at(si, ti);
}

LogProb ConfusionModel::log_prob(Symbol source, Symbol target) const {
    const auto si = index_of(source);
    const auto ti = index_of(target);
    return si == npos || ti == npos ? kLogProbFloor : log_prob_at(si, ti);
}

double ConfusionModel::char_error_freq(Symbol s) const {
    auto it = error_freq_.find(s);
    return it == error_freq_.end() ? 0.0 : it->second;
}

namespace {

std::string key_of(Symbol s) {
    return s == kEpsilon ? std::string{} : encode_utf8(s);
}

Symbol symbol_of(const std::string& key) {
    if (key.empty()) {
        return kEpsilon;
    }
    auto cps = decode_utf8(key);
    if (cps.size() != 1) {
        throw std::runtime_error("confusion model key is not a single character: " + key);
    }
    return cps[0];
}

} // namespace

nlohmann::json ConfusionModel::to_json() const {
    nlohmann::json j;
    auto alpha = nlohmann::json::array();
    for (Symbol s : alphabet_) {
        alpha.push_back(encode_utf8(s));
    }
    j["alphabet"] = std::move(alpha);
    j["smoothing_k"] = smoothing_k_;
    j["smoothing_only"] = smoothing_only_;
    auto rows = nlohmann::json::object();
    const std::size_t n = symbols_.size();
    for (std::size_t s = 0; s < n; ++s) {
        auto row = nlohmann::json::object();
        for (std::size_t t = 0; t < n; ++t) {
            if (s == 0 && t == 0) {
                continue;
            }
            row[key_of(symbols_[t])] = prob_at(s, t);
        }
        rows[key_of(symbols_[s])] = std::move(row);
    }
    j["rows"] = std::move(rows);
    auto freq = nlohmann::json::object();
    for (const auto& [s, f] : error_freq_) {
        freq[key_of(s)] = f;
    }
    j["char_error_freq"] = std::move(freq);
    return j;
}

ConfusionModel ConfusionModel::from_json(const nlohmann::json& j) {
    ConfusionModel m;
    for (const auto& a : j.at("alphabet")) {
        m.alphabet_.insert(symbol_of(a.get<std::string>()));
    }
    m.smoothing_k_ = j.at("smoothing_k").get<double>();
    m.smoothing_only_ = j.value("smoothing_only", false);
    m.prob_.assign((m.alphabet_.size() + 1) * (m.alphabet_.size() + 1), 0.0);
    m.rebuild_index();
    const std::size_t n = m.symbols_.size();
    for (const auto& [src, row] : j.at("rows").items()) {
        const auto si = m.index_of(symbol_of(src));
        if (si == npos) {
            throw std::runtime_error("confusion row for unknown symbol " + src);
        }
        for (const auto& [tgt, p] : row.items()) {
            const auto ti = m.index_of(symbol_of(tgt));
            if (ti == npos) {
                throw std::runtime_error("confusion cell for unknown symbol " + tgt);
            }
            m.prob_[si * n + ti] = p.get<double>();
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        double total = 0;
        for (std::size_t t = 0; t < n; ++t) {
            total += m.prob_[s * n + t];
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::runtime_error("confusion row '" + key_of(m.symbols_[s]) + "' does not sum to 1");
        }
    }
    for (const auto& [k, f] : j.at("char_error_freq").items()) {
        m.error_freq_[symbol_of(k)] = f.get<double>();
    }
    m.rebuild_index();
    return m;
}

nlohmann::json ConfusionModel::to_file_json() const {
    return seal_model("confusion_model", to_json());
}

ConfusionModel ConfusionModel::from_file_json(const nlohmann::json& sealed) {
    return from_json(open_model("confusion_model", sealed));
}

std::string ConfusionModel::content_hash() const {
    return model_hash(to_file_json());
}

namespace {

std::vector<std::size_t> to_indices(std::u32string_view s, const ConfusionModel& model) {
    std::vector<std::size_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = model.index_of(s[i]);
    }
    return out;
}

} // namespace

LogProb bm_likelihood(std::u32string_view observed, std::u32string_view candidate, const ConfusionModel& model) {
    const auto x = to_indices(observed, model);
    const auto w = to_indices(candidate, model);
    constexpr auto npos = ConfusionModel::npos;
    auto lp = [&model](std::size_t src, std::size_t tgt) {
        return src == npos || tgt == npos ? kLogProbFloor : model.log_prob_at(src, tgt);
    };
    const std::size_t cols = x.size() + 1;
    std::vector<LogProb> prev(cols), cur(cols);
    prev[0] = 0.0;
    for (std::size_t j = 1; j < cols; ++j) {
        prev[j] = prev[j - 1] + lp(0, x[j - 1]);
    }
    for (std::size_t i = 1; i <= w.size(); ++i) {
        cur[0] = prev[0] + lp(w[i - 1], 0);
        for (std::size_t j = 1; j < cols; ++j) {
            cur[j] = std::max({prev[j - 1] + lp(w[i - 1], x[j - 1]), prev[j] + lp(w[i - 1], 0),
                               cur[j - 1] + lp(0, x[j - 1])});
        }
        std::swap(prev, cur);
    }
    return prev[cols - 1];
}

LogProb bm_likelihood(std::string_view observed, std::string_view candidate, const ConfusionModel& model) {
    return bm_likelihood(decode_utf8(observed), decode_utf8(candidate), model);
}

LogProb cd_likelihood(const std::string& observed, const std::string& candidate,
                      std::span<const std::string> candidates, const CDParams& params) {
    if (!(params.alpha > 0 && params.alpha < 1)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (candidate == observed) {
        return std::log(params.alpha);
    }
    const bool member = std::find(candidates.begin(), candidates.end(), candidate) != candidates.end();
    if (!member) {
        return kImpossible;
    }
    const bool observed_member = std::find(candidates.begin(), candidates.end(), observed) != candidates.end();
    const std::size_t others = candidates.size() - (observed_member ? 1 : 0);
    if (others == 0) {
        return kImpossible;
    }
    return std::log((1.0 - params.alpha) / static_cast<double>(others));
}

LogProb sentence_likelihood(std::span<const std::string> observed, std::span<const std::string> candidate,
                            const WordScorer& scorer) {
    if (observed.size() != candidate.size()) {
        throw std::invalid_argument("sentence likelihood needs equal token counts (" +
                                    std::to_string(observed.size()) + " vs " + std::to_string(candidate.size()) +
                                    ")");
    }
    LogProb total = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        total += scorer(observed[i], candidate[i]);
    }
    return total;
}

std::string export_heatmap(const ConfusionModel& model, std::span<const Symbol> chars) {
    std::ostringstream out;
    out << "source";
    for (Symbol t : model.symbols()) {
        out << ',' << (t == kEpsilon ? std::string("<eps>") : encode_utf8(t));
    }
    out << '\n';
    for (Symbol s : chars) {
        const auto si = model.index_of(s);
        if (si == ConfusionModel::npos) {
            throw std::invalid_argument("character not in the model alphabet: " + encode_utf8(s));
        }
        out << (s == kEpsilon ? std::string("<eps>") : encode_utf8(s));
        for (std::size_t t = 0; t < model.symbols().size(); ++t) {
            out << ',' << format_double(model.prob_at(si, t));
        }
        out << '\n';
    }
    return out.str();
}

} // namespace noisyspell
