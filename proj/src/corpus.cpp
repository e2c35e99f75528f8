#include "noisyspell/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "noisyspell/utf8.hpp"

namespace noisyspell {

void FrequencyTable::add(const std::string& word, Count n) {
    if (n == 0) {
        return;
    }
    counts_[word] += n;
    total_ += n;
}

void FrequencyTable::merge(const FrequencyTable& other) {
    for (const auto& [w, c] : other.counts_) {
        add(w, c);
    }
}

Count FrequencyTable::count(const std::string& word) const {
    auto it = counts_.find(word);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, Count>> FrequencyTable::sorted() const {
    std::vector<std::pair<std::string, Count>> out(counts_.begin(), counts_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
}

void FrequencyTable::write_tsv(std::ostream& out) const {
    for (const auto& [w, c] : sorted()) {
        out << w << '\t' << c << '\n';
    }
}

namespace {

Count parse_count(std::string_view s, std::size_t line_no) {
    Count v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("bad count '" + std::string(s) + "' on line " + std::to_string(line_no));
    }
    return v;
}

} // namespace

FrequencyTable FrequencyTable::read_tsv(std::istream& in) {
    FrequencyTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("frequency table line " + std::to_string(line_no) + " has no tab");
        }
        t.add(line.substr(0, tab), parse_count(std::string_view(line).substr(tab + 1), line_no));
    }
    return t;
}

FrequencyTable ingest(std::istream& source, const ScriptProfile& profile) {
    FrequencyTable t;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(source, line)) {
        decode_utf8(line, offset);
        for (auto& tok : tokenize(line, profile)) {
            t.add(tok);
        }
        offset += line.size() + 1;
    }
    return t;
}

Count Vocabulary::count(const std::string& w) const {
    auto it = counts.find(w);
    return it == counts.end() ? 0 : it->second;
}

Vocabulary build_vocab(const FrequencyTable& table, Count cutoff) {
    if (cutoff < 1) {
        throw std::invalid_argument("vocabulary cutoff must be >= 1");
    }
    Vocabulary v;
    for (const auto& [w, c] : table.counts()) {
        if (c >= cutoff) {
            v.counts.emplace(w, c);
        }
    }
    return v;
}

Vocabulary read_wordlist(std::istream& in) {
    Vocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            v.counts[line] += 1;
        } else {
            v.counts[line.substr(0, tab)] += parse_count(std::string_view(line).substr(tab + 1), line_no);
        }
    }
    return v;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    auto quantile = [&values](double p) {
        const double h = (static_cast<double>(values.size()) - 1.0) * p;
        const auto lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    s.q1 = quantile(0.25);
    s.q2 = quantile(0.5);
    s.q3 = quantile(0.75);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.max = values.back();
    return s;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
    return {{"q1", s.q1}, {"q2", s.q2}, {"q3", s.q3}, {"mean", s.mean}, {"max", s.max}};
}

std::size_t count_sentences(const std::string& paragraph, const ScriptProfile& profile) {
    std::size_t n = 0;
    std::u32string current;
    auto flush = [&] {
        if (!tokenize(encode_utf8(current), profile).empty()) {
            ++n;
        }
        current.clear();
    };
    for (Symbol s : decode_utf8(paragraph)) {
        if (is_sentence_delimiter(s)) {
            flush();
        } else {
            current.push_back(s);
        }
    }
    flush();
    return n;
}

} // namespace

nlohmann::json CorpusStats::to_json() const {
    nlohmann::json j;
    j["paragraphs"] = paragraphs;
    j["words_per_paragraph"] = summary_json(words_per_paragraph);
    j["sentences_per_paragraph"] = summary_json(sentences_per_paragraph);
    auto curve = nlohmann::json::array();
    for (const auto& [cutoff, size] : vocab_size_by_cutoff) {
        curve.push_back({{"cutoff", cutoff}, {"vocab_size", size}});
    }
    j["vocab_size_by_cutoff"] = std::move(curve);
    return j;
}

std::string CorpusStats::to_csv(const std::string& dataset_name) const {
    std::ostringstream out;
    out << "table,dataset,q1,q2,q3,mean,max\n";
    auto row = [&](const char* table, const Summary& s) {
        out << table << ',' << dataset_name << ',' << s.q1 << ',' << s.q2 << ',' << s.q3 << ',' << s.mean << ','
            << s.max << '\n';
    };
    row("words_per_paragraph", words_per_paragraph);
    row("sentences_per_paragraph", sentences_per_paragraph);
    return out.str();
}

CorpusStats corpus_stats(std::istream& source, const ScriptProfile& profile, const std::vector<Count>& cutoffs) {
    FrequencyTable table;
    std::vector<double> words;
    std::vector<double> sentences;
    std::string paragraph;
    std::size_t para_words = 0;
    std::string line;
    std::size_t offset = 0;

    auto close_paragraph = [&] {
        if (para_words > 0) {
            words.push_back(static_cast<double>(para_words));
            sentences.push_back(static_cast<double>(count_sentences(paragraph, profile)));
        }
        paragraph.clear();
        para_words = 0;
    };

    while (std::getline(source, line)) {
        decode_utf8(line, offset);
        offset += line.size() + 1;
        auto toks = tokenize(line, profile);
        if (toks.empty()) {
            if (line.find_first_not_of(" \t\r\f\v") == std::string::npos) {
                close_paragraph();
            }
            continue;
        }
        for (auto& t : toks) {
            table.add(t);
        }
        para_words += toks.size();
        paragraph += line;
        paragraph += '\n';
    }
    close_paragraph();

    CorpusStats st;
    st.paragraphs = words.size();
    st.words_per_paragraph = summarize(words);
    st.sentences_per_paragraph = summarize(sentences);
    std::vector<Count> sorted_cutoffs = cutoffs;
    std::sort(sorted_cutoffs.begin(), sorted_cutoffs.end());
    for (Count c : sorted_cutoffs) {
        st.vocab_size_by_cutoff.emplace_back(c, build_vocab(table, c).size());
    }
    return st;
}

} // namespace noisyspell
