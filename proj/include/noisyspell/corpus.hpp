#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisyspell/textcore.hpp"

namespace noisyspell {

using Count = std::uint64_t;

/// Word counts over a corpus. Entries with zero count are never stored.
class FrequencyTable {
public:
    void add(const std::string& word, Count n = 1);
    void merge(const FrequencyTable& other);

    Count count(const std::string& word) const;
    Count total_tokens() const { return total_; }
    std::size_t size() const { return counts_.size(); }
    bool empty() const { return counts_.empty(); }

    const std::unordered_map<std::string, Count>& counts() const { return counts_; }

    /// Entries by descending count, ties by ascending word.
    std::vector<std::pair<std::string, Count>> sorted() const;

    void write_tsv(std::ostream& out) const;
    static FrequencyTable read_tsv(std::istream& in);

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

private:
    std::unordered_map<std::string, Count> counts_;
    Count total_ = 0;
};

/// Streams UTF-8 text and counts tokens. Throws Utf8Error with the absolute
/// byte offset of malformed input.
FrequencyTable ingest(std::istream& source, const ScriptProfile& profile);

/// Real-word list: words whose count meets a cutoff.
struct Vocabulary {
    std::map<std::string, Count> counts;

    bool contains(const std::string& w) const { return counts.count(w) != 0; }
    std::size_t size() const { return counts.size(); }
    Count count(const std::string& w) const;
};

Vocabulary build_vocab(const FrequencyTable& table, Count cutoff);

/// One word per line; an optional second TSV column is read as a count
/// (default 1).
Vocabulary read_wordlist(std::istream& in);

struct Summary {
    double q1 = 0;
    double q2 = 0;
    double q3 = 0;
    double mean = 0;
    double max = 0;
};

/// Quartiles by linear interpolation between order statistics (type 7).
Summary summarize(std::vector<double> values);

struct CorpusStats {
    Summary words_per_paragraph;
    Summary sentences_per_paragraph;
    std::vector<std::pair<Count, std::size_t>> vocab_size_by_cutoff;
    std::size_t paragraphs = 0;

    nlohmann::json to_json() const;
    /// Rows shaped like the paragraph summary tables: a header line, then
    /// one row per measure.
    std::string to_csv(const std::string& dataset_name) const;
};

/// Paragraphs are separated by blank lines; sentences end at the danda or
/// one of `.!?`.
CorpusStats corpus_stats(std::istream& source, const ScriptProfile& profile, const std::vector<Count>& cutoffs);

} // namespace noisyspell
