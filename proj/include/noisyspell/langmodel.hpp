#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "noisyspell/channel.hpp"
#include "noisyspell/corpus.hpp"
#include "noisyspell/textcore.hpp"

namespace noisyspell {

inline const std::string kSentenceStart = "<s>";
inline const std::string kSentenceEnd = "</s>";
inline const std::string kUnknownWord = "<unk>";

inline constexpr double kDefaultDiscount = 0.75;

/// Splits a line into sentences at sentence delimiters and tokenizes each.
/// Sentences without tokens are dropped.
std::vector<std::vector<std::string>> split_sentences(std::string_view line, const ScriptProfile& profile);

/// Interpolated Kneser-Ney bigram model with a single absolute discount:
///
///   P(w|v) = max(c(v,w) - d, 0) / c(v) + d * N1+(v .) / c(v) * Pcont(w)
///   Pcont(w) = N1+(. w) / N1+(. .)
///
/// Contexts never seen fall back to Pcont. Words below the vocabulary cutoff
/// are trained as <unk>; every sentence is wrapped in <s> ... </s>.
class KNBigramModel {
public:
    KNBigramModel() = default;

    static KNBigramModel train(std::span<const std::vector<std::string>> sentences, double discount = kDefaultDiscount,
                               Count vocab_cutoff = 1);
    /// One or more sentences per line, see split_sentences.
    static KNBigramModel train(std::istream& corpus, const ScriptProfile& profile,
                               double discount = kDefaultDiscount, Count vocab_cutoff = 1);

    /// P(word | prev); out-of-vocabulary words on either side map to <unk>.
    double prob(const std::string& word, const std::string& prev) const;
    /// Natural log of prob(), floored so that it is always finite.
    LogProb logprob(const std::string& word, const std::string& prev) const;

    bool in_vocab(const std::string& word) const;
    /// Predictable vocabulary: every trained word plus </s> and <unk>.
    std::vector<std::string> vocabulary() const;

    double discount() const { return discount_; }
    Count vocab_cutoff() const { return vocab_cutoff_; }
    /// Number of distinct word types folded into <unk> during training.
    Count unknown_types() const { return unknown_types_; }
    Count unigram_count(const std::string& word) const;
    Count bigram_count(const std::string& prev, const std::string& word) const;
    Count bigram_types() const { return bigram_types_; }
    double continuation_prob(const std::string& word) const;

    nlohmann::json to_json() const;
    static KNBigramModel from_json(const nlohmann::json& j);
    nlohmann::json to_file_json() const;
    static KNBigramModel from_file_json(const nlohmann::json& sealed);

private:
    using WordId = std::uint32_t;
    static constexpr WordId kNoWord = static_cast<WordId>(-1);

    WordId intern(const std::string& w);
    WordId lookup(const std::string& w) const;
    void add_bigram(WordId v, WordId w, Count n);
    static std::uint64_t key(WordId v, WordId w) { return (static_cast<std::uint64_t>(v) << 32) | w; }
    double prob_ids(WordId w, WordId v) const;

    double discount_ = kDefaultDiscount;
    Count vocab_cutoff_ = 1;
    Count unknown_types_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> ids_;
    std::vector<Count> unigram_;
    std::vector<Count> context_total_;
    std::vector<Count> followers_;
    std::vector<Count> left_neighbours_;
    std::unordered_map<std::uint64_t, Count> bigrams_;
    Count bigram_types_ = 0;
};

/// Conditioning information for one position: words to the left, words to
/// the right (may be empty), and the candidates to score.
struct LMQuery {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::vector<std::string> candidates;
};

/// Raised when a prior backend cannot produce scores.
class PriorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Source of log P(candidate | context) values.
class PriorModel {
public:
    virtual ~PriorModel() = default;
    /// One log-probability per candidate, in candidate order.
    virtual std::vector<LogProb> score(const LMQuery& query) = 0;
    virtual std::string name() const = 0;
    /// How many preceding words can influence a score (npos: unbounded).
    virtual std::size_t left_window() const { return static_cast<std::size_t>(-1); }
    virtual bool uses_right_context() const { return true; }
};

/// Bigram prior. Right context is ignored. With `split_unknown`, an
/// out-of-vocabulary candidate receives P(<unk>|prev) divided by the number
/// of types that were folded into <unk>, so a misspelling is not credited
/// with the whole unknown-word mass.
class KnPrior final : public PriorModel {
public:
    explicit KnPrior(const KNBigramModel& model, bool split_unknown = true)
        : model_(model), split_unknown_(split_unknown) {}

    std::vector<LogProb> score(const LMQuery& query) override;
    std::string name() const override { return "kn"; }
    std::size_t left_window() const override { return 1; }
    bool uses_right_context() const override { return false; }

    LogProb word_logprob(const std::string& word, const std::string& prev) const;

private:
    const KNBigramModel& model_;
    bool split_unknown_;
};

/// Constant prior; ranking reduces to the channel alone.
class UniformPrior final : public PriorModel {
public:
    std::vector<LogProb> score(const LMQuery& query) override;
    std::string name() const override { return "uniform"; }
    std::size_t left_window() const override { return 0; }
    bool uses_right_context() const override { return false; }
};

/// Per-position log-probabilities of a sentence: position i is scored with
/// left context words[0..i) and right context words(i..].
std::vector<LogProb> position_logprobs(PriorModel& prior, std::span<const std::string> words);
LogProb sentence_logprob(PriorModel& prior, std::span<const std::string> words);
LogProb sentence_logprob(const KNBigramModel& model, std::span<const std::string> words);

/// Where a plugin lives: `stdio:<shell command>` spawns a subprocess and
/// talks over its stdin/stdout; `tcp:<host>:<port>` connects to a server.
struct PluginEndpoint {
    enum class Transport { Subprocess, Tcp };

    Transport transport = Transport::Subprocess;
    std::string command;
    std::string host;
    int port = 0;
    int timeout_ms = 30000;

    static PluginEndpoint parse(std::string_view spec);
    std::string to_string() const;
};

/// Newline-delimited JSON client. Each request
///   {"v":1,"id":n,"left":[...],"right":[...],"candidates":[...]}
/// must be answered, in order, by {"id":n,"logprobs":[...]}. A response
/// carrying "error" is reported with the backend's message.
class PluginClient final : public PriorModel {
public:
    explicit PluginClient(PluginEndpoint endpoint);
    ~PluginClient() override;
    PluginClient(const PluginClient&) = delete;
    PluginClient& operator=(const PluginClient&) = delete;

    std::vector<LogProb> score(const LMQuery& query) override;
    std::string name() const override { return "plugin"; }

private:
    void write_line(const std::string& line);
    std::string read_line();
    void close_transport();

    PluginEndpoint endpoint_;
    int read_fd_ = -1;
    int write_fd_ = -1;
    int child_pid_ = -1;
    std::string buffer_;
    std::uint64_t next_id_ = 1;
};

/// Protocol helpers shared by the client and test fixtures.
nlohmann::json make_plugin_request(std::uint64_t id, const LMQuery& query);
std::vector<LogProb> parse_plugin_response(const std::string& line, std::uint64_t expected_id,
                                           std::size_t expected_count);

} // namespace noisyspell
