#include "noisyspell/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisyspell/channel.hpp"
#include "noisyspell/corpus.hpp"
#include "noisyspell/corrector.hpp"
#include "noisyspell/eval.hpp"
#include "noisyspell/io.hpp"
#include "noisyspell/langmodel.hpp"
#include "noisyspell/noiser.hpp"
#include "noisyspell/oracles.hpp"
#include "noisyspell/utf8.hpp"

namespace noisyspell::cli {

namespace {

struct Settings {
    // shared
    std::string config;
    std::uint64_t seed = 1;
    std::string profile = "devanagari";
    std::string output;
    bool quiet = false;
    bool print_config = false;
    std::vector<std::string> inputs;

    // stats
    std::vector<Count> cutoffs{1, 2, 3, 5, 10, 20, 50, 100};
    std::string format = "json";
    std::string name = "corpus";

    // triples
    std::string freq;
    std::size_t max_ed = 2;
    double ratio = 5.0;

    // train-channel
    std::string triples;
    double smoothing_k = kDefaultSmoothingK;
    std::string alphabet;

    // train-lm
    double discount = kDefaultDiscount;
    Count vocab_cutoff = 1;

    // export-heatmap, noise
    std::string model;
    std::string chars;
    double rate_scale = 1.0;
    double target_wer = 0;
    std::size_t calibration_sentences = 0;
    std::string sidecar;

    // correct, evaluate
    std::string channel;
    std::string lm;
    std::string plugin;
    int plugin_timeout_ms = 30000;
    bool plugin_fallback = false;
    std::string vocab;
    std::string mode = "word";
    double lambda = 1.0;
    std::string error_model = "bm";
    double alpha = 0.65;
    std::size_t per_word_cap = 8;
    std::size_t beam_width = 16;
    std::size_t enumeration_limit = 10000;
    bool ablation = false;
    std::string ablation_vocab;
    double oov_penalty = -50.0;
    std::string trace;

    // evaluate
    std::string dataset;
    std::vector<std::string> modes{"word", "sentence"};
    std::vector<std::string> error_models{"bm", "cd"};
    bool with_uniform = false;
    bool no_ablation = false;
    bool allow_same_model = false;
    std::string diagnostics;
};

class Log {
public:
    Log(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
    void info(const std::string& msg) const {
        if (!quiet_) {
            err_ << "noisyspell: " << msg << "\n";
        }
    }
    void warn(const std::string& msg) const { err_ << "noisyspell: warning: " << msg << "\n"; }

private:
    std::ostream& err_;
    bool quiet_;
};

void add_common(CLI::App* sub, Settings& s) {
    sub->add_option("--config", s.config, "JSON file of option values; command-line flags take precedence");
    sub->add_option("--seed", s.seed, "Seed for every random choice");
    sub->add_option("--profile", s.profile, "Script profile: devanagari, latin, or a profile JSON file");
    sub->add_option("-o,--output", s.output, "Write the result here instead of standard output");
    sub->add_flag("--quiet", s.quiet, "Only log warnings and errors");
    sub->add_flag("--print-config", s.print_config, "Print the effective options as JSON and exit");
}

void add_corrector_options(CLI::App* sub, Settings& s) {
    sub->add_option("--channel", s.channel, "Confusion model file");
    sub->add_option("--lm", s.lm, "Kneser-Ney model file");
    sub->add_option("--plugin", s.plugin, "External prior: stdio:<command> or tcp:<host>:<port>");
    sub->add_option("--plugin-timeout-ms", s.plugin_timeout_ms, "Per-request plugin timeout");
    sub->add_flag("--plugin-fallback", s.plugin_fallback, "Score with --lm when the plugin fails");
    sub->add_option("--vocab", s.vocab, "Candidate word list (default: the language model's vocabulary)");
    sub->add_option("--vocab-cutoff", s.vocab_cutoff, "Minimum count for candidate words taken from --lm");
    sub->add_option("--lambda", s.lambda, "Weight of the prior in the ranking");
    sub->add_option("--alpha", s.alpha, "Constant-distributive probability that the observed word is right");
    sub->add_option("--per-word-cap", s.per_word_cap, "Candidates kept per word in sentence mode");
    sub->add_option("--beam-width", s.beam_width, "Beam width when sentence enumeration is too large");
    sub->add_option("--enumeration-limit", s.enumeration_limit, "Largest candidate product enumerated exactly");
    sub->add_option("--ablation-vocab", s.ablation_vocab, "Word list for error-model-only correction");
    sub->add_option("--oov-penalty", s.oov_penalty, "Log penalty for an observed word missing from the ablation vocabulary");
}

std::vector<CLI::App*> build(CLI::App& app, Settings& s) {
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    std::vector<CLI::App*> subs;

    auto* ingest = app.add_subcommand("ingest", "Count word frequencies (TSV word<TAB>count)");
    ingest->add_option("inputs", s.inputs, "Corpus files (default: standard input)");
    subs.push_back(ingest);

    auto* stats = app.add_subcommand("stats", "Paragraph and vocabulary statistics");
    stats->add_option("inputs", s.inputs, "Corpus files (default: standard input)");
    stats->add_option("--cutoffs", s.cutoffs, "Frequency cutoffs for the vocabulary-size curve");
    stats->add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    stats->add_option("--name", s.name, "Dataset name used in CSV rows");
    subs.push_back(stats);

    auto* triples = app.add_subcommand("triples", "Mine (correct, misspelled, frequency) triples");
    triples->add_option("inputs", s.inputs, "Corpus files, used when --freq is not given");
    triples->add_option("--freq", s.freq, "Frequency table from `ingest`");
    triples->add_option("--max-ed", s.max_ed, "Largest edit distance between the two words");
    triples->add_option("--ratio", s.ratio, "Required count ratio correct/misspelled");
    subs.push_back(triples);

    auto* train_channel = app.add_subcommand("train-channel", "Train the character confusion model");
    train_channel->add_option("--triples", s.triples, "Triples TSV")->required();
    train_channel->add_option("--smoothing-k", s.smoothing_k, "Add-k smoothing constant");
    train_channel->add_option("--alphabet", s.alphabet, "Extra characters to include in the alphabet");
    subs.push_back(train_channel);

    auto* train_lm = app.add_subcommand("train-lm", "Train the Kneser-Ney bigram model");
    train_lm->add_option("inputs", s.inputs, "Corpus files (default: standard input)");
    train_lm->add_option("--discount", s.discount, "Absolute discount");
    train_lm->add_option("--vocab-cutoff", s.vocab_cutoff, "Words rarer than this become <unk>");
    subs.push_back(train_lm);

    auto* heatmap = app.add_subcommand("export-heatmap", "Edit probabilities as CSV");
    heatmap->add_option("--model", s.model, "Confusion model file")->required();
    heatmap->add_option("--chars", s.chars, "Source characters (default: the whole alphabet)");
    subs.push_back(heatmap);

    auto* noise = app.add_subcommand("noise", "Corrupt clean sentences into an evaluation set");
    noise->add_option("inputs", s.inputs, "Clean text, one sentence per line (default: standard input)");
    noise->add_option("--model", s.model, "Confusion model of the generator")->required();
    noise->add_option("--rate-scale", s.rate_scale, "Multiplier on per-character error rates");
    noise->add_option("--target-wer", s.target_wer, "Calibrate --rate-scale to this token corruption rate");
    noise->add_option("--calibration-sentences", s.calibration_sentences,
                      "Sentences used for calibration (0: all)");
    noise->add_option("--sidecar", s.sidecar, "Metadata JSON path (default: <output>.json)");
    subs.push_back(noise);

    auto* correct = app.add_subcommand("correct", "Correct text, one sentence per line");
    correct->add_option("inputs", s.inputs, "Text files (default: standard input)");
    add_corrector_options(correct, s);
    correct->add_option("--mode", s.mode, "word or sentence")->check(CLI::IsMember({"word", "sentence"}));
    correct->add_option("--error-model", s.error_model, "bm or cd")->check(CLI::IsMember({"bm", "cd"}));
    correct->add_flag("--ablation", s.ablation, "Error model only, candidates from --ablation-vocab");
    correct->add_option("--trace", s.trace, "Write scored candidates as JSON lines");
    subs.push_back(correct);

    auto* evaluate = app.add_subcommand("evaluate", "Score corrector configurations on a dataset");
    evaluate->add_option("--dataset", s.dataset, "Dataset TSV from `noise`")->required();
    evaluate->add_option("--sidecar", s.sidecar, "Dataset metadata (default: <dataset>.json)");
    add_corrector_options(evaluate, s);
    evaluate->add_option("--modes", s.modes, "Correction modes to run")
        ->check(CLI::IsMember({"word", "sentence"}));
    evaluate->add_option("--error-models", s.error_models, "Error models to run")
        ->check(CLI::IsMember({"bm", "cd"}));
    evaluate->add_flag("--with-uniform", s.with_uniform, "Add a uniform-prior column");
    evaluate->add_flag("--no-ablation", s.no_ablation, "Skip the error-model-only rows");
    evaluate->add_flag("--allow-same-model", s.allow_same_model,
                       "Allow a dataset generated with the corrector's own confusion model");
    evaluate->add_option("--format", s.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    evaluate->add_option("--diagnostics", s.diagnostics, "Write per-sentence results as JSON lines");
    subs.push_back(evaluate);

    auto* selfcheck = app.add_subcommand("selfcheck", "Run the built-in oracle suites");
    subs.push_back(selfcheck);

    for (auto* sub : subs) {
        add_common(sub, s);
    }
    return subs;
}

std::string config_value(const nlohmann::json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    return v.dump();
}

// Turns config entries into extra command-line tokens for options the user
// did not give. Keys are long option names; an object under a subcommand's
// name applies to that subcommand only.
std::vector<std::string> config_arguments(const nlohmann::json& config, CLI::App* sub) {
    if (!config.is_object()) {
        throw std::runtime_error("config file must hold a JSON object");
    }
    std::map<std::string, nlohmann::json> entries;
    for (const auto& [k, v] : config.items()) {
        if (!v.is_object()) {
            entries[k] = v;
        }
    }
    if (config.contains(sub->get_name())) {
        for (const auto& [k, v] : config.at(sub->get_name()).items()) {
            if (sub->get_option_no_throw("--" + k) == nullptr) {
                throw std::runtime_error("config section '" + sub->get_name() + "' has unknown option '" + k + "'");
            }
            entries[k] = v;
        }
    }
    std::vector<std::string> extra;
    for (const auto& [k, v] : entries) {
        if (k == "config") {
            continue;
        }
        const CLI::Option* opt = sub->get_option_no_throw("--" + k);
        if (opt == nullptr || opt->count() > 0) {
            continue;
        }
        if (v.is_boolean()) {
            if (v.get<bool>()) {
                extra.push_back("--" + k);
            }
            continue;
        }
        if (v.is_array()) {
            for (const auto& item : v) {
                extra.push_back("--" + k + "=" + config_value(item));
            }
            continue;
        }
        extra.push_back("--" + k + "=" + config_value(v));
    }
    return extra;
}

// Option results arrive as strings; numbers and booleans are shown typed.
nlohmann::json typed(const std::string& v) {
    auto j = nlohmann::json::parse(v, nullptr, false);
    if (!j.is_discarded() && (j.is_number() || j.is_boolean())) {
        return j;
    }
    return v;
}

nlohmann::json effective_config(const CLI::App* sub) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "print-config" ||
            opt->get_positional()) {
            continue;
        }
        if (opt->get_type_size() == 0) {
            j[name] = opt->count() > 0;
            continue;
        }
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_expected_max() > 1) {
                auto arr = nlohmann::json::array();
                for (const auto& r : res) {
                    arr.push_back(typed(r));
                }
                j[name] = std::move(arr);
            } else {
                j[name] = typed(res.back());
            }
        } else {
            j[name] = typed(opt->get_default_str());
        }
    }
    return j;
}

nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

template <typename F>
void for_each_input(const std::vector<std::string>& inputs, std::istream& in, F&& f) {
    if (inputs.empty()) {
        f(in, std::string("<stdin>"));
        return;
    }
    for (const auto& p : inputs) {
        if (p == "-") {
            f(in, std::string("<stdin>"));
            continue;
        }
        std::ifstream file(p, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open " + p);
        }
        f(file, p);
    }
}

std::vector<std::string> read_lines(const std::vector<std::string>& inputs, std::istream& in) {
    std::vector<std::string> lines;
    for_each_input(inputs, in, [&](std::istream& s, const std::string&) {
        std::string line;
        while (std::getline(s, line)) {
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            lines.push_back(line);
        }
    });
    return lines;
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        out += (i ? " " : "") + words[i];
    }
    return out;
}

std::shared_ptr<const Vocabulary> load_wordlist(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    return std::make_shared<const Vocabulary>(read_wordlist(f));
}

// Models shared by `correct` and `evaluate`.
struct Loaded {
    std::optional<ConfusionModel> confusion;
    std::optional<KNBigramModel> lm;
    std::unique_ptr<KnPrior> kn;
    std::unique_ptr<PluginClient> plugin;
    Vocabulary vocab;
    std::unique_ptr<CandidateIndex> index;
    std::shared_ptr<const Vocabulary> ablation_vocab;
};

Loaded load_models(const Settings& s, const Log& log, bool need_candidates) {
    Loaded m;
    if (!s.channel.empty()) {
        m.confusion = ConfusionModel::from_file_json(load_json(s.channel));
    }
    if (!s.lm.empty()) {
        m.lm = KNBigramModel::from_file_json(load_json(s.lm));
        m.kn = std::make_unique<KnPrior>(*m.lm);
    }
    if (!s.plugin.empty()) {
        auto endpoint = PluginEndpoint::parse(s.plugin);
        endpoint.timeout_ms = s.plugin_timeout_ms;
        m.plugin = std::make_unique<PluginClient>(endpoint);
        log.info("connected to plugin " + endpoint.to_string());
    }
    if (!s.ablation_vocab.empty()) {
        m.ablation_vocab = load_wordlist(s.ablation_vocab);
    }
    if (need_candidates) {
        if (!s.vocab.empty()) {
            m.vocab = *load_wordlist(s.vocab);
        } else if (m.lm) {
            for (const auto& w : m.lm->vocabulary()) {
                if (w == kSentenceEnd || w == kUnknownWord) {
                    continue;
                }
                const Count c = m.lm->unigram_count(w);
                if (c >= s.vocab_cutoff) {
                    m.vocab.counts[w] = c;
                }
            }
        } else {
            throw std::runtime_error("candidate words need --vocab or --lm");
        }
        m.index = std::make_unique<CandidateIndex>(m.vocab, 2);
        log.info("candidate vocabulary: " + std::to_string(m.vocab.size()) + " words");
    }
    return m;
}

CorrectionConfig correction_config(const Settings& s) {
    CorrectionConfig c;
    c.lambda = s.lambda;
    c.mode = parse_mode(s.mode);
    c.error_model = parse_error_model(s.error_model);
    c.cd.alpha = s.alpha;
    c.per_word_cap = s.per_word_cap;
    c.beam_width = s.beam_width;
    c.enumeration_limit = s.enumeration_limit;
    c.oov_penalty_logp = s.oov_penalty;
    c.prior_fallback = s.plugin_fallback;
    return c;
}

int cmd_ingest(const Settings& s, std::istream& in, std::ostream& out) {
    const auto profile = resolve_profile(s.profile);
    FrequencyTable table;
    for_each_input(s.inputs, in, [&](std::istream& f, const std::string&) { table.merge(ingest(f, profile)); });
    table.write_tsv(out);
    return 0;
}

int cmd_stats(const Settings& s, std::istream& in, std::ostream& out) {
    const auto profile = resolve_profile(s.profile);
    std::string text;
    for_each_input(s.inputs, in, [&](std::istream& f, const std::string&) {
        std::ostringstream buf;
        buf << f.rdbuf();
        text += buf.str();
        if (!text.empty() && text.back() != '\n') {
            text += '\n';
        }
        // Files are separate paragraphs.
        text += '\n';
    });
    std::istringstream source(text);
    const CorpusStats st = corpus_stats(source, profile, s.cutoffs);
    if (s.format == "csv") {
        out << st.to_csv(s.name);
    } else {
        out << st.to_json().dump(2) << "\n";
    }
    return 0;
}

int cmd_triples(const Settings& s, std::istream& in, std::ostream& out, const Log& log) {
    FrequencyTable table;
    if (!s.freq.empty()) {
        std::ifstream f(s.freq, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot open " + s.freq);
        }
        table = FrequencyTable::read_tsv(f);
    } else {
        const auto profile = resolve_profile(s.profile);
        for_each_input(s.inputs, in, [&](std::istream& f, const std::string&) { table.merge(ingest(f, profile)); });
    }
    const auto triples = extract_triples(table, s.max_ed, s.ratio);
    log.info("mined " + std::to_string(triples.size()) + " triples from " + std::to_string(table.size()) + " types");
    write_triples_tsv(out, triples);
    return 0;
}

int cmd_train_channel(const Settings& s, std::ostream& out, const Log& log) {
    std::ifstream f(s.triples, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + s.triples);
    }
    const auto triples = read_triples_tsv(f);
    auto alphabet = triple_alphabet(triples);
    for (Symbol c : decode_utf8(s.alphabet)) {
        alphabet.insert(c);
    }
    if (triples.empty()) {
        log.warn("no triples; the model is smoothing only");
    }
    const auto model = ConfusionModel::train(triples, alphabet, s.smoothing_k);
    out << model.to_file_json().dump() << "\n";
    log.info("trained on " + std::to_string(triples.size()) + " triples, alphabet of " +
             std::to_string(alphabet.size()));
    return 0;
}

int cmd_train_lm(const Settings& s, std::istream& in, std::ostream& out, const Log& log) {
    const auto profile = resolve_profile(s.profile);
    std::vector<std::vector<std::string>> sentences;
    for_each_input(s.inputs, in, [&](std::istream& f, const std::string&) {
        std::string line;
        std::size_t offset = 0;
        while (std::getline(f, line)) {
            decode_utf8(line, offset);
            offset += line.size() + 1;
            for (auto& sent : split_sentences(line, profile)) {
                sentences.push_back(std::move(sent));
            }
        }
    });
    const auto model = KNBigramModel::train(sentences, s.discount, s.vocab_cutoff);
    out << model.to_file_json().dump() << "\n";
    log.info("trained on " + std::to_string(sentences.size()) + " sentences");
    return 0;
}

int cmd_heatmap(const Settings& s, std::ostream& out) {
    const auto model = ConfusionModel::from_file_json(load_json(s.model));
    std::vector<Symbol> chars;
    if (s.chars.empty()) {
        chars.assign(model.alphabet().begin(), model.alphabet().end());
    } else {
        const auto cps = decode_utf8(s.chars);
        chars.assign(cps.begin(), cps.end());
    }
    out << export_heatmap(model, chars);
    return 0;
}

int cmd_noise(const Settings& s, std::istream& in, std::ostream& out, const Log& log) {
    const auto profile = resolve_profile(s.profile);
    const auto model = ConfusionModel::from_file_json(load_json(s.model));
    std::vector<Sentence> clean;
    for (const auto& line : read_lines(s.inputs, in)) {
        auto toks = tokenize(line, profile);
        if (!toks.empty()) {
            clean.push_back(std::move(toks));
        }
    }
    std::string sidecar = s.sidecar;
    if (sidecar.empty()) {
        if (s.output.empty()) {
            throw std::runtime_error("noise needs -o or --sidecar to record the dataset metadata");
        }
        sidecar = s.output + ".json";
    }
    double scale = s.rate_scale;
    if (s.target_wer > 0) {
        std::span<const Sentence> sample(clean);
        if (s.calibration_sentences > 0 && s.calibration_sentences < clean.size()) {
            sample = sample.first(s.calibration_sentences);
        }
        const auto cal = calibrate_rate_scale(sample, model, profile, s.target_wer, s.seed);
        scale = cal.rate_scale;
        log.info("calibrated rate_scale " + format_double(scale) + " gives corruption rate " +
                 format_double(cal.achieved_rate) + " after " + std::to_string(cal.iterations) + " steps");
    }
    const auto nm = derive_noise_model(model, scale, s.seed);
    const auto data = build_eval_dataset(clean, nm, profile);
    data.write_tsv(out);
    write_file(sidecar, data.sidecar().dump(2) + "\n");
    log.info("wrote " + std::to_string(data.size()) + " sentences, corruption rate " +
             format_double(data.uncorrected_wer()));
    return 0;
}

PriorModel* primary_prior(Loaded& m, UniformPrior& uniform, const Settings& s, const Log& log) {
    if (m.plugin) {
        if (s.plugin_fallback && !m.kn) {
            throw std::runtime_error("--plugin-fallback needs --lm");
        }
        return m.plugin.get();
    }
    if (m.kn) {
        return m.kn.get();
    }
    log.warn("no --lm or --plugin; ranking with a uniform prior");
    return &uniform;
}

int cmd_correct(const Settings& s, std::istream& in, std::ostream& out, const Log& log) {
    const auto profile = resolve_profile(s.profile);
    Loaded m = load_models(s, log, !s.ablation);
    CorrectionConfig cfg = correction_config(s);
    cfg.ablation = s.ablation;
    cfg.ablation_vocab = m.ablation_vocab;
    UniformPrior uniform;
    PriorModel* prior = s.ablation ? &uniform : primary_prior(m, uniform, s, log);
    CandidateIndex none;
    Corrector corrector(m.index ? *m.index : none, profile, m.confusion ? &*m.confusion : nullptr, *prior, cfg);
    if (m.kn && prior != m.kn.get()) {
        corrector.set_fallback_prior(m.kn.get());
    }

    std::unique_ptr<std::ofstream> trace;
    if (!s.trace.empty()) {
        trace = std::make_unique<std::ofstream>(s.trace, std::ios::binary);
        if (!*trace) {
            throw std::runtime_error("cannot write " + s.trace);
        }
    }
    std::size_t sentence = 0;
    std::size_t changed = 0;
    for (const auto& line : read_lines(s.inputs, in)) {
        const auto toks = tokenize(line, profile);
        if (toks.empty()) {
            out << "\n";
            ++sentence;
            continue;
        }
        const auto r = corrector.correct(toks);
        changed += r.changed.size();
        out << join(r.corrected) << "\n";
        if (trace) {
            for (auto j : r.trace_lines()) {
                j["sentence"] = sentence;
                *trace << j.dump() << "\n";
            }
        }
        ++sentence;
    }
    if (corrector.fallback_uses() > 0) {
        log.warn("plugin failed on " + std::to_string(corrector.fallback_uses()) +
                 " queries; the Kneser-Ney model answered instead");
    }
    log.info("corrected " + std::to_string(sentence) + " lines, " + std::to_string(changed) + " words changed");
    return 0;
}

int cmd_evaluate(const Settings& s, std::ostream& out, const Log& log) {
    const auto profile = resolve_profile(s.profile);
    const std::string sidecar_path = s.sidecar.empty() ? s.dataset + ".json" : s.sidecar;
    std::ifstream tsv(s.dataset, std::ios::binary);
    if (!tsv) {
        throw std::runtime_error("cannot open " + s.dataset);
    }
    const EvalDataset data = EvalDataset::read(tsv, load_json(sidecar_path));
    Loaded m = load_models(s, log, true);

    EvalModels models;
    models.index = m.index.get();
    models.profile = &profile;
    models.confusion = m.confusion ? &*m.confusion : nullptr;
    models.ablation_vocab = m.ablation_vocab;
    UniformPrior uniform;
    if (m.kn) {
        models.priors.push_back({"kn", m.kn.get()});
    }
    if (m.plugin) {
        models.priors.push_back({"plugin", m.plugin.get()});
    }
    if (s.with_uniform || models.priors.empty()) {
        models.priors.push_back({"uniform", &uniform});
    }

    EvalOptions opts;
    opts.base = correction_config(s);
    opts.error_models.clear();
    for (const auto& e : s.error_models) {
        opts.error_models.push_back(parse_error_model(e));
    }
    opts.modes.clear();
    for (const auto& md : s.modes) {
        opts.modes.push_back(parse_mode(md));
    }
    opts.include_ablation = !s.no_ablation;
    opts.allow_same_model = s.allow_same_model;
    if (opts.include_ablation && !m.ablation_vocab) {
        log.info("no --ablation-vocab; skipping the error-model-only rows");
    }
    std::unique_ptr<std::ofstream> diag;
    if (!s.diagnostics.empty()) {
        diag = std::make_unique<std::ofstream>(s.diagnostics, std::ios::binary);
        if (!*diag) {
            throw std::runtime_error("cannot write " + s.diagnostics);
        }
        opts.diagnostics = [&](const nlohmann::json& j) { *diag << j.dump() << "\n"; };
    }
    const EvalTable table = evaluate(data, models, opts);
    if (s.format == "json") {
        out << table.to_json().dump(2) << "\n";
    } else {
        out << table.to_text();
    }
    return 0;
}

int cmd_selfcheck(const Settings& s, std::ostream& out) {
    bool ok = true;
    for (const auto& r : oracle::run_self_checks(s.seed)) {
        out << (r.passed ? "PASS  " : "FAIL  ") << r.name << " (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    auto parse = [&](CLI::App& app, const std::vector<std::string>& a) {
        std::vector<std::string> reversed(a.rbegin(), a.rend());
        app.parse(reversed);
    };

    Settings s;
    CLI::App app{"Noisy-channel spelling correction toolkit", "noisyspell"};
    std::vector<CLI::App*> subs = build(app, s);
    try {
        parse(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    CLI::App* sub = app.get_subcommands().front();

    std::unique_ptr<CLI::App> app2;
    if (!s.config.empty()) {
        try {
            auto extra = config_arguments(load_json(s.config), sub);
            std::vector<std::string> all = args;
            all.insert(all.end(), extra.begin(), extra.end());
            s = Settings{};
            app2 = std::make_unique<CLI::App>("Noisy-channel spelling correction toolkit", "noisyspell");
            build(*app2, s);
            parse(*app2, all);
            sub = app2->get_subcommands().front();
        } catch (const CLI::ParseError& e) {
            return app2->exit(e, out, err);
        } catch (const std::exception& e) {
            err << "noisyspell: error: " << e.what() << "\n";
            return 1;
        }
    }

    const Log log(err, s.quiet);
    if (s.print_config) {
        out << effective_config(sub).dump(2) << "\n";
        return 0;
    }

    std::ostringstream buffer;
    std::ostream& dest = s.output.empty() ? out : buffer;
    const std::string name = sub->get_name();
    try {
        int rc = 0;
        if (name == "ingest") {
            rc = cmd_ingest(s, in, dest);
        } else if (name == "stats") {
            rc = cmd_stats(s, in, dest);
        } else if (name == "triples") {
            rc = cmd_triples(s, in, dest, log);
        } else if (name == "train-channel") {
            rc = cmd_train_channel(s, dest, log);
        } else if (name == "train-lm") {
            rc = cmd_train_lm(s, in, dest, log);
        } else if (name == "export-heatmap") {
            rc = cmd_heatmap(s, dest);
        } else if (name == "noise") {
            rc = cmd_noise(s, in, dest, log);
        } else if (name == "correct") {
            rc = cmd_correct(s, in, dest, log);
        } else if (name == "evaluate") {
            rc = cmd_evaluate(s, dest, log);
        } else if (name == "selfcheck") {
            rc = cmd_selfcheck(s, dest);
        }
        if (!s.output.empty()) {
            write_file(s.output, buffer.str());
        }
        return rc;
    } catch (const std::exception& e) {
        err << "noisyspell: error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cin, std::cout, std::cerr);
}

} // namespace noisyspell::cli
