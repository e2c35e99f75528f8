#include "noisyspell/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "noisyspell/io.hpp"

namespace noisyspell {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("token counts differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string cell(const std::optional<double>& v) {
    if (!v) {
        return "n/a";
    }
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << *v;
    return s.str();
}

} // namespace

double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
    require_same_length(reference.size(), hypothesis.size());
    if (reference.empty()) {
        return 0.0;
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        errors += reference[i] != hypothesis[i];
    }
    return static_cast<double>(errors) / static_cast<double>(reference.size());
}

void MetricCounts::add(std::span<const std::string> clean, std::span<const std::string> noisy,
                       std::span<const std::string> corrected,
                       const std::function<bool(const std::string&)>& is_real_word) {
    require_same_length(clean.size(), noisy.size());
    require_same_length(clean.size(), corrected.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
        ++total_words;
        hypothesis_errors += corrected[i] != clean[i];
        if (noisy[i] == clean[i]) {
            broken_words += corrected[i] != clean[i];
            continue;
        }
        ++error_words;
        const bool fixed = corrected[i] == clean[i];
        corrected_words += fixed;
        if (is_real_word && is_real_word(noisy[i])) {
            ++real_word_errors;
            real_words_corrected += fixed;
        }
        const std::size_t before = align(std::string_view(noisy[i]), std::string_view(clean[i])).cost();
        const std::size_t after = align(std::string_view(corrected[i]), std::string_view(clean[i])).cost();
        error_chars += before;
        corrected_chars += before > after ? before - after : 0;
    }
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& o) {
    total_words += o.total_words;
    hypothesis_errors += o.hypothesis_errors;
    error_words += o.error_words;
    corrected_words += o.corrected_words;
    error_chars += o.error_chars;
    corrected_chars += o.corrected_chars;
    real_word_errors += o.real_word_errors;
    real_words_corrected += o.real_words_corrected;
    broken_words += o.broken_words;
    return *this;
}

nlohmann::json MetricCounts::to_json() const {
    return {{"total_words", total_words},         {"hypothesis_errors", hypothesis_errors},
            {"error_words", error_words},         {"corrected_words", corrected_words},
            {"error_chars", error_chars},         {"corrected_chars", corrected_chars},
            {"real_word_errors", real_word_errors}, {"real_words_corrected", real_words_corrected},
            {"broken_words", broken_words}};
}

std::optional<double> word_accuracy(std::span<const std::string> clean, std::span<const std::string> noisy,
                                    std::span<const std::string> corrected) {
    MetricCounts c;
    c.add(clean, noisy, corrected);
    return ratio(c.corrected_words, c.error_words);
}

std::optional<double> char_accuracy(std::span<const std::string> clean, std::span<const std::string> noisy,
                                    std::span<const std::string> corrected) {
    MetricCounts c;
    c.add(clean, noisy, corrected);
    return ratio(c.corrected_chars, c.error_chars);
}

EvalReport EvalReport::from_counts(const MetricCounts& c) {
    EvalReport r;
    r.counts = c;
    r.wer = c.total_words == 0 ? 0.0 : static_cast<double>(c.hypothesis_errors) / static_cast<double>(c.total_words);
    r.word_accuracy = ratio(c.corrected_words, c.error_words);
    r.char_accuracy = ratio(c.corrected_chars, c.error_chars);
    r.real_word_accuracy = ratio(c.real_words_corrected, c.real_word_errors);
    return r;
}

nlohmann::json EvalReport::to_json() const {
    return {{"error_model", error_model},
            {"lm", lm},
            {"mode", mode},
            {"ablation", ablation},
            {"wer", wer},
            {"word_accuracy", optional_json(word_accuracy)},
            {"char_accuracy", optional_json(char_accuracy)},
            {"real_word_accuracy", optional_json(real_word_accuracy)},
            {"counts", counts.to_json()},
            {"config", config}};
}

const EvalReport* EvalTable::find(const std::string& error_model, const std::string& lm, const std::string& mode,
                                  bool ablation) const {
    for (const auto& r : rows) {
        if (r.error_model == error_model && r.lm == lm && r.mode == mode && r.ablation == ablation) {
            return &r;
        }
    }
    return nullptr;
}

nlohmann::json EvalTable::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back(r.to_json());
    }
    return {{"sentences", sentences}, {"uncorrected_wer", uncorrected_wer}, {"rows", std::move(arr)}};
}

std::string EvalTable::to_text() const {
    std::ostringstream out;
    out << "sentences: " << sentences << "\nuncorrected WER: " << cell(uncorrected_wer) << "\n";

    std::vector<std::string> modes;
    std::vector<std::string> lms;
    std::vector<std::string> ems;
    auto remember = [](std::vector<std::string>& v, const std::string& s) {
        if (std::find(v.begin(), v.end(), s) == v.end()) {
            v.push_back(s);
        }
    };
    for (const auto& r : rows) {
        if (!r.ablation) {
            remember(modes, r.mode);
            remember(lms, r.lm);
            remember(ems, r.error_model);
        }
    }

    struct Metric {
        const char* title;
        std::function<std::optional<double>(const EvalReport&)> get;
    };
    const std::vector<Metric> metrics{
        {"WER", [](const EvalReport& r) { return std::optional<double>(r.wer); }},
        {"word accuracy", [](const EvalReport& r) { return r.word_accuracy; }},
        {"char accuracy", [](const EvalReport& r) { return r.char_accuracy; }},
    };
    for (const auto& mode : modes) {
        for (const auto& m : metrics) {
            out << "\n" << m.title << " (" << mode << " mode)\n";
            out << std::left << std::setw(8) << "model";
            for (const auto& lm : lms) {
                out << std::right << std::setw(12) << lm;
            }
            out << "\n";
            for (const auto& em : ems) {
                out << std::left << std::setw(8) << em;
                for (const auto& lm : lms) {
                    const EvalReport* r = find(em, lm, mode, false);
                    out << std::right << std::setw(12) << (r ? cell(m.get(*r)) : "-");
                }
                out << "\n";
            }
        }
    }

    bool header = false;
    for (const auto& r : rows) {
        if (!r.ablation) {
            continue;
        }
        if (!header) {
            out << "\nerror-model-only ablation\n"
                << std::left << std::setw(8) << "model" << std::setw(10) << "mode" << std::right << std::setw(10)
                << "WER" << std::setw(11) << "word acc" << std::setw(11) << "char acc" << "\n";
            header = true;
        }
        out << std::left << std::setw(8) << r.error_model << std::setw(10) << r.mode << std::right << std::setw(10)
            << cell(r.wer) << std::setw(11) << cell(r.word_accuracy) << std::setw(11) << cell(r.char_accuracy)
            << "\n";
    }
    return out.str();
}

EvalReport evaluate_cell(const EvalDataset& data, Corrector& corrector,
                         const std::function<bool(const std::string&)>& is_real,
                         const std::function<void(const nlohmann::json&)>& diagnostics) {
    MetricCounts total;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const CorrectionResult r = corrector.correct(data.noisy[i]);
        MetricCounts c;
        c.add(data.clean[i], data.noisy[i], r.corrected, is_real);
        total += c;
        if (diagnostics) {
            diagnostics({{"sentence", i},
                         {"noisy", data.noisy[i]},
                         {"clean", data.clean[i]},
                         {"corrected", r.corrected},
                         {"counts", c.to_json()}});
        }
    }
    EvalReport rep = EvalReport::from_counts(total);
    rep.config = corrector.config().to_json();
    return rep;
}

EvalTable evaluate(const EvalDataset& data, const EvalModels& models, const EvalOptions& options) {
    if (models.index == nullptr || models.profile == nullptr) {
        throw std::invalid_argument("evaluation needs a candidate index and a script profile");
    }
    if (models.confusion != nullptr && !options.allow_same_model &&
        data.source_model_hash == models.confusion->content_hash()) {
        throw SameModelError(
            "the dataset was generated with the same confusion model the corrector would use (hash " +
            data.source_model_hash +
            "); train the generator and the corrector on different corpora, or pass --allow-same-model");
    }

    EvalTable table;
    table.sentences = data.size();
    table.uncorrected_wer = data.uncorrected_wer();

    std::function<bool(const std::string&)> is_real = [&](const std::string& w) {
        return models.ablation_vocab ? models.ablation_vocab->contains(w) : models.index->contains(w);
    };

    auto run = [&](CorrectionConfig cfg, PriorModel& prior, const std::string& lm) {
        Corrector corrector(*models.index, *models.profile, models.confusion, prior, cfg);
        auto diag = options.diagnostics;
        std::function<void(const nlohmann::json&)> tagged;
        if (diag) {
            tagged = [&](const nlohmann::json& j) {
                auto k = j;
                k["error_model"] = to_string(cfg.error_model);
                k["lm"] = lm;
                k["mode"] = to_string(cfg.mode);
                k["ablation"] = cfg.ablation;
                diag(k);
            };
        }
        EvalReport rep = evaluate_cell(data, corrector, is_real, tagged);
        rep.error_model = to_string(cfg.error_model);
        rep.lm = lm;
        rep.mode = to_string(cfg.mode);
        rep.ablation = cfg.ablation;
        table.rows.push_back(std::move(rep));
    };

    for (auto mode : options.modes) {
        for (const auto& p : models.priors) {
            for (auto em : options.error_models) {
                if (em == ErrorModelKind::BrillMoore && models.confusion == nullptr) {
                    continue;
                }
                CorrectionConfig cfg = options.base;
                cfg.mode = mode;
                cfg.error_model = em;
                cfg.ablation = false;
                run(cfg, *p.prior, p.name);
            }
        }
    }
    if (options.include_ablation && models.ablation_vocab) {
        UniformPrior uniform;
        for (auto mode : options.modes) {
            for (auto em : options.error_models) {
                if (em == ErrorModelKind::BrillMoore && models.confusion == nullptr) {
                    continue;
                }
                CorrectionConfig cfg = options.base;
                cfg.mode = mode;
                cfg.error_model = em;
                cfg.ablation = true;
                cfg.ablation_vocab = models.ablation_vocab;
                run(cfg, uniform, "none");
            }
        }
    }
    return table;
}

} // namespace noisyspell
