#include "noisyspell/noiser.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "noisyspell/utf8.hpp"

namespace noisyspell {

namespace {

std::string join(const Sentence& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += words[i];
    }
    return out;
}

Sentence split_spaces(const std::string& line) {
    Sentence out;
    std::istringstream in(line);
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double NoiseModel::fire_probability(Symbol s) const {
    if (!dict_selector.count(s)) {
        return 0.0;
    }
    auto it = count_probab.find(s);
    return it == count_probab.end() ? 0.0 : it->second;
}

nlohmann::json NoiseModel::to_json() const {
    auto probs = nlohmann::json::object();
    for (const auto& [s, p] : count_probab) {
        probs[s == kNoiseMarker ? std::string("<marker>") : encode_utf8(s)] = p;
    }
    return {{"rate_scale", rate_scale},
            {"seed", seed},
            {"source_model_hash", source_model_hash},
            {"count_probab", std::move(probs)}};
}

NoiseModel derive_noise_model(const ConfusionModel& model, double rate_scale, std::uint64_t seed) {
    if (!(rate_scale >= 0) || !std::isfinite(rate_scale)) {
        throw std::invalid_argument("rate_scale must be a finite value >= 0");
    }
    NoiseModel nm;
    nm.rate_scale = rate_scale;
    nm.seed = seed;
    nm.source_model_hash = model.content_hash();
    const auto& symbols = model.symbols();
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const Symbol src = symbols[s];
        nm.count_probab[src] = std::clamp(rate_scale * model.char_error_freq(src), 0.0, 1.0);
        std::vector<std::pair<Symbol, double>> row;
        double mass = 0;
        for (std::size_t t = 0; t < symbols.size(); ++t) {
            if (t == s) {
                continue;
            }
            const double p = model.prob_at(s, t);
            row.emplace_back(symbols[t], p);
            mass += p;
        }
        if (mass <= 0) {
            continue;
        }
        for (auto& [sym, p] : row) {
            p /= mass;
        }
        nm.dict_selector[src] = std::move(row);
    }
    return nm;
}

std::u32string interleave_markers(std::u32string_view word, const ScriptProfile& profile) {
    std::u32string out;
    out.reserve(word.size() * 2);
    for (std::size_t i = 0; i < word.size(); ++i) {
        out.push_back(word[i]);
        if (i + 1 < word.size() && !profile.is_modifier(word[i]) && !profile.is_modifier(word[i + 1])) {
            out.push_back(kNoiseMarker);
        }
    }
    return out;
}

std::string corrupt_word(const std::string& word, const NoiseModel& nm, const ScriptProfile& profile, NoiseRng& rng) {
    const std::u32string positions = interleave_markers(decode_utf8(word), profile);
    std::u32string out;
    out.reserve(positions.size());
    for (Symbol s : positions) {
        const double fire = rng.uniform();
        const double pick = rng.uniform();
        Symbol result = s;
        if (fire < nm.fire_probability(s)) {
            const auto& row = nm.dict_selector.at(s);
            result = row.back().first;
            double acc = 0;
            for (const auto& [target, p] : row) {
                acc += p;
                if (pick < acc) {
                    result = target;
                    break;
                }
            }
        }
        if (result != kEpsilon) {
            out.push_back(result);
        }
    }
    if (out.empty()) {
        return word;
    }
    return encode_utf8(out);
}

std::vector<std::string> corrupt_tokens(std::span<const std::string> tokens, const NoiseModel& nm,
                                        const ScriptProfile& profile, NoiseRng& rng) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        out.push_back(corrupt_word(t, nm, profile, rng));
    }
    return out;
}

std::vector<std::string> corrupt_tokens(std::span<const std::string> tokens, const NoiseModel& nm,
                                        const ScriptProfile& profile) {
    NoiseRng rng(nm.seed);
    return corrupt_tokens(tokens, nm, profile, rng);
}

std::vector<Sentence> corrupt_sentences(std::span<const Sentence> sentences, const NoiseModel& nm,
                                        const ScriptProfile& profile) {
    std::vector<Sentence> out;
    out.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        NoiseRng rng(derive_seed(nm.seed, i));
        out.push_back(corrupt_tokens(sentences[i], nm, profile, rng));
    }
    return out;
}

double token_corruption_rate(std::span<const Sentence> clean, std::span<const Sentence> noisy) {
    if (clean.size() != noisy.size()) {
        throw std::invalid_argument("sentence counts differ");
    }
    std::size_t total = 0;
    std::size_t changed = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (clean[i].size() != noisy[i].size()) {
            throw std::invalid_argument("token counts differ in sentence " + std::to_string(i));
        }
        for (std::size_t j = 0; j < clean[i].size(); ++j) {
            ++total;
            changed += clean[i][j] != noisy[i][j];
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(total);
}

Calibration calibrate_rate_scale(std::span<const Sentence> sample, const ConfusionModel& model,
                                 const ScriptProfile& profile, double target, std::uint64_t seed, double tolerance,
                                 int max_iterations) {
    if (!(target > 0 && target < 1)) {
        throw std::invalid_argument("target corruption rate must lie in (0, 1)");
    }
    if (sample.empty()) {
        throw std::invalid_argument("calibration needs at least one sentence");
    }
    auto rate_at = [&](double scale) {
        return token_corruption_rate(sample, corrupt_sentences(sample, derive_noise_model(model, scale, seed), profile));
    };

    Calibration c;
    double lo = 0;
    double hi = 1;
    double hi_rate = rate_at(hi);
    // Every probability clamps at 1 long before this.
    while (hi_rate < target && hi < 1e9) {
        lo = hi;
        hi *= 2;
        hi_rate = rate_at(hi);
        ++c.iterations;
    }
    c.rate_scale = hi;
    c.achieved_rate = hi_rate;
    if (hi_rate < target) {
        return c;
    }
    while (c.iterations < max_iterations && std::abs(c.achieved_rate - target) > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double r = rate_at(mid);
        ++c.iterations;
        if (std::abs(r - target) < std::abs(c.achieved_rate - target)) {
            c.rate_scale = mid;
            c.achieved_rate = r;
        }
        if (r < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * hi) {
            break;
        }
    }
    return c;
}

void EvalDataset::write_tsv(std::ostream& out) const {
    for (std::size_t i = 0; i < clean.size(); ++i) {
        out << join(noisy[i]) << '\t' << join(clean[i]) << '\n';
    }
}

nlohmann::json EvalDataset::sidecar() const {
    return {{"kind", "eval_dataset"},
            {"sentences", clean.size()},
            {"seed", seed},
            {"rate_scale", rate_scale},
            {"source_model_hash", source_model_hash},
            {"uncorrected_wer", uncorrected_wer()}};
}

EvalDataset EvalDataset::read(std::istream& tsv, const nlohmann::json& sidecar) {
    EvalDataset d;
    d.seed = sidecar.at("seed").get<std::uint64_t>();
    d.rate_scale = sidecar.at("rate_scale").get<double>();
    d.source_model_hash = sidecar.at("source_model_hash").get<std::string>();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(tsv, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("dataset line " + std::to_string(lineno) + " has no tab");
        }
        auto noisy = split_spaces(line.substr(0, tab));
        auto clean = split_spaces(line.substr(tab + 1));
        if (noisy.size() != clean.size()) {
            throw std::runtime_error("dataset line " + std::to_string(lineno) + " pairs unequal token counts");
        }
        d.noisy.push_back(std::move(noisy));
        d.clean.push_back(std::move(clean));
    }
    return d;
}

EvalDataset build_eval_dataset(std::span<const Sentence> clean, const NoiseModel& nm, const ScriptProfile& profile) {
    EvalDataset d;
    d.clean.assign(clean.begin(), clean.end());
    d.noisy = corrupt_sentences(clean, nm, profile);
    d.seed = nm.seed;
    d.rate_scale = nm.rate_scale;
    d.source_model_hash = nm.source_model_hash;
    return d;
}

} // namespace noisyspell
