#include "noisyspell/textcore.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "noisyspell/utf8.hpp"

namespace noisyspell {

namespace {

// Fixed ASCII romanization, close to Harvard-Kyoto lowercased. Consonants
// carry the inherent vowel; matras map to their vowel; virama and nukta map
// to nothing.
const std::pair<Symbol, const char*> kDevanagariTable[] = {
    {U'ँ', "n"},   {U'ं', "m"},   {U'ः', "h"},
    {U'अ', "a"},   {U'आ', "aa"},  {U'इ', "i"},   {U'ई', "ii"},
    {U'उ', "u"},   {U'ऊ', "uu"},  {U'ऋ', "ri"},  {U'ऌ', "li"},
    {U'ए', "e"},   {U'ऐ', "ai"},  {U'ओ', "o"},   {U'औ', "au"},
    {U'क', "ka"},  {U'ख', "kha"}, {U'ग', "ga"},  {U'घ', "gha"},
    {U'ङ', "nga"}, {U'च', "cha"}, {U'छ', "chha"}, {U'ज', "ja"},
    {U'झ', "jha"}, {U'ञ', "nya"}, {U'ट', "ta"},  {U'ठ', "tha"},
    {U'ड', "da"},  {U'ढ', "dha"}, {U'ण', "na"},  {U'त', "ta"},
    {U'थ', "tha"}, {U'द', "da"},  {U'ध', "dha"}, {U'न', "na"},
    {U'प', "pa"},  {U'फ', "pha"}, {U'ब', "ba"},  {U'भ', "bha"},
    {U'म', "ma"},  {U'य', "ya"},  {U'र', "ra"},  {U'ल', "la"},
    {U'व', "va"},  {U'श', "sha"}, {U'ष', "sha"}, {U'स', "sa"},
    {U'ह', "ha"},  {U'़', ""},    {U'ऽ', ""},
    {U'ा', "aa"},  {U'ि', "i"},   {U'ी', "ii"},  {U'ु', "u"},
    {U'ू', "uu"},  {U'ृ', "ri"},  {U'ॄ', "rri"}, {U'े', "e"},
    {U'ै', "ai"},  {U'ो', "o"},   {U'ौ', "au"},  {U'्', ""},
    {U'ॠ', "rri"}, {U'ॡ', "lri"}, {U'ॢ', "li"},  {U'ॣ', "lri"},
    {U'।', "."},   {U'॥', "."},
    {U'०', "0"},   {U'१', "1"},   {U'२', "2"},   {U'३', "3"},
    {U'४', "4"},   {U'५', "5"},   {U'६', "6"},   {U'७', "7"},
    {U'८', "8"},   {U'९', "9"},
};

// Combining characters listed as Nepali character modifiers.
const Symbol kDevanagariModifiers[] = {
    U'ँ', U'ै', U'ो', U'ी', U'ु',
    U'ू', U'ि', U'ृ', U'ॠ', U'ॡ',
};

bool is_space(Symbol s) {
    return s == U' ' || s == U'\t' || s == U'\n' || s == U'\r' || s == U'\v' || s == U'\f' ||
           s == U' ' || s == U' ' || (s >= U' ' && s <= U' ') || s == U' ' ||
           s == U' ' || s == U' ' || s == U' ' || s == U'　';
}

std::u32string symbol_from_key(const std::string& key) {
    auto cps = decode_utf8(key);
    if (cps.size() != 1) {
        throw std::invalid_argument("profile key must be a single character: '" + key + "'");
    }
    return cps;
}

} // namespace

nlohmann::json ScriptProfile::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    auto mods = nlohmann::json::array();
    for (Symbol m : modifiers) {
        mods.push_back(encode_utf8(m));
    }
    j["modifiers"] = std::move(mods);
    auto tr = nlohmann::json::object();
    for (const auto& [k, v] : translit) {
        tr[encode_utf8(k)] = v;
    }
    j["translit"] = std::move(tr);
    return j;
}

ScriptProfile ScriptProfile::from_json(const nlohmann::json& j) {
    ScriptProfile p;
    p.name = j.value("name", std::string{"custom"});
    if (j.contains("modifiers")) {
        for (const auto& m : j.at("modifiers")) {
            p.modifiers.insert(symbol_from_key(m.get<std::string>())[0]);
        }
    }
    if (j.contains("translit")) {
        for (const auto& [k, v] : j.at("translit").items()) {
            p.translit[symbol_from_key(k)[0]] = v.get<std::string>();
        }
    }
    return p;
}

ScriptProfile ScriptProfile::devanagari() {
    ScriptProfile p;
    p.name = "devanagari";
    p.modifiers.insert(std::begin(kDevanagariModifiers), std::end(kDevanagariModifiers));
    for (const auto& [cp, latin] : kDevanagariTable) {
        p.translit.emplace(cp, latin);
    }
    return p;
}

ScriptProfile ScriptProfile::latin() {
    ScriptProfile p;
    p.name = "latin";
    return p;
}

ScriptProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open profile file " + path.string());
    }
    return ScriptProfile::from_json(nlohmann::json::parse(in));
}

ScriptProfile resolve_profile(std::string_view name_or_path) {
    if (name_or_path == "devanagari") {
        return ScriptProfile::devanagari();
    }
    if (name_or_path == "latin") {
        return ScriptProfile::latin();
    }
    return load_profile(std::filesystem::path(name_or_path));
}

bool is_punctuation(Symbol s) {
    if (s < 0x80) {
        switch (s) {
        case U'!': case U'"': case U'#': case U'%': case U'&': case U'\'':
        case U'(': case U')': case U'*': case U',': case U'-': case U'.':
        case U'/': case U':': case U';': case U'?': case U'@': case U'[':
        case U'\\': case U']': case U'_': case U'{': case U'}':
            return true;
        default:
            return false;
        }
    }
    switch (s) {
    case U'¡': case U'§': case U'«': case U'¶': case U'·':
    case U'»': case U'¿': case U'।': case U'॥': case U'॰':
        return true;
    default:
        break;
    }
    return (s >= U'‐' && s <= U'‧') || (s >= U'‰' && s <= U'⁃') ||
           (s >= U'⁅' && s <= U'⁑') || (s >= U'⁓' && s <= U'⁞') ||
           (s >= U'、' && s <= U'〃') || (s >= U'〈' && s <= U'】') ||
           (s >= U'〔' && s <= U'〟') || (s >= U'！' && s <= U'／' && s != U'＄' &&
                                                 s != U'＋');
}

bool is_sentence_delimiter(Symbol s) {
    return s == U'।' || s == U'.' || s == U'!' || s == U'?';
}

std::vector<std::string> tokenize(std::string_view text, const ScriptProfile& /*profile*/) {
    std::vector<std::string> tokens;
    const std::u32string cps = decode_utf8(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space(cps[i])) {
            ++i;
        }
        std::size_t begin = i;
        while (i < cps.size() && !is_space(cps[i])) {
            ++i;
        }
        std::size_t end = i;
        while (begin < end && is_punctuation(cps[begin])) {
            ++begin;
        }
        while (end > begin && is_punctuation(cps[end - 1])) {
            --end;
        }
        if (begin < end) {
            tokens.push_back(encode_utf8(std::u32string_view(cps).substr(begin, end - begin)));
        }
    }
    return tokens;
}

std::string transliterate(std::string_view word, const ScriptProfile& profile) {
    std::string out;
    for (Symbol s : decode_utf8(word)) {
        auto it = profile.translit.find(s);
        if (it != profile.translit.end()) {
            out += it->second;
        } else {
            out += encode_utf8(s);
        }
    }
    return out;
}

std::size_t damerau_distance(std::u32string_view a, std::u32string_view b) {
    return damerau_distance_bounded(a, b, std::numeric_limits<std::size_t>::max() - 1);
}

std::size_t damerau_distance(std::string_view a, std::string_view b) {
    return damerau_distance(decode_utf8(a), decode_utf8(b));
}

std::size_t damerau_distance_bounded(std::u32string_view a, std::u32string_view b, std::size_t bound) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t diff = n > m ? n - m : m - n;
    if (diff > bound) {
        return bound + 1;
    }
    // Three rolling rows: i-2, i-1, i.
    std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        std::size_t row_min = cur[0];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                v = std::min(v, prev2[j - 2] + 1);
            }
            cur[j] = v;
            row_min = std::min(row_min, v);
        }
        // Transpositions can reach back two rows, so only abandon when both
        // of the last two rows exceed the bound.
        if (row_min > bound && i > 1) {
            std::size_t prev_min = *std::min_element(prev.begin(), prev.end());
            if (prev_min > bound) {
                return bound + 1;
            }
        }
        std::swap(prev2, prev);
        std::swap(prev, cur);
    }
    return std::min(prev[m], bound + 1);
}

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::u32string Alignment::source() const {
    std::u32string s;
    for (const auto& p : pairs) {
        if (p.source != kEpsilon) {
            s.push_back(p.source);
        }
    }
    return s;
}

std::u32string Alignment::target() const {
    std::u32string s;
    for (const auto& p : pairs) {
        if (p.target != kEpsilon) {
            s.push_back(p.target);
        }
    }
    return s;
}

std::size_t Alignment::cost() const {
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [](const AlignedPair& p) { return !p.is_identity(); }));
}

Alignment align(std::u32string_view source, std::u32string_view target) {
    const std::size_t n = source.size();
    const std::size_t m = target.size();
    std::vector<std::size_t> d((n + 1) * (m + 1));
    auto at = [m, &d](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
    for (std::size_t i = 0; i <= n; ++i) {
        at(i, 0) = i;
    }
    for (std::size_t j = 0; j <= m; ++j) {
        at(0, j) = j;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t cost = source[i - 1] == target[j - 1] ? 0 : 1;
            at(i, j) = std::min({at(i - 1, j) + 1, at(i, j - 1) + 1, at(i - 1, j - 1) + cost});
        }
    }

    Alignment out;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && source[i - 1] == target[j - 1] && at(i, j) == at(i - 1, j - 1)) {
            out.pairs.push_back({source[i - 1], target[j - 1]});
            --i;
            --j;
        } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
            out.pairs.push_back({source[i - 1], target[j - 1]});
            --i;
            --j;
        } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            out.pairs.push_back({source[i - 1], kEpsilon});
            --i;
        } else {
            out.pairs.push_back({kEpsilon, target[j - 1]});
            --j;
        }
    }
    std::reverse(out.pairs.begin(), out.pairs.end());
    return out;
}

Alignment align(std::string_view source, std::string_view target) {
    return align(decode_utf8(source), decode_utf8(target));
}

} // namespace noisyspell
