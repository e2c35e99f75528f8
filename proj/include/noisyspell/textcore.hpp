#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace noisyspell {

/// One Unicode code point. Words are stored as UTF-8 and decoded to
/// code-point strings wherever distances or alignments are computed.
using Symbol = char32_t;

/// The empty partition. Never a valid text character.
inline constexpr Symbol kEpsilon = U'\0';

/// Script-specific knowledge: combining marks that must stay attached to
/// their base, and a per-character romanization used for phonetic keys.
struct ScriptProfile {
    std::string name;
    std::set<Symbol> modifiers;
    std::map<Symbol, std::string> translit;

    bool is_modifier(Symbol s) const { return modifiers.count(s) != 0; }

    nlohmann::json to_json() const;
    static ScriptProfile from_json(const nlohmann::json& j);

    /// Built-in Devanagari profile.
    static ScriptProfile devanagari();
    /// Identity profile for text that is already Latin.
    static ScriptProfile latin();
};

ScriptProfile load_profile(const std::filesystem::path& path);

/// "devanagari", "latin", or a path to a profile JSON file.
ScriptProfile resolve_profile(std::string_view name_or_path);

bool is_punctuation(Symbol s);
bool is_sentence_delimiter(Symbol s);

/// Whitespace split with punctuation stripped from both token edges.
/// Interior punctuation is kept. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text, const ScriptProfile& profile);

std::string transliterate(std::string_view word, const ScriptProfile& profile);

/// Restricted Damerau-Levenshtein (optimal string alignment) distance:
/// insertions, deletions, substitutions and adjacent transpositions, with no
/// substring edited twice.
std::size_t damerau_distance(std::u32string_view a, std::u32string_view b);
std::size_t damerau_distance(std::string_view a, std::string_view b);

/// Same as damerau_distance but gives up once the distance exceeds `bound`,
/// returning bound + 1.
std::size_t damerau_distance_bounded(std::u32string_view a, std::u32string_view b, std::size_t bound);

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);

struct AlignedPair {
    Symbol source = kEpsilon;
    Symbol target = kEpsilon;

    bool is_identity() const { return source == target; }
    friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

/// Character-level alignment between a source and target string. Either
/// side of a pair may be the empty partition but never both.
struct Alignment {
    std::vector<AlignedPair> pairs;

    std::u32string source() const;
    std::u32string target() const;
    /// Count of non-identity pairs.
    std::size_t cost() const;
};

/// Minimal-cost Levenshtein alignment (insert/delete/substitute; a
/// transposition shows up as two substitutions). Traceback runs from the end
/// and prefers match, then substitution, then deletion, then insertion.
Alignment align(std::u32string_view source, std::u32string_view target);
Alignment align(std::string_view source, std::string_view target);

} // namespace noisyspell
