#include "noisyspell/metaphone.hpp"

#include <cctype>
#include <initializer_list>

namespace noisyspell {

namespace {

// Primary-code port of the Double Metaphone rule set as published by
// Lawrence Philips (following the Apache commons-codec structure). Branches
// that only affect the alternate code are kept as no-ops so the control
// flow, and therefore the index advancement, matches the reference.
class Encoder {
public:
    Encoder(std::string value, std::size_t max_length) : v_(std::move(value)), max_(max_length) {}

    std::string run() {
        if (v_.empty()) {
            return {};
        }
        slavo_germanic_ = v_.find('W') != std::string::npos || v_.find('K') != std::string::npos ||
                          v_.find("CZ") != std::string::npos || v_.find("WITZ") != std::string::npos;
        int i = silent_start() ? 1 : 0;
        const int n = len();
        while (out_.size() < max_ && i < n) {
            const char c = at(i);
            switch (c) {
            case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
                if (i == 0) {
                    put("A");
                }
                ++i;
                break;
            case 'B':
                put("P");
                i += at(i + 1) == 'B' ? 2 : 1;
                break;
            case 'C': i = handle_c(i); break;
            case 'D': i = handle_d(i); break;
            case 'F':
                put("F");
                i += at(i + 1) == 'F' ? 2 : 1;
                break;
            case 'G': i = handle_g(i); break;
            case 'H': i = handle_h(i); break;
            case 'J': i = handle_j(i); break;
            case 'K':
                put("K");
                i += at(i + 1) == 'K' ? 2 : 1;
                break;
            case 'L': i = handle_l(i); break;
            case 'M':
                put("M");
                i += condition_m0(i) ? 2 : 1;
                break;
            case 'N':
                put("N");
                i += at(i + 1) == 'N' ? 2 : 1;
                break;
            case 'P': i = handle_p(i); break;
            case 'Q':
                put("K");
                i += at(i + 1) == 'Q' ? 2 : 1;
                break;
            case 'R': i = handle_r(i); break;
            case 'S': i = handle_s(i); break;
            case 'T': i = handle_t(i); break;
            case 'V':
                put("F");
                i += at(i + 1) == 'V' ? 2 : 1;
                break;
            case 'W': i = handle_w(i); break;
            case 'X': i = handle_x(i); break;
            case 'Z': i = handle_z(i); break;
            default: ++i; break;
            }
        }
        return out_;
    }

private:
    int len() const { return static_cast<int>(v_.size()); }

    char at(int i) const { return i < 0 || i >= len() ? '\0' : v_[static_cast<std::size_t>(i)]; }

    static bool is_vowel(char c) {
        return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U' || c == 'Y';
    }

    bool has(int start, int length, std::initializer_list<const char*> options) const {
        if (start < 0 || start + length > len()) {
            return false;
        }
        std::string_view window(v_.data() + start, static_cast<std::size_t>(length));
        for (const char* o : options) {
            if (window == o) {
                return true;
            }
        }
        return false;
    }

    void put(std::string_view s) {
        for (char c : s) {
            if (out_.size() < max_) {
                out_.push_back(c);
            }
        }
    }

    bool silent_start() const { return has(0, 2, {"GN", "KN", "PN", "WR", "PS"}); }

    bool condition_c0(int i) const {
        if (has(i, 4, {"CHIA"})) {
            return true;
        }
        if (i <= 1 || is_vowel(at(i - 2)) || !has(i - 1, 3, {"ACH"})) {
            return false;
        }
        const char c = at(i + 2);
        return (c != 'I' && c != 'E') || has(i - 2, 6, {"BACHER", "MACHER"});
    }

    bool condition_ch0(int i) const {
        if (i != 0) {
            return false;
        }
        if (!has(i + 1, 5, {"HARAC", "HARIS"}) && !has(i + 1, 3, {"HOR", "HYM", "HIA", "HEM"})) {
            return false;
        }
        return !has(0, 5, {"CHORE"});
    }

    bool condition_ch1(int i) const {
        return has(0, 4, {"VAN ", "VON "}) || has(0, 3, {"SCH"}) ||
               has(i - 2, 6, {"ORCHES", "ARCHIT", "ORCHID"}) || has(i + 2, 1, {"T", "S"}) ||
               ((has(i - 1, 1, {"A", "O", "U", "E"}) || i == 0) &&
                (has(i + 2, 1, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}) || i + 1 == len() - 1));
    }

    bool condition_l0(int i) const {
        if (i == len() - 3 && has(i - 1, 4, {"ILLO", "ILLA", "ALLE"})) {
            return true;
        }
        return (has(len() - 2, 2, {"AS", "OS"}) || has(len() - 1, 1, {"A", "O"})) && has(i - 1, 4, {"ALLE"});
    }

    bool condition_m0(int i) const {
        if (at(i + 1) == 'M') {
            return true;
        }
        return has(i - 1, 3, {"UMB"}) && (i + 1 == len() - 1 || has(i + 2, 2, {"ER"}));
    }

    int handle_c(int i) {
        if (condition_c0(i)) {
            put("K");
            return i + 2;
        }
        if (i == 0 && has(i, 6, {"CAESAR"})) {
            put("S");
            return i + 2;
        }
        if (has(i, 2, {"CH"})) {
            return handle_ch(i);
        }
        if (has(i, 2, {"CZ"}) && !has(i - 2, 4, {"WICZ"})) {
            put("S");
            return i + 2;
        }
        if (has(i + 1, 3, {"CIA"})) {
            put("X");
            return i + 3;
        }
        if (has(i, 2, {"CC"}) && !(i == 1 && at(0) == 'M')) {
            return handle_cc(i);
        }
        if (has(i, 2, {"CK", "CG", "CQ"})) {
            put("K");
            return i + 2;
        }
        if (has(i, 2, {"CI", "CE", "CY"})) {
            put("S");
            return i + 2;
        }
        put("K");
        if (has(i + 1, 2, {" C", " Q", " G"})) {
            return i + 3;
        }
        if (has(i + 1, 1, {"C", "K", "Q"}) && !has(i + 1, 2, {"CE", "CI"})) {
            return i + 2;
        }
        return i + 1;
    }

    int handle_cc(int i) {
        if (has(i + 2, 1, {"I", "E", "H"}) && !has(i + 2, 2, {"HU"})) {
            if ((i == 1 && at(i - 1) == 'A') || has(i - 1, 5, {"UCCEE", "UCCES"})) {
                put("KS");
            } else {
                put("X");
            }
            return i + 3;
        }
        put("K");
        return i + 2;
    }

    int handle_ch(int i) {
        if (i > 0 && has(i, 4, {"CHAE"})) {
            put("K");
        } else if (condition_ch0(i) || condition_ch1(i)) {
            put("K");
        } else if (i > 0 && has(0, 2, {"MC"})) {
            put("K");
        } else {
            put("X");
        }
        return i + 2;
    }

    int handle_d(int i) {
        if (has(i, 2, {"DG"})) {
            if (has(i + 2, 1, {"I", "E", "Y"})) {
                put("J");
                return i + 3;
            }
            put("TK");
            return i + 2;
        }
        put("T");
        return has(i, 2, {"DT", "DD"}) ? i + 2 : i + 1;
    }

    int handle_g(int i) {
        if (at(i + 1) == 'H') {
            return handle_gh(i);
        }
        if (at(i + 1) == 'N') {
            if (i == 1 && is_vowel(at(0)) && !slavo_germanic_) {
                put("KN");
            } else if (!has(i + 2, 2, {"EY"}) && at(i + 1) != 'Y' && !slavo_germanic_) {
                put("N");
            } else {
                put("KN");
            }
            return i + 2;
        }
        if (has(i + 1, 2, {"LI"}) && !slavo_germanic_) {
            put("KL");
            return i + 2;
        }
        if (i == 0 &&
            (at(i + 1) == 'Y' || has(i + 1, 2, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"}))) {
            put("K");
            return i + 2;
        }
        if ((has(i + 1, 2, {"ER"}) || at(i + 1) == 'Y') && !has(0, 6, {"DANGER", "RANGER", "MANGER"}) &&
            !has(i - 1, 1, {"E", "I"}) && !has(i - 1, 3, {"RGY", "OGY"})) {
            put("K");
            return i + 2;
        }
        if (has(i + 1, 1, {"E", "I", "Y"}) || has(i - 1, 4, {"AGGI", "OGGI"})) {
            if (has(0, 4, {"VAN ", "VON "}) || has(0, 3, {"SCH"}) || has(i + 1, 2, {"ET"})) {
                put("K");
            } else {
                put("J");
            }
            return i + 2;
        }
        put("K");
        return at(i + 1) == 'G' ? i + 2 : i + 1;
    }

    int handle_gh(int i) {
        if (i > 0 && !is_vowel(at(i - 1))) {
            put("K");
            return i + 2;
        }
        if (i == 0) {
            put(at(i + 2) == 'I' ? "J" : "K");
            return i + 2;
        }
        if ((i > 1 && has(i - 2, 1, {"B", "H", "D"})) || (i > 2 && has(i - 3, 1, {"B", "H", "D"})) ||
            (i > 3 && has(i - 4, 1, {"B", "H"}))) {
            return i + 2;
        }
        if (i > 2 && at(i - 1) == 'U' && has(i - 3, 1, {"C", "G", "L", "R", "T"})) {
            put("F");
        } else if (i > 0 && at(i - 1) != 'I') {
            put("K");
        }
        return i + 2;
    }

    int handle_h(int i) {
        if ((i == 0 || is_vowel(at(i - 1))) && is_vowel(at(i + 1))) {
            put("H");
            return i + 2;
        }
        return i + 1;
    }

    int handle_j(int i) {
        if (has(i, 4, {"JOSE"}) || has(0, 4, {"SAN "})) {
            if ((i == 0 && (at(i + 4) == ' ' || len() == 4)) || has(0, 4, {"SAN "})) {
                put("H");
            } else {
                put("J");
            }
            return i + 1;
        }
        if (i == 0) {
            put("J");
        } else if (is_vowel(at(i - 1)) && !slavo_germanic_ && (at(i + 1) == 'A' || at(i + 1) == 'O')) {
            put("J");
        } else if (i == len() - 1) {
            put("J");
        } else if (!has(i + 1, 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) && !has(i - 1, 1, {"S", "K", "L"})) {
            put("J");
        }
        return at(i + 1) == 'J' ? i + 2 : i + 1;
    }

    int handle_l(int i) {
        put("L");
        if (at(i + 1) == 'L') {
            return i + 2;
        }
        return i + 1;
    }

    int handle_p(int i) {
        if (at(i + 1) == 'H') {
            put("F");
            return i + 2;
        }
        put("P");
        return has(i + 1, 1, {"P", "B"}) ? i + 2 : i + 1;
    }

    int handle_r(int i) {
        const bool alternate_only =
            i == len() - 1 && !slavo_germanic_ && has(i - 2, 2, {"IE"}) && !has(i - 4, 2, {"ME", "MA"});
        if (!alternate_only) {
            put("R");
        }
        return at(i + 1) == 'R' ? i + 2 : i + 1;
    }

    int handle_s(int i) {
        if (has(i - 1, 3, {"ISL", "YSL"})) {
            return i + 1;
        }
        if (i == 0 && has(i, 5, {"SUGAR"})) {
            put("X");
            return i + 1;
        }
        if (has(i, 2, {"SH"})) {
            put(has(i + 1, 4, {"HEIM", "HOEK", "HOLM", "HOLZ"}) ? "S" : "X");
            return i + 2;
        }
        if (has(i, 3, {"SIO", "SIA"}) || has(i, 4, {"SIAN"})) {
            put("S");
            return i + 3;
        }
        if ((i == 0 && has(i + 1, 1, {"M", "N", "L", "W"})) || has(i + 1, 1, {"Z"})) {
            put("S");
            return has(i + 1, 1, {"Z"}) ? i + 2 : i + 1;
        }
        if (has(i, 2, {"SC"})) {
            return handle_sc(i);
        }
        if (!(i == len() - 1 && has(i - 2, 2, {"AI", "OI"}))) {
            put("S");
        }
        return has(i + 1, 1, {"S", "Z"}) ? i + 2 : i + 1;
    }

    int handle_sc(int i) {
        if (at(i + 2) == 'H') {
            if (has(i + 3, 2, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
                put(has(i + 3, 2, {"ER", "EN"}) ? "X" : "SK");
            } else {
                put("X");
            }
        } else if (has(i + 2, 1, {"I", "E", "Y"})) {
            put("S");
        } else {
            put("SK");
        }
        return i + 3;
    }

    int handle_t(int i) {
        if (has(i, 4, {"TION"}) || has(i, 3, {"TIA", "TCH"})) {
            put("X");
            return i + 3;
        }
        if (has(i, 2, {"TH"}) || has(i, 3, {"TTH"})) {
            if (has(i + 2, 2, {"OM", "AM"}) || has(0, 4, {"VAN ", "VON "}) || has(0, 3, {"SCH"})) {
                put("T");
            } else {
                put("0");
            }
            return i + 2;
        }
        put("T");
        return has(i + 1, 1, {"T", "D"}) ? i + 2 : i + 1;
    }

    int handle_w(int i) {
        if (has(i, 2, {"WR"})) {
            put("R");
            return i + 2;
        }
        if (i == 0 && (is_vowel(at(i + 1)) || has(i, 2, {"WH"}))) {
            put("A");
            return i + 1;
        }
        if ((i == len() - 1 && is_vowel(at(i - 1))) || has(i - 1, 5, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) ||
            has(0, 3, {"SCH"})) {
            return i + 1;
        }
        if (has(i, 4, {"WICZ", "WITZ"})) {
            put("TS");
            return i + 4;
        }
        return i + 1;
    }

    int handle_x(int i) {
        if (i == 0) {
            put("S");
            return i + 1;
        }
        if (!(i == len() - 1 && (has(i - 3, 3, {"IAU", "EAU"}) || has(i - 2, 2, {"AU", "OU"})))) {
            put("KS");
        }
        return has(i + 1, 1, {"C", "X"}) ? i + 2 : i + 1;
    }

    int handle_z(int i) {
        if (at(i + 1) == 'H') {
            put("J");
            return i + 2;
        }
        put("S");
        return at(i + 1) == 'Z' ? i + 2 : i + 1;
    }

    std::string v_;
    std::size_t max_;
    std::string out_;
    bool slavo_germanic_ = false;
};

std::string clean(std::string_view input) {
    std::size_t b = 0;
    std::size_t e = input.size();
    while (b < e && std::isspace(static_cast<unsigned char>(input[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(input[e - 1]))) {
        --e;
    }
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        auto c = static_cast<unsigned char>(input[i]);
        out.push_back(c < 0x80 ? static_cast<char>(std::toupper(c)) : static_cast<char>(c));
    }
    return out;
}

} // namespace

std::string double_metaphone(std::string_view latin, std::size_t max_length) {
    return Encoder(clean(latin), max_length).run();
}

} // namespace noisyspell
