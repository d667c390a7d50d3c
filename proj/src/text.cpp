#include "pisynth/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace pisynth::text {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alpha(unsigned char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_email_local(unsigned char c) {
    return is_alpha(c) || is_digit(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

bool is_email_domain(unsigned char c) { return is_alpha(c) || is_digit(c) || c == '.' || c == '-'; }

bool is_edge_punct(unsigned char c) {
    switch (c) {
        case ',': case '.': case ';': case ':': case '!': case '?':
        case '(': case ')': case '"': case '[': case ']':
            return true;
        default:
            return false;
    }
}

bool starts_with_icase(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
    }
    return true;
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& raw : split_whitespace(s)) {
        std::string_view w = raw;
        std::vector<std::string> trailing;
        while (!w.empty() && is_edge_punct(static_cast<unsigned char>(w.front()))) {
            out.emplace_back(1, w.front());
            w.remove_prefix(1);
        }
        while (!w.empty() && is_edge_punct(static_cast<unsigned char>(w.back()))) {
            trailing.emplace_back(1, w.back());
            w.remove_suffix(1);
        }
        if (!w.empty()) out.emplace_back(w);
        out.insert(out.end(), trailing.rbegin(), trailing.rend());
    }
    return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += sep;
        out += tokens[i];
    }
    return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& tok : tokens) {
        const bool attach = tok.size() == 1 && (tok[0] == ',' || tok[0] == '.' || tok[0] == ';' ||
                                                tok[0] == ':' || tok[0] == '!' || tok[0] == '?' ||
                                                tok[0] == ')');
        if (!out.empty() && !attach && out.back() != '(') out += ' ';
        out += tok;
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return is_space(c); });
}

std::string collapse_whitespace(std::string_view s) { return join(split_whitespace(s), " "); }

std::string normalize_caption(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");

    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString normalized = nfc->normalize(u, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
    normalized.toLower(icu::Locale::getRoot());

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < normalized.length();) {
        const UChar32 c = normalized.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !collapsed.isEmpty()) collapsed.append(static_cast<UChar>(' '));
        pending_space = false;
        collapsed.append(c);
    }

    std::string out;
    collapsed.toUTF8String(out);
    while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' || out.back() == ' ')) {
        out.pop_back();
    }
    return out;
}

bool contains_email(std::string_view s) {
    for (std::size_t at = 1; at < s.size(); ++at) {
        if (s[at] != '@') continue;
        if (!is_email_local(static_cast<unsigned char>(s[at - 1]))) continue;
        std::size_t end = at + 1;
        while (end < s.size() && is_email_domain(static_cast<unsigned char>(s[end]))) ++end;
        // Need a '.' with at least one domain char before it and two letters after it.
        for (std::size_t dot = at + 2; dot + 2 < end; ++dot) {
            if (s[dot] == '.' && is_alpha(static_cast<unsigned char>(s[dot + 1])) &&
                is_alpha(static_cast<unsigned char>(s[dot + 2]))) {
                return true;
            }
        }
    }
    return false;
}

bool contains_url(std::string_view s) {
    static constexpr std::string_view kPrefixes[] = {"http://", "https://", "www."};
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (auto prefix : kPrefixes) {
            if (!starts_with_icase(s, i, prefix)) continue;
            const std::size_t after = i + prefix.size();
            if (after < s.size() && !is_space(static_cast<unsigned char>(s[after]))) return true;
        }
    }
    return false;
}

std::string naive_singular(std::string_view word) {
    std::string w = ascii_lower(word);
    if (w.size() > 1 && w.back() == 's') w.pop_back();
    return w;
}

}  // namespace pisynth::text
