#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pisynth::text {

/// Split on ASCII whitespace; empty tokens are dropped.
std::vector<std::string> split_whitespace(std::string_view s);

/// Whitespace split that also peels leading/trailing punctuation into separate tokens,
/// e.g. "sofa," -> {"sofa", ","}.
std::vector<std::string> word_tokens(std::string_view s);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

/// Join tokens with spaces, attaching closing punctuation to the preceding token.
std::string detokenize(const std::vector<std::string>& tokens);

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);
bool is_blank(std::string_view s);

/// Collapse runs of whitespace into one space and trim both ends.
std::string collapse_whitespace(std::string_view s);

/// Dedup key: NFC, Unicode lowercase, whitespace collapse, trailing ".!?" stripped.
std::string normalize_caption(std::string_view s);

/// Email pattern [A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}, anywhere, case-insensitive.
bool contains_email(std::string_view s);

/// "http://", "https://" or "www." followed by at least one non-space character,
/// anywhere, case-insensitive.
bool contains_url(std::string_view s);

/// Lowercase, then strip one trailing 's' when the word is longer than one character.
std::string naive_singular(std::string_view word);

}  // namespace pisynth::text
