#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qecomb {

// A whitespace-tokenized sentence. Tokens are non-empty and carry no
// whitespace; corpora are expected to be pre-tokenized.
using TokenSeq = std::vector<std::string>;

TokenSeq tokenize(std::string_view text);

std::string join(const TokenSeq& tokens, std::string_view sep = " ");

// Token view of source[start, end).
TokenSeq slice(const TokenSeq& tokens, std::size_t start, std::size_t end);

bool is_punct_token(std::string_view token);

}  // namespace qecomb
