#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bordepth {

/// Lowercased tokens of `text`. Splits on every non-alphanumeric ASCII byte and
/// inside identifiers at camelCase boundaries ("getHTTPResponse" -> get, http, response).
/// Bytes >= 0x80 are kept as token characters so UTF-8 words survive intact.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

}  // namespace bordepth
