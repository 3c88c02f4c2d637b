// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flucast {

/// Splits one record of delimited text. Double-quoted fields may contain the
/// delimiter; a doubled quote inside a quoted field is a literal quote.
/// Returns false on an unterminated quote.
bool split_record(std::string_view line, char delimiter, std::vector<std::string>& fields);

/// Quotes a field when it contains the delimiter, a quote, or a line break.
std::string quote_field(std::string_view field, char delimiter);

/// Shortest text that reads back to the identical double (17 significant digits).
std::string format_double(double value);

/// Strict double parse of the whole string; rejects trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::string_view trim(std::string_view text) noexcept;

std::string join(const std::vector<std::string>& items, std::string_view sep);
std::vector<std::string> split(std::string_view text, char sep);

/// Percent-encodes '%', ',', '=', space and control characters so the result can
/// sit inside comma-separated header lines.
std::string encode_token(std::string_view text);
std::string decode_token(std::string_view text);

}  // namespace flucast
