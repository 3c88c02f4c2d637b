// SPDX-License-Identifier: Apache-2.0
// Shared text container for serialized models:
//
//   FLUMODEL v1 <kind>
//   key=value            (any number)
//   data <n>
//   <n numbers, one per line>
//   end
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include "flucast/matrix.hpp"

namespace flucast::detail {

struct ModelText {
  std::string kind;
  std::map<std::string, std::string> fields;
  std::vector<double> data;

  const std::string& get(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::CorruptPayload, "model lacks '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(get(key), v)) throw Error(ErrorCode::CorruptPayload, "bad number for '" + key + "'");
    return v;
  }

  std::uint64_t unsigned_number(const std::string& key) const {
    const auto& text = get(key);
    std::uint64_t v = 0;
    for (char ch : text) {
      if (ch < '0' || ch > '9') throw Error(ErrorCode::CorruptPayload, "bad integer for '" + key + "'");
      v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    if (text.empty()) throw Error(ErrorCode::CorruptPayload, "empty integer for '" + key + "'");
    return v;
  }

  ColumnNames columns() const {
    ColumnNames out;
    const auto& text = get("columns");
    if (text.empty()) return out;
    for (const auto& tok : split(text, ',')) out.push_back(decode_token(tok));
    return out;
  }
};

inline std::string encode_columns(const ColumnNames& columns) {
  std::vector<std::string> enc;
  enc.reserve(columns.size());
  for (const auto& c : columns) enc.push_back(encode_token(c));
  return join(enc, ",");
}

inline void write_model(std::ostream& out, std::string_view kind,
                        const std::vector<std::pair<std::string, std::string>>& fields,
                        const std::vector<double>& data) {
  out << "FLUMODEL v1 " << kind << '\n';
  for (const auto& [k, v] : fields) out << k << '=' << v << '\n';
  out << "data " << data.size() << '\n';
  for (double v : data) out << format_double(v) << '\n';
  out << "end\n";
}

inline ModelText read_model(std::istream& in) {
  ModelText mt;
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw Error(ErrorCode::CorruptPayload, std::string("truncated model: ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next("header");
  const auto head = split(line, ' ');
  if (head.size() != 3 || head[0] != "FLUMODEL") throw Error(ErrorCode::CorruptPayload, "not a FLUMODEL stream");
  if (head[1] != "v1") throw Error(ErrorCode::FormatVersionMismatch, "unsupported model version '" + head[1] + "'");
  mt.kind = head[2];
  while (true) {
    next("fields");
    if (line.rfind("data ", 0) == 0) break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::CorruptPayload, "bad model line '" + line + "'");
    mt.fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  long long n = 0;
  if (!parse_int(line.substr(5), n) || n < 0) throw Error(ErrorCode::CorruptPayload, "bad data count");
  mt.data.resize(static_cast<std::size_t>(n));
  for (auto& v : mt.data) {
    next("data");
    if (!parse_double(line, v)) throw Error(ErrorCode::CorruptPayload, "bad data value '" + line + "'");
  }
  next("end marker");
  if (line != "end") throw Error(ErrorCode::CorruptPayload, "missing end marker");
  return mt;
}

}  // namespace flucast::detail
