// Copyright 2026 The newsclf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NEWSCLF_DETAIL_UTF8_HPP_
#define NEWSCLF_DETAIL_UTF8_HPP_

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace newsclf::detail {

// Number of Unicode scalar values, or nullopt if `s` is not valid UTF-8.
inline std::optional<std::size_t> utf8_length(std::string_view s) {
  std::size_t count = 0;
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
    if (c < 0) return std::nullopt;
    ++count;
  }
  return count;
}

inline bool is_valid_utf8(std::string_view s) { return utf8_length(s).has_value(); }

inline void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, c, err);
  if (!err) out.append(buf, static_cast<std::size_t>(len));
}

// Token characters: general category L* or Nd.
inline bool is_token_char(UChar32 c) { return u_isalnum(c) != 0; }

// Unicode simple case folding, code point by code point. Invalid
// sequences are replaced by U+FFFD.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
    if (c < 0) c = 0xFFFD;
    append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
  }
  return out;
}

}  // namespace newsclf::detail

#endif  // NEWSCLF_DETAIL_UTF8_HPP_
