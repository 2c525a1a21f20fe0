// Copyright 2026 The wfner Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfner {

// Thrown when a byte sequence is not well-formed UTF-8.
class Utf8Error : public std::runtime_error {
 public:
  Utf8Error(std::size_t byte_offset, const std::string& what)
      : std::runtime_error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

namespace utf8 {

// Decodes one scalar value starting at `pos`, advancing `pos` past it.
inline char32_t decode(std::string_view s, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    throw Utf8Error(pos, "invalid UTF-8 lead byte at offset " + std::to_string(pos));
  }
  if (pos + len > s.size()) {
    throw Utf8Error(pos, "truncated UTF-8 sequence at offset " + std::to_string(pos));
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(s[pos + i]);
    if ((c & 0xC0) != 0x80) {
      throw Utf8Error(pos, "invalid UTF-8 continuation byte at offset " + std::to_string(pos + i));
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw Utf8Error(pos, "invalid UTF-8 scalar value at offset " + std::to_string(pos));
  }
  pos += len;
  return cp;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) out.push_back(decode(s, pos));
  return out;
}

inline std::string from_u32(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append(out, cp);
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) decode(s, pos);
  return n;
}

}  // namespace utf8

// Character classes used by the tokenizer and the tagger's word boundaries.
// ASCII is classified exactly; outside ASCII, the common whitespace and
// punctuation blocks are recognised and everything else counts as a letter.
inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200B) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000 ||
         c == 0xFEFF;
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return (c >= 0xA1 && c <= 0xBF) || c == 0xD7 || c == 0xF7 || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x2190 && c <= 0x23FF) ||
         (c >= 0x3001 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF0F);
}

inline bool is_control(char32_t c) { return c < 0x20 || c == 0x7F || (c >= 0x80 && c < 0xA0); }

inline bool is_alnum(char32_t c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  return !is_space(c) && !is_punct(c) && !is_control(c);
}

inline bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Simple case folding: ASCII, Latin-1 and Greek/Cyrillic basic blocks.
inline char32_t fold_case(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if ((c >= 0xC0 && c <= 0xDE && c != 0xD7)) return c + 32;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

inline std::u32string fold_case(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = fold_case(c);
  return out;
}

inline std::string fold_case(std::string_view s) { return utf8::from_u32(fold_case(utf8::to_u32(s))); }

// Maps scalar-value offsets to byte offsets for one UTF-8 text.
class TextIndex {
 public:
  TextIndex() : bytes_{0} {}

  explicit TextIndex(std::string_view text) {
    bytes_.reserve(text.size() + 1);
    std::size_t pos = 0;
    while (pos < text.size()) {
      bytes_.push_back(pos);
      utf8::decode(text, pos);
    }
    bytes_.push_back(text.size());
  }

  // Number of scalar values in the text.
  std::size_t size() const noexcept { return bytes_.size() - 1; }

  std::size_t byte_offset(std::size_t cp_offset) const { return bytes_.at(cp_offset); }

  std::string_view slice(std::string_view text, std::size_t start, std::size_t end) const {
    const auto b = byte_offset(start);
    return text.substr(b, byte_offset(end) - b);
  }

  // Scalar-value offset of a byte offset that lies on a character boundary.
  std::size_t cp_offset(std::size_t byte) const;

 private:
  std::vector<std::size_t> bytes_;
};

inline std::size_t TextIndex::cp_offset(std::size_t byte) const {
  std::size_t lo = 0, hi = bytes_.size();
  while (lo < hi) {
    const auto mid = (lo + hi) / 2;
    if (bytes_[mid] < byte) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace wfner
