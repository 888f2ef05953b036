// bits.hpp -- binary strings over the alphabet B = {0, 1}.
//
// A BitString is the project's sequence type for the SAT-derived languages:
// formula encodings, assignments, and their concatenations.  The
// end-of-string marker $ is never stored; it lives outside the alphabet and
// is handled by the local-model / language layers.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satlang/errors.hpp"

namespace satlang {

using Bit = std::uint8_t;  // always 0 or 1
using BitString = std::vector<Bit>;

inline std::string bits_to_string(const BitString& x) {
  std::string s;
  s.reserve(x.size());
  for (Bit b : x) s.push_back(b ? '1' : '0');
  return s;
}

inline BitString bits_from_string(const std::string& s) {
  BitString x;
  x.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '0') {
      x.push_back(0);
    } else if (c == '1') {
      x.push_back(1);
    } else {
      throw ParseError(std::string("invalid bit character '") + c + "'", i);
    }
  }
  return x;
}

inline BitString operator+(BitString a, const BitString& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline BitString with_bit(BitString a, Bit b) {
  a.push_back(b);
  return a;
}

// True iff a is a (non-strict) prefix of b.
inline bool is_prefix(const BitString& a, const BitString& b) {
  if (a.size() > b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace satlang
