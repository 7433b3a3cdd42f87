#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace grasslag {

using Rat = mpq_class;

// Parses "n" or "n/d" with optional leading sign. Throws std::invalid_argument
// on malformed input or zero denominator.
inline Rat parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_d(const Rat& q) { return q.get_d(); }

}  // namespace grasslag
