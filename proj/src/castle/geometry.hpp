#pragma once

#include <vector>

#include <gmpxx.h>

#include "llt/castle.hpp"

namespace llt::castle::detail {

// Elementary interval of one tower: every rung label, the top cell of the column, the top cell
// of the next column and the top cell of the previous column are constant on it.
struct Piece {
  mpq_class lo, len;
  std::vector<int> labels;  // xi label per rung
  std::vector<int> key;     // top cell key: tower, then xi labels of T^{-i} x on the top, i = 0..2l
  int next_tower = 0;
  std::vector<int> next_key;
  std::vector<int> prev_key;
};

struct Geometry {
  std::vector<Piece> pieces[2];
};

Geometry build_geometry(const CastleModel& c, int refine = 1);

int bottom_length(const CastleModel& c, int tower);

}  // namespace llt::castle::detail
