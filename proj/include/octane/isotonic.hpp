#pragma once

#include "octane/types.hpp"

namespace octane {

// Pool-adjacent-violators fit of a monotone sequence (least squares,
// unit weights). Used to smooth Monte-Carlo jitter before threshold
// interpolation and crossing detection.
ArrayX isotonic_fit(const ArrayX& y, bool increasing = true);

struct UnimodalFit {
  ArrayX fitted;
  int peak_index = 0;
};

// Best increasing-then-decreasing fit over all split points.
UnimodalFit unimodal_fit(const ArrayX& y);

}  // namespace octane
