#include "octane/isotonic.hpp"

#include <vector>

namespace octane {

ArrayX isotonic_fit(const ArrayX& y, bool increasing) {
  const Eigen::Index n = y.size();
  if (n == 0) return y;
  const double sign = increasing ? 1.0 : -1.0;

  struct Block {
    double mean;
    Eigen::Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    blocks.push_back({sign * y(i), 1});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.mean = (a.mean * static_cast<double>(a.count) +
                b.mean * static_cast<double>(b.count)) /
               static_cast<double>(a.count + b.count);
      a.count += b.count;
    }
  }

  ArrayX out(n);
  Eigen::Index pos = 0;
  for (const Block& b : blocks) {
    for (Eigen::Index i = 0; i < b.count; ++i) out(pos++) = sign * b.mean;
  }
  return out;
}

UnimodalFit unimodal_fit(const ArrayX& y) {
  const Eigen::Index n = y.size();
  UnimodalFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (Eigen::Index split = 0; split < n; ++split) {
    ArrayX fitted(n);
    if (split > 0)
      fitted.head(split + 1) = isotonic_fit(y.head(split + 1), true);
    else
      fitted(0) = y(0);
    if (split < n - 1) {
      ArrayX tail = isotonic_fit(y.tail(n - split), false);
      // Keep the rising head's value at the junction; the peak belongs
      // to both half-fits.
      fitted(split) = std::max(fitted(split), tail(0));
      fitted.tail(n - split - 1) = tail.tail(n - split - 1);
    }
    const double sse = (fitted - y).square().sum();
    if (sse < best_sse) {
      best_sse = sse;
      best.fitted = fitted;
      best.peak_index = static_cast<int>(split);
    }
  }
  return best;
}

}  // namespace octane
