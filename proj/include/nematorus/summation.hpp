#ifndef NEMATORUS_SUMMATION_HPP
#define NEMATORUS_SUMMATION_HPP

#include <cstddef>

namespace nematorus {

// Pairwise (cascade) summation with a fixed split, so a given input always
// produces the same bits regardless of how the caller is scheduled.
namespace detail {
inline constexpr std::size_t kPairwiseBlock = 8;
}

template <class Scalar>
Scalar pairwise_sum(const Scalar* x, std::size_t n) {
  if (n == 0) return Scalar(0);
  if (n <= detail::kPairwiseBlock) {
    Scalar s = x[0];
    for (std::size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

/// Same bits as pairwise_sum over n copies of v, in O(log n).
template <class Scalar>
Scalar pairwise_sum_uniform(Scalar v, std::size_t n) {
  if (n == 0) return Scalar(0);
  if (n <= detail::kPairwiseBlock) {
    Scalar s = v;
    for (std::size_t i = 1; i < n; ++i) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  const Scalar lo = pairwise_sum_uniform(v, half);
  return lo + (n - half == half ? lo : pairwise_sum_uniform(v, n - half));
}

}  // namespace nematorus

#endif
