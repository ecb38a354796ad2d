#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace robustkb {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Point in the transformed coordinates (z1, z2) = (mu/sigma^2 - eta, 1/sigma^2).
/// z2 <= 0 is allowed and encodes a point outside the admissible half-plane.
using StateVector = Vector2<double>;

template <typename Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Distinguished infinite cost. Costs are nonnegative, so IEEE addition
/// saturates: any sum containing it stays infinite.
template <typename Scalar = double>
inline constexpr Scalar kInfiniteCost = std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
inline bool is_infinite_cost(Scalar v)
{
  return std::isinf(v) && v > Scalar(0);
}

}  // namespace robustkb
