#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace levyspde {

/// |‖x+h‖^p − ‖x‖^p − p‖x‖^{p−2}⟨x,h⟩|
template <typename DerivedX, typename DerivedH>
typename DerivedX::Scalar taylor_remainder(const Eigen::MatrixBase<DerivedX>& x,
                                           const Eigen::MatrixBase<DerivedH>& h,
                                           typename DerivedX::Scalar p) {
  using std::abs;
  using std::pow;
  const auto nx = x.norm();
  const auto first = nx > 0 ? p * pow(nx, p - 2) * x.dot(h) : typename DerivedX::Scalar(0);
  return abs(pow((x + h).norm(), p) - pow(nx, p) - first);
}

/// ‖x‖^{p−2}‖h‖² + ‖h‖^p
template <typename DerivedX, typename DerivedH>
typename DerivedX::Scalar taylor_bound_terms(const Eigen::MatrixBase<DerivedX>& x,
                                             const Eigen::MatrixBase<DerivedH>& h,
                                             typename DerivedX::Scalar p) {
  using std::pow;
  const auto nh = h.norm();
  return pow(x.norm(), p - 2) * nh * nh + pow(nh, p);
}

/// C_p = p(p−1)/2 · max(1, 2^{p−3}), from the second-order remainder and
/// (a+b)^{p−2} ≤ max(1, 2^{p−3})(a^{p−2} + b^{p−2}).
inline double taylor_constant(double p) {
  return 0.5 * p * (p - 1.0) * std::max(1.0, std::pow(2.0, p - 3.0));
}

}  // namespace levyspde
