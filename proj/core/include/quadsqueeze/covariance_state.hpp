#pragma once

#include <array>

namespace qs {

/// The ten conditional covariances of the filtered estimates,
/// V_{X,Y} = pi({X,Y}/2) - pi(X) pi(Y). Xa/Ya are the cavity quadratures,
/// Q/P the mechanical ones.
struct CovarianceState {
  double v_q = 0.0;
  double v_qp = 0.0;
  double v_p = 0.0;
  double v_xa = 0.0;
  double v_xaya = 0.0;
  double v_ya = 0.0;
  double v_xaq = 0.0;
  double v_xap = 0.0;
  double v_yaq = 0.0;
  double v_yap = 0.0;

  static constexpr std::size_t kSize = 10;

  std::array<double, kSize> to_array() const {
    return {v_q, v_qp, v_p, v_xa, v_xaya, v_ya, v_xaq, v_xap, v_yaq, v_yap};
  }

  static CovarianceState from_array(const std::array<double, kSize>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
  }

  bool operator==(const CovarianceState&) const = default;
};

}  // namespace qs
