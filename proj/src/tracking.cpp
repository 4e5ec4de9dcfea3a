#include "hand3d/tracking.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace hand3d {

std::vector<double> polyfit(std::span<const double> ts,
                            std::span<const double> ys, int degree) {
  if (degree < 0) throw Error("fit", "degree must be non-negative");
  const int n = int(ts.size());
  if (n != int(ys.size()) || n < degree + 1) {
    throw Error("fit", "need at least degree+1 samples");
  }
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      if (ts[i] == ts[k]) throw Error("fit", "duplicate abscissae");
    }
  }

  Eigen::MatrixXd vand(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      vand(i, k) = power;
      power *= ts[i];
    }
    rhs(i) = ys[i];
  }
  const Eigen::VectorXd sol = vand.colPivHouseholderQr().solve(rhs);
  return {sol.data(), sol.data() + sol.size()};
}

double polyval(std::span<const double> coeffs, double t) {
  double value = 0.0;
  for (size_t k = coeffs.size(); k-- > 0;) {
    value = value * t + coeffs[k];
  }
  return value;
}

double push_and_estimate(TrackState& state, long frame, double r_raw) {
  if (!state.history.empty() && frame <= state.history.back().first) {
    throw Error("ordering", "frame indices must be strictly increasing");
  }
  state.history.emplace_back(frame, r_raw);
  while (int(state.history.size()) > state.capacity) {
    state.history.pop_front();
  }

  const int fit_count = state.include_current ? int(state.history.size())
                                              : int(state.history.size()) - 1;
  if (fit_count <= state.degree + 1) {
    return r_raw;  // warm-up: not enough history to smooth
  }

  // Recenter times on the window mean before fitting; the raw frame indices
  // can be large enough to make the Vandermonde ill-conditioned.
  std::vector<double> ts, ys;
  ts.reserve(fit_count);
  ys.reserve(fit_count);
  double t_mean = 0.0;
  for (int i = 0; i < fit_count; ++i) {
    t_mean += double(state.history[i].first);
  }
  t_mean /= fit_count;
  for (int i = 0; i < fit_count; ++i) {
    ts.push_back(double(state.history[i].first) - t_mean);
    ys.push_back(state.history[i].second);
  }
  const auto coeffs = polyfit(ts, ys, state.degree);
  const double est = polyval(coeffs, double(frame) - t_mean);
  if (!std::isfinite(est)) {
    throw Error("fit", "polynomial estimate is not finite");
  }
  return est;
}

}  // namespace hand3d
