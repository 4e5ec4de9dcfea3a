#pragma once

#include <deque>
#include <span>
#include <vector>

#include "hand3d/types.hpp"

namespace hand3d {

// Least-squares polynomial fit; coefficients in ascending power order.
// Exact on data generated by a polynomial of degree <= `degree`.
// Throws Error("fit") when there are fewer than degree+1 points or duplicate
// abscissae.
std::vector<double> polyfit(std::span<const double> ts,
                            std::span<const double> ys, int degree);

double polyval(std::span<const double> coeffs, double t);

// Per-hand radius smoother: a bounded FIFO of (frame, radius) samples and a
// polynomial regression over the window.
struct TrackState {
  Handedness side = Handedness::Left;
  int capacity = 5;
  int degree = 2;
  // When false, the fit excludes the incoming sample (pure extrapolation).
  bool include_current = true;
  std::deque<std::pair<long, double>> history;
};

// Appends (frame, r_raw), evicting the oldest sample beyond capacity, and
// returns the fitted polynomial evaluated at `frame`. Passes r_raw through
// until the window holds more than degree+1 samples. Frames must be strictly
// increasing; otherwise throws Error("ordering").
double push_and_estimate(TrackState& state, long frame, double r_raw);

}  // namespace hand3d
