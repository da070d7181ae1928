#pragma once

#include <span>
#include <vector>

namespace qs {

/// Piecewise-constant reference signal r(t). Each segment holds its value
/// from its start time up to the next segment's start (right-continuous).
class SetpointSignal {
 public:
  struct Segment {
    double start = 0.0;
    double value = 0.0;
    bool operator==(const Segment&) const = default;
  };

  /// r(t) = 0 for all t.
  SetpointSignal();

  /// Throws std::invalid_argument unless the first segment starts at 0 and
  /// start times are strictly increasing and finite.
  explicit SetpointSignal(std::vector<Segment> segments);

  /// r(t) = value * theta(t).
  static SetpointSignal step(double value = 1.0);

  double value(double t) const;

  /// Exact integral of r over [0, t].
  double integral(double t) const;

  /// Segment start times after t = 0.
  std::vector<double> breakpoints() const;

  std::span<const Segment> segments() const { return segments_; }

  bool is_zero() const;

  bool operator==(const SetpointSignal&) const = default;

 private:
  std::vector<Segment> segments_;
};

}  // namespace qs
