#include "quadsqueeze/setpoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qs {

SetpointSignal::SetpointSignal() : segments_{{0.0, 0.0}} {}

SetpointSignal::SetpointSignal(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("setpoint needs at least one segment");
  if (segments_.front().start != 0.0)
    throw std::invalid_argument("first setpoint segment must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!std::isfinite(segments_[i].start) || !std::isfinite(segments_[i].value))
      throw std::invalid_argument("setpoint segments must be finite");
    if (i > 0 && !(segments_[i].start > segments_[i - 1].start))
      throw std::invalid_argument("setpoint start times must be strictly increasing");
  }
}

SetpointSignal SetpointSignal::step(double value) { return SetpointSignal({{0.0, value}}); }

double SetpointSignal::value(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const Segment& s) { return x < s.start; });
  if (it == segments_.begin()) return 0.0;
  return std::prev(it)->value;
}

double SetpointSignal::integral(double t) const {
  if (t <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double a = segments_[i].start;
    if (a >= t) break;
    const double b = i + 1 < segments_.size() ? std::min(segments_[i + 1].start, t) : t;
    acc += segments_[i].value * (b - a);
  }
  return acc;
}

std::vector<double> SetpointSignal::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].start);
  return out;
}

bool SetpointSignal::is_zero() const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.value == 0.0; });
}

}  // namespace qs
