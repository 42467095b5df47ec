#pragma once

#include "isospec/types.hpp"

#include <vector>

namespace isospec {

/// One constant piece of a piecewise-constant gain law.
struct ControlSegment {
  double duration = 0.0;
  SymmetricMatrix generator;

  ControlSegment() = default;
  ControlSegment(double d, SymmetricMatrix a) : duration(d), generator(std::move(a)) {
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw InvalidInput("segment duration must be positive");
  }
};

/// Ordered segments plus the spectrum the gains are meant to carry.
/// Isospectrality is not enforced here; see verify_isospectral.
struct ControlSchedule {
  std::vector<ControlSegment> segments;
  Spectrum spectrum;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }

  bool empty() const { return segments.empty(); }
};

}  // namespace isospec
