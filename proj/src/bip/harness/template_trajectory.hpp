#pragma once

#include <vector>

namespace bip {

// Piecewise forward-velocity command schedule with steps and ramps. A ramp
// segment interpolates linearly from the previous segment's end value.
struct TemplateTrajectory {
  struct Segment {
    double duration;  // s
    double v_end;     // m/s
    bool ramp;        // false: hold v_end for the whole segment
  };
  std::vector<Segment> segments;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }

  double peak() const {
    double p = 0.0;
    for (const auto& s : segments) p = std::max(p, std::abs(s.v_end));
    return p;
  }

  double vx_at(double t) const {
    double begin = 0.0, v_prev = 0.0;
    for (const auto& s : segments) {
      if (t < begin + s.duration) {
        if (!s.ramp) return s.v_end;
        const double f = (t - begin) / s.duration;
        return v_prev + f * (s.v_end - v_prev);
      }
      begin += s.duration;
      v_prev = s.v_end;
    }
    return segments.empty() ? 0.0 : segments.back().v_end;
  }

  // The 60 s evaluation template: ramps and holds in both directions with a
  // 1.2 m/s peak.
  static TemplateTrajectory standard() {
    TemplateTrajectory t;
    t.segments = {{10.0, 1.2, true},  {10.0, 1.2, false}, {5.0, 0.0, false},
                  {10.0, -0.8, true}, {10.0, -0.8, false}, {5.0, 0.0, false},
                  {10.0, 0.6, true}};
    return t;
  }
};

}  // namespace bip
