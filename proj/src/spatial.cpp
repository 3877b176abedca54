#include "transona/spatial.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "transona/error.hpp"

namespace transona {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

void AlignmentParams::validate() const {
  if (cos_threshold < -1.0 || cos_threshold > 1.0)
    throw ConfigError("cos_threshold must lie in [-1,1]");
  if (min_displacement_mm <= 0) throw ConfigError("min_displacement_mm must be positive");
  if (max_range_mm && *max_range_mm <= 0) throw ConfigError("max_range_mm must be positive");
}

void VisitParams::validate() const {
  if (radius_mm <= 0 || min_duration_s <= 0)
    throw ConfigError("visit params must be positive");
}

std::vector<OrientationSample> infer_orientation(const std::vector<PositionSample>& samples,
                                                 const AlignmentParams& params) {
  params.validate();
  std::vector<OrientationSample> out;
  out.reserve(samples.size());
  double hx = 0, hy = 0;
  bool have = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    OrientationSample o;
    o.timestamp = samples[i].timestamp;
    if (i > 0) {
      const double dx = samples[i].x - samples[i - 1].x;
      const double dy = samples[i].y - samples[i - 1].y;
      const double d = std::hypot(dx, dy);
      if (d >= params.min_displacement_mm) {
        hx = dx / d;
        hy = dy / d;
        have = true;
      }
    }
    o.valid = have;
    o.dx = hx;
    o.dy = hy;
    out.push_back(o);
  }
  return out;
}

std::vector<Event> screen_alignment(const std::vector<OrientationSample>& orientations,
                                    const std::vector<PositionSample>& positions,
                                    const ClassLayout& layout,
                                    const AlignmentParams& params) {
  params.validate();
  if (orientations.size() != positions.size())
    throw DataError("screen_alignment: orientation/position sample counts differ");
  std::vector<Event> events;
  for (std::size_t i = 0; i < orientations.size(); ++i) {
    const auto& o = orientations[i];
    if (!o.valid) continue;
    const Point teacher{positions[i].x, positions[i].y};
    for (const auto& s : layout.students) {
      const double vx = s.screen.x - teacher.x;
      const double vy = s.screen.y - teacher.y;
      const double d = std::hypot(vx, vy);
      if (d == 0.0) continue;  // teacher standing on the screen point: direction undefined
      if (params.max_range_mm && d > *params.max_range_mm) continue;
      const double cos = (o.dx * vx + o.dy * vy) / d;
      // inclusive boundary: an exactly-on-cone screen must count, so leave
      // room for the rounding in the cosine computation itself
      if (cos >= params.cos_threshold - 1e-9) {
        Event e;
        e.timestamp = o.timestamp;
        e.source = EventSource::SPATIAL;
        e.student = s.id;
        e.codes.insert(Code(Code::SCREEN_ALIGNMENT));
        events.push_back(std::move(e));
      }
    }
  }
  return events;
}

std::vector<Visit> detect_visits(const std::vector<PositionSample>& positions,
                                 const ClassLayout& layout, const VisitParams& params) {
  params.validate();
  const Millis min_dur = static_cast<Millis>(params.min_duration_s * 1000.0);
  std::vector<Visit> visits;
  std::size_t i = 0;
  while (i < positions.size()) {
    // grow [i, j] while every sample stays within radius of the running centroid
    double sx = positions[i].x, sy = positions[i].y;
    std::size_t j = i;
    double max_r = 0.0;
    while (j + 1 < positions.size()) {
      const std::size_t n = j - i + 2;
      const double cx = (sx + positions[j + 1].x) / static_cast<double>(n);
      const double cy = (sy + positions[j + 1].y) / static_cast<double>(n);
      double worst = 0.0;
      for (std::size_t k = i; k <= j + 1; ++k)
        worst = std::max(worst, dist({positions[k].x, positions[k].y}, {cx, cy}));
      if (worst > params.radius_mm) break;
      sx += positions[j + 1].x;
      sy += positions[j + 1].y;
      ++j;
      max_r = worst;
    }
    (void)max_r;
    const Millis duration = positions[j].timestamp - positions[i].timestamp;
    const Point centroid{sx / static_cast<double>(j - i + 1), sy / static_cast<double>(j - i + 1)};
    if (duration >= min_dur) {
      const StudentPlacement* best = nullptr;
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto& s : layout.students) {
        const double d = dist(centroid, s.seat);
        if (d < best_d || (d == best_d && best && s.id < best->id)) {
          best = &s;
          best_d = d;
        }
      }
      if (best && best_d <= params.radius_mm) {
        visits.push_back({best->id, positions[i].timestamp, positions[j].timestamp, centroid});
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
  return visits;
}

std::map<StudentId, Millis> first_visit_times(const std::vector<Visit>& visits) {
  std::map<StudentId, Millis> out;
  for (const auto& v : visits) {
    auto it = out.find(v.student);
    if (it == out.end() || v.start < it->second) out[v.student] = v.start;
  }
  return out;
}

std::string visits_to_csv(const std::vector<Visit>& visits) {
  std::ostringstream os;
  os << "student_id,start_ms,end_ms\n";
  for (const auto& v : visits) os << v.student << ',' << v.start << ',' << v.end << '\n';
  return os.str();
}

}  // namespace transona
