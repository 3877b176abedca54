#pragma once

#include <map>
#include <optional>
#include <vector>

#include "transona/events.hpp"
#include "transona/ingest.hpp"

namespace transona {

struct OrientationSample {
  Millis timestamp = 0;
  double dx = 0;  // unit direction when valid
  double dy = 0;
  bool valid = false;
};

struct AlignmentParams {
  double cos_threshold = 0.7071067811865476;  // cos 45 deg, inclusive
  double min_displacement_mm = 50.0;
  std::optional<double> max_range_mm;  // unset = unlimited

  void validate() const;
};

struct Visit {
  StudentId student = 0;
  Millis start = 0;
  Millis end = 0;
  Point centroid;
};

struct VisitParams {
  double radius_mm = 1000.0;
  double min_duration_s = 10.0;

  void validate() const;
};

// Movement-derived heading: normalize(p_t - p_{t-1}) when the displacement is
// at least min_displacement_mm; otherwise the previous valid heading is held.
std::vector<OrientationSample> infer_orientation(const std::vector<PositionSample>& samples,
                                                 const AlignmentParams& params);

// One SPATIAL-source SCREEN_ALIGNMENT event per (valid sample, student) where
// the heading lies within the threshold cone of teacher->screen.
std::vector<Event> screen_alignment(const std::vector<OrientationSample>& orientations,
                                    const std::vector<PositionSample>& positions,
                                    const ClassLayout& layout,
                                    const AlignmentParams& params);

// Stop detection over the teacher trace: maximal intervals whose samples stay
// within radius_mm of the running centroid, lasting >= min_duration_s, with
// the centroid within radius_mm of some seat. Ties go to the lower student id.
std::vector<Visit> detect_visits(const std::vector<PositionSample>& positions,
                                 const ClassLayout& layout, const VisitParams& params);

std::map<StudentId, Millis> first_visit_times(const std::vector<Visit>& visits);

std::string visits_to_csv(const std::vector<Visit>& visits);

}  // namespace transona
