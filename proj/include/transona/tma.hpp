#pragma once

#include <map>
#include <vector>

#include "transona/events.hpp"
#include "transona/ingest.hpp"

namespace transona {

// Per-modality boxcar temporal influence windows, in seconds.
struct TifConfig {
  double tutor_log_s = 5.0;
  double detector_s = 10.0;
  double observation_s = 15.0;
  double spatial_s = 20.0;
  // Count every qualifying prior occurrence (default) or at most one
  // connection per (prior code, response event).
  bool binary = false;

  double window_s(EventSource s) const;
  Millis window_ms(EventSource s) const;
  void validate() const;
};

struct UnitContext {
  UnitKey key;
  std::vector<Event> events;  // time-ordered, horizon-filtered
};

struct AdjacencyVector {
  std::vector<Code> universe;    // ordered list of C codes
  std::vector<double> weights;   // row-major C x C, w(a->b) at [a*C+b]
  std::size_t event_count = 0;

  double& at(std::size_t a, std::size_t b) { return weights[a * universe.size() + b]; }
  double at(std::size_t a, std::size_t b) const { return weights[a * universe.size() + b]; }
};

enum class UnitMode { WHOLE, SPLIT_BY_FIRST_VISIT };

// Horizon-filtered per-unit contexts. A student sees their own TUTOR_LOG,
// DETECTOR and RAISING_HAND events, SCREEN_ALIGNMENT events targeting them,
// and all TALKING events of their class period (public). In SPLIT mode a
// visited student's unit splits at first visit start (boundary event goes to
// POST); never-visited students keep a single PRE_VISIT unit.
std::map<UnitKey, UnitContext> build_units(const std::vector<Event>& merged,
                                           const std::map<StudentId, Millis>& first_visits,
                                           UnitMode mode);

// Directed code-pair accumulation: for every ordered pair (prior, response)
// with 0 < t_resp - t_prior <= window(source(prior)), each (a in prior,
// b in response) increments w(a->b). Same-timestamp pairs never connect.
AdjacencyVector accumulate(const UnitContext& context, const TifConfig& tif,
                           const std::vector<Code>& universe);

// Adjacency CSV: unit,phase,group then C^2 weight columns "a->b".
std::string adjacency_to_csv(const std::vector<std::pair<UnitKey, AdjacencyVector>>& rows,
                             const std::map<StudentId, std::string>& group_labels);

}  // namespace transona
