#pragma once

#include <string>

#include "transona/ona.hpp"

namespace transona {

struct RenderStyle {
  double canvas_w = 800.0;
  double canvas_h = 600.0;
  double edge_width_scale = 12.0;   // width per unit weight
  double node_radius_scale = 40.0;  // radius per unit strength
  double min_radius = 4.0;
  double edge_threshold_frac = 0.05;  // of the network's max weight
  std::string color_positive = "#c0392b";
  std::string color_negative = "#2471a3";
  double font_size = 11.0;

  void validate() const;
};

// Group mean network figure: per code an outer response-strength ring and an
// inner self-transition disc; per code pair triangle edges with an arrow mark
// on the dominant direction. Deterministic output bytes.
std::string render_network(const NodeLayout& layout, const GroupNetwork& network,
                           const RenderStyle& style);

// Subtracted network: edge color picks the dominating group, width and
// saturation scale with |difference|.
std::string render_subtracted(const NodeLayout& layout, const SubtractedNetwork& subtracted,
                              const RenderStyle& style);

std::string export_dot(const NodeLayout& layout, const GroupNetwork& network,
                       const RenderStyle& style);

}  // namespace transona
