#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "transona/error.hpp"
#include "transona/render.hpp"

using namespace transona;

namespace {

NodeLayout three_nodes() {
  NodeLayout l;
  l.universe = {Code(Code::TALKING), Code(Code::HINT_REQUEST), Code(Code::IDLING)};
  l.x = {-1.0, 1.0, 0.0};
  l.y = {0.0, 0.0, 1.0};
  return l;
}

GroupNetwork simple_network() {
  GroupNetwork n;
  n.universe = three_nodes().universe;
  n.group = "LOW";
  n.unit_count = 4;
  // row-major TALKING, HINT_REQUEST, IDLING
  n.mean_weights = {0.5, 2.0, 0.01,   // T->T, T->H, T->I
                    0.4, 0.0, 1.0,    // H->T, H->H, H->I
                    0.0, 0.0, 0.2};   // I->T, I->H, I->I
  n.response_strength = {0.4, 2.0, 1.01};
  n.self_strength = {0.5, 0.0, 0.2};
  return n;
}

}  // namespace

TEST_CASE("render is byte deterministic") {
  auto layout = three_nodes();
  auto net = simple_network();
  RenderStyle style;
  CHECK(render_network(layout, net, style) == render_network(layout, net, style));

  SubtractedNetwork sub;
  sub.universe = net.universe;
  sub.group_a = "LOW";
  sub.group_b = "HIGH";
  sub.diff_weights = {0.1, 0.5, -0.3, 0.0, -0.1, 0.2, 0.0, 0.0, 0.0};
  CHECK(render_subtracted(layout, sub, style) == render_subtracted(layout, sub, style));
  CHECK(export_dot(layout, net, style) == export_dot(layout, net, style));
}

TEST_CASE("network svg structure: nodes labelled, weak edges thresholded") {
  auto svg = render_network(three_nodes(), simple_network(), RenderStyle{});
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("data-code=\"TALKING\"") != std::string::npos);
  CHECK(svg.find("data-code=\"HINT_REQUEST\"") != std::string::npos);
  CHECK(svg.find("data-code=\"IDLING\"") != std::string::npos);
  // T<->H pair carries weight 2.0, drawn; the 0.01 T->I edge sits below the
  // 5% threshold of the max edge (0.1) and must disappear, but H->I survives
  CHECK(svg.find("data-pair=\"TALKING|HINT_REQUEST\"") != std::string::npos);
  CHECK(svg.find("data-pair=\"TALKING|IDLING\"") == std::string::npos);
  CHECK(svg.find("data-pair=\"HINT_REQUEST|IDLING\"") != std::string::npos);
  CHECK(svg.find("class=\"arrow\"") != std::string::npos);
}

TEST_CASE("raising the edge threshold removes more edges") {
  RenderStyle strict;
  strict.edge_threshold_frac = 0.9;  // only edges >= 90% of max survive
  auto svg = render_network(three_nodes(), simple_network(), strict);
  CHECK(svg.find("data-pair=\"TALKING|HINT_REQUEST\"") != std::string::npos);
  CHECK(svg.find("data-pair=\"HINT_REQUEST|IDLING\"") == std::string::npos);
}

TEST_CASE("subtracted svg: both group colors appear with a legend") {
  auto layout = three_nodes();
  SubtractedNetwork sub;
  sub.universe = layout.universe;
  sub.group_a = "LOW";
  sub.group_b = "HIGH";
  sub.diff_weights = {0.0, 0.5, 0.0, -0.4, 0.0, 0.0, 0.0, 0.0, 0.0};
  RenderStyle style;
  auto svg = render_subtracted(layout, sub, style);
  CHECK(svg.find(">LOW</text>") != std::string::npos);
  CHECK(svg.find(">HIGH</text>") != std::string::npos);
  CHECK(svg.find(style.color_positive) != std::string::npos);  // LOW-dominant edge
  CHECK(svg.find(style.color_negative) != std::string::npos);  // HIGH-dominant edge
  CHECK(svg.find("data-pair=\"TALKING|HINT_REQUEST\"") != std::string::npos);
}

TEST_CASE("dot export lists positioned nodes and thresholded directed edges") {
  auto dot = export_dot(three_nodes(), simple_network(), RenderStyle{});
  CHECK(dot.rfind("digraph ona {", 0) == 0);
  CHECK(dot.find("\"TALKING\" [pos=\"-1.000000,0.000000!\"") != std::string::npos);
  CHECK(dot.find("\"TALKING\" -> \"HINT_REQUEST\" [weight=\"2.000000\"]") !=
        std::string::npos);
  CHECK(dot.find("\"TALKING\" -> \"IDLING\"") == std::string::npos);  // below threshold
  CHECK(dot.find("\"IDLING\" -> \"TALKING\"") == std::string::npos);  // zero weight
}

TEST_CASE("render errors: missing code and bad style") {
  NodeLayout partial;
  partial.universe = {Code(Code::TALKING)};
  partial.x = {0.0};
  partial.y = {0.0};
  CHECK_THROWS_AS(render_network(partial, simple_network(), RenderStyle{}), DataError);

  RenderStyle bad;
  bad.edge_threshold_frac = 1.5;
  CHECK_THROWS_AS(render_network(three_nodes(), simple_network(), bad), ConfigError);
  bad = RenderStyle{};
  bad.canvas_w = 0;
  CHECK_THROWS_AS(export_dot(three_nodes(), simple_network(), bad), ConfigError);
}
