#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "epc/embedding.hpp"
#include "epc/errors.hpp"
#include "epc/layout.hpp"

namespace epc {
namespace {

Layout make_layout(LayoutMode mode, std::size_t dims, std::vector<double> weights = {},
                   EllipseSpec shape = EllipseSpec::unit_circle()) {
  LayoutConfig cfg;
  cfg.mode = mode;
  cfg.dims = dims;
  cfg.weights = std::move(weights);
  return Layout(cfg, shape);
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

double max_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

TEST(Anchor, SequentialUnitCircle) {
  const auto layout = make_layout(LayoutMode::kSequential, 4);
  const auto a0 = layout.anchor(0.0, 0);
  EXPECT_NEAR(a0.point.x, 0.0, 1e-15);
  EXPECT_NEAR(a0.point.y, 1.0, 1e-15);
  const auto a1 = layout.anchor(1.0, 0);
  EXPECT_NEAR(a1.arc_position, 0.25, 1e-15);
  EXPECT_NEAR(a1.point.x, 1.0, 1e-15);
  EXPECT_NEAR(a1.point.y, 0.0, 1e-15);
}

TEST(Anchor, RejectsOutOfRange) {
  const auto layout = make_layout(LayoutMode::kSequential, 4);
  EXPECT_THROW(layout.anchor(-0.01, 0), DomainError);
  EXPECT_THROW(layout.anchor(1.01, 0), DomainError);
  EXPECT_THROW(layout.anchor(std::nan(""), 0), DomainError);
}

TEST(Anchor, DynamicPositionsAccumulateAndWrap) {
  const auto layout = make_layout(LayoutMode::kDynamic, 4);
  const double values[] = {0.3, 0.4, 0.2, 0.6};
  const double expected[] = {0.3, 0.7, 0.9, 0.5};
  double prev = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto a = layout.anchor(values[i], i, prev);
    EXPECT_NEAR(a.arc_position, expected[i], 1e-12);
    prev = a.arc_position;
  }
}

TEST(Anchor, WeightedSectorFraction) {
  LayoutConfig cfg;
  cfg.weights = {4, 2, 6, 5};
  const auto a = anchor_value(0.3, 0, cfg, EllipseSpec::unit_circle());
  EXPECT_NEAR(a.arc_position, 0.3 * 4 / 17, 1e-15);
  EXPECT_NEAR(a.arc_position, 0.0706, 1e-4);
  // Sectors of X3 and X4 straddle both bisectors, so no static layout exists.
  EXPECT_THROW(Layout(cfg, EllipseSpec::unit_circle()), ConfigurationError);
}

TEST(Layout, RejectsBadConfigurations) {
  EXPECT_THROW(make_layout(LayoutMode::kSequential, 5), ConfigurationError);
  EXPECT_THROW(make_layout(LayoutMode::kSequential, 0), ConfigurationError);
  EXPECT_THROW(make_layout(LayoutMode::kSequential, 4, {1, 2, 3}), ConfigurationError);
  EXPECT_THROW(make_layout(LayoutMode::kSequential, 4, {1, 0, 1, 1}), ConfigurationError);
  EXPECT_THROW(make_layout(LayoutMode::kMirror, 4, {1, 2, 3, 4}), ConfigurationError);
  EXPECT_NO_THROW(make_layout(LayoutMode::kMirror, 4, {1, 2, 1, 2}));
}

TEST(Layout, DefaultGuides) {
  const auto six = make_layout(LayoutMode::kSequential, 6);
  EXPECT_EQ(six.pair_guide(0), Guide::kRightOfM);
  EXPECT_EQ(six.pair_guide(1), Guide::kBelowN);
  EXPECT_EQ(six.pair_guide(2), Guide::kLeftOfM);
  const auto four = make_layout(LayoutMode::kMirror, 4);
  EXPECT_EQ(four.pair_guide(0), Guide::kRightOfM);
  EXPECT_EQ(four.pair_guide(1), Guide::kLeftOfM);
}

TEST(Layout, FingerprintTracksWeights) {
  const auto a = make_layout(LayoutMode::kSequential, 4);
  const auto b = make_layout(LayoutMode::kSequential, 4, {1, 2, 2, 1});
  EXPECT_EQ(a.fingerprint(), make_layout(LayoutMode::kSequential, 4).fingerprint());
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Embed, FourDimensionalPointHasOneEdge) {
  const auto layout = make_layout(LayoutMode::kSequential, 4);
  const std::vector<double> x{0.3, 0.5, 0.5, 0.2};
  const auto g = embed(x, layout);
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_LT(max_error(invert(g, layout), x), 1e-9);
}

TEST(Embed, TwoDimensionalPointHasNoEdge) {
  const auto layout = make_layout(LayoutMode::kSequential, 2);
  const std::vector<double> x{0.4, 0.9};
  const auto g = embed(x, layout);
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_LT(max_error(invert(g, layout), x), 1e-9);
}

TEST(Embed, WrongDimensionIsRejected) {
  const auto layout = make_layout(LayoutMode::kSequential, 4);
  const std::vector<double> x{0.3, 0.5};
  EXPECT_THROW(embed(x, layout), DomainError);
}

TEST(Embed, MirrorComplementaryPointsLieOnHorizontalAxis) {
  const EllipseSpec shape(2, -1, 5, 3);
  const auto layout = make_layout(LayoutMode::kMirror, 4, {}, shape);
  for (int i = 1; i <= 9; ++i) {
    const double a = i / 10.0;
    const std::vector<double> x{a, 1 - a, a, 1 - a};
    const auto g = embed(x, layout);
    EXPECT_NEAR(g.nodes[0].y, shape.cy(), 1e-9) << a;
    EXPECT_NEAR(g.nodes[1].y, shape.cy(), 1e-9) << a;
    EXPECT_NEAR(g.nodes[0].x + g.nodes[1].x, 2 * shape.cx(), 1e-9) << a;
  }
}

TEST(Embed, RowErrorsCarryRowIndex) {
  const auto layout = make_layout(LayoutMode::kSequential, 4);
  const std::vector<std::vector<double>> rows{{0.1, 0.2, 0.3, 0.4}, {0.1, 2.0, 0.3, 0.4}};
  try {
    embed_rows(rows, {}, layout);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

struct RoundTripCase {
  LayoutMode mode;
  std::size_t dims;
};

class RoundTrip : public ::testing::TestWithParam<RoundTripCase> {};

TEST_P(RoundTrip, RandomPointsInvertExactly) {
  const auto [mode, dims] = GetParam();
  std::mt19937_64 rng(1000 + dims);
  for (const EllipseSpec& shape : {EllipseSpec::unit_circle(), EllipseSpec(3, -2, 8, 3)}) {
    const auto layout = make_layout(mode, dims, {}, shape);
    double worst = 0;
    for (int i = 0; i < 300; ++i) {
      const auto x = random_point(rng, dims);
      worst = std::max(worst, max_error(invert(embed(x, layout), layout), x));
    }
    EXPECT_LT(worst, 1e-7);
  }
}

TEST_P(RoundTrip, SectorEndpointsInvert) {
  const auto [mode, dims] = GetParam();
  const auto layout = make_layout(mode, dims);
  for (double v : {0.0, 1e-9, 0.5, 1 - 1e-9, 1.0}) {
    for (std::size_t i = 0; i < dims; ++i) {
      std::vector<double> x(dims, 0.37);
      x[i] = v;
      if (mode == LayoutMode::kDynamic && v == 1.0) continue;
      EXPECT_LT(max_error(invert(embed(x, layout), layout), x), 1e-7) << i << " " << v;
    }
  }
}

// Grid values put anchors on shared sector boundaries, where the two side
// ellipses of a pair can coincide.
TEST_P(RoundTrip, GridValuesInvert) {
  const auto [mode, dims] = GetParam();
  const auto layout = make_layout(mode, dims);
  for (std::size_t k = 0; k < dims / 2; ++k) {
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        if (mode == LayoutMode::kDynamic && (i == 10 || j == 10)) continue;
        std::vector<double> x(dims, 0.37);
        x[2 * k] = i / 10.0;
        x[2 * k + 1] = j / 10.0;
        const auto g = embed(x, layout);
        const auto back = invert(g, layout);
        const auto sides = side_ellipses(x, layout);
        const bool tangent = !layout.is_dynamic() &&
                             std::abs(std::abs(sides[2 * k].offset - sides[2 * k + 1].offset) - 2.0) < 1e-9;
        if (tangent && max_error(back, x) > 1e-7) {
          // Tangent side ellipses: the decoded pair may be the one with the
          // two centers exchanged, which has the same node.
          const auto other = side_ellipses(back, layout);
          EXPECT_NEAR(other[2 * k].offset, sides[2 * k + 1].offset, 1e-6);
          EXPECT_NEAR(other[2 * k + 1].offset, sides[2 * k].offset, 1e-6);
        } else {
          EXPECT_LT(max_error(back, x), 1e-7) << "pair " << k << " (" << i << ", " << j << ")";
        }
      }
    }
  }
}

TEST(Embed, CoincidentSideEllipsesMeetAtTangency) {
  // X1 = 1 and X2 = 0 share an anchor at the boundary of their sectors.
  const auto layout = make_layout(LayoutMode::kSequential, 10);
  std::vector<double> x(10, 0.0);
  x[0] = 1.0;
  const auto sides = side_ellipses(x, layout);
  const auto g = embed(x, layout);
  if (sides[0].offset == sides[1].offset) {
    EXPECT_NEAR(g.nodes[0].x, 0.0, 1e-12);  // on M
  }
  EXPECT_LT(max_error(invert(g, layout), x), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Layouts, RoundTrip,
                         ::testing::Values(RoundTripCase{LayoutMode::kSequential, 2},
                                           RoundTripCase{LayoutMode::kSequential, 4},
                                           RoundTripCase{LayoutMode::kSequential, 6},
                                           RoundTripCase{LayoutMode::kSequential, 8},
                                           RoundTripCase{LayoutMode::kSequential, 10},
                                           RoundTripCase{LayoutMode::kMirror, 4},
                                           RoundTripCase{LayoutMode::kMirror, 6},
                                           RoundTripCase{LayoutMode::kMirror, 8},
                                           RoundTripCase{LayoutMode::kMirror, 10},
                                           RoundTripCase{LayoutMode::kDynamic, 4},
                                           RoundTripCase{LayoutMode::kDynamic, 6}));

TEST(RoundTripWeighted, WeightedSequentialLayout) {
  std::mt19937_64 rng(3);
  const auto layout = make_layout(LayoutMode::kSequential, 4, {1, 2, 2, 1});
  for (int i = 0; i < 200; ++i) {
    const auto x = random_point(rng, 4);
    EXPECT_LT(max_error(invert(embed(x, layout), layout), x), 1e-7);
  }
}

TEST(Embed, DistinctPointsGiveDistinctGraphs) {
  std::mt19937_64 rng(11);
  const auto layout = make_layout(LayoutMode::kMirror, 4);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_point(rng, 4);
    auto y = x;
    y[i % 4] = std::fmod(y[i % 4] + 0.01, 1.0);
    const auto gx = embed(x, layout);
    const auto gy = embed(y, layout);
    const double d = std::max(distance(gx.nodes[0], gy.nodes[0]), distance(gx.nodes[1], gy.nodes[1]));
    EXPECT_GT(d, 1e-6);
  }
}

TEST(HorizontalLine, FamilyStaysOnLine) {
  const EllipseSpec shape(0, 0, 2, 2);
  const auto layout = make_layout(LayoutMode::kMirror, 4, {}, shape);
  const auto pts = points_on_horizontal_line(0.3, 7, layout);
  ASSERT_EQ(pts.size(), 7u);
  for (const auto& p : pts) {
    const auto g = embed(std::vector<double>(p.begin(), p.end()), layout);
    EXPECT_NEAR(g.nodes[0].y, 0.3, 1e-6);
    EXPECT_NEAR(g.nodes[1].y, 0.3, 1e-6);
  }
}

}  // namespace
}  // namespace epc
