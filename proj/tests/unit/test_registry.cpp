#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "squidget/document.hpp"
#include "squidget/error.hpp"

using namespace squidget;
using namespace squidget::testing;

namespace {

AttributePath P(std::string_view s) { return AttributePath::parse(s); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kParse;
}

/// One ellipse, one canvas bookmarking it, and three vertical discrete
/// squidgets at x = 20, 50, 80 taken with tx = 0, 10, 20.
struct Bars {
  Document doc;
  std::string canvas;
  std::vector<std::string> bars;

  Bars() {
    doc.scene.add_object(ellipse("e", 5, 3));
    canvas = create_canvas(doc, {{0, 0}, {100, 100}}, {"e"}).id;
    for (int k = 0; k < 3; ++k) {
      doc.set_attr(P("e/transform/tx"), 10.0 * k);
      const double x = 20 + 30 * k;
      bars.push_back(create_discrete(doc, line({x, 20}, {x, 80}, 8), canvas).id);
    }
  }
};

DiscreteSquidget raw_discrete(std::string id, std::string canvas, double x, AttributeSnapshot snapshot) {
  return {std::move(id), line({x, 0}, {x, 10}, 30), std::move(canvas), std::move(snapshot)};
}

}  // namespace

TEST_CASE("canvas creation") {
  Document doc;
  doc.scene.add_object(ellipse("e", 1, 1));
  SceneObject g;
  g.id = "g";
  g.kind = ObjectKind::kGroup;
  doc.scene.add_object(g);
  SceneObject kid = ellipse("kid", 1, 1);
  kid.parent = "g";
  doc.scene.add_object(kid);

  const Canvas& one = create_canvas(doc, {{0, 0}, {10, 10}}, {"e"});
  CHECK(one.attributes.size() == 6);
  const Canvas& grp = create_canvas(doc, {{5, 5}, {15, 15}}, {"g"});
  CHECK(grp.attributes.size() == 10);
  CHECK(std::find(grp.attributes.begin(), grp.attributes.end(), P("kid/shape/radius-x")) != grp.attributes.end());
  CHECK(create_canvas(doc, {{1, 1}, {2, 2}}, {}).attributes.empty());
  CHECK(kind_of([&] { create_canvas(doc, {{0, 0}, {0, 5}}, {"e"}); }) == ErrorKind::kInvalidArgument);

  // Overlap: the later canvas sits on top.
  const Polyline inside_both{{6, 6}, {8, 8}};
  CHECK(*doc.registry.topmost_canvas_containing(inside_both) == doc.registry.canvases().at("canvas2").id);
  CHECK(*doc.registry.topmost_canvas_containing({{1, 1}, {2, 3}}) == "canvas1");
  CHECK(!doc.registry.topmost_canvas_containing({{-1, 1}, {2, 3}}));
}

TEST_CASE("discrete creation") {
  Bars b;
  const auto& d0 = b.doc.registry.discrete_squidget(b.bars[0]);
  const auto& d1 = b.doc.registry.discrete_squidget(b.bars[1]);
  CHECK(d0.curve.size() == 30);
  CHECK(d0.snapshot.at(P("e/transform/tx")) == 0.0);
  CHECK(d1.snapshot.at(P("e/transform/tx")) == 10.0);
  CHECK(d0.snapshot.size() == 6);
  CHECK(d0.curve.front() == Point2(20, 20));
  CHECK(d0.curve.back() == Point2(20, 80));

  CHECK(kind_of([&] { create_discrete(b.doc, line({50, 50}, {150, 50}), b.canvas); }) == ErrorKind::kOutsideCanvas);
  CHECK(kind_of([&] { create_discrete(b.doc, {{50, 50}, {50, 50}}, b.canvas); }) == ErrorKind::kDegenerateCurve);
}

TEST_CASE("continuous creation orders members along the stroke") {
  Bars b;
  const auto& forward = create_continuous(b.doc, line({10, 50}, {90, 50}));
  CHECK(forward.members == b.bars);
  CHECK(forward.path.size() == 3);
  CHECK(forward.path[1].isApprox(Point2(50, 50)));

  Bars c;
  const auto& backward = create_continuous(c.doc, line({90, 40}, {10, 40}));
  CHECK(backward.members == std::vector<std::string>{c.bars[2], c.bars[1], c.bars[0]});

  Bars d;
  CHECK(kind_of([&] { create_continuous(d.doc, line({10, 50}, {30, 50})); }) == ErrorKind::kNotAConnectGesture);
  // Zigzag over bar 0 crosses it twice.
  CHECK(kind_of([&] { create_continuous(d.doc, {{10, 30}, {30, 30}, {10, 40}, {90, 40}}); }) ==
        ErrorKind::kNotAConnectGesture);
}

TEST_CASE("interpolation") {
  Bars b;
  const auto& cs = create_continuous(b.doc, line({10, 50}, {90, 50}));
  const auto& reg = b.doc.registry;
  const auto& m0 = reg.discrete_squidget(cs.members[0]);
  const auto& m1 = reg.discrete_squidget(cs.members[1]);
  const auto& m2 = reg.discrete_squidget(cs.members[2]);

  CHECK(interpolate(reg, cs, 0.0).curve == m0.curve);
  CHECK(interpolate(reg, cs, 0.0).snapshot == m0.snapshot);
  CHECK(interpolate(reg, cs, 1.0).curve == m2.curve);
  CHECK(interpolate(reg, cs, 1.0).snapshot == m2.snapshot);
  // 0.5 * (3 - 1) lands on member 1.
  CHECK(interpolate(reg, cs, 0.5).curve == m1.curve);
  CHECK(interpolate(reg, cs, 0.5).snapshot == m1.snapshot);
  CHECK(interpolate(reg, cs, -3.0).curve == m0.curve);
  CHECK(interpolate(reg, cs, 7.0).curve == m2.curve);

  const auto quarter = interpolate(reg, cs, 0.25);
  for (std::size_t i = 0; i < 30; ++i) CHECK(quarter.curve[i].isApprox(0.5 * (m0.curve[i] + m1.curve[i])));
  CHECK(quarter.snapshot.at(P("e/transform/tx")) == doctest::Approx(5.0));

  // Lipschitz in w with constant max pair distance * (m - 1).
  double lip = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    lip = std::max({lip, (m1.curve[i] - m0.curve[i]).norm(), (m2.curve[i] - m1.curve[i]).norm()});
  }
  lip *= 2.0;
  for (double w = 0.0; w < 1.0; w += 0.013) {
    const auto a = interpolate(reg, cs, w);
    const auto c = interpolate(reg, cs, w + 1e-4);
    for (std::size_t i = 0; i < 30; ++i) CHECK((a.curve[i] - c.curve[i]).norm() <= lip * 1e-4 * (1 + 1e-9));
  }
}

TEST_CASE("one-sided attributes hold their value") {
  Document doc;
  Registry& r = doc.registry;
  r.add_canvas({"k", {{0, 0}, {10, 10}}, {}, 0});
  r.add_discrete(raw_discrete("a", "k", 1, {{P("o/transform/tx"), 1.0}, {P("o/transform/ty"), 7.0}}));
  r.add_discrete(raw_discrete("b", "k", 2, {{P("o/transform/tx"), 3.0}}));
  ContinuousSquidget cs{"c", {"a", "b"}, {{1, 5}, {2, 5}}, 0.0};
  r.add_continuous(cs);
  for (double w : {0.0, 0.3, 0.9, 0.999}) {
    const auto s = interpolate(r, cs, w).snapshot;
    CHECK(s.at(P("o/transform/ty")) == 7.0);
  }
  CHECK(interpolate(r, cs, 1.0).snapshot.size() == 1);
  CHECK(interpolate(r, cs, 0.5).snapshot.at(P("o/transform/tx")) == 2.0);
}

TEST_CASE("cross-out deletion") {
  Bars b;
  const auto& cs = create_continuous(b.doc, line({10, 50}, {90, 50}));
  const std::string cid = cs.id;

  // Crossing bar 2 once removes nothing.
  CHECK(delete_by_crossout(b.doc, line({70, 30}, {90, 30})).empty());

  // A zigzag over the path near member 1's midpoint crosses the path twice.
  const auto removed = delete_by_crossout(b.doc, {{45, 45}, {46, 55}, {47, 45}, {48, 55}});
  CHECK(removed == std::vector<std::string>{cid});
  CHECK(b.doc.registry.discrete().size() == 3);

  const auto gone = delete_by_crossout(b.doc, {{15, 70}, {25, 72}, {15, 74}});
  CHECK(gone == std::vector<std::string>{b.bars[0]});

  // Idempotent.
  CHECK(b.doc.registry.remove(b.bars[0]).empty());

  // Crossing the canvas boundary twice takes its squidgets along.
  const auto all = delete_by_crossout(b.doc, {{-5, 10}, {5, 10}, {5, 20}, {-5, 20}});
  CHECK(all.size() == 3);
  CHECK(b.doc.registry.discrete().empty());
  CHECK(b.doc.registry.canvases().empty());
}

TEST_CASE("member deletion removes the continuous squidget") {
  Bars b;
  const std::string cid = create_continuous(b.doc, line({10, 50}, {90, 50})).id;
  const auto removed = b.doc.registry.remove(b.bars[1]);
  CHECK(removed == std::vector<std::string>{b.bars[1], cid});
}

TEST_CASE("gesture precedence") {
  Bars b;
  CHECK(classify_create_stroke(b.doc, {{10, 30}, {30, 32}, {10, 34}}) == CreateGesture::kCrossOut);
  CHECK(classify_create_stroke(b.doc, line({10, 50}, {60, 50})) == CreateGesture::kConnect);
  CHECK(classify_create_stroke(b.doc, line({10, 50}, {30, 50})) == CreateGesture::kDiscrete);
  CHECK(classify_create_stroke(b.doc, line({60, 50}, {70, 60})) == CreateGesture::kDiscrete);
  // Double crossing wins over single crossings elsewhere.
  CHECK(classify_create_stroke(b.doc, {{10, 30}, {30, 32}, {10, 34}, {90, 40}}) == CreateGesture::kCrossOut);
}

TEST_CASE("weight cycles are rejected") {
  Registry r;
  r.add_canvas({"k", {{0, 0}, {10, 10}}, {}, 0});
  r.add_discrete(raw_discrete("p0", "k", 1, {{weight_path("q"), 0.0}}));
  r.add_discrete(raw_discrete("p1", "k", 2, {{weight_path("q"), 1.0}}));
  r.add_discrete(raw_discrete("q0", "k", 3, {{weight_path("p"), 0.0}}));
  r.add_discrete(raw_discrete("q1", "k", 4, {{weight_path("p"), 1.0}}));
  r.add_discrete(raw_discrete("s0", "k", 5, {{weight_path("s"), 0.0}}));
  r.add_discrete(raw_discrete("s1", "k", 6, {{weight_path("s"), 1.0}}));

  r.add_continuous({"p", {"p0", "p1"}, {{1, 5}, {2, 5}}, 0.0});
  CHECK(kind_of([&] { r.add_continuous({"q", {"q0", "q1"}, {{3, 5}, {4, 5}}, 0.0}); }) == ErrorKind::kCycle);
  CHECK(kind_of([&] { r.add_continuous({"s", {"s0", "s1"}, {{5, 5}, {6, 5}}, 0.0}); }) == ErrorKind::kCycle);
  CHECK(r.continuous().size() == 1);
  CHECK(r.validate().empty());
}

TEST_CASE("ids are unique across collections") {
  Bars b;
  std::set<std::string> ids;
  for (const auto& [id, c] : b.doc.registry.canvases()) ids.insert(id);
  for (const auto& [id, d] : b.doc.registry.discrete()) ids.insert(id);
  CHECK(ids.size() == 4);
  CHECK(kind_of([&] { b.doc.registry.add_canvas({b.bars[0], {{0, 0}, {1, 1}}, {}, 0}); }) == ErrorKind::kDuplicateId);
}

TEST_CASE("implicit squidgets") {
  Document doc;
  doc.scene.add_object(ellipse("ring", 20, 20, 50, 50));
  CHECK(implicit_squidgets(doc).size() == 1);
  doc.scene.add_object(polygon("sq", {{-10, -10}, {10, -10}, {10, 10}, {-10, 10}}, 200, 50));
  const auto segs = implicit_squidgets_of(doc, "sq");
  REQUIRE(segs.size() == 4);
  for (const auto& s : segs) {
    CHECK(s.segment.size() == 30);
    CHECK(s.object == "sq");
    CHECK(std::find(s.bound.begin(), s.bound.end(), P("sq/transform/tx")) != s.bound.end());
  }
  CHECK(segs[0].id == "sq#0.0");

  const Polyline before = segs[0].segment;
  doc.set_attr(P("sq/transform/tx"), 230.0);
  const auto after = find_implicit(doc, "sq#0.0");
  REQUIRE(after);
  for (std::size_t i = 0; i < 30; ++i) CHECK((after->segment[i] - before[i] - Point2(30, 0)).norm() < 1e-9);
  CHECK(!find_implicit(doc, "sq#0.9"));
}
