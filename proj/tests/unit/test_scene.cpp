#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "squidget/error.hpp"
#include "squidget/scene.hpp"

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

Scene sample_scene() {
  Scene s;
  SceneObject g;
  g.id = "group";
  g.kind = ObjectKind::kGroup;
  g.transform.tx = 2.0;
  s.add_object(g);
  SceneObject a = ellipse("a", 1.0, 1.0);
  a.parent = "group";
  s.add_object(a);
  SceneObject b = polygon("b", {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  b.parent = "group";
  s.add_object(b);
  s.add_object(spotlight("lamp", 0.3, 50.0, 100, 100));
  return s;
}

}  // namespace

TEST_CASE("attribute paths") {
  CHECK(P("lamp/shape/cone-angle").segments().size() == 3);
  CHECK(P("a/transform/tx").str() == "a/transform/tx");
  CHECK(kind_of([] { P(""); }) == ErrorKind::kUnknownAttribute);
  CHECK(kind_of([] { P("a//tx"); }) == ErrorKind::kUnknownAttribute);
}

TEST_CASE("get and set") {
  Scene s = sample_scene();
  const AttributeChange c = s.set_attr(P("a/transform/tx"), 5.0);
  CHECK(s.get_attr(P("a/transform/tx")) == 5.0);
  CHECK(c.old_value == 0.0);
  CHECK(c.new_value == 5.0);

  CHECK(kind_of([&] { s.set_attr(P("a/transform/scale"), -1.0); }) == ErrorKind::kRangeViolation);
  CHECK(kind_of([&] { s.set_attr(P("lamp/shape/cone-angle"), 2.0); }) == ErrorKind::kRangeViolation);
  CHECK(kind_of([&] { s.set_attr(P("lamp/shape/cone-angle"), 0.0); }) == ErrorKind::kRangeViolation);
  CHECK(kind_of([&] { s.get_attr(P("nobody/transform/tx")); }) == ErrorKind::kUnknownAttribute);
  CHECK(kind_of([&] { s.get_attr(P("a/shape/height")); }) == ErrorKind::kUnknownAttribute);

  // Replaying the change record backwards restores the old value.
  s.set_attr(c.path, c.old_value);
  CHECK(s.get_attr(P("a/transform/tx")) == 0.0);

  // Angles are stored wrapped.
  s.set_attr(P("a/transform/rotation"), 3 * std::numbers::pi);
  CHECK(s.get_attr(P("a/transform/rotation")) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("undo records compose back to the start exactly") {
  Scene s = sample_scene();
  const Scene start = s;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 1.5);
  const std::vector<AttributePath> paths{P("a/transform/tx"), P("a/shape/radius-x"), P("lamp/shape/cone-angle"),
                                         P("group/transform/scale"), P("b/transform/rotation")};
  std::vector<AttributeChange> log;
  for (int i = 0; i < 200; ++i) log.push_back(s.set_attr(paths[i % paths.size()], u(rng)));
  for (auto it = log.rbegin(); it != log.rend(); ++it) s.set_attr(it->path, it->old_value);
  CHECK(s == start);
}

TEST_CASE("contours") {
  Scene s;
  s.add_object(ellipse("c", 1.0, 1.0));
  const auto ring = s.contour("c");
  REQUIRE(ring.size() == 1);
  CHECK(ring[0].size() == 64);
  CHECK(ring[0].front() == ring[0].back());
  for (const auto& p : ring[0]) CHECK(std::abs(p.norm() - 1.0) < 1e-6);

  SceneObject sq = polygon("sq", {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  sq.transform.rotation = std::numbers::pi / 4;
  s.add_object(sq);
  const auto box = s.contour("sq");
  REQUIRE(box.size() == 1);
  const double r = std::sqrt(2.0);
  const Polyline expected{{0, -r}, {r, 0}, {0, r}, {-r, 0}, {0, -r}};
  REQUIRE(box[0].size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK((box[0][i] - expected[i]).norm() < 1e-12);

  CHECK(kind_of([&] { s.contour("missing"); }) == ErrorKind::kUnknownObject);
}

TEST_CASE("spotlight hot-spot grows with the cone angle") {
  for (double cone : {0.05, 0.1, 0.2, 0.35}) {
    Scene s;
    s.add_object(spotlight("l", cone, 80.0));
    Scene wider = s;
    wider.set_attr(P("l/shape/cone-angle"), 2 * cone);
    const auto major = [](const Polyline& p) {
      double lo = p.front().x(), hi = lo;
      for (const auto& q : p) {
        lo = std::min(lo, q.x());
        hi = std::max(hi, q.x());
      }
      return hi - lo;
    };
    const double a = major(s.contour("l")[0]);
    const double b = major(wider.contour("l")[0]);
    // Every sample sits on the foreshortened circle of radius h tan(angle)
    // centred h below the apex.
    const double reach = 80 * std::tan(cone);
    const Polyline hot = s.contour("l")[0];
    CHECK(hot.front().x() == doctest::Approx(reach).epsilon(1e-12));
    for (const auto& p : hot) {
      const double ex = p.x() / reach, ey = (p.y() + 80) / (kGroundForeshortening * reach);
      CHECK(ex * ex + ey * ey == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(b > a);
  }
  Scene s;
  s.add_object(spotlight("l", 0.4, 80.0));
  CHECK(s.contour("l").size() == 3);
}

TEST_CASE("contours are deterministic and transform-equivariant") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_real_distribution<double> a(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    Scene s;
    SceneObject fig;
    fig.id = "fig";
    fig.kind = ObjectKind::kFigure;
    fig.shape = {{"width", 4.0}, {"limb-0-length", 10.0}, {"limb-0-angle", a(rng)}, {"limb-1-length", 7.0},
                 {"limb-1-angle", a(rng)}};
    s.add_object(fig);
    s.add_object(spotlight("l", 0.3, 30.0, u(rng), u(rng)));
    for (const std::string id : {"fig", "l"}) {
      const auto before = s.contour(id);
      CHECK(before == s.contour(id));

      Scene moved = s;
      const Point2 v(u(rng), u(rng));
      moved.set_attr(P(id + "/transform/tx"), s.get_attr(P(id + "/transform/tx")) + v.x());
      moved.set_attr(P(id + "/transform/ty"), s.get_attr(P(id + "/transform/ty")) + v.y());
      const auto after = moved.contour(id);
      for (std::size_t c = 0; c < before.size(); ++c) {
        for (std::size_t i = 0; i < before[c].size(); ++i) CHECK((after[c][i] - before[c][i] - v).norm() < 1e-9);
      }

      // Rotation about the object pivot (its local origin).
      Scene turned = s;
      const double r = a(rng);
      turned.set_attr(P(id + "/transform/rotation"), r);
      const Point2 pivot(s.get_attr(P(id + "/transform/tx")), s.get_attr(P(id + "/transform/ty")));
      const Similarity2 rot{r, 1.0, Point2::Zero()};
      const auto spun = turned.contour(id);
      for (std::size_t c = 0; c < before.size(); ++c) {
        for (std::size_t i = 0; i < before[c].size(); ++i) {
          CHECK((spun[c][i] - (pivot + rot.apply_linear(before[c][i] - pivot))).norm() < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("collect attributes") {
  const Scene s = sample_scene();
  CHECK(s.collect_attributes({}).empty());

  const auto ell = s.collect_attributes({"a"});
  CHECK(ell.size() == 6);
  for (const auto* p : {"a/transform/tx", "a/transform/ty", "a/transform/rotation", "a/transform/scale",
                        "a/shape/radius-x", "a/shape/radius-y"}) {
    CHECK(ell.contains(P(p)));
  }

  const auto group = s.collect_attributes({"group"});
  // group transform (4) + ellipse (6) + polygon transform (4)
  CHECK(group.size() == 14);
  for (const auto& [path, v] : ell) CHECK(group.contains(path));

  const auto all = s.collect_attributes({"group", "lamp"});
  for (const auto& sub : {std::vector<std::string>{"lamp"}, std::vector<std::string>{"group"}}) {
    for (const auto& [path, v] : s.collect_attributes(sub)) CHECK(all.contains(path));
  }
  CHECK(kind_of([&] { s.collect_attributes({"ghost"}); }) == ErrorKind::kUnknownObject);
}

TEST_CASE("local to screen") {
  Scene s = sample_scene();
  CHECK(s.local_to_screen("lamp").translation == Point2(100, 100));
  CHECK(s.local_to_screen("a").translation == Point2(2, 0));

  Scene plain;
  plain.add_object(ellipse("e", 1, 1));
  CHECK(plain.local_to_screen("e") == Similarity2{});

  s.set_view({0.7, 1.5, Point2(-3, 9)});
  s.set_attr(P("a/transform/rotation"), 0.2);
  s.set_attr(P("group/transform/scale"), 2.0);
  const Similarity2 x = s.local_to_screen("a");
  const Point2 q(12.5, -4.0);
  CHECK((x.apply(x.inverse().apply(q)) - q).norm() < 1e-9);

  CHECK(kind_of([&] { s.set_view({0, 0.0, Point2::Zero()}); }) == ErrorKind::kRangeViolation);
}

TEST_CASE("object validation") {
  Scene s = sample_scene();
  CHECK(s.validate().empty());
  CHECK(kind_of([&] { s.add_object(ellipse("a", 1, 1)); }) == ErrorKind::kDuplicateId);
  SceneObject orphan = ellipse("o", 1, 1);
  orphan.parent = "nowhere";
  CHECK_THROWS_AS(s.add_object(orphan), Error);

  SceneObject flipped = ellipse("f", 1, 1);
  flipped.transform.scale = -1.0;
  s.add_object(flipped);
  const auto problems = s.validate();
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("f/transform/scale") != std::string::npos);
}
