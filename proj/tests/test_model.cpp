#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "perfcity/error.hpp"
#include "perfcity/model.hpp"
#include "support/generators.hpp"

using namespace perfcity;
using perfcity::testing::make_class;

namespace {

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

ModelRecord abz() {
  ModelRecord r;
  r.classes = {make_class("b.Z", "Z", {"b"}, 1, 1), make_class("a.Y", "Y", {"a"}, 2, 0),
               make_class("a.X", "X", {"a"}, 0, 3)};
  return r;
}

}  // namespace

TEST_CASE("minimal model validates with revision 1") {
  ModelRecord r;
  r.classes = {make_class("app.A", "A", {"app"}, 3, 2)};
  auto m = validate_model(r);
  CHECK(m.revision() == 1);
  CHECK(m.size() == 1);
  CHECK(m.find("app.A")->numMethods == 3);
  REQUIRE(m.root().children.size() == 1);
  CHECK(m.root().children[0].name == "app");
  CHECK(m.root().children[0].classes == std::vector<std::string>{"app.A"});
}

TEST_CASE("explicit revision is kept") {
  ModelRecord r;
  r.revision = 7;
  r.classes = {make_class("app.A", "A", {"app"}, 0, 0)};
  CHECK(validate_model(r).revision() == 7);
}

TEST_CASE("validation errors") {
  SUBCASE("duplicate id") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 1, 1), make_class("app.A", "A2", {"app"}, 1, 1)};
    CHECK(error_of([&] { validate_model(r); }) == Errc::DuplicateClassId);
  }
  SUBCASE("negative methods") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, -1, 0)};
    CHECK(error_of([&] { validate_model(r); }) == Errc::NegativeMetric);
  }
  SUBCASE("negative attributes") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 0, -4)};
    CHECK(error_of([&] { validate_model(r); }) == Errc::NegativeMetric);
  }
  SUBCASE("empty model") { CHECK(error_of([] { validate_model(ModelRecord{}); }) == Errc::EmptyModel); }
  SUBCASE("empty package path") {
    ModelRecord r;
    r.classes = {make_class("A", "A", {}, 0, 0)};
    CHECK(error_of([&] { validate_model(r); }) == Errc::SchemaViolation);
  }
  SUBCASE("class missing from declared tree") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 0, 0), make_class("app.B", "B", {"app"}, 0, 0)};
    r.packages = {PackageDecl{"app", {"app.A"}, {}}};
    CHECK(error_of([&] { validate_model(r); }) == Errc::OrphanClass);
  }
  SUBCASE("tree lists unknown class") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 0, 0)};
    r.packages = {PackageDecl{"app", {"app.A", "app.Ghost"}, {}}};
    CHECK(error_of([&] { validate_model(r); }) == Errc::OrphanClass);
  }
  SUBCASE("class listed twice") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 0, 0)};
    r.packages = {PackageDecl{"app", {"app.A", "app.A"}, {}}};
    CHECK(error_of([&] { validate_model(r); }) == Errc::OrphanClass);
  }
  SUBCASE("class listed under wrong package") {
    ModelRecord r;
    r.classes = {make_class("app.A", "A", {"app"}, 0, 0)};
    r.packages = {PackageDecl{"lib", {"app.A"}, {}}};
    CHECK(error_of([&] { validate_model(r); }) == Errc::OrphanClass);
  }
}

TEST_CASE("declared tree keeps empty packages") {
  ModelRecord r;
  r.classes = {make_class("app.A", "A", {"app"}, 0, 0), make_class("app.util.U", "U", {"app", "util"}, 1, 1)};
  r.packages = {PackageDecl{"app", {"app.A"}, {PackageDecl{"util", {"app.util.U"}, {}}, PackageDecl{"empty", {}, {}}}}};
  auto m = validate_model(r);
  const auto& app = m.root().children.at(0);
  REQUIRE(app.children.size() == 2);
  CHECK(app.children[0].name == "empty");
  CHECK(app.children[1].name == "util");
}

TEST_CASE("apply_model_update") {
  ModelRecord r1;
  r1.classes = {make_class("app.A", "A", {"app"}, 3, 2)};
  const auto m1 = validate_model(r1);

  ModelRecord r2 = r1;
  r2.classes.push_back(make_class("app.B", "B", {"app"}, 1, 1));
  const auto m2 = apply_model_update(m1, r2);
  CHECK(m2.revision() == 2);
  CHECK(m2.contains("app.A"));
  CHECK(m2.contains("app.B"));

  SUBCASE("identical content still bumps") {
    const auto m3 = apply_model_update(m2, r2);
    CHECK(m3.revision() == 3);
    CHECK(m3.same_content(m2));
  }
  SUBCASE("removal") {
    ModelRecord only_b;
    only_b.classes = {make_class("app.B", "B", {"app"}, 1, 1)};
    const auto m3 = apply_model_update(m2, only_b);
    CHECK_FALSE(m3.contains("app.A"));
  }
  SUBCASE("failed update leaves model untouched") {
    ModelRecord bad;
    bad.classes = {make_class("x", "x", {"p"}, 0, 0), make_class("x", "y", {"p"}, 0, 0)};
    const SystemModel before = m1;
    CHECK(error_of([&] { (void)apply_model_update(m1, bad); }) == Errc::DuplicateClassId);
    CHECK(m1.same_content(before));
    CHECK(m1.revision() == before.revision());
  }
  SUBCASE("update revision field is ignored") {
    ModelRecord r = r2;
    r.revision = 99;
    CHECK(apply_model_update(m1, r).revision() == 2);
  }
}

TEST_CASE("class_order examples") {
  CHECK(class_order(validate_model(abz())) == std::vector<std::string>{"a.X", "a.Y", "b.Z"});

  ModelRecord single;
  single.classes = {make_class("app.A", "A", {"app"}, 0, 0)};
  CHECK(class_order(validate_model(single)) == std::vector<std::string>{"app.A"});
}

TEST_CASE("class_order puts own classes before sub-packages and breaks name ties by id") {
  ModelRecord r;
  r.classes = {make_class("a.b.Q", "Q", {"a", "b"}, 0, 0), make_class("a.Z", "Z", {"a"}, 0, 0),
               make_class("a.X2", "X", {"a"}, 0, 0), make_class("a.X1", "X", {"a"}, 0, 0)};
  CHECK(class_order(validate_model(r)) == std::vector<std::string>{"a.X1", "a.X2", "a.Z", "a.b.Q"});
}

TEST_CASE("class_order is invariant under 100 seeded shuffles") {
  std::mt19937_64 rng(2024);
  const ModelRecord base = perfcity::testing::random_model(rng, 60, 4);
  const auto expected = class_order(validate_model(base));
  for (int i = 0; i < 100; ++i) {
    ModelRecord shuffled = base;
    std::shuffle(shuffled.classes.begin(), shuffled.classes.end(), rng);
    CHECK(class_order(validate_model(shuffled)) == expected);
  }
}

TEST_CASE("class_order is a permutation of the class ids") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rec = perfcity::testing::random_model(rng, 1 + rng() % 120, 1 + rng() % 5);
    const auto model = validate_model(rec);
    auto order = class_order(model);
    CHECK(order.size() == rec.classes.size());
    std::set<std::string> ids(order.begin(), order.end());
    CHECK(ids.size() == order.size());
    for (const auto& c : rec.classes) CHECK(ids.count(c.id) == 1);
  }
}

TEST_CASE("to_record round-trips through validation") {
  std::mt19937_64 rng(5);
  const auto model = validate_model(perfcity::testing::random_model(rng, 40, 3));
  const auto again = validate_model(model.to_record());
  CHECK(again.same_content(model));
  CHECK(again.revision() == model.revision());
}
