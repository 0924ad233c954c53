#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "mtinsar/catalog.hpp"
#include "mtinsar/dates.hpp"
#include "mtinsar/geometry.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/phase.hpp"
#include "mtinsar/rng.hpp"
#include "test_support.hpp"

using namespace mtinsar;
using Catch::Approx;

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

TEST_CASE("los_unit_vector nadir and reference values", "[core][geometry]") {
  const auto nadir = los_unit_vector(ViewGeometry(0.0, 123.0));
  CHECK(nadir[0] == Approx(0.0).margin(1e-15));
  CHECK(nadir[1] == Approx(0.0).margin(1e-15));
  CHECK(nadir[2] == Approx(1.0).margin(1e-15));

  // cos(38.9 deg) = 0.77824314852602096 (independent high-precision value)
  const auto v = los_unit_vector(ViewGeometry(38.9, 347.0));
  CHECK(v[2] == Approx(0.77824314852602096).epsilon(1e-12));

  const auto grazing = los_unit_vector(ViewGeometry(89.9, 0.0));
  CHECK(grazing[2] == Approx(0.0017453283658983088).epsilon(1e-9));
}

TEST_CASE("los_unit_vector has unit norm for random geometries",
          "[core][geometry]") {
  Rng rng(101);
  for (int i = 0; i < 2000; ++i) {
    const ViewGeometry g(rng.uniform(0.0, 89.999), rng.uniform(0.0, 359.999));
    const auto v = los_unit_vector(g);
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    REQUIRE(norm == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("project_vertical_to_los values and linearity", "[core][geometry]") {
  CHECK(project_vertical_to_los(1.0, ViewGeometry(0.0, 0.0)) == 1.0);
  CHECK(project_vertical_to_los(0.0, ViewGeometry(55.0, 10.0)) == 0.0);
  CHECK(project_vertical_to_los(-2.0, ViewGeometry(38.9, 347.0)) ==
        Approx(-1.5564862970520419).epsilon(1e-12));

  Rng rng(102);
  const ViewGeometry g(38.9, 347.0);
  for (int i = 0; i < 500; ++i) {
    const double v = rng.uniform(-50.0, 50.0);
    const double a = rng.uniform(-4.0, 4.0);
    REQUIRE(project_vertical_to_los(a * v, g) ==
            Approx(a * project_vertical_to_los(v, g)).margin(1e-12));
  }
}

TEST_CASE("phase_to_displacement reference values and odd symmetry",
          "[core][geometry]") {
  const RadarConstants c;
  CHECK(phase_to_displacement_cm(0.0, c) == 0.0);
  CHECK(phase_to_displacement_cm(4.0 * kPi, c) == Approx(-5.54658).epsilon(1e-12));
  CHECK(phase_to_displacement_cm(-2.0 * kPi, c) == Approx(2.77329).epsilon(1e-12));

  Rng rng(103);
  for (int i = 0; i < 500; ++i) {
    const double phi = rng.uniform(-100.0, 100.0);
    REQUIRE(phase_to_displacement_cm(phi, c) +
                phase_to_displacement_cm(-phi, c) ==
            0.0);
    // inverse round trip
    REQUIRE(displacement_cm_to_phase(phase_to_displacement_cm(phi, c), c) ==
            Approx(phi).epsilon(1e-12));
  }
}

TEST_CASE("geometry constructors enforce ranges", "[core][geometry]") {
  CHECK_THROWS_AS(ViewGeometry(90.0, 0.0), Error);
  CHECK_THROWS_AS(ViewGeometry(-1.0, 0.0), Error);
  CHECK_THROWS_AS(ViewGeometry(10.0, 360.0), Error);
  CHECK_THROWS_AS(RadarConstants(0.0), Error);
  CHECK_THROWS_AS(RadarConstants(-0.05), Error);
}

// ---------------------------------------------------------------------------
// phase wrapping
// ---------------------------------------------------------------------------

TEST_CASE("wrap principal values", "[core]") {
  CHECK(wrap(0.0) == 0.0);
  CHECK(wrap(kPi) == Approx(-kPi));           // boundary maps to the lower bound
  CHECK(wrap(7.5 * kPi) == Approx(-0.5 * kPi).epsilon(1e-12));
  CHECK(wrap(-kPi) == Approx(-kPi));
}

TEST_CASE("wrap is 2*pi periodic and lands in [-pi, pi)", "[core]") {
  Rng rng(104);
  for (int i = 0; i < 5000; ++i) {
    const double phi = rng.uniform(-40.0, 40.0);
    const int k = rng.uniform_int(-6, 6);
    REQUIRE(wrap(phi + kTwoPi * k) == Approx(wrap(phi)).margin(1e-9));
    const double w = wrap(phi);
    REQUIRE(w >= -kPi);
    REQUIRE(w < kPi);
    // congruence
    REQUIRE(std::remainder(w - phi, kTwoPi) == Approx(0.0).margin(1e-9));
  }
}

// ---------------------------------------------------------------------------
// rng
// ---------------------------------------------------------------------------

TEST_CASE("rng streams are deterministic and distinct", "[core][rng]") {
  Rng a = Rng::stream(42, 7);
  Rng b = Rng::stream(42, 7);
  Rng c = Rng::stream(42, 8);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    all_equal = all_equal && (va == vb);
    any_equal_c = any_equal_c || (va == vc);
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("rng normal has sane moments", "[core][rng]") {
  Rng rng(4242);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == Approx(0.0).margin(0.01));
  CHECK(sum2 / n == Approx(1.0).margin(0.02));
}

// ---------------------------------------------------------------------------
// dates and catalog
// ---------------------------------------------------------------------------

TEST_CASE("date parse/format round trip", "[core]") {
  CHECK(format_date(parse_date("2015-03-12")) == "2015-03-12");
  CHECK(format_date(parse_date("2022-08-26")) == "2022-08-26");
  CHECK(parse_date("1970-01-01") == 0);
  CHECK(parse_date("1970-01-02") == 1);
  CHECK_THROWS_AS(parse_date("2015/03/12"), Error);
  CHECK_THROWS_AS(parse_date("2015-13-01"), Error);
  CHECK_THROWS_AS(parse_date("garbage"), Error);
  CHECK(years_between(parse_date("2015-03-12"), parse_date("2016-03-11")) ==
        Approx(365.0 / 365.25));
}

TEST_CASE("catalog file round trip", "[core]") {
  std::vector<Acquisition> acqs;
  acqs.push_back({0, parse_date("2015-03-12"), -12.25});
  acqs.push_back({1, parse_date("2015-03-24"), 48.5});
  acqs.push_back({2, parse_date("2015-04-05"), 3.0});
  AcquisitionCatalog cat(acqs);

  std::ostringstream out;
  write_catalog(cat, out);
  std::istringstream in(out.str());
  const AcquisitionCatalog back = parse_catalog(in);
  REQUIRE(back.size() == cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) {
    CHECK(back[i].id == cat[i].id);
    CHECK(back[i].date == cat[i].date);
    CHECK(back[i].perp_baseline_m == Approx(cat[i].perp_baseline_m));
  }
}

TEST_CASE("catalog rejects unsorted dates and bad ids", "[core]") {
  std::vector<Acquisition> bad = {{0, 100, 0.0}, {1, 100, 1.0}};
  CHECK_THROWS_AS(AcquisitionCatalog(bad), Error);
  std::vector<Acquisition> bad_ids = {{0, 100, 0.0}, {2, 200, 1.0}};
  CHECK_THROWS_AS(AcquisitionCatalog(bad_ids), Error);
}

// ---------------------------------------------------------------------------
// pair selection
// ---------------------------------------------------------------------------

TEST_CASE("select_pairs spec examples", "[core][pairs]") {
  SECTION("two close, one far") {
    std::vector<Acquisition> acqs = {{0, 1000, 0.0},
                                     {1, 1012, 50.0},
                                     {2, 1500, 300.0}};
    const auto ps = select_pairs(AcquisitionCatalog(acqs), 150.0, 400.0);
    REQUIRE(ps.pairs == std::vector<std::pair<int, int>>{{0, 1}});
  }
  SECTION("single acquisition yields empty set") {
    std::vector<Acquisition> acqs = {{0, 1000, 0.0}};
    const auto ps = select_pairs(AcquisitionCatalog(acqs), 150.0, 400.0);
    CHECK(ps.pairs.empty());
  }
  SECTION("183 acquisitions at 12-day cadence give 5478 pairs") {
    std::vector<Acquisition> acqs;
    for (int i = 0; i < 183; ++i)
      acqs.push_back({i, 16500 + 12 * static_cast<SerialDay>(i), 0.0});
    const AcquisitionCatalog cat(acqs);
    const auto ps = select_pairs(cat, 150.0, 400.0);
    CHECK(ps.pairs.size() == 5478);
    const auto oracle = testsup::brute_force_pairs(cat, 150.0, 400.0);
    CHECK(ps.pairs == oracle);
  }
  SECTION("empty catalog throws") {
    CHECK_THROWS_AS(select_pairs(AcquisitionCatalog{}, 150.0, 400.0), Error);
  }
}

TEST_CASE("select_pairs equals brute force on random catalogs",
          "[core][pairs]") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + rng.uniform_int(0, 39);
    const auto cat = testsup::random_catalog(rng, n);
    const double perp_max = rng.uniform(10.0, 500.0);
    const double temp_max = rng.uniform(20.0, 900.0);
    const auto ps = select_pairs(cat, perp_max, temp_max);
    REQUIRE(ps.pairs == testsup::brute_force_pairs(cat, perp_max, temp_max));
  }
}

TEST_CASE("pair counts invariant under date/baseline translation",
          "[core][pairs]") {
  Rng rng(2025);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cat = testsup::random_catalog(rng, 25);
    const auto base = select_pairs(cat, 120.0, 300.0);
    std::vector<Acquisition> shifted;
    const SerialDay dshift = rng.uniform_int(-5000, 5000);
    const double bshift = rng.uniform(-2000.0, 2000.0);
    for (const auto& a : cat.acquisitions())
      shifted.push_back({a.id, a.date + dshift, a.perp_baseline_m + bshift});
    const auto moved = select_pairs(AcquisitionCatalog(shifted), 120.0, 300.0);
    REQUIRE(moved.pairs == base.pairs);
  }
}

TEST_CASE("connected_components examples", "[core][pairs]") {
  PairSet ps;
  ps.pairs = {{0, 1}, {1, 2}};
  CHECK(connected_components(ps, 3) ==
        std::vector<std::vector<int>>{{0, 1, 2}});
  PairSet empty;
  CHECK(connected_components(empty, 2) ==
        std::vector<std::vector<int>>{{0}, {1}});
  PairSet two;
  two.pairs = {{0, 1}, {2, 3}};
  CHECK(connected_components(two, 4) ==
        std::vector<std::vector<int>>{{0, 1}, {2, 3}});
}

TEST_CASE("design_matrix definition cases", "[core][pairs]") {
  SECTION("three acquisitions, chain") {
    PairSet ps;
    ps.pairs = {{0, 1}, {1, 2}};
    const DesignMatrix dm = design_matrix(ps, 3, 0);
    REQUIRE(dm.m.rows() == 2);
    REQUIRE(dm.m.cols() == 2);
    CHECK(dm.m(0, 0) == 1.0);
    CHECK(dm.m(0, 1) == 0.0);
    CHECK(dm.m(1, 0) == -1.0);
    CHECK(dm.m(1, 1) == 1.0);
  }
  SECTION("two acquisitions") {
    PairSet ps;
    ps.pairs = {{0, 1}};
    const DesignMatrix dm = design_matrix(ps, 2, 0);
    REQUIRE(dm.m.rows() == 1);
    REQUIRE(dm.m.cols() == 1);
    CHECK(dm.m(0, 0) == 1.0);
  }
  SECTION("four-acquisition chain has rank 3") {
    PairSet ps;
    ps.pairs = {{0, 1}, {1, 2}, {2, 3}};
    const DesignMatrix dm = design_matrix(ps, 4, 0);
    // independent rank check
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dm.m);
    CHECK(lu.rank() == 3);
  }
  SECTION("disconnected graph throws with component list") {
    PairSet ps;
    ps.pairs = {{0, 1}, {2, 3}};
    CHECK_THROWS_WITH(design_matrix(ps, 4, 0),
                      Catch::Matchers::ContainsSubstring("2 components"));
  }
}

TEST_CASE("design matrix rank equals n minus component count",
          "[core][pairs]") {
  Rng rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + rng.uniform_int(0, 10);
    PairSet ps;
    std::set<std::pair<int, int>> seen;
    const int m = rng.uniform_int(0, 2 * n);
    for (int k = 0; k < m; ++k) {
      int i = rng.uniform_int(0, n - 1), j = rng.uniform_int(0, n - 1);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (seen.insert({i, j}).second) ps.pairs.emplace_back(i, j);
    }
    std::sort(ps.pairs.begin(), ps.pairs.end());
    const int comps = testsup::count_components_oracle(ps.pairs, n);

    // build the full incidence matrix without dropping a reference column;
    // its rank must be n - #components
    Eigen::MatrixXd full =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ps.pairs.size()), n);
    for (std::size_t r = 0; r < ps.pairs.size(); ++r) {
      full(static_cast<Eigen::Index>(r), ps.pairs[r].first) = -1.0;
      full(static_cast<Eigen::Index>(r), ps.pairs[r].second) = 1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(full);
    REQUIRE(lu.rank() == n - comps);

    // the library's components agree with the oracle
    REQUIRE(static_cast<int>(connected_components(ps, n).size()) == comps);

    // when connected, the reduced design matrix has full column rank
    if (comps == 1) {
      const DesignMatrix dm = design_matrix(ps, n, rng.uniform_int(0, n - 1));
      Eigen::FullPivLU<Eigen::MatrixXd> lu2(dm.m);
      REQUIRE(lu2.rank() == n - 1);
    }
  }
}
