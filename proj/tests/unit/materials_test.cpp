#include "emtherm/materials.hpp"

#include <doctest.h>

#include <limits>
#include <sstream>
#include <string>

#include "emtherm/machine_geometry.hpp"
#include "test_meshes.hpp"

using namespace emtherm;

TEST_SUITE("materials") {

TEST_CASE("provenance round trips through its string form") {
  for (auto p : {Provenance::literature, Provenance::fitted, Provenance::user})
    CHECK(provenance_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(provenance_from_string("guessed"), ConfigError);
}

TEST_CASE("literature table carries the handbook values") {
  const MaterialTable t = literature_defaults();
  const auto& sy = t.at(region_names::kStatorYoke);
  CHECK(sy.lambda_radial == 40.0);
  CHECK(sy.lambda_tangential == 40.0);
  CHECK(sy.volumetric_heat_capacity == 3.925e6);
  CHECK(sy.lambda_axial.has_value());
  CHECK(*sy.lambda_axial == 2.5);
  CHECK(sy.provenance == Provenance::literature);

  CHECK(t.at(region_names::kConductorUpper).lambda_radial == 398.0);
  CHECK(t.at(region_names::kSlotInsulation).lambda_radial == 0.7);
  CHECK(t.at(region_names::kAirGap).lambda_radial == 0.026);
  CHECK(t.at(region_names::kAirGap).volumetric_heat_capacity == 1.210e3);
  CHECK(t.at(region_names::kShaft).lambda_radial == 59.6);
  CHECK(t.at(region_names::kCage).provenance == Provenance::user);
}

TEST_CASE("fitted table replaces the calibrated conductivities") {
  const MaterialTable t = fitted_defaults();
  CHECK(t.at(region_names::kStatorYoke).lambda_radial == 24.0);
  CHECK(t.at(region_names::kRotorYoke).lambda_radial == 16.0);
  CHECK(t.at(region_names::kAirGap).lambda_radial == 0.052);
  CHECK(t.at(region_names::kStatorYoke).provenance == Provenance::fitted);
  // Untouched entries keep their handbook values and provenance.
  CHECK(t.at(region_names::kConductorUpper).lambda_radial == 398.0);
  CHECK(t.at(region_names::kConductorUpper).provenance == Provenance::literature);
  // Heat capacities never change in the fit.
  CHECK(t.at(region_names::kStatorYoke).volumetric_heat_capacity ==
        literature_defaults().at(region_names::kStatorYoke).volumetric_heat_capacity);
  CHECK(kFittedRobinH == 0.235);
}

TEST_CASE("set_effective_conductivity collapses the tensor") {
  MaterialRegion m;
  m.volumetric_heat_capacity = 1.0;
  m.lambda_radial = 10.0;
  m.lambda_tangential = 2.0;
  CHECK_FALSE(m.isotropic());
  m.set_effective_conductivity(5.0, Provenance::fitted);
  CHECK(m.isotropic());
  CHECK(m.lambda_radial == 5.0);
  CHECK(m.lambda_tangential == 5.0);
  CHECK(m.provenance == Provenance::fitted);
}

TEST_CASE("validation rejects non-positive and non-finite properties") {
  MaterialRegion m;
  m.volumetric_heat_capacity = 1e6;
  m.lambda_radial = 1.0;
  m.lambda_tangential = 1.0;
  CHECK_NOTHROW(m.validate("ok"));

  MaterialRegion bad = m;
  bad.volumetric_heat_capacity = 0.0;
  CHECK_THROWS_WITH_AS(bad.validate("r"), doctest::Contains("heat capacity"), ConfigError);
  bad = m;
  bad.lambda_radial = -1.0;
  CHECK_THROWS_AS(bad.validate("r"), ConfigError);
  bad = m;
  bad.lambda_tangential = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate("r"), ConfigError);
  bad = m;
  bad.lambda_axial = 0.0;
  CHECK_THROWS_AS(bad.validate("r"), ConfigError);
}

TEST_CASE("table lookups name the missing region") {
  MaterialTable t;
  CHECK_FALSE(t.contains("shaft"));
  CHECK_THROWS_WITH_AS(t.at("shaft"), doctest::Contains("shaft"), ConfigError);
}

TEST_CASE("isotropic tensor is exactly diagonal everywhere") {
  ResolvedMaterial m{1.0, 7.0, 7.0};
  for (const Vec2& p : {Vec2(0.3, 0.4), Vec2(0.0, 0.0), Vec2(-1.0, 2.0)}) {
    const Mat2 k = m.tensor_at(p);
    CHECK(k(0, 0) == 7.0);
    CHECK(k(1, 1) == 7.0);
    CHECK(k(0, 1) == 0.0);
    CHECK(k(1, 0) == 0.0);
  }
}

TEST_CASE("anisotropic tensor aligns with the radial direction") {
  ResolvedMaterial m{1.0, 10.0, 2.0};
  // On the y axis the radial direction is y, tangential is x.
  const Mat2 on_y = m.tensor_at(Vec2(0.0, 0.05));
  CHECK(on_y(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(on_y(1, 1) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(on_y(0, 1) == doctest::Approx(0.0));
  // On the x axis the roles swap.
  const Mat2 on_x = m.tensor_at(Vec2(0.07, 0.0));
  CHECK(on_x(0, 0) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(on_x(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
  // At 45 degrees the eigenvalues stay (10, 2) with radial eigenvector.
  const Vec2 p(0.1, 0.1);
  const Mat2 k = m.tensor_at(p);
  const Vec2 e_r = p.normalized();
  const Vec2 e_t(-e_r.y(), e_r.x());
  CHECK((k * e_r - 10.0 * e_r).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((k * e_t - 2.0 * e_t).norm() == doctest::Approx(0.0).epsilon(1e-12));
  // The tensor stays symmetric.
  CHECK(k(0, 1) == doctest::Approx(k(1, 0)));
}

TEST_CASE("tensor at the axis falls back to a fixed direction") {
  ResolvedMaterial m{1.0, 10.0, 2.0};
  const Mat2 k = m.tensor_at(Vec2(0.0, 0.0));
  CHECK(k.allFinite());
  CHECK(k(0, 0) == doctest::Approx(10.0));
  CHECK(k(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("resolve_materials maps region tags to table entries") {
  const Mesh mesh = testing::structured_rectangle(2, 2, 1.0, 1.0);
  MaterialTable t;
  MaterialRegion m;
  m.volumetric_heat_capacity = 2e6;
  m.lambda_radial = 3.0;
  m.lambda_tangential = 3.0;
  t.set("domain", m);
  const auto resolved = resolve_materials(mesh, t);
  REQUIRE(resolved.size() == 1);
  CHECK(resolved.at(1).volumetric_heat_capacity == 2e6);
  CHECK(resolved.at(1).lambda_radial == 3.0);

  // Missing entry for a present region fails by name.
  MaterialTable empty;
  CHECK_THROWS_WITH_AS(resolve_materials(mesh, empty), doctest::Contains("domain"),
                       ConfigError);
  // Extra entries are fine.
  t.set("unused_region", m);
  CHECK_NOTHROW(resolve_materials(mesh, t));
}

TEST_CASE("materials csv lists every region with provenance") {
  const std::string csv = materials_csv(fitted_defaults());
  std::istringstream ss(csv);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "region,c_v_J_per_m3K,lambda_radial_W_per_mK,lambda_tangential_W_per_mK,"
        "lambda_axial_W_per_mK,provenance");
  int rows = 0;
  std::string line, air_gap_row;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.rfind("air_gap,", 0) == 0) air_gap_row = line;
  }
  CHECK(rows == 8);
  CHECK(csv.find("stator_yoke,3925000,24,24,2.5,fitted") != std::string::npos);
  CHECK(csv.find("cage,") != std::string::npos);

  // Values written at full precision parse back exactly.
  REQUIRE(!air_gap_row.empty());
  std::istringstream fields(air_gap_row);
  std::string region, c_v, lr, lt, la, prov;
  std::getline(fields, region, ',');
  std::getline(fields, c_v, ',');
  std::getline(fields, lr, ',');
  std::getline(fields, lt, ',');
  std::getline(fields, la, ',');
  std::getline(fields, prov, ',');
  CHECK(std::stod(c_v) == 1210.0);
  CHECK(std::stod(lr) == 0.052);
  CHECK(std::stod(lt) == 0.052);
  CHECK(la.empty());  // no axial value for the gap
  CHECK(prov == "fitted");
}

}  // TEST_SUITE
