#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "casimir/cli/compare.hpp"
#include "casimir/cli/config.hpp"
#include "casimir/cli/regime_report.hpp"
#include "casimir/cli/selftest.hpp"
#include "casimir/cli/sweep.hpp"

using namespace casimir;
using namespace casimir::cli;

namespace {

const std::string static_atoms =
    "atom_a.transition = 1.0 1.5\n"
    "atom_a.response = static\n"
    "atom_b.same_as = atom_a\n";

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "run.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

// Data rows (non-comment lines after the column header) split into fields.
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  bool header = false;
  for (const auto& l : lines(csv)) {
    if (l.starts_with("#")) continue;
    if (!header) {
      header = true;
      continue;
    }
    out.push_back(fields(l));
  }
  return out;
}

std::string sweep_csv(const RunConfig& cfg, unsigned jobs, int* status = nullptr) {
  std::ostringstream out, log;
  const int s = run_sweep(cfg, jobs, out, log);
  if (status) *status = s;
  return out.str();
}

}  // namespace

// --- configuration ----------------------------------------------------------------------

TEST(Config, ParsesFreeSpaceRun) {
  const RunConfig cfg = parse_config(
      "# comment\n"
      "atom_a.transition = 1.0 1.5   # k0 mu2\n"
      "atom_a.transition = 3.0 0.3\n"
      "atom_a.gamma = 0.01\n"
      "atom_b.transition = 2.0 1.0\n"
      "geometry.R = 2.5\n"
      "temperature.T = 0.1\n"
      "run.method = all\n"
      "regime.margin = 5\n"
      "quad.tol = 1e-9\n"
      "quad.eta0 = 0.25\n"
      "quad.terms = 1000\n",
      "run.cfg");
  EXPECT_FALSE(cfg.wall);
  EXPECT_DOUBLE_EQ(cfg.separation, 2.5);
  EXPECT_DOUBLE_EQ(*cfg.temperature, 0.1);
  EXPECT_EQ(cfg.a().transitions().size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.a().damping(), 0.01);
  EXPECT_DOUBLE_EQ(static_polarizability(cfg.b()), 1.0 / 3.0);
  EXPECT_EQ(cfg.method, MethodChoice::all);
  EXPECT_DOUBLE_EQ(cfg.regime_margin, 5.0);
  EXPECT_DOUBLE_EQ(cfg.quad.tolerance, 1e-9);
  EXPECT_DOUBLE_EQ(cfg.quad.eta_start, 0.25);
  EXPECT_EQ(cfg.quad.matsubara_terms, 1000u);
}

TEST(Config, SameAsCopiesAtomA) {
  const RunConfig cfg = parse_config(static_atoms + "geometry.R = 1\ntemperature.T = 0\n");
  EXPECT_TRUE(cfg.b().is_static());
  EXPECT_DOUBLE_EQ(static_polarizability(cfg.b()), 1.0);
}

TEST(Config, WallGeometryAndLambda) {
  const RunConfig cfg = parse_config(static_atoms +
                                     "geometry.atom_a = 0 0 1\n"
                                     "geometry.atom_b = 2 0 3\n"
                                     "temperature.lambda = 4\n");
  EXPECT_TRUE(cfg.wall);
  EXPECT_EQ(cfg.position_b, Vec3(2, 0, 3));
  EXPECT_NEAR(thermal_length(ThermalBath(*cfg.temperature)), 4.0, 1e-14);
}

TEST(Config, AtomFileRelativeToConfig) {
  const RunConfig cfg = load_config(std::string(CASIMIR_SAMPLES_DIR) + "/free_space_far_zone.cfg");
  EXPECT_TRUE(cfg.a().is_static());
  EXPECT_TRUE(cfg.sweep.has_value());
}

TEST(Config, CgsUnitsConvertToNatural) {
  const RunConfig cfg = parse_config(
      "units.system = cgs\n"
      "units.length_cm = 1e-7\n" + static_atoms +
      "geometry.R = 1e-5\n"
      "temperature.T = 300\n");
  EXPECT_NEAR(cfg.separation, 100.0, 1e-10);
  const UnitSystem u = UnitSystem::gaussian_cgs();
  EXPECT_NEAR(*cfg.temperature, u.temperature_in(300.0), 1e-15);
  EXPECT_NEAR(thermal_length(ThermalBath(*cfg.temperature)) * 1e-7, 1.2149e-4, 1e-7);
}

TEST(Config, CommandLineOverrides) {
  ConfigOverrides over;
  over.tolerance = 1e-5;
  over.output_path = "out.csv";
  over.units = UnitMode::gaussian_cgs;
  const RunConfig cfg = parse_config(static_atoms + "geometry.R = 1\ntemperature.T = 0\nquad.tol = 1e-9\n",
                                     "run.cfg", over);
  EXPECT_DOUBLE_EQ(cfg.quad.tolerance, 1e-5);
  EXPECT_EQ(cfg.output_path, "out.csv");
  EXPECT_EQ(cfg.units.mode(), UnitMode::gaussian_cgs);
}

TEST(Config, ErrorsNameKeyAndLine) {
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 0\ngeometry.Z = 3\n")
                .find("run.cfg:6"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 0\ngeometry.Z = 3\n")
                .find("unknown key 'geometry.Z'"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ngeometry.R = 2\ntemperature.T = 0\n")
                .find("run.cfg:5: duplicate key 'geometry.R'"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = abc\ntemperature.T = 0\n").find("run.cfg:4"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "this line is wrong\n").find("run.cfg:4"), std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 0\nrun.method = best\n")
                .find("run.method"),
            std::string::npos);
}

TEST(Config, MissingAtomBlock) {
  EXPECT_NE(config_error("atom_b.transition = 1 1\ngeometry.R = 1\ntemperature.T = 0\n")
                .find("missing atom block 'atom_a'"),
            std::string::npos);
}

TEST(Config, ExactlyOneGeometryMode) {
  EXPECT_NE(config_error(static_atoms + "temperature.T = 0\n").find("missing geometry"), std::string::npos);
  EXPECT_NE(config_error(static_atoms +
                         "geometry.R = 1\ngeometry.atom_a = 0 0 1\ngeometry.atom_b = 0 0 2\ntemperature.T = 0\n")
                .find("exactly one geometry mode"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.atom_a = 0 0 1\ntemperature.T = 0\n").find("needs both"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\nsweep.start = 1\nsweep.stop = 2\nsweep.count = 3\n"
                                        "temperature.T = 0\n")
                .find("exactly one geometry mode"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.atom_a = 0 0 1\ngeometry.atom_b = 0 0 -2\ntemperature.T = 0\n")
                .find("run.cfg:4"),
            std::string::npos);
}

TEST(Config, ExactlyOneTemperature) {
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\n").find("exactly one of temperature"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 1\ntemperature.lambda = 2\n")
                .find("exactly one of temperature"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = -1\n").find("run.cfg:5"),
            std::string::npos);
}

TEST(Config, SweepValidation) {
  const std::string base = static_atoms + "temperature.T = 0\n";
  EXPECT_NE(config_error(base + "sweep.start = 1\nsweep.stop = 10\nsweep.count = 1\n").find("count must be >= 2"),
            std::string::npos);
  EXPECT_NE(config_error(base + "sweep.start = -1\nsweep.stop = 10\nsweep.count = 4\n").find("positive"),
            std::string::npos);
  EXPECT_NE(config_error(base + "sweep.start = 1\nsweep.count = 4\n").find("start, stop and count"),
            std::string::npos);
  EXPECT_NE(config_error(base + "sweep.start = 1\nsweep.stop = 10\nsweep.count = 4\nsweep.variable = lift\n")
                .find("free-space sweeps"),
            std::string::npos);
  EXPECT_NE(config_error(base + "sweep.start = 1\nsweep.stop = 10\nsweep.count = 2.5\n").find("integer"),
            std::string::npos);
}

TEST(Config, QuadratureSettingsAreValidated) {
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 0\nquad.tol = 0\n").find("quad"),
            std::string::npos);
  EXPECT_NE(config_error(static_atoms + "geometry.R = 1\ntemperature.T = 0\nquad.terms = 0\n").find("quad.terms"),
            std::string::npos);
}

TEST(Config, RangeValues) {
  Range r{1.0, 1000.0, 4, Spacing::log};
  const auto v = r.values();
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_NEAR(v[1], 10.0, 1e-12);
  EXPECT_NEAR(v[2], 100.0, 1e-10);
  EXPECT_DOUBLE_EQ(v[3], 1000.0);
  r.spacing = Spacing::linear;
  EXPECT_DOUBLE_EQ(r.values()[1], 334.0);
}

// --- sweeps -----------------------------------------------------------------------------

TEST(Sweep, PointOrderIsTemperatureOuterGeometryInner) {
  const RunConfig cfg = parse_config(static_atoms +
                                     "sweep.start = 10\nsweep.stop = 1000\nsweep.count = 3\n"
                                     "temperature.start = 0.01\ntemperature.stop = 0.1\n"
                                     "temperature.count = 2\n");
  const auto pts = sweep_points(cfg);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_DOUBLE_EQ(pts[0].temperature, 0.01);
  EXPECT_DOUBLE_EQ(pts[2].temperature, 0.01);
  EXPECT_DOUBLE_EQ(pts[3].temperature, 0.1);
  EXPECT_DOUBLE_EQ(pts[0].separation, 10.0);
  EXPECT_NEAR(pts[4].separation, 100.0, 1e-10);
}

TEST(Sweep, WallScaleAndLift) {
  const std::string wall = static_atoms + "geometry.atom_a = 0 0 1\ngeometry.atom_b = 1 0 1\ntemperature.T = 0\n";
  const auto scaled = sweep_points(parse_config(wall + "sweep.start = 1\nsweep.stop = 4\nsweep.count = 2\n"));
  EXPECT_DOUBLE_EQ(scaled[1].separation, 4.0);
  EXPECT_DOUBLE_EQ(scaled[1].image_separation(), std::sqrt(16.0 + 64.0));
  const auto lifted = sweep_points(
      parse_config(wall + "sweep.variable = lift\nsweep.start = 1\nsweep.stop = 9\nsweep.count = 2\n"));
  EXPECT_DOUBLE_EQ(lifted[1].separation, 1.0);
  EXPECT_DOUBLE_EQ(lifted[1].wall->atom_a().z(), 10.0);
}

TEST(Sweep, CsvSchemaAndColumns) {
  const RunConfig cfg = parse_config(static_atoms + "sweep.start = 10\nsweep.stop = 100\nsweep.count = 3\n"
                                                    "temperature.T = 0.01\n");
  const auto ls = lines(sweep_csv(cfg, 1));
  EXPECT_EQ(ls.front(), "# schema: casimir-sweep/1");
  std::size_t header = 0;
  while (ls[header].starts_with("#")) ++header;
  EXPECT_EQ(ls[header], "R,T,lambda_T,regime,W_total,W_direct,method,error_estimate");
  EXPECT_EQ(ls.size(), header + 4);

  const RunConfig wall = parse_config(static_atoms + "geometry.atom_a = 0 0 20\ngeometry.atom_b = 15 0 30\n"
                                                     "temperature.T = 0.01\n");
  const auto wl = lines(sweep_csv(wall, 1));
  EXPECT_EQ(wl.front(), "# schema: casimir-sweep/1");
  EXPECT_EQ(wl[wl.size() - 2], "R,Rbar,T,lambda_T,regime,W_total,W_direct,W_image,W_cross,method,error_estimate");
  EXPECT_EQ(fields(wl.back()).size(), 11u);
}

TEST(Sweep, TwelveSignificantDigits) {
  EXPECT_EQ(fmt(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(fmt(-23.0 / (4.0 * std::numbers::pi)), "-1.83028184556");
  EXPECT_EQ(fmt(1.0e-30 / 7.0), "1.42857142857e-31");
  const RunConfig cfg = parse_config(static_atoms + "geometry.R = 3\ntemperature.T = 0\nrun.method = full\n");
  const auto rows = data_rows(sweep_csv(cfg, 1));
  ASSERT_EQ(rows.size(), 1u);
  const std::string& w = rows[0][4];
  std::string mantissa = w.substr(0, w.find('e'));
  int digits = 0;
  bool leading = true;
  for (char c : mantissa) {
    if (!std::isdigit(static_cast<unsigned char>(c))) continue;
    if (leading && c == '0') continue;
    leading = false;
    ++digits;
  }
  EXPECT_LE(digits, 12);
  EXPECT_GE(digits, 10);
  const double want = -23.0 / (4.0 * std::numbers::pi * std::pow(3.0, 7));
  EXPECT_NEAR(std::stod(w) / want, 1.0, 1e-3);
}

TEST(Sweep, OutputIndependentOfWorkerCount) {
  const RunConfig cfg = parse_config(
      "atom_a.transition = 1.0 1.5\natom_a.gamma = 0.05\natom_b.same_as = atom_a\n"
      "sweep.start = 0.01\nsweep.stop = 30\nsweep.count = 9\n"
      "temperature.start = 0.05\ntemperature.stop = 0.5\ntemperature.count = 2\n"
      "run.method = all\n");
  const std::string one = sweep_csv(cfg, 1);
  EXPECT_EQ(one, sweep_csv(cfg, 3));
  EXPECT_EQ(one, sweep_csv(cfg, 8));
  EXPECT_EQ(one, sweep_csv(cfg, 1));
}

TEST(Sweep, WallTotalIsSumOfTerms) {
  const RunConfig cfg = parse_config(static_atoms + "geometry.atom_a = 0 0 1\ngeometry.atom_b = 1 0 2\n"
                                                    "temperature.T = 0.2\nrun.method = all\n");
  for (const auto& row : data_rows(sweep_csv(cfg, 2))) {
    const double total = std::stod(row[5]);
    const double sum = std::stod(row[6]) + std::stod(row[7]) + std::stod(row[8]);
    EXPECT_NEAR(total, sum, 1e-11 * std::abs(total)) << row[9];
  }
}

TEST(Sweep, FarZoneSlopeFromEmittedRows) {
  const RunConfig cfg = parse_config(static_atoms + "sweep.start = 10\nsweep.stop = 10000\nsweep.count = 7\n"
                                                    "temperature.T = 0\nrun.method = full\n");
  const auto rows = data_rows(sweep_csv(cfg, 4));
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double slope = std::log(std::stod(rows[i + 1][4]) / std::stod(rows[i][4])) /
                         std::log(std::stod(rows[i + 1][0]) / std::stod(rows[i][0]));
    EXPECT_NEAR(slope, -7.0, 0.02);
  }
}

TEST(Sweep, WallRemovalColumns) {
  const RunConfig cfg = parse_config(static_atoms + "geometry.atom_a = 0 0 1000\ngeometry.atom_b = 1 0 1000\n"
                                                    "temperature.T = 0.01\nrun.method = full\n");
  const auto rows = data_rows(sweep_csv(cfg, 1));
  const double direct = std::abs(std::stod(rows[0][6]));
  EXPECT_LT(std::abs(std::stod(rows[0][7])), 1e-6 * direct);
  EXPECT_LT(std::abs(std::stod(rows[0][8])), 1e-6 * direct);
}

TEST(Sweep, FailedPointsAreMarkedAndReturnThree) {
  const RunConfig cfg = parse_config(
      "atom_a.transition = 1.0 1.5\natom_a.gamma = 0\natom_b.same_as = atom_a\n"
      "sweep.start = 0.5\nsweep.stop = 2\nsweep.count = 2\ntemperature.T = 0.01\nrun.method = full\n");
  int status = 0;
  const std::string csv = sweep_csv(cfg, 2, &status);
  EXPECT_EQ(status, exit_numerical);
  const auto rows = data_rows(csv);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r[4], "nan");
    EXPECT_EQ(r[6], "failed:full-integral");
  }
}

TEST(Sweep, AutomaticMethodFollowsRegime) {
  const RunConfig cfg = parse_config(
      "atom_a.transition = 1.0 1.5\natom_a.gamma = 0.01\natom_b.same_as = atom_a\n"
      "sweep.start = 0.001\nsweep.stop = 1000\nsweep.count = 3\ntemperature.T = 0\n");
  const auto rows = data_rows(sweep_csv(cfg, 1));
  EXPECT_EQ(rows[0][6], "near-zone");
  EXPECT_EQ(rows[1][6], "full-integral");
  EXPECT_EQ(rows[2][6], "zero-T-far");
  EXPECT_EQ(rows[0][3], "near-zone");
  EXPECT_EQ(rows[1][3], "crossover");
  EXPECT_EQ(rows[2][3], "far-zone-low-T");
}

TEST(Sweep, CgsOutputUnits) {
  const RunConfig cfg = load_config(std::string(CASIMIR_SAMPLES_DIR) + "/cgs_room_temperature.cfg");
  const std::string csv = sweep_csv(cfg, 2);
  EXPECT_NE(csv.find("# units: cgs"), std::string::npos);
  for (const auto& row : data_rows(csv)) {
    EXPECT_NEAR(std::stod(row[1]), 300.0, 1e-9);
    EXPECT_NEAR(std::stod(row[2]), 1.2149e-4, 1e-7);
  }
}

// --- compare ----------------------------------------------------------------------------

namespace {

double deviation(const Comparison& c, Method a, Method b) {
  for (const auto& d : c.deviations)
    if (d.pair.first == a && d.pair.second == b) return d.relative;
  ADD_FAILURE() << "no deviation " << to_string(a) << "|" << to_string(b);
  return NAN;
}

Comparison compare_single(const std::string& text) {
  const RunConfig cfg = parse_config(text);
  return compare_point(cfg, sweep_points(cfg), 0);
}

}  // namespace

TEST(Compare, FarZonePointFullVersusOperator) {
  const Comparison c = compare_single(static_atoms + "geometry.R = 50\ntemperature.lambda = 50\n");
  EXPECT_LE(deviation(c, Method::full_integral, Method::far_zone_qr), 1e-2);
  EXPECT_TRUE(c.failures.empty());
}

TEST(Compare, HighTemperaturePointOperatorVersusLimit) {
  const Comparison c = compare_single(static_atoms + "geometry.R = 1000\ntemperature.lambda = 10\n");
  EXPECT_LE(deviation(c, Method::far_zone_qr, Method::limit_high_t), 1e-3);
}

TEST(Compare, NearZonePointAgainstFullIntegral) {
  const Comparison c = compare_single(
      "atom_a.transition = 1.0 1.5\natom_a.gamma = 0.001\natom_b.same_as = atom_a\n"
      "geometry.R = 0.001\ntemperature.T = 0\n");
  EXPECT_LE(deviation(c, Method::full_integral, Method::near_zone), 2e-2);
  EXPECT_LE(deviation(c, Method::full_integral, Method::matsubara_oracle), 1e-6);
}

TEST(Compare, WallMixedPoint) {
  const Comparison c = compare_single(static_atoms + "geometry.atom_a = 0 0 5000\ngeometry.atom_b = 10 0 5000\n"
                                                     "temperature.lambda = 500\n");
  EXPECT_LE(deviation(c, Method::far_zone_qr, Method::limit_mixed), 1e-2);
  for (const auto& d : c.deviations) EXPECT_FALSE(d.flagged) << to_string(d.pair.second);
}

TEST(Compare, TableLayout) {
  const RunConfig cfg = load_config(std::string(CASIMIR_SAMPLES_DIR) + "/compare_points.cfg");
  std::ostringstream out, log;
  EXPECT_EQ(compare_methods(cfg, 2, out, log), exit_ok);
  const auto ls = lines(out.str());
  EXPECT_EQ(ls.front(), "# schema: casimir-compare/1");
  std::size_t header = 0;
  while (ls[header].starts_with("#")) ++header;
  const auto cols = fields(ls[header]);
  EXPECT_EQ(cols.back(), "flags");
  EXPECT_NE(ls[header].find("dev[full-integral|far-zone-QR]"), std::string::npos);
  for (std::size_t i = header + 1; i < ls.size(); ++i) EXPECT_GE(fields(ls[i]).size(), cols.size() - 1);
}

// --- regime report ----------------------------------------------------------------------

namespace {

std::string report(const std::string& text) {
  std::ostringstream out;
  EXPECT_EQ(regime_report(parse_config(text), out), exit_ok);
  return out.str();
}

// Heights h with Rbar^2 = R^2 + 4 h^2 for a lateral pair at distance R.
std::string lateral_pair(double r, double rbar) {
  const double h = std::sqrt((rbar * rbar - r * r) / 4.0);
  std::ostringstream s;
  s.precision(17);
  s << "geometry.atom_a = 0 0 " << h << "\ngeometry.atom_b = " << r << " 0 " << h << "\n";
  return s.str();
}

}  // namespace

TEST(RegimeReport, ZeroTemperatureWallRegime) {
  const std::string r = report(static_atoms + lateral_pair(1e3, 2e3) + "temperature.lambda = 1e6\n");
  EXPECT_NE(r.find("regime: far-zone-low-T"), std::string::npos) << r;
  EXPECT_NE(r.find("zero-temperature wall limit"), std::string::npos);
  EXPECT_NE(r.find("recommended method: limit-zero-T"), std::string::npos);
}

TEST(RegimeReport, MixedRegimeWithDominanceNote) {
  const std::string r = report(static_atoms + lateral_pair(1e2, 1e6) + "temperature.lambda = 1e4\n");
  EXPECT_NE(r.find("regime: far-zone-mixed"), std::string::npos) << r;
  EXPECT_NE(r.find("mixed limit"), std::string::npos);
  EXPECT_NE(r.find("direct term dominates"), std::string::npos);
}

TEST(RegimeReport, HighTemperatureRegime) {
  const std::string r = report(static_atoms + lateral_pair(1e3, 1e3 * std::sqrt(2.0)) + "temperature.lambda = 1\n");
  EXPECT_NE(r.find("regime: far-zone-high-T"), std::string::npos) << r;
  EXPECT_NE(r.find("high-temperature limit"), std::string::npos);
  EXPECT_NE(r.find("lambda_T   = 1 "), std::string::npos);
}

TEST(RegimeReport, ListsInequalities) {
  const std::string r = report(static_atoms + "geometry.R = 0.001\ntemperature.T = 0\n");
  EXPECT_NE(r.find("near zone   R k_max <= 1/10   : yes"), std::string::npos) << r;
  EXPECT_NE(r.find("regime: near-zone"), std::string::npos);
  EXPECT_NE(r.find("atomic wavelength scale"), std::string::npos);
}

// --- self test --------------------------------------------------------------------------

TEST(SelfTest, PassesAndReportsEveryCheck) {
  std::ostringstream out;
  EXPECT_EQ(self_test(out), exit_ok) << out.str();
  EXPECT_NE(out.str().find("selftest passed"), std::string::npos);
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
  EXPECT_GE(self_test_checks().size(), 5u);
}
