#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mtve/greens.hpp"

using namespace mtve::greens;
using mtve::geometry::ScaleFactorModel;
using mtve::geometry::SpacetimePoint;

namespace {

// High-precision reference values (30-digit arbitrary precision), frozen.
struct BesselRef { double x, j0, j1; };
constexpr BesselRef kBesselTable[] = {
    {0.0, 1.0, 0.0},
    {1e-08, 0.999999999999999975, 5.0000000000000000421e-9},
    {0.1, 0.997501562066040032, 0.049937526036242000321},
    {0.5, 0.93846980724081290423, 0.24226845767487388638},
    {1.0, 0.76519768655796655145, 0.44005058574493351596},
    {2.0, 0.22389077914123566805, 0.5767248077568733872},
    {2.404825557695773, -6.1087652597367303971e-17, 0.51914749728946676274},
    {3.0, -0.26005195490193343762, 0.33905895852593645893},
    {3.831705970207512, -0.4027593957025529721, 1.1736302822728639658e-16},
    {5.0, -0.17759677131433830435, -0.32757913759146522204},
    {5.520078110286311, -2.7522649432621831472e-17, -0.34026480655836815355},
    {7.0, 0.30007927051955559665, -0.0046828234823458326991},
    {8.0, 0.17165080713755390609, 0.23463634685391462438},
    {8.653727912911013, -7.9484655705251616e-17, 0.2714522999283819112},
    {10.0, -0.2459357644513483352, 0.04347274616886143667},
    {11.791534439014281, -6.5389948958078152852e-17, -0.2324598313647247844},
    {12.5, 0.14688405470042110231, -0.16548380461475971846},
    {14.0, 0.17107347611045865906, 0.13337515469879325311},
    {15.5, -0.10923065090005016848, 0.16721318035174714327},
    {15.99, -0.17398608798538683617, 0.0921986960066056005},
    {16.0, -0.17489907398362918483, 0.090397175661304186239},
    {16.01, -0.17579400524547218517, 0.088587779395949132387},
    {16.5, -0.19638069293686102974, -0.0057642137356312269888},
    {18.0, -0.013355805721984110885, -0.18799488548806959401},
    {20.0, 0.16702466434058315473, 0.066833124175850045579},
    {21.21163662987926, 8.5715979451951089704e-17, 0.17326589422922987378},
    {25.0, 0.096266783275958116174, -0.12535024958028990465},
    {30.0, -0.086367983581040211336, -0.11875106261662293652},
    {40.0, 0.0073668905842372895535, 0.12603831803758499921},
    {50.0, 0.055812327669251815005, -0.097511828125175137661},
    {75.0, 0.034643913805097056137, -0.085139995044829103941},
    {100.0, 0.019985850304223122424, -0.077145352014112158033},
};

ScaleFactorModel unit_scale(double T = 10.0) {
  return ScaleFactorModel::custom([](double) { return 1.0; }, T, "unit");
}

}  // namespace

TEST(Bessel, MatchesHighPrecisionTable) {
  for (const auto& ref : kBesselTable) {
    double e0 = std::abs(bessel_j0(ref.x) - ref.j0);
    double e1 = std::abs(bessel_j1(ref.x) - ref.j1);
    EXPECT_LE(e0, 2e-14) << "j0 at x=" << ref.x;
    EXPECT_LE(e1, 2e-14) << "j1 at x=" << ref.x;
    if (std::abs(ref.j0) > 0.05)
      EXPECT_LE(e0 / std::abs(ref.j0), 1e-13) << "j0 rel at x=" << ref.x;
    if (std::abs(ref.j1) > 0.05)
      EXPECT_LE(e1 / std::abs(ref.j1), 1e-13) << "j1 rel at x=" << ref.x;
  }
}

TEST(Bessel, Parity) {
  EXPECT_DOUBLE_EQ(bessel_j0(-3.0), bessel_j0(3.0));
  EXPECT_DOUBLE_EQ(bessel_j1(-3.0), -bessel_j1(3.0));
}

TEST(MinkowskiGsym, MasslessOneDimensional) {
  auto g = minkowski_gsym(1, 0.0, 2.0, 1.0);  // timelike
  EXPECT_DOUBLE_EQ(g.regular, 0.5);
  auto sp = minkowski_gsym(1, 3.0, 1.0, 2.0);  // spacelike, any mass
  EXPECT_DOUBLE_EQ(sp.regular, 0.0);
}

TEST(MinkowskiGsym, TwoDimensionalMassless) {
  // x^2 = 4 -> 1/(2 pi * 2)
  auto g = minkowski_gsym(2, 0.0, 2.5, 1.5);
  EXPECT_NEAR(g.regular, 1.0 / (4.0 * M_PI), 1e-15);
}

TEST(MinkowskiGsym, ThreeDimensionalPieces) {
  auto on_cone = minkowski_gsym(3, 0.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(on_cone.lightcone_delta_coeff, 1.0 / (2.0 * M_PI));
  EXPECT_DOUBLE_EQ(on_cone.regular, 0.0);
  auto off_cone = minkowski_gsym(3, 0.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(off_cone.lightcone_delta_coeff, 0.0);
  // massive regular part: -(m/4 pi r) J1(m r) at r = sqrt(x^2)
  double m = 2.0, dt = 3.0, dx = 1.0;
  double r = std::sqrt(dt * dt - dx * dx);
  auto massive = minkowski_gsym(3, m, dt, dx);
  EXPECT_NEAR(massive.regular, -m / (4.0 * M_PI * r) * bessel_j1(m * r),
              1e-15);
}

TEST(MinkowskiGsym, RejectsBadDimension) {
  EXPECT_THROW(minkowski_gsym(4, 0.0, 1.0, 0.0), std::domain_error);
  EXPECT_THROW(minkowski_gsym(0, 0.0, 1.0, 0.0), std::domain_error);
}

TEST(MinkowskiGret, RetardedSupport) {
  EXPECT_DOUBLE_EQ(minkowski_gret(1, 0.0, -2.0, 1.0).regular, 0.0);
  EXPECT_DOUBLE_EQ(minkowski_gret(1, 0.0, 2.0, 1.0).regular, 0.5);
  EXPECT_DOUBLE_EQ(minkowski_gret(2, 0.0, -2.5, 1.5).regular, 0.0);
  EXPECT_DOUBLE_EQ(minkowski_gret(3, 0.0, -1.0, 1.0).lightcone_delta_coeff,
                   0.0);
}

TEST(MinkowskiGsym, SpacelikeSupportProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    double dr = 1.0 + u(rng);
    double dt = dr * u(rng) * 0.999;  // strictly spacelike
    for (int d = 1; d <= 3; ++d) {
      auto g = minkowski_gsym(d, 0.7, dt, dr);
      EXPECT_EQ(g.regular, 0.0);
      EXPECT_EQ(g.lightcone_delta_coeff, 0.0);
    }
  }
}

TEST(MinkowskiGsym, SmallMassContinuity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    double dt = 1.0 + u(rng), dr = dt * u(rng) * 0.9;
    for (int d = 1; d <= 3; ++d) {
      auto small = minkowski_gsym(d, 1e-6, dt, dr);
      auto zero = minkowski_gsym(d, 0.0, dt, dr);
      EXPECT_NEAR(small.regular, zero.regular, 1e-5);
      EXPECT_NEAR(small.lightcone_delta_coeff, zero.lightcone_delta_coeff,
                  1e-5);
    }
  }
}

TEST(FlatFlrwGsym, TableRows) {
  auto unit = unit_scale();
  auto x = SpacetimePoint::flat1d(3.0, 0.0);
  auto xp = SpacetimePoint::flat1d(1.0, 1.0);  // timelike
  EXPECT_DOUBLE_EQ(flat_flrw_gsym(1, unit, x, xp).regular, 0.5);

  // d=2 with unit scale and x^2 = 4 reduces to the Minkowski value
  auto y = SpacetimePoint::flat(2.5, {0.0, 0.0, 0.0}, 2);
  auto yp = SpacetimePoint::flat(0.5, {0.0, 0.0, 0.0}, 2);
  auto g2 = flat_flrw_gsym(2, unit, y, yp);
  EXPECT_NEAR(g2.folded_regular(), 1.0 / (4.0 * M_PI), 1e-15);

  // d=2 with a(eta)=4, a(eta')=1 and x^2=1: (1/2 pi) * (1/2)
  auto steps = ScaleFactorModel::custom(
      [](double eta) { return eta > 1.5 ? 4.0 : 1.0; }, 10.0);
  auto z = SpacetimePoint::flat(2.0, {0.0, 0.0, 0.0}, 2);
  auto zp = SpacetimePoint::flat(1.0, {0.0, 0.0, 0.0}, 2);
  auto g2b = flat_flrw_gsym(2, steps, z, zp);
  EXPECT_NEAR(g2b.folded_regular(), 1.0 / (4.0 * M_PI), 1e-15);
}

TEST(FlatFlrwGsym, SingularPrefactorFlaggedAtRoots) {
  auto dust = ScaleFactorModel::dust(0, 5.0);
  auto x = SpacetimePoint::flat(2.0, {0.0, 0.0, 0.0}, 2);
  auto xp = SpacetimePoint::flat(0.0, {1.0, 0.0, 0.0}, 2);  // a(0) = 0
  auto g = flat_flrw_gsym(2, dust, x, xp);
  EXPECT_TRUE(g.prefactor_singular());
  EXPECT_TRUE(std::isfinite(g.regular));  // never a raw infinity
  EXPECT_THROW(g.folded_regular(), std::domain_error);
}

TEST(FlatFlrwGsym, ConformalConsistencyWithMinkowski) {
  auto dust = ScaleFactorModel::dust(0, 5.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 10000; ++it) {
    double e1 = 0.5 + 4.0 * u(rng), e2 = 0.5 + 4.0 * u(rng);
    double dx = 5.0 * u(rng);
    int d = 1 + static_cast<int>(u(rng) * 3.0);
    d = std::min(d, 3);
    auto x = SpacetimePoint::flat(e1, {0.0, 0.0, 0.0}, d);
    auto xp = SpacetimePoint::flat(e2, {dx, 0.0, 0.0}, d);
    auto direct = flat_flrw_gsym(d, dust, x, xp);
    auto mink = minkowski_gsym(d, 0.0, e1 - e2, dx);
    auto mapped = conformal_transform_greens(mink, dust(e1), dust(e2), d);
    double scale = std::max({1.0, std::abs(mapped.regular),
                             std::abs(mapped.lightcone_delta_coeff)});
    EXPECT_NEAR(direct.folded_regular(), mapped.regular, 1e-13 * scale);
    EXPECT_NEAR(direct.folded_delta_coeff(), mapped.lightcone_delta_coeff,
                1e-13 * scale);
  }
}

TEST(OpenFlrwGret, DeltaCoefficient) {
  auto unit = unit_scale();
  auto x = SpacetimePoint::hyperboloid(
      2.0, {std::cosh(1.0), std::sinh(1.0), 0.0, 0.0});
  auto xp = SpacetimePoint::hyperboloid(1.0, {1.0, 0.0, 0.0, 0.0});
  auto g = open_flrw_gret(unit, x, xp);
  EXPECT_NEAR(g.folded_delta_coeff(), 1.0 / (4.0 * M_PI * std::sinh(1.0)),
              1e-14);
  EXPECT_EQ(g.regular, 0.0);
  // swapped points carry the same coefficient (s symmetric)
  auto gswap = open_flrw_gret(unit, xp, x);
  EXPECT_NEAR(gswap.folded_delta_coeff(), g.folded_delta_coeff(), 1e-15);
}

TEST(OpenFlrwGret, CoincidenceFlagged) {
  auto unit = unit_scale();
  auto x = SpacetimePoint::hyperboloid(2.0, {1.0, 0.0, 0.0, 0.0});
  auto xp = SpacetimePoint::hyperboloid(1.0, {1.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(open_flrw_gret(unit, x, xp), std::domain_error);
}

TEST(ClosedFlrwGsym, DustWindingCensus) {
  auto dust = ScaleFactorModel::dust(1);  // T = 2 pi
  auto q1 = SpacetimePoint::sphere(1.0, {1.0, 0.0, 0.0, 0.0});
  auto q2 = SpacetimePoint::sphere(2.0, {0.0, 1.0, 0.0, 0.0});  // s = pi/2
  auto w = closed_flrw_gsym(dust, q1, q2);
  ASSERT_EQ(w.terms.size(), 2u);
  EXPECT_EQ(w.terms[0].n, -1);
  EXPECT_EQ(w.terms[1].n, 0);
  EXPECT_NEAR(w.terms[0].radius, 2.0 * M_PI - M_PI / 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(w.terms[0].sign, -1.0);
  EXPECT_DOUBLE_EQ(w.terms[1].sign, 1.0);
  // amplitude -(1/4 pi)(s + 2 pi n)/sin(s)
  EXPECT_NEAR(w.term_amplitude(1), -(M_PI / 2.0) / (4.0 * M_PI), 1e-14);
}

TEST(ClosedFlrwGsym, RadiationExcludesFarImages) {
  auto rad = ScaleFactorModel::radiation(1);  // T = pi
  auto q1 = SpacetimePoint::sphere(0.5, {1.0, 0.0, 0.0, 0.0});
  auto q2 = SpacetimePoint::sphere(1.0, {0.0, 1.0, 0.0, 0.0});  // s = pi/2
  auto w = closed_flrw_gsym(rad, q1, q2);
  ASSERT_EQ(w.terms.size(), 1u);
  EXPECT_EQ(w.terms[0].n, 0);
}

TEST(ClosedFlrwGsym, TermCountBound) {
  auto dust = ScaleFactorModel::dust(1);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  int max_terms = static_cast<int>(std::floor(dust.T() / M_PI)) + 1;
  for (int it = 0; it < 300; ++it) {
    std::array<double, 4> a{n(rng), n(rng), n(rng), n(rng)};
    std::array<double, 4> b{n(rng), n(rng), n(rng), n(rng)};
    double na = std::sqrt(mtve::geometry::dot4(a, a));
    double nb = std::sqrt(mtve::geometry::dot4(b, b));
    for (auto& c : a) c /= na;
    for (auto& c : b) c /= nb;
    auto w = closed_flrw_gsym(dust, SpacetimePoint::sphere(1.0, a),
                              SpacetimePoint::sphere(2.0, b));
    EXPECT_LE(static_cast<int>(w.terms.size()), max_terms);
  }
}

TEST(ClosedFlrwGsym, SingularAmplitudeFlag) {
  auto dust = ScaleFactorModel::dust(1);
  auto q = SpacetimePoint::sphere(1.0, {1.0, 0.0, 0.0, 0.0});
  auto w = closed_flrw_gsym(dust, q, q);
  EXPECT_TRUE(w.singular_amplitude);
  EXPECT_THROW(w.term_amplitude(0), std::domain_error);
}

TEST(ConformalTransform, IdentityInOneDimension) {
  GreensValue g;
  g.regular = 0.5;
  auto out = conformal_transform_greens(g, 7.0, 3.0, 1);
  EXPECT_DOUBLE_EQ(out.regular, 0.5);
}

TEST(ConformalTransform, ScalesDeltaAndRegular) {
  GreensValue g;
  g.regular = 1.0;
  g.lightcone_delta_coeff = 2.0;
  auto out = conformal_transform_greens(g, 2.0, 2.0, 3);
  EXPECT_DOUBLE_EQ(out.regular, 0.25);
  EXPECT_DOUBLE_EQ(out.lightcone_delta_coeff, 0.5);
  EXPECT_THROW(conformal_transform_greens(g, -1.0, 2.0, 3), std::domain_error);
}

TEST(TransformMass, Values) {
  EXPECT_DOUBLE_EQ(transform_mass(0.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(transform_mass(1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(transform_mass(3.0, 0.5), 6.0);
  EXPECT_THROW(transform_mass(1.0, 0.0), std::domain_error);
}
