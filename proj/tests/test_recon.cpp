#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "support.hpp"

using namespace hsi;

namespace {
SensingOperator make_phi(LayoutKind kind, std::size_t fpa, std::size_t bands, std::size_t edge, int f,
                         std::uint64_t seed = 1) {
  LayoutSpec s;
  s.kind = kind;
  s.rows = s.cols = fpa;
  s.bands = bands;
  s.edge = edge;
  s.seed = seed;
  return SensingOperator(make_layout(s), f);
}

// Brute-force nearest pixel of band b, ties to lowest row then column.
HyperCube naive_reference(const Image& y, const FilterLayout& l) {
  HyperCube out(y.rows(), y.cols(), l.bands());
  for (std::size_t b = 0; b < l.bands(); ++b)
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) {
        long long best = std::numeric_limits<long long>::max();
        double v = 0;
        for (std::size_t a = 0; a < y.rows(); ++a)
          for (std::size_t c = 0; c < y.cols(); ++c) {
            if (l.band_at(a, c) != b) continue;
            const long long di = (long long)a - (long long)i, dj = (long long)c - (long long)j;
            if (di * di + dj * dj < best) {  // row-major scan keeps the first minimum
              best = di * di + dj * dj;
              v = y(a, c);
            }
          }
        out(i, j, b) = v;
      }
  return out;
}
}  // namespace

TEST(StepSize, ZeroResidual) {
  const auto phi = make_phi(LayoutKind::mosaic, 8, 4, 2, 2);
  const StepSize s = step_size(phi, Image(8, 8));
  EXPECT_EQ(s.tau, 0.0);
  EXPECT_TRUE(s.converged);
}

TEST(StepSize, FactorOneIsUnitStep) {
  const auto phi = make_phi(LayoutKind::random, 16, 16, 4, 1, 3);
  const StepSize s = step_size(phi, support::random_image(16, 16, 2));
  EXPECT_NEAR(s.tau, 1.0, 1e-14);
  EXPECT_FALSE(s.converged);
}

TEST(StepSize, MinimizesLineObjective) {
  const auto phi = make_phi(LayoutKind::random, 16, 4, 2, 2, 5);
  const HyperCube x = support::random_cube(8, 8, 4, 1);
  const Image y = support::random_image(16, 16, 2);
  Image r = phi.forward(x);
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = y[p] - r[p];
  const double tau = step_size(phi, r).tau;
  const HyperCube g = phi.adjoint(r);
  auto q = [&](double t) {
    HyperCube z = x;
    for (std::size_t p = 0; p < z.size(); ++p) z[p] += t * g[p];
    const Image pz = phi.forward(z);
    double s = 0;
    for (std::size_t p = 0; p < pz.size(); ++p) s += (y[p] - pz[p]) * (y[p] - pz[p]);
    return s;
  };
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    EXPECT_LE(q(tau), q(tau * (1 + eps)));
    EXPECT_LE(q(tau), q(tau * (1 - eps)));
  }
}

TEST(KSchedule, DegenerateDistributionClampsToOne) {
  std::vector<double> a(100, 2.0);
  a[3] = -2.0;
  const auto c = log_magnitude_counts(a);
  EXPECT_EQ(c.k_initial, 0u);
  EXPECT_EQ(c.k_final, 0u);
  const auto ks = k_schedule(c.k_initial, c.k_final, 10);
  for (auto k : ks) EXPECT_EQ(k, 1u);
  EXPECT_THROW(log_magnitude_counts(std::vector<double>(5, 0.0)), NumericalError);
}

TEST(KSchedule, SingleIterationUsesFinal) {
  EXPECT_EQ(k_schedule(5, 40, 1), (std::vector<std::size_t>{40}));
  EXPECT_THROW(k_schedule(5, 40, 0), ConfigError);
}

TEST(KSchedule, LinearAndGeometricShapes) {
  const auto lin = k_schedule(10, 1000, 200);
  ASSERT_EQ(lin.size(), 200u);
  EXPECT_EQ(lin.front(), 10u);
  EXPECT_EQ(lin.back(), 1000u);
  EXPECT_EQ(lin[100], static_cast<std::size_t>(std::llround(10 + 990.0 * 100 / 199)));
  const auto geo = k_schedule(10, 1000, 200, KScheduleShape::geometric);
  EXPECT_EQ(geo.front(), 10u);
  EXPECT_EQ(geo.back(), 1000u);
  for (std::size_t s = 1; s < 200; ++s) {
    EXPECT_GE(lin[s], lin[s - 1]);
    EXPECT_GE(geo[s], geo[s - 1]);
  }
  EXPECT_LT(geo[100], lin[100]);
}

TEST(KSchedule, LogNormalCounts) {
  RandomStream rng(42, "lognormal");
  std::vector<double> a(10000), z(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    z[i] = rng.normal();
    a[i] = (i % 2 ? -1.0 : 1.0) * std::exp(z[i]);
  }
  const auto c = log_magnitude_counts(a);
  const auto o = oracle::log_counts(a);
  EXPECT_EQ(c.k_initial, o.above_2_5);
  EXPECT_EQ(c.k_final, o.above_1);
  std::size_t z25 = 0, z1 = 0;
  for (double v : z) {
    z25 += v > 2.5;
    z1 += v > 1.0;
  }
  EXPECT_NEAR(double(c.k_initial), double(z25), 20.0);
  EXPECT_NEAR(double(c.k_final), double(z1), 120.0);
}

TEST(KSchedule, RoundingResidueIsIgnored) {
  std::vector<double> a{1.0, 0.5, 0.25, 1e-20, -1e-19};
  const auto c = log_magnitude_counts(a);
  const auto o = oracle::log_counts({1.0, 0.5, 0.25});
  EXPECT_EQ(c.k_initial, o.above_2_5);
  EXPECT_EQ(c.k_final, o.above_1);
}

TEST(Piht, ConstantCubeIsFixedPoint) {
  const auto phi = make_phi(LayoutKind::random, 16, 4, 2, 2, 2);
  const AnalysisDictionary A(8, 8, 4);
  const HyperCube x(8, 8, 4, 0.4);
  const Image y = phi.forward(x);
  PihtConfig cfg;
  cfg.iterations = 20;
  cfg.x_max = 1.0;
  cfg.stop_on_convergence = false;
  int calls = 0;
  cfg.observer = [&](int, const HyperCube& xs) {
    ++calls;
    for (std::size_t p = 0; p < xs.size(); ++p) ASSERT_NEAR(xs[p], 0.4, 1e-13);
  };
  const auto rep = piht(phi, A, y, x, cfg);
  EXPECT_EQ(calls, 20);
  EXPECT_EQ(rep.iterations, 20);
  EXPECT_EQ(rep.residuals.size(), 20u);
  for (auto k : rep.ks) EXPECT_EQ(k, 1u);
}

TEST(Piht, ZeroDataStaysZero) {
  const auto phi = make_phi(LayoutKind::mosaic, 8, 4, 2, 1);
  const AnalysisDictionary A(8, 8, 4);
  PihtConfig cfg;
  cfg.iterations = 5;
  cfg.stop_on_convergence = false;
  const auto rep = piht(phi, A, Image(8, 8), HyperCube(8, 8, 4), cfg);
  for (double v : rep.cube.storage()) EXPECT_EQ(v, 0.0);
  for (double r : rep.residuals) EXPECT_EQ(r, 0.0);
  EXPECT_EQ(rep.ks.front(), A.coef_size());
}

TEST(Piht, ImprovesOnInitializationAndReportsConsistently) {
  PhantomSpec ps;
  ps.rows = ps.cols = 32;
  ps.bands = 4;
  ps.seed = 3;
  const HyperCube x = make_phantom(ps);
  const auto phi = make_phi(LayoutKind::random, 64, 4, 2, 2, 3);
  const Image y = phi.forward(x);
  const HyperCube x0 = interp3d_init(y, phi.layout(), 32, 32);
  PihtConfig cfg;
  cfg.iterations = 60;
  const auto rep = piht(phi, AnalysisDictionary(32, 32, 4), y, x0, cfg);
  EXPECT_GT(snr_db(x, rep.cube), snr_db(x, x0) + 1.0);
  EXPECT_EQ(rep.residuals.size(), static_cast<std::size_t>(rep.iterations));
  EXPECT_EQ(rep.taus.size(), rep.residuals.size());
  EXPECT_EQ(rep.ks.size(), rep.residuals.size());
  for (double v : rep.cube.storage()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, *std::max_element(y.storage().begin(), y.storage().end()));
  }
}

TEST(Piht, Validation) {
  const auto phi = make_phi(LayoutKind::mosaic, 8, 4, 2, 2);
  const AnalysisDictionary A(4, 4, 4);
  PihtConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(piht(phi, A, Image(8, 8), HyperCube(4, 4, 4), cfg), ConfigError);
  cfg.iterations = 3;
  EXPECT_THROW(piht(phi, A, Image(8, 8), HyperCube(8, 8, 4), cfg), DimensionError);
  EXPECT_THROW(piht(phi, AnalysisDictionary(8, 8, 4), Image(8, 8), HyperCube(4, 4, 4), cfg), DimensionError);
}

TEST(Naive, OwnedPixelsPassThroughAndMatchBruteForce) {
  for (auto kind : {LayoutKind::mosaic, LayoutKind::random}) {
    const auto phi = make_phi(kind, 16, 16, 4, 1, 8);
    const Image y = support::random_image(16, 16, 3);
    const HyperCube d = naive_demosaic(y, phi.layout());
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(d(i, j, phi.layout().band_at(i, j)), y(i, j));
    EXPECT_EQ(d.storage(), naive_reference(y, phi.layout()).storage());
  }
}

TEST(Naive, ConstantFpa) {
  const auto phi = make_phi(LayoutKind::random, 12, 9, 3, 1, 2);
  const HyperCube d = naive_demosaic(Image(12, 12, std::vector<double>(144, 0.25)), phi.layout());
  for (double v : d.storage()) {
    EXPECT_EQ(v, 0.25);
  }
}

TEST(Interp3d, ConstantSceneAtAnyTarget) {
  const auto phi = make_phi(LayoutKind::random, 16, 16, 4, 1, 2);
  const Image y(16, 16, std::vector<double>(256, 0.7));
  for (std::size_t n : {16u, 8u, 4u}) {
    const HyperCube x0 = interp3d_init(y, phi.layout(), n, n);
    ASSERT_EQ(x0.rows(), n);
    for (double v : x0.storage()) EXPECT_NEAR(v, 0.7, 1e-15);
  }
}

TEST(Interp3d, MatchesScriptedReference) {
  const auto phi = make_phi(LayoutKind::random, 8, 4, 2, 2, 4);
  const auto& l = phi.layout();
  const Image y = support::random_image(8, 8, 5);
  // stage 1: nearest fill
  const HyperCube fill = naive_reference(y, l);
  // stage 2: [1/4 1/2 1/4] along j, i, then band, mirrored borders; measured samples restored
  auto at = [](const HyperCube& c, long long i, long long j, long long b) {
    auto m = [](long long k, long long n) { return k < 0 ? -k - 1 : (k >= n ? 2 * n - k - 1 : k); };
    return c(m(i, c.rows()), m(j, c.cols()), m(b, c.bands()));
  };
  HyperCube s1 = fill, s2 = fill, s3 = fill;
  for (long long b = 0; b < 4; ++b)
    for (long long i = 0; i < 8; ++i)
      for (long long j = 0; j < 8; ++j)
        s1(i, j, b) = 0.25 * at(fill, i, j - 1, b) + 0.5 * at(fill, i, j, b) + 0.25 * at(fill, i, j + 1, b);
  for (long long b = 0; b < 4; ++b)
    for (long long i = 0; i < 8; ++i)
      for (long long j = 0; j < 8; ++j)
        s2(i, j, b) = 0.25 * at(s1, i - 1, j, b) + 0.5 * at(s1, i, j, b) + 0.25 * at(s1, i + 1, j, b);
  for (long long b = 0; b < 4; ++b)
    for (long long i = 0; i < 8; ++i)
      for (long long j = 0; j < 8; ++j)
        s3(i, j, b) = 0.25 * at(s2, i, j, b - 1) + 0.5 * at(s2, i, j, b) + 0.25 * at(s2, i, j, b + 1);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) s3(i, j, l.band_at(i, j)) = y(i, j);
  // stage 3: row-normalized transpose of the Lanczos upsampler, per band
  const oracle::Mat D = oracle::kron(oracle::row_normalized_transpose(oracle::lanczos_up(4, 2)),
                                     oracle::row_normalized_transpose(oracle::lanczos_up(4, 2)));
  const HyperCube got = interp3d_init(y, l, 4, 4);
  for (std::size_t b = 0; b < 4; ++b) {
    const auto want = D * support::vec(s3.band(b));
    for (std::size_t p = 0; p < 16; ++p) EXPECT_NEAR(got.band(b)[p], want[p], 1e-14);
  }
}
