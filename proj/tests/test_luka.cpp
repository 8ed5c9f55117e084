#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "luka_fixtures.hpp"
#include "tapered/luka.hpp"

using namespace tapered;
using namespace luka_fixtures;

TEST(LukaGradients, ConstantFramesGiveZero)
{
  Frame f(8, 6);
  f.pixels.fill(77);
  const auto g = gradients(f, f, 3, PositFormat{});
  for (Eigen::Index i = 0; i < g.ix.size(); ++i) {
    EXPECT_TRUE(g.ix.data()[i].is_zero());
    EXPECT_TRUE(g.iy.data()[i].is_zero());
    EXPECT_TRUE(g.it.data()[i].is_zero());
  }
}

TEST(LukaGradients, Ramp)
{
  Frame f1(12, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 12; ++x) f1.at(x, y) = static_cast<std::uint8_t>(3 * x + 10);
  }
  const Frame f2 = shift_right(f1);
  const auto g = gradients(f1, f2, 1, ReferenceFormat{});
  for (int y = 0; y < 5; ++y) {
    for (int x = 1; x < 11; ++x) {
      EXPECT_EQ(g.ix(y, x), 3.0);
      EXPECT_EQ(g.iy(y, x), 0.0);
      EXPECT_EQ(g.it(y, x), -3.0);
    }
  }
  const auto gp = gradients(f1, f2, 1, PositFormat{});
  EXPECT_EQ(to_double(gp.ix(2, 5)), 3.0);
  EXPECT_EQ(to_double(gp.it(2, 5)), -3.0);
}

TEST(LukaGradients, InputValidation)
{
  EXPECT_THROW(gradients(Frame(5, 5), Frame(5, 6), 1, ReferenceFormat{}), std::invalid_argument);
  EXPECT_THROW(gradients(Frame(2, 5), Frame(2, 5), 1, ReferenceFormat{}), std::invalid_argument);
}

TEST(LukaFlow, MatchesIndependentOracleBitForBit)
{
  const auto fx = fixtures();
  ASSERT_GE(fx.size(), 5u);
  for (std::size_t k = 0; k < fx.size(); ++k) {
    for (int norm : {1, 7, 32, 255}) {
      for (int r : {1, 2}) {
        const auto& [f1, f2] = fx[k];
        const auto got = flow(f1, f2, norm, FlowOptions{r, 1e-9, 1}, ReferenceFormat{});
        const auto want = oracle_flow(f1, f2, norm, r);
        for (int y = 0; y < want.h; ++y) {
          for (int x = 0; x < want.w; ++x) {
            const int i = y * want.w + x;
            ASSERT_EQ(got.status(y, x), want.status[i]) << k << " " << x << "," << y;
            ASSERT_TRUE(same_bits(got.u(y, x), want.u[i])) << k << " " << x << "," << y;
            ASSERT_TRUE(same_bits(got.v(y, x), want.v[i])) << k << " " << x << "," << y;
          }
        }
      }
    }
  }
}

TEST(LukaFlow, TranslatedXYTextureRecoversUnitShift)
{
  const auto [f1, f2] = xy_texture(15);
  const auto f = flow(f1, f2, 1, FlowOptions{}, ReferenceFormat{});
  int checked = 0;
  for (int y = 2; y < 13; ++y) {
    for (int x = 2; x < 13; ++x) {
      ASSERT_EQ(f.status(y, x), FlowStatus::Ok);
      EXPECT_LE(std::fabs(f.u(y, x) - 1.0), 1e-10);
      EXPECT_LE(std::fabs(f.v(y, x)), 1e-10);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 121);
  // Integer data keeps every intermediate exact.
  EXPECT_EQ(f.u(7, 7), 1.0);
  EXPECT_EQ(f.v(7, 7), 0.0);
}

TEST(LukaFlow, OuterBandIsSingular)
{
  const auto [f1, f2] = xy_texture(15);
  const auto f = flow(f1, f2, 1, FlowOptions{3, 1e-9, 1}, ReferenceFormat{});
  for (int y = 0; y < 15; ++y) {
    for (int x = 0; x < 15; ++x) {
      const bool band = x < 3 || y < 3 || x > 11 || y > 11;
      if (!band) continue;
      EXPECT_EQ(f.status(y, x), FlowStatus::Singular);
      EXPECT_EQ(f.u(y, x), 0.0);
      EXPECT_EQ(f.v(y, x), 0.0);
    }
  }
}

TEST(LukaSolve, AgreesWithLeastSquares)
{
  const auto n = noise_frame(40, 40, 21);
  const auto m = noise_frame(40, 40, 22);
  const ReferenceFormat ref;
  for (int norm : {1, 255}) {
    const auto g = gradients(n, m, norm, ref);
    const auto f = flow(n, m, norm, FlowOptions{}, ref);
    for (int y = 2; y < 38; ++y) {
      for (int x = 2; x < 38; ++x) {
        Eigen::Matrix<double, 25, 2> a;
        Eigen::Matrix<double, 25, 1> b;
        int row = 0;
        for (int wy = y - 2; wy <= y + 2; ++wy) {
          for (int wx = x - 2; wx <= x + 2; ++wx, ++row) {
            a(row, 0) = g.ix(wy, wx);
            a(row, 1) = g.iy(wy, wx);
            b(row) = -g.it(wy, wx);
          }
        }
        const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
        ASSERT_EQ(f.status(y, x), FlowStatus::Ok);
        const double scale = 1.0 + sol.cwiseAbs().maxCoeff();
        EXPECT_LE(std::fabs(f.u(y, x) - sol(0)), 1e-12 * scale) << x << "," << y;
        EXPECT_LE(std::fabs(f.v(y, x) - sol(1)), 1e-12 * scale) << x << "," << y;
        const auto s = solve_window(g, x, y, 2, ref);
        EXPECT_EQ(s.u, f.u(y, x));
        EXPECT_EQ(s.v, f.v(y, x));
      }
    }
  }
}

TEST(LukaSolve, DegenerateWindows)
{
  Frame f(9, 9);
  f.pixels.fill(120);
  const auto g = gradients(f, f, 1, ReferenceFormat{});
  const auto s = solve_window(g, 4, 4, 2, ReferenceFormat{});
  EXPECT_EQ(s.status, FlowStatus::Singular);
  EXPECT_EQ(s.u, 0.0);
  EXPECT_EQ(s.v, 0.0);
  EXPECT_EQ(solve_window(g, 1, 4, 2, ReferenceFormat{}).status, FlowStatus::Singular);
  EXPECT_THROW(solve_window(g, 4, 4, -1, ReferenceFormat{}), std::invalid_argument);

  // A ramp only constrains u: aperture problem.
  Frame r(9, 9);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) r.at(x, y) = static_cast<std::uint8_t>(10 * x);
  }
  const auto gr = gradients(r, shift_right(r), 1, ReferenceFormat{});
  EXPECT_EQ(solve_window(gr, 4, 4, 2, ReferenceFormat{}).status, FlowStatus::Singular);
}

TEST(LukaFlow, TransposeSwapsComponents)
{
  const auto n = noise_frame(21, 21, 31);
  const auto m = noise_frame(21, 21, 32);
  for (int norm : {1, 2, 16}) {
    const auto f = flow(n, m, norm, FlowOptions{}, ReferenceFormat{});
    const auto t = flow(transpose(n), transpose(m), norm, FlowOptions{}, ReferenceFormat{});
    for (int y = 0; y < 21; ++y) {
      for (int x = 0; x < 21; ++x) {
        ASSERT_EQ(f.status(y, x), t.status(x, y));
        ASSERT_EQ(f.u(y, x), t.v(x, y));
        ASSERT_EQ(f.v(y, x), t.u(x, y));
      }
    }
  }
}

TEST(LukaFlow, ZeroMotionNeverInventsExceptions)
{
  // Gentle texture: no window sum can overflow any format at any norm.
  Frame f(14, 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 14; ++x) f.at(x, y) = static_cast<std::uint8_t>(100 + (x * 3 + y * 5) % 4);
  }
  const AnyFormat formats[] = {ReferenceFormat{}, PositFormat{PositConfig{16, 2}}, PositFormat{PositConfig{16, 1}},
                               Binary16Format{}, FixedQ16Format{}};
  for (const auto& fmt : formats) {
    for (int norm = 1; norm <= 255; ++norm) {
      const auto r = flow_any(f, f, norm, FlowOptions{}, fmt);
      for (Eigen::Index i = 0; i < r.u.size(); ++i) {
        ASSERT_NE(r.status.data()[i], FlowStatus::Exception) << format_name(fmt) << " norm " << norm;
        ASSERT_EQ(r.u.data()[i], 0.0);
        ASSERT_EQ(r.v.data()[i], 0.0);
      }
    }
  }
}

TEST(LukaFlow, ZeroMotionPositOnBrightSphere)
{
  SphereSceneParams p;
  p.width = p.height = 48;
  p.radius = 20;
  const auto s = gen_sphere(p);
  for (int norm = 1; norm <= 255; norm += 11) {
    const auto r = flow_any(s[0], s[0], norm, FlowOptions{}, PositFormat{});
    EXPECT_EQ((r.status == FlowStatus::Exception).count(), 0) << norm;
    EXPECT_EQ((r.u != 0.0).count(), 0) << norm;
  }
}

TEST(LukaFlow, Binary16OverflowsAtNormOne)
{
  const auto s = gen_sphere(SphereSceneParams{});
  const auto low = flow(s[0], s[1], 1, FlowOptions{}, Binary16Format{});
  EXPECT_GT((low.status == FlowStatus::Exception).count(), 0);
  const auto high = flow(s[0], s[1], 32, FlowOptions{}, Binary16Format{});
  EXPECT_EQ((high.status == FlowStatus::Exception).count(), 0);
}

TEST(LukaFlow, ThreadCountDoesNotChangeResults)
{
  const auto n = noise_frame(37, 29, 41);
  const auto m = noise_frame(37, 29, 42);
  const AnyFormat formats[] = {ReferenceFormat{}, PositFormat{}, Binary16Format{}, FixedQ16Format{}};
  for (const auto& fmt : formats) {
    const auto one = flow_any(n, m, 9, FlowOptions{2, 1e-9, 1}, fmt);
    for (unsigned threads : {2u, 3u, 8u}) {
      const auto many = flow_any(n, m, 9, FlowOptions{2, 1e-9, threads}, fmt);
      for (Eigen::Index i = 0; i < one.u.size(); ++i) {
        ASSERT_TRUE(same_bits(one.u.data()[i], many.u.data()[i]));
        ASSERT_TRUE(same_bits(one.v.data()[i], many.v.data()[i]));
        ASSERT_EQ(one.status.data()[i], many.status.data()[i]);
      }
    }
  }
}

TEST(LukaFlow, SphereFlowOnDiskOnly)
{
  const auto s = gen_sphere(SphereSceneParams{});
  const auto f = flow(s[0], s[1], 255, FlowOptions{}, ReferenceFormat{});
  const double cx = 99.5, cy = 99.5;
  int moving = 0;
  for (int y = 0; y < 200; ++y) {
    for (int x = 0; x < 200; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (d > 80 + 4) {
        EXPECT_EQ(f.u(y, x), 0.0);
        EXPECT_EQ(f.v(y, x), 0.0);
      } else if (d < 60 && f.status(y, x) == FlowStatus::Ok && f.u(y, x) != 0.0) {
        ++moving;
      }
    }
  }
  EXPECT_GT(moving, 1000);
}

TEST(LukaFlow, TapSeesEveryArithmeticResult)
{
  ValueTap tap;
  Frame f(6, 6);
  f.pixels.fill(50);
  const auto r = flow(f, f, 5, FlowOptions{1, 1e-9, 4}, ReferenceFormat{&tap});
  EXPECT_GT(tap.size(), 0u);
  // Constant frames: only the normalized value and zeros appear.
  EXPECT_EQ(tap_unique_values(tap), (std::vector<double>{0.0, 10.0}));
  EXPECT_EQ((r.status == FlowStatus::Singular).count(), 36);
}
