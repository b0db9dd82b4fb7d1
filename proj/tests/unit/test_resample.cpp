#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "torsoseg/resample.hpp"

using namespace torsoseg;
namespace ts = torsoseg::testing;

TEST(Resample, OntoOwnGridIsIdentity) {
  std::mt19937_64 rng(5);
  Image img(GridSpec::axis_aligned({6, 7, 8}, Vec3(1.4, 1.4, 3.0), Vec3(-3, 4, 5)));
  std::normal_distribution<float> n;
  for (auto& v : img.values()) v = n(rng);
  EXPECT_EQ(resample(img, img.grid(), Interpolation::trilinear), img);
  EXPECT_EQ(resample(img, img.grid(), Interpolation::nearest), img);
  const auto labels = ts::random_labels({6, 7, 8}, 5, rng);
  EXPECT_EQ(resample(labels, labels.grid(), Interpolation::nearest), labels);
}

TEST(Resample, ConstantImageStaysConstantWhenUpsampled) {
  Image img(GridSpec::axis_aligned({5, 5, 5}, Vec3(2, 2, 2)), 3.25f);
  const auto fine = respaced_grid(img.grid(), Vec3(1, 1, 1));
  EXPECT_EQ(fine.shape(), (Shape3{10, 10, 10}));  // 10 mm extent, faces aligned
  Mask coverage;
  const auto out = resample(img, fine, Interpolation::trilinear, &coverage);
  for (std::int64_t i = 0; i < out.size(); ++i) {
    ASSERT_EQ(coverage[i], 1);
    ASSERT_NEAR(out[i], 3.25f, 1e-6f);
  }
}

TEST(Resample, TrilinearRefusedForLabelmaps) {
  LabelMap l(GridSpec::axis_aligned({2, 2, 2}, Vec3::Ones()));
  EXPECT_THROW(resample(l, l.grid(), Interpolation::trilinear), ValidationError);
}

TEST(Resample, OutOfBoundsReadsZero) {
  Image img(GridSpec::axis_aligned({4, 4, 4}, Vec3::Ones()), 1.0f);
  const auto shifted = GridSpec::axis_aligned({4, 4, 4}, Vec3::Ones(), Vec3(10, 0, 0));
  Mask coverage;
  const auto out = resample(img, shifted, Interpolation::trilinear, &coverage);
  EXPECT_EQ(count_nonzero(out), 0);
  EXPECT_EQ(count_nonzero(coverage), 0);
  // Half a voxel beyond the last centre is still inside (edge clamped).
  const auto half = GridSpec::axis_aligned({1, 1, 1}, Vec3::Ones(), Vec3(3.5, 0, 0));
  EXPECT_EQ(resample(img, half, Interpolation::nearest)[0], 1.0f);
}

TEST(Resample, TrilinearMatchesHandComputedMidpoint) {
  Image img(GridSpec::axis_aligned({2, 1, 1}, Vec3::Ones()), std::vector<float>{2.0f, 4.0f});
  const auto mid = GridSpec::axis_aligned({1, 1, 1}, Vec3::Ones(), Vec3(0.25, 0, 0));
  EXPECT_NEAR(resample(img, mid, Interpolation::trilinear)[0], 2.5f, 1e-6f);
}

TEST(Resample, NearestProducesOnlySourceValues) {
  std::mt19937_64 rng(6);
  const auto labels = ts::random_labels({9, 9, 9}, 7, rng);
  Affine a = Affine::Identity();
  a.topLeftCorner<3, 3>() = Eigen::AngleAxisd(0.4, Vec3(0, 0, 1)).toRotationMatrix() * 0.7;
  const auto out = resample(labels, GridSpec(Shape3{12, 12, 12}, a), Interpolation::nearest);
  std::set<std::int32_t> src(labels.values().begin(), labels.values().end());
  src.insert(0);
  for (const auto v : out.values()) ASSERT_TRUE(src.count(v));
}

// Volume bookkeeping oracle: blobs of >= 10^3 voxels keep their physical
// volume within 15% when downsampled 2x with nearest interpolation.
TEST(Resample, NearestDownsampleConservesBlobVolume) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> centre(14.0, 34.0), radius(6.5, 12.0);
  for (int trial = 0; trial < 20; ++trial) {
    LabelMap l(GridSpec::axis_aligned({48, 48, 48}, Vec3::Ones()));
    for (int c = 1; c <= 3; ++c) {
      const Vec3 m(centre(rng), centre(rng), centre(rng));
      const double r = radius(rng);
      for (std::int64_t z = 0; z < 48; ++z)
        for (std::int64_t y = 0; y < 48; ++y)
          for (std::int64_t x = 0; x < 48; ++x)
            if ((Vec3(double(x), double(y), double(z)) - m).norm() <= r) l(x, y, z) = c;
    }
    std::map<int, double> expected, got;
    for (const auto v : l.values())
      if (v) expected[v] += 1.0;
    const auto coarse = resample(l, respaced_grid(l.grid(), Vec3(2, 2, 2)), Interpolation::nearest);
    for (const auto v : coarse.values())
      if (v) got[v] += 8.0;
    for (const auto& [c, vol] : expected) {
      if (vol < 1000) continue;
      EXPECT_NEAR(got[c] / vol, 1.0, 0.15) << "class " << c << " trial " << trial;
    }
  }
}

TEST(Elastic, ZeroSigmaIsExactIdentity) {
  std::mt19937_64 rng(8);
  Image img(GridSpec::axis_aligned({10, 11, 12}, Vec3(1.4, 1.4, 3)));
  std::normal_distribution<float> n;
  for (auto& v : img.values()) v = n(rng);
  const auto labels = ts::random_labels({10, 11, 12}, 4, rng);
  EXPECT_EQ(elastic_deform(img, {32.0, 0.0, 99}, Interpolation::trilinear), img);
  EXPECT_EQ(elastic_deform(labels, {32.0, 0.0, 99}, Interpolation::nearest), labels);
}

TEST(Elastic, SameSeedIsBitIdentical) {
  std::mt19937_64 rng(9);
  Image img(GridSpec::axis_aligned({16, 16, 16}, Vec3(2, 2, 2)));
  std::normal_distribution<float> n;
  for (auto& v : img.values()) v = n(rng);
  const ElasticParams p{16.0, 4.0, 1234};
  const auto a = elastic_deform(img, p, Interpolation::trilinear);
  const auto b = elastic_deform(img, p, Interpolation::trilinear);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == img);
  auto q = p;
  q.seed = 1235;
  EXPECT_FALSE(elastic_deform(img, q, Interpolation::trilinear) == a);
}

TEST(Elastic, LabelsStayWithinSourceValues) {
  std::mt19937_64 rng(10);
  const auto labels = ts::random_labels({12, 12, 12}, 6, rng);
  const auto out = elastic_deform(labels, {16.0, 6.0, 3}, Interpolation::nearest);
  for (const auto v : out.values()) ASSERT_TRUE(v >= 0 && v <= 6);
}

TEST(Elastic, FieldInterpolatesControlLattice) {
  // Corner control points coincide with corner voxels, so the field is
  // continuous and bounded by the largest control displacement.
  const auto grid = GridSpec::axis_aligned({33, 17, 9}, Vec3(2, 2, 4));
  const auto field = elastic_field(grid, {32.0, 4.0, 5});
  EXPECT_GT(field.max_magnitude(), 0.0);
  for (int a = 0; a < 3; ++a)
    for (std::int64_t x = 1; x < 33; ++x)
      ASSERT_LT(std::abs(field.mm[a][x] - field.mm[a][x - 1]), 4.0 * 5);
}

// Empirical bound: |d| <= 5 sigma over 1000 seeded draws with the default
// parameters on a 64 x 64 x 32 grid at (2, 2, 3) mm.
TEST(Elastic, DisplacementWithinFiveSigmaOver1000Seeds) {
  const auto grid = GridSpec::axis_aligned({64, 64, 32}, Vec3(2, 2, 3));
  double observed = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const ElasticParams p{32.0, 4.0, seed};
    observed = std::max(observed, elastic_field(grid, p).max_magnitude());
  }
  RecordProperty("observed_max_mm", std::to_string(observed));
  std::cout << "observed max displacement over 1000 seeds: " << observed << " mm (bound " << 5 * 4.0 << ")\n";
  EXPECT_LE(observed, 5 * 4.0);
}

TEST(Elastic, RejectsBadParameters) {
  const auto grid = GridSpec::axis_aligned({4, 4, 4}, Vec3::Ones());
  EXPECT_THROW(elastic_field(grid, {0.0, 1.0, 0}), ValidationError);
  EXPECT_THROW(elastic_field(grid, {10.0, -1.0, 0}), ValidationError);
}
