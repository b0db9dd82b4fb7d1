#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "torsoseg/orientation.hpp"
#include "torsoseg/quadrants.hpp"

using namespace torsoseg;
namespace ts = torsoseg::testing;

namespace {

// Bright cylinder along z, radius r voxels, centred in-plane.
Image cylinder(Shape3 shape, const Vec3& spacing, double r, float value = 100.0f) {
  Image img(GridSpec::axis_aligned(shape, spacing));
  const double cx = double(shape[0] - 1) / 2, cy = double(shape[1] - 1) / 2;
  for (std::int64_t z = 0; z < shape[2]; ++z)
    for (std::int64_t y = 0; y < shape[1]; ++y)
      for (std::int64_t x = 0; x < shape[0]; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img(x, y, z) = value;
  return img;
}

}  // namespace

TEST(IsoGrid, PaperGeometry) {
  // "a downscaled 4 mm isometric image with a large FOV (96 pixels; 384 mm in all directions)".
  const IsoGridParams p;
  EXPECT_EQ(p.size, 96);
  EXPECT_DOUBLE_EQ(p.spacing_mm, 4.0);
  EXPECT_DOUBLE_EQ(p.spacing_mm * double(p.size), 384.0);
  const auto img = cylinder({60, 60, 40}, Vec3(1.4, 1.4, 3.0), 20);
  const auto iso = to_iso4(img);
  EXPECT_EQ(iso.shape(), (Shape3{96, 96, 96}));
  EXPECT_LT((iso.spacing() - Vec3::Constant(4.0)).norm(), 1e-12);
}

TEST(IsoGrid, CentredIsoInputIsIdentity) {
  Image img(GridSpec::axis_aligned({96, 96, 96}, Vec3::Constant(4.0), Vec3(-190, -150, 20)), 1.0f);
  img(3, 4, 5) = 7.0f;
  img(92, 91, 90) = 7.0f;
  EXPECT_EQ(to_iso4(img), img);
}

TEST(IsoGrid, LargeInputCroppedAboutCentroid) {
  // 600 mm cube with a foreground blob off-centre; the output centre lands on
  // the blob centroid.
  Image img(GridSpec::axis_aligned({150, 150, 150}, Vec3::Constant(4.0)));
  ts::fill_box<float>(img, {20, 30, 100}, {39, 49, 119}, 5.0f);
  const auto iso = to_iso4(img);
  const Vec3 blob_centre = img.grid().to_world(Vec3(29.5, 39.5, 109.5));
  const Vec3 iso_centre = iso.grid().to_world(Vec3::Constant(47.5));
  EXPECT_LT((iso_centre - blob_centre).cwiseAbs().maxCoeff(), 4.0);
  EXPECT_EQ(count_nonzero(iso), 20 * 20 * 20);
  EXPECT_THROW(to_iso4(Image(img.grid())), ValidationError);
}

TEST(BodyMask, CylinderAndHoleFill) {
  auto img = cylinder({40, 40, 10}, Vec3::Ones(), 12);
  const auto plain = body_mask(img);
  EXPECT_EQ(count_nonzero(plain), count_nonzero(img));
  ts::fill_box<float>(img, {16, 16, 2}, {23, 23, 7}, 0.0f);  // dark lung blob inside
  const auto filled = body_mask(img);
  EXPECT_EQ(filled, plain);
}

TEST(BodyMask, KeepsLargestBlobOnly) {
  Image img(GridSpec::axis_aligned({40, 40, 40}, Vec3::Ones()));
  ts::fill_box<float>(img, {2, 2, 2}, {21, 21, 21}, 10.0f);      // 8000 voxels
  ts::fill_box<float>(img, {30, 30, 30}, {38, 38, 38}, 10.0f);  // 729 voxels
  const auto m = body_mask(img);
  EXPECT_EQ(count_nonzero(m), 8000);
  EXPECT_EQ(m(35, 35, 35), 0);
  EXPECT_THROW(body_mask(Image(img.grid())), ValidationError);
}

TEST(Quadrants, BandArithmeticOn300mmBody) {
  // 100 slices of 3 mm: extent 300 mm, bands=5 -> 60 mm (20 slices) each.
  Mask body(GridSpec::axis_aligned({10, 4, 100}, Vec3(1, 1, 3)), 1);
  const auto q = compute_quadrants(body, 5);
  for (std::int64_t z = 0; z < 100; ++z) {
    const std::int64_t from_top = 99 - z;
    const int band = int(from_top / 20);
    for (std::int64_t x = 0; x < 10; ++x) {
      const std::int32_t expected = band == 0 ? 1 : 2 * band + (x < 5 ? 0 : 1);
      ASSERT_EQ(q(x, 0, z), expected) << "z=" << z << " x=" << x;
    }
  }
}

TEST(Quadrants, DefaultGivesElevenLabelsPartitioningBody) {
  Mask body(GridSpec::axis_aligned({30, 20, 120}, Vec3(1.5, 1.5, 3)));
  ts::fill_box<std::uint8_t>(body, {3, 2, 4}, {26, 17, 115}, 1);
  const auto q = compute_quadrants(body);
  std::set<std::int32_t> labels;
  for (std::int64_t i = 0; i < q.size(); ++i) {
    ASSERT_EQ(q[i] != 0, body[i] != 0);
    labels.insert(q[i]);
  }
  labels.erase(0);
  EXPECT_EQ(labels.size(), 11u);
  EXPECT_EQ(*labels.begin(), 1);
  EXPECT_EQ(*labels.rbegin(), 11);
}

TEST(Quadrants, SymmetricBodyHasEqualLeftRightCounts) {
  // Even width: the mid-sagittal plane falls between voxel centres.
  Mask body(GridSpec::axis_aligned({31, 20, 60}, Vec3(1.4, 1.4, 3)));
  ts::fill_box<std::uint8_t>(body, {3, 2, 4}, {28, 17, 55}, 1);
  const auto q = compute_quadrants(body);
  std::map<std::int32_t, std::int64_t> counts;
  for (const auto v : q.values()) ++counts[v];
  for (std::int32_t l = 2; l <= 11; l += 2) EXPECT_EQ(counts[l], counts[l + 1]) << l;
}

TEST(Quadrants, SagittalMirrorSwapsSides) {
  Mask body(GridSpec::axis_aligned({30, 20, 60}, Vec3(1.4, 1.4, 3)));
  ts::fill_box<std::uint8_t>(body, {2, 2, 4}, {26, 17, 55}, 1);
  ts::fill_box<std::uint8_t>(body, {20, 5, 20}, {29, 9, 40}, 1);  // asymmetric arm
  const auto q = compute_quadrants(body);
  const int lat = body.grid().lateral_axis();
  // Voxels centred exactly on the mid-sagittal plane have no mirror partner label.
  double cx = 0;
  for (std::int64_t i = 0; i < body.size(); ++i) cx += body[i] ? double(body.unravel(std::size_t(i))[0]) : 0.0;
  cx /= double(count_nonzero(body));
  ASSERT_GT(std::abs(cx - std::round(cx)), 1e-3);
  const auto qm = compute_quadrants(flip_axis(body, lat));
  const auto back = flip_axis(qm, lat);
  for (std::int64_t i = 0; i < q.size(); ++i) ASSERT_EQ(back[i], mirrored_quadrant(q[i])) << i;
  EXPECT_EQ(mirrored_quadrant(1), 1);
  EXPECT_EQ(mirrored_quadrant(4), 5);
  EXPECT_EQ(mirrored_quadrant(5), 4);
}

TEST(Quadrants, Errors) {
  Mask body(GridSpec::axis_aligned({4, 4, 4}, Vec3::Ones()));
  EXPECT_THROW(compute_quadrants(body), ValidationError);
  body[0] = 1;
  EXPECT_THROW(compute_quadrants(body, 1), ValidationError);
}
