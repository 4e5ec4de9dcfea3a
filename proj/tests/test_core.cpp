#include <doctest.h>

#include <cmath>
#include <set>

#include "hand3d/core.hpp"
#include "hand3d/synth.hpp"
#include "helpers.hpp"

using namespace hand3d;
using namespace test_helpers;

TEST_CASE("bone list is the fixed hand tree") {
  const Skeleton skel = Skeleton::default_hand();
  const auto bones = bone_list(skel);

  CHECK(bones.size() == 20);
  CHECK(bones[0].first == joints::kWrist);
  CHECK(bones[0].second == joints::kThumbMcp);

  bool has_key_bone = false;
  std::set<int> children;
  std::set<int> touched;
  for (const auto& [parent, child] : bones) {
    if (parent == joints::kWrist && child == joints::kMiddleMcp) {
      has_key_bone = true;
    }
    CHECK(children.insert(child).second);  // every child exactly once
    CHECK(child != joints::kWrist);
    touched.insert(parent);
    touched.insert(child);
  }
  CHECK(has_key_bone);
  CHECK(children.size() == 20);
  CHECK(touched.size() == 21);  // spans all joints; 20 edges + unique
                                // children means no cycles
}

TEST_CASE("bone lengths come straight from joint distances") {
  const Skeleton skel = Skeleton::default_hand();
  HandPose3D pose = anchored_pose({0, -10, 50}, {0, 0, 50});
  // bone 2 is wrist->mMCP
  std::swap(pose.joints[joints::kWrist], pose.joints[joints::kMiddleMcp]);
  const auto lengths = bone_lengths_of(pose, skel);
  CHECK(near(lengths[2], 10.0, 1e-12));

  SUBCASE("uniform scaling doubles every length") {
    HandPose3D scaled = pose;
    for (auto& j : scaled.joints) j *= 2.0;
    const auto scaled_lengths = bone_lengths_of(scaled, skel);
    for (int i = 0; i < kBoneCount; ++i) {
      CHECK(near(scaled_lengths[i], 2.0 * lengths[i], 1e-9));
    }
  }

  SUBCASE("non-finite pose is rejected") {
    pose.joints[4].x() = std::nan("");
    CHECK_THROWS_WITH_AS(bone_lengths_of(pose, skel),
                         doctest::Contains("non-finite"), Error);
  }
}

TEST_CASE("synthetic poses reproduce the reference lengths") {
  SynthParams params;
  params.seed = 11;
  params.drop_rate = 0.0;
  for (int f = 0; f < 50; ++f) {
    const auto pose = sample_pose(params, Handedness::Right, f);
    REQUIRE(pose.has_value());
    const auto lengths = bone_lengths_of(*pose, params.skeleton);
    for (int i = 0; i < kBoneCount; ++i) {
      CHECK(near(lengths[i], params.skeleton.reference_lengths[i], 1e-9));
    }
  }
}

TEST_CASE("bone lengths are rigid-transform invariant") {
  const Skeleton skel = Skeleton::default_hand();
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const HandPose3D pose = anchored_pose(
        {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(40, 80)},
        {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(40, 80)});
    const auto base = bone_lengths_of(pose, skel);

    const Mat3 rot = rot_x(rng.uniform(-1, 1)) * rot_y(rng.uniform(-1, 1));
    const Vec3 shift(rng.uniform(-9, 9), rng.uniform(-9, 9),
                     rng.uniform(-9, 9));
    HandPose3D moved = pose;
    for (auto& j : moved.joints) j = rot * j + shift;

    const auto after = bone_lengths_of(moved, skel);
    for (int i = 0; i < kBoneCount; ++i) {
      CHECK(near(after[i], base[i], 1e-9));
    }
  }
}

TEST_CASE("validate_pose diagnostics") {
  SynthParams params;
  params.seed = 3;
  params.drop_rate = 0.0;
  const auto good = sample_pose(params, Handedness::Left, 0);
  REQUIRE(good.has_value());
  CHECK(validate_pose(*good).ok());

  SUBCASE("NaN trips the finiteness check") {
    HandPose3D bad = *good;
    bad.joints[7].y() = std::nan("");
    const auto diag = validate_pose(bad);
    CHECK_FALSE(diag.finite);
    CHECK_FALSE(diag.ok());
  }

  SUBCASE("non-positive depth is flagged") {
    HandPose3D bad = *good;
    bad.joints[3].z() = -1.0;
    const auto diag = validate_pose(bad);
    CHECK(diag.finite);
    CHECK_FALSE(diag.positive_depth);
  }

  SUBCASE("collinear key triangle is flagged") {
    HandPose3D bad = *good;
    bad.joints[joints::kWrist] = {0, 0, 50};
    bad.joints[joints::kMiddleMcp] = {0, 0, 60};
    bad.joints[joints::kPinkyMcp] = {0, 0, 55};
    const auto diag = validate_pose(bad);
    CHECK(diag.key_triangle_area_cm2 < 1e-6);
    CHECK_FALSE(diag.key_triangle_ok);
  }
}
