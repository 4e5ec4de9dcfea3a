#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "hand3d/heatmap.hpp"
#include "hand3d/synth.hpp"
#include "helpers.hpp"

using namespace hand3d;
using namespace test_helpers;

namespace {

// Brute-force reference: recomputes both class statistics from scratch for
// every candidate split instead of using running sums.
int otsu_oracle_bin(const Heatmap& m) {
  const auto [mn_it, mx_it] =
      std::minmax_element(m.values.begin(), m.values.end());
  const double mn = *mn_it, mx = *mx_it;
  REQUIRE(mx > mn);
  auto bin_of = [&](double v) {
    return std::min(int((v - mn) * 256.0 / (mx - mn)), 255);
  };
  int best_bin = 0;
  double best_var = -1.0;
  for (int t = 0; t < 255; ++t) {
    double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
    for (double v : m.values) {
      const int b = bin_of(v);
      if (b <= t) {
        w0 += 1;
        s0 += b;
      } else {
        w1 += 1;
        s1 += b;
      }
    }
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = s0 / w0, mu1 = s1 / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_bin = t;
    }
  }
  return best_bin;
}

Heatmap random_map(Rng& rng, int rows, int cols) {
  Heatmap m(rows, cols);
  const int style = int(rng.uniform(0.0, 3.0));
  if (style == 0) {
    // bimodal
    const double lo = rng.uniform(0.0, 0.3), hi = rng.uniform(0.5, 1.0);
    for (double& v : m.values) v = rng.uniform01() < 0.5 ? lo : hi;
    m.values[0] = lo;
    m.values[1] = hi;  // guarantee contrast
  } else if (style == 1) {
    // blob on noise floor
    const double cy = rng.uniform(2, rows - 2), cx = rng.uniform(2, cols - 2);
    const double s = rng.uniform(1.0, 4.0);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
        m.at(r, c) = std::exp(-d2 / (2 * s * s)) + 0.05 * rng.uniform01();
      }
    }
  } else {
    for (double& v : m.values) v = rng.uniform01();
  }
  return m;
}

}  // namespace

TEST_CASE("z-heatmap encoding") {
  Pose2D p;
  std::array<double, joints::kCount> z{};
  for (auto& rc : p.joints) rc = {0.5, 0.5};

  SUBCASE("centered joint peaks at the middle cell with unit amplitude") {
    const auto maps = encode_z_heatmaps(p, z);
    CHECK(near(maps[0].at(16, 16), 1.0, 1e-12));
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        CHECK(maps[0].at(r, c) <= maps[0].at(16, 16));
      }
    }
  }

  SUBCASE("amplitude law clamps at half and three halves") {
    z[0] = 2.0;
    z[1] = -2.0;
    z[2] = 1.0;
    const auto maps = encode_z_heatmaps(p, z);
    CHECK(near(maps[0].at(16, 16), 0.5, 1e-12));
    CHECK(near(maps[1].at(16, 16), 1.5, 1e-12));
    CHECK(near(maps[2].at(16, 16), 0.75, 1e-12));
  }

  SUBCASE("closer joints get stronger peaks") {
    z[3] = -0.8;
    z[4] = 0.8;
    const auto maps = encode_z_heatmaps(p, z);
    CHECK(maps[3].at(16, 16) > maps[4].at(16, 16));
  }

  SUBCASE("out-of-frame joints give all-zero maps") {
    p.joints[5] = {1.2, 0.5};
    const auto maps = encode_z_heatmaps(p, z);
    CHECK(*std::max_element(maps[5].values.begin(), maps[5].values.end()) ==
          0.0);
  }

  SUBCASE("implausible encode parameters are rejected") {
    CHECK_THROWS_AS(encode_z_heatmaps(p, z, {.res = 4}), Error);
    CHECK_THROWS_AS(encode_z_heatmaps(p, z, {.res = 32, .sigma = 0.0}),
                    Error);
  }
}

TEST_CASE("decode inverts encode to within one cell") {
  SynthParams params;
  params.seed = 61;
  params.drop_rate = 0.0;
  const CameraIntrinsics cam;
  for (int f = 0; f < 50; ++f) {
    const auto pose = *sample_pose(params, Handedness::Left, f);
    Pose2D p;
    std::array<double, joints::kCount> z{};
    const auto can = canonicalize(pose, cam);
    for (int j = 0; j < joints::kCount; ++j) {
      p.joints[j] = project_point(pose.joints[j], cam);
      z[j] = can.canonical.joints[j].z();
    }
    const auto maps = encode_z_heatmaps(p, z);
    const auto decoded = decode_heatmaps(maps);
    for (int j = 0; j < joints::kCount; ++j) {
      if (p.joints[j][0] < 0 || p.joints[j][0] > 1 || p.joints[j][1] < 0 ||
          p.joints[j][1] > 1) {
        CHECK(decoded.missing[j]);
        continue;
      }
      REQUIRE_FALSE(decoded.missing[j]);
      CHECK(std::abs(decoded.pose.joints[j][0] - p.joints[j][0]) <=
            1.0 / 32.0);
      CHECK(std::abs(decoded.pose.joints[j][1] - p.joints[j][1]) <=
            1.0 / 32.0);
    }

    // Depth order must survive wherever the amplitude law is not clamped.
    for (int a = 0; a < joints::kCount; ++a) {
      for (int b = 0; b < joints::kCount; ++b) {
        if (decoded.missing[a] || decoded.missing[b]) continue;
        const bool unclamped = decoded.amplitudes[a] > 0.5 &&
                               decoded.amplitudes[a] < 1.5 &&
                               decoded.amplitudes[b] > 0.5 &&
                               decoded.amplitudes[b] < 1.5;
        if (unclamped && z[a] + 1e-9 < z[b]) {
          CHECK(decoded.amplitudes[a] > decoded.amplitudes[b]);
        }
      }
    }
  }
}

TEST_CASE("all-zero maps decode as missing") {
  std::array<Heatmap, joints::kCount> maps;
  for (auto& m : maps) m = Heatmap(32, 32);
  const auto decoded = decode_heatmaps(maps);
  for (int j = 0; j < joints::kCount; ++j) CHECK(decoded.missing[j]);
}

TEST_CASE("otsu splits a bimodal map between the modes") {
  Heatmap m(10, 20);
  for (size_t i = 0; i < m.values.size(); ++i) {
    m.values[i] = i < 100 ? 0.1 : 0.9;
  }
  const double thr = otsu_threshold(m);
  CHECK(thr > 0.1);
  CHECK(thr < 0.9);
}

TEST_CASE("otsu rejects constant maps") {
  Heatmap m(8, 8);
  for (double& v : m.values) v = 0.42;
  CHECK_THROWS_WITH_AS(otsu_threshold(m), doctest::Contains("dynamic range"),
                       Error);
}

TEST_CASE("otsu equals the exhaustive maximizer") {
  Rng rng(62);
  for (int i = 0; i < 1000; ++i) {
    const Heatmap m = random_map(rng, 16, 16);
    CHECK(otsu_threshold_bin(m) == otsu_oracle_bin(m));
  }
}

TEST_CASE("otsu bin is invariant to affine rescaling") {
  Rng rng(63);
  for (int i = 0; i < 100; ++i) {
    const Heatmap m = random_map(rng, 12, 12);
    Heatmap scaled = m;
    const double a = rng.uniform(0.2, 5.0), b = rng.uniform(-1.0, 1.0);
    for (double& v : scaled.values) v = a * v + b;
    CHECK(otsu_threshold_bin(m) == otsu_threshold_bin(scaled));
  }
}

TEST_CASE("energy bbox detection") {
  SUBCASE("all-zero map is absent") {
    const auto out = energy_bbox(Heatmap(16, 16), 270, 480);
    CHECK_FALSE(out.present);
    CHECK_FALSE(out.bbox.has_value());
  }

  SUBCASE("sub-threshold peak is absent") {
    Heatmap m(16, 16);
    m.at(8, 8) = 0.05;
    const auto out = energy_bbox(m, 270, 480);
    CHECK_FALSE(out.present);
    CHECK(near(out.peak_energy, 0.05));
  }

  SUBCASE("a central blob is boxed around its support") {
    Heatmap m(32, 32);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        const double d2 = (r - 16.0) * (r - 16.0) + (c - 16.0) * (c - 16.0);
        m.at(r, c) = std::exp(-d2 / (2 * 3.0 * 3.0));
      }
    }
    const auto out = energy_bbox(m, 320, 320, {.tau_abs = 0.1, .margin = 0.0});
    REQUIRE(out.present);
    REQUIRE(out.bbox.has_value());

    // Direct support box from the returned threshold.
    const int split = otsu_threshold_bin(m);
    int rmin = 32, rmax = -1, cmin = 32, cmax = -1;
    const auto [mn_it, mx_it] =
        std::minmax_element(m.values.begin(), m.values.end());
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        const int bin = std::min(
            int((m.at(r, c) - *mn_it) * 256.0 / (*mx_it - *mn_it)), 255);
        if (bin > split) {
          rmin = std::min(rmin, r);
          rmax = std::max(rmax, r);
          cmin = std::min(cmin, c);
          cmax = std::max(cmax, c);
        }
      }
    }
    CHECK(out.bbox->row_min == rmin * 10);
    CHECK(out.bbox->row_max == (rmax + 1) * 10 - 1);
    CHECK(out.bbox->col_min == cmin * 10);
    CHECK(out.bbox->col_max == (cmax + 1) * 10 - 1);
  }

  SUBCASE("growing the support never shrinks the box") {
    Heatmap small(32, 32), big(32, 32);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        const double d2 = (r - 14.0) * (r - 14.0) + (c - 18.0) * (c - 18.0);
        small.at(r, c) = d2 < 9 ? 1.0 : 0.0;
        big.at(r, c) = d2 < 36 ? 1.0 : 0.0;
      }
    }
    const auto a = energy_bbox(small, 270, 480);
    const auto b = energy_bbox(big, 270, 480);
    REQUIRE(a.present);
    REQUIRE(b.present);
    CHECK(b.bbox->row_min <= a.bbox->row_min);
    CHECK(b.bbox->row_max >= a.bbox->row_max);
    CHECK(b.bbox->col_min <= a.bbox->col_min);
    CHECK(b.bbox->col_max >= a.bbox->col_max);
  }
}

TEST_CASE("crop coordinate mapping") {
  SUBCASE("whole-image box is the identity") {
    const BBox whole{0, 269, 0, 479};
    Rng rng(64);
    for (int i = 0; i < 100; ++i) {
      const Vec2 rc(rng.uniform01(), rng.uniform01());
      CHECK((crop_to_image(rc, whole, 270, 480) - rc).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }

  SUBCASE("crop center hits the box center") {
    const BBox box{100, 199, 200, 299};
    const Vec2 mid = crop_to_image({0.5, 0.5}, box, 270, 480);
    CHECK(near(mid[0], 150.0 / 270.0, 1e-12));
    CHECK(near(mid[1], 250.0 / 480.0, 1e-12));
  }

  SUBCASE("round trip is exact") {
    const BBox box{37, 180, 51, 402};
    Rng rng(65);
    for (int i = 0; i < 200; ++i) {
      const Vec2 rc(rng.uniform01(), rng.uniform01());
      const Vec2 there = image_to_crop(rc, box, 270, 480);
      const Vec2 back = crop_to_image(there, box, 270, 480);
      CHECK((back - rc).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("heatmap binary and pgm files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hand3d_hm_test";
  fs::create_directories(dir);

  Rng rng(66);
  Heatmap m = random_map(rng, 24, 17);

  SUBCASE("binary stack round trip at float precision") {
    const std::string path = (dir / "stack.hmb").string();
    const Heatmap m2 = random_map(rng, 8, 8);
    write_heatmap_stack(path, std::vector<Heatmap>{m, m2});
    const auto back = read_heatmap_stack(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].rows == 24);
    CHECK(back[0].cols == 17);
    for (size_t i = 0; i < m.values.size(); ++i) {
      CHECK(back[0].values[i] == double(float(m.values[i])));
    }
    CHECK(back[1].rows == 8);
  }

  SUBCASE("pgm round trip within quantization") {
    const std::string path = (dir / "map.pgm").string();
    write_pgm(path, m);
    const Heatmap back = read_pgm(path);
    REQUIRE(back.rows == m.rows);
    REQUIRE(back.cols == m.cols);
    const double peak = *std::max_element(m.values.begin(), m.values.end());
    for (size_t i = 0; i < m.values.size(); ++i) {
      CHECK(near(back.values[i], m.values[i] / peak, 1.0 / 255.0));
    }
  }

  fs::remove_all(dir);
}
