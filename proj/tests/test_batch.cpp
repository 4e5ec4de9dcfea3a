#include <doctest.h>

#include <cstring>

#include "hand3d/batch.hpp"
#include "helpers.hpp"

using namespace hand3d;
using namespace test_helpers;

namespace {

bool same_entry(const HandEntry& a, const HandEntry& b) {
  if (a.present != b.present) return false;
  auto same_vec3 = [](const auto& x, const auto& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || std::memcmp(x->data(), y->data(), sizeof(*x)) == 0;
  };
  if (!same_vec3(a.xyz_cm, b.xyz_cm)) return false;
  if (!same_vec3(a.rc, b.rc)) return false;
  if (!same_vec3(a.can, b.can)) return false;
  if (a.bbox.has_value() != b.bbox.has_value()) return false;
  if (a.bbox) {
    return a.bbox->row_min == b.bbox->row_min &&
           a.bbox->row_max == b.bbox->row_max &&
           a.bbox->col_min == b.bbox->col_min &&
           a.bbox->col_max == b.bbox->col_max;
  }
  return true;
}

bool same_records(const std::vector<FrameRecord>& a,
                  const std::vector<FrameRecord>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].frame != b[i].frame) return false;
    if (!same_entry(a[i].left, b[i].left)) return false;
    if (!same_entry(a[i].right, b[i].right)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bitwise") {
  SynthParams params;
  params.seed = 1234;
  const CameraIntrinsics cam = params.camera;

  auto serial = batch::synth_records(params, 400, 0, cam,
                                     batch::Exec::Serial);
  auto parallel = batch::synth_records(params, 400, 0, cam,
                                       batch::Exec::Parallel);
  CHECK(same_records(serial, parallel));

  batch::canonicalize_records(serial, batch::Exec::Serial, 0.1);
  batch::canonicalize_records(parallel, batch::Exec::Parallel, 0.1);
  CHECK(same_records(serial, parallel));

  const NoiseModel noise{0.004, 0.012, 99};
  auto pred_serial = serial;
  auto pred_parallel = parallel;
  batch::perturb_records(pred_serial, noise, batch::Exec::Serial);
  batch::perturb_records(pred_parallel, noise, batch::Exec::Parallel);
  CHECK(same_records(pred_serial, pred_parallel));

  batch::reconstruct_records(pred_serial, 10.0, batch::Exec::Serial);
  batch::reconstruct_records(pred_parallel, 10.0, batch::Exec::Parallel);
  CHECK(same_records(pred_serial, pred_parallel));

  const auto ps = batch::pool_errors(serial, pred_serial,
                                     batch::Exec::Serial);
  const auto pp = batch::pool_errors(parallel, pred_parallel,
                                     batch::Exec::Parallel);
  for (int s = 0; s < 2; ++s) {
    REQUIRE(ps.err3d_mm[s].size() == pp.err3d_mm[s].size());
    for (size_t i = 0; i < ps.err3d_mm[s].size(); ++i) {
      CHECK(ps.err3d_mm[s][i] == pp.err3d_mm[s][i]);
    }
    REQUIRE(ps.pred_roots[s].size() == pp.pred_roots[s].size());
    for (size_t i = 0; i < ps.pred_roots[s].size(); ++i) {
      CHECK((ps.pred_roots[s][i] - pp.pred_roots[s][i]).norm() == 0.0);
      CHECK((ps.gt_roots[s][i] - pp.gt_roots[s][i]).norm() == 0.0);
    }
  }
}

TEST_CASE("errors inside parallel loops surface once") {
  SynthParams params;
  params.seed = 7;
  params.drop_rate = 0.0;
  auto records = batch::synth_records(params, 16, 0, CameraIntrinsics{},
                                      batch::Exec::Serial);
  // Poison one frame so reconstruction cannot work.
  records[5].left.rc.emplace();
  records[5].left.can.emplace();
  for (auto& rc : *records[5].left.rc) rc = {0.5, 0.5};
  for (auto& w : *records[5].left.can) w = {0, 0, 0};
  CHECK_THROWS_AS(
      batch::reconstruct_records(records, 10.0, batch::Exec::Parallel),
      Error);
  CHECK_THROWS_AS(
      batch::reconstruct_records(records, 10.0, batch::Exec::Serial), Error);
}

TEST_CASE("pooled errors skip absent and mismatched hands") {
  SynthParams params;
  params.seed = 4321;
  params.drop_rate = 0.3;
  auto gt = batch::synth_records(params, 200, 0, params.camera,
                                 batch::Exec::Serial);
  batch::canonicalize_records(gt, batch::Exec::Serial);
  auto pred = gt;

  long both_present_left = 0;
  for (size_t i = 0; i < gt.size(); ++i) {
    if (i % 3 == 0) pred[i].left = HandEntry{};  // drop some predictions
    both_present_left +=
        gt[i].left.present && pred[i].left.present && gt[i].left.xyz_cm;
  }
  const auto pooled = batch::pool_errors(gt, pred, batch::Exec::Parallel);
  CHECK(long(pooled.pred_roots[0].size()) == both_present_left);
  CHECK(long(pooled.err3d_mm[0].size()) == both_present_left * joints::kCount);
}
