// Times the OpenMP batch kernels against their serial reference loops.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hand3d/batch.hpp"

using namespace hand3d;
using Clock = std::chrono::steady_clock;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const long frames = argc > 1 ? std::stol(argv[1]) : 20000;

#ifdef _OPENMP
  std::printf("frames: %ld, threads: %d\n", frames, omp_get_max_threads());
#else
  std::printf("frames: %ld (built without OpenMP)\n", frames);
#endif
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  SynthParams params;
  params.seed = 42;
  params.drop_rate = 0.05;
  const CameraIntrinsics cam = params.camera;

  std::vector<FrameRecord> gt_serial, gt_parallel;
  report("synth",
         time_ms([&] {
           gt_serial = batch::synth_records(params, frames, 0, cam,
                                            batch::Exec::Serial);
         }),
         time_ms([&] {
           gt_parallel = batch::synth_records(params, frames, 0, cam,
                                              batch::Exec::Parallel);
         }));

  auto canon_serial = gt_serial;
  auto canon_parallel = gt_serial;
  report("canonicalize",
         time_ms([&] {
           batch::canonicalize_records(canon_serial, batch::Exec::Serial,
                                       0.15);
         }),
         time_ms([&] {
           batch::canonicalize_records(canon_parallel, batch::Exec::Parallel,
                                       0.15);
         }));

  const NoiseModel noise{0.004, 0.01, 7};
  auto pred_serial = canon_serial;
  auto pred_parallel = canon_serial;
  report("perturb",
         time_ms([&] {
           batch::perturb_records(pred_serial, noise, batch::Exec::Serial);
         }),
         time_ms([&] {
           batch::perturb_records(pred_parallel, noise,
                                  batch::Exec::Parallel);
         }));

  report("reconstruct",
         time_ms([&] {
           batch::reconstruct_records(pred_serial, 10.0, batch::Exec::Serial);
         }),
         time_ms([&] {
           batch::reconstruct_records(pred_parallel, 10.0,
                                      batch::Exec::Parallel);
         }));

  batch::PooledErrors pooled_serial, pooled_parallel;
  report("pool_errors",
         time_ms([&] {
           pooled_serial = batch::pool_errors(canon_serial, pred_serial,
                                              batch::Exec::Serial);
         }),
         time_ms([&] {
           pooled_parallel = batch::pool_errors(canon_parallel, pred_parallel,
                                                batch::Exec::Parallel);
         }));

  // The two routes must agree bit for bit.
  double worst = 0.0;
  bool sizes_ok = true;
  for (int s = 0; s < 2; ++s) {
    sizes_ok &=
        pooled_serial.err3d_mm[s].size() == pooled_parallel.err3d_mm[s].size();
    if (!sizes_ok) break;
    for (size_t i = 0; i < pooled_serial.err3d_mm[s].size(); ++i) {
      worst = std::max(worst, std::abs(pooled_serial.err3d_mm[s][i] -
                                       pooled_parallel.err3d_mm[s][i]));
    }
  }
  std::printf("max serial/parallel element difference: %g%s\n", worst,
              sizes_ok ? "" : " (size mismatch!)");
  return sizes_ok && worst == 0.0 ? 0 : 1;
}
