// Command-line front end: synthetic dataset generation, the geometry
// pipeline stages, detection, and batch evaluation over JSON-lines datasets.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hand3d/batch.hpp"
#include "hand3d/canonical.hpp"
#include "hand3d/dataset.hpp"
#include "hand3d/global_recon.hpp"
#include "hand3d/heatmap.hpp"
#include "hand3d/synth.hpp"
#include "hand3d/tracking.hpp"

namespace fs = std::filesystem;
using namespace hand3d;

namespace {

struct CameraFlags {
  int img_h = 270;
  int img_w = 480;
  double foc_cm = 3.0;
  double pxcm = 120.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--img-h", img_h, "Image height in pixels");
    cmd->add_option("--img-w", img_w, "Image width in pixels");
    cmd->add_option("--foc-cm", foc_cm, "Focal length in cm");
    cmd->add_option("--pxcm", pxcm, "Pixels per cm on the image plane");
  }

  CameraIntrinsics intrinsics() const {
    return {img_h, img_w, foc_cm, pxcm};
  }
};

std::vector<FrameRecord> sequence_records(const SynthParams& base,
                                          int sequences, int frames_each) {
  std::vector<FrameRecord> records;
  records.reserve(size_t(sequences) * frames_each);
  long frame_id = 0;
  for (int s = 0; s < sequences; ++s) {
    SynthParams params = base;
    params.seed = split_seed(base.seed, 0xa5a50000ULL + std::uint64_t(s));
    const auto frames = sample_sequence(params, frames_each);
    for (const FramePoses& fp : frames) {
      FrameRecord rec;
      rec.frame = frame_id++;
      rec.camera = base.camera;
      if (fp.left) {
        rec.left.present = true;
        rec.left.xyz_cm = fp.left->joints;
      }
      if (fp.right) {
        rec.right.present = true;
        rec.right.xyz_cm = fp.right->joints;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

// detect input files are named <frame>_<left|right>.<pgm|hmb>.
struct EnergyFile {
  long frame;
  Handedness side;
  fs::path path;
};

std::vector<EnergyFile> scan_energy_dir(const std::string& dir) {
  std::vector<EnergyFile> files;
  if (!fs::is_directory(dir)) {
    throw Error("io", dir + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".pgm" && ext != ".hmb") continue;
    const std::string stem = entry.path().stem().string();
    const size_t sep = stem.rfind('_');
    if (sep == std::string::npos) continue;
    const std::string side_str = stem.substr(sep + 1);
    Handedness side;
    if (side_str == "left") {
      side = Handedness::Left;
    } else if (side_str == "right") {
      side = Handedness::Right;
    } else {
      continue;
    }
    try {
      files.push_back({std::stol(stem.substr(0, sep)), side, entry.path()});
    } catch (const std::exception&) {
      continue;  // not of the expected form
    }
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.side < b.side;
  });
  return files;
}

Heatmap load_energy(const fs::path& path) {
  if (path.extension() == ".pgm") {
    return read_pgm(path.string());
  }
  // Binary stacks sum to a single energy map (the union of joint activity).
  const auto maps = read_heatmap_stack(path.string());
  if (maps.empty()) throw Error("io", path.string() + ": empty stack");
  Heatmap sum = maps[0];
  for (size_t i = 1; i < maps.size(); ++i) {
    if (maps[i].rows != sum.rows || maps[i].cols != sum.cols) {
      throw Error("io", path.string() + ": inconsistent map sizes");
    }
    for (size_t k = 0; k < sum.values.size(); ++k) {
      sum.values[k] += maps[i].values[k];
    }
  }
  return sum;
}

int run(int argc, char** argv) {
  CLI::App app{"Two-hand global 3D pose toolkit"};
  app.require_subcommand(1);

  // synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic ground-truth dataset");
  synth->set_config("--config");
  std::uint64_t seed = 0;
  int frames = 500, sequences = 0;
  double drop_rate = 0.1, depth_min = 25.0, depth_max = 100.0, margin = 0.1;
  double max_step = 2.0;
  int keyframe_interval = 50;
  std::string out_path;
  CameraFlags synth_cam;
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--frames", frames,
                    "Frames to generate (per sequence when --sequences > 0)");
  synth->add_option("--sequences", sequences,
                    "Number of smooth sequences; 0 means independent frames");
  synth->add_option("--drop-rate", drop_rate, "Probability a hand is absent");
  synth->add_option("--depth-min", depth_min, "Frustum near depth, cm");
  synth->add_option("--depth-max", depth_max, "Frustum far depth, cm");
  synth->add_option("--margin", margin, "Root image margin fraction");
  synth->add_option("--max-step", max_step,
                    "Sequence root step bound, cm/frame");
  synth->add_option("--keyframe-interval", keyframe_interval,
                    "Frames between sequence keyposes");
  synth_cam.attach(synth);
  synth->add_option("--out", out_path, "Output dataset path")->required();

  // canonicalize ---------------------------------------------------------
  auto* canon = app.add_subcommand(
      "canonicalize", "Fill 2D joints, canonical joints and joint bboxes "
                      "from 3D ground truth");
  canon->set_config("--config");
  std::string canon_in, canon_out;
  double bbox_margin = 0.0;
  canon->add_option("--in", canon_in, "Input dataset")->required();
  canon->add_option("--out", canon_out, "Output dataset")->required();
  canon->add_option("--bbox-margin", bbox_margin,
                    "Joint bbox margin fraction; negative disables bboxes");

  // reconstruct ----------------------------------------------------------
  auto* recon = app.add_subcommand(
      "reconstruct", "Recover global 3D joints from 2D + canonical joints");
  recon->set_config("--config");
  std::string recon_in, recon_out;
  double key_bone_length = 10.0;
  recon->add_option("--in", recon_in, "Input dataset")->required();
  recon->add_option("--out", recon_out, "Output dataset")->required();
  recon->add_option("--key-bone-length", key_bone_length,
                    "Wrist to middle-MCP length in cm");

  // perturb ----------------------------------------------------------------
  auto* pert = app.add_subcommand(
      "perturb", "Replace 2D/canonical joints with noisy estimates");
  pert->set_config("--config");
  std::string pert_in, pert_out;
  double sigma_2d = 0.0, sigma_can = 0.0;
  std::uint64_t pert_seed = 0;
  bool keep_xyz = false;
  pert->add_option("--in", pert_in, "Input dataset")->required();
  pert->add_option("--out", pert_out, "Output dataset")->required();
  pert->add_option("--sigma-2d", sigma_2d,
                   "2D noise sigma, normalized image units");
  pert->add_option("--sigma-can", sigma_can, "Canonical noise sigma");
  pert->add_option("--seed", pert_seed, "Noise seed");
  pert->add_flag("--keep-xyz", keep_xyz,
                 "Keep the ground-truth 3D joints in the output");

  // track --------------------------------------------------------------------
  auto* track = app.add_subcommand(
      "track", "Smooth per-hand root radii over a frame sequence");
  track->set_config("--config");
  std::string track_in, track_out;
  int window = 5, degree = 2;
  bool extrapolate = false;
  track->add_option("--in", track_in, "Input dataset (ordered frames)")
      ->required();
  track->add_option("--out", track_out, "Output dataset")->required();
  track->add_option("--window", window, "Samples kept per hand");
  track->add_option("--degree", degree, "Polynomial degree");
  track->add_flag("--extrapolate", extrapolate,
                  "Fit on past samples only, excluding the current one");

  // detect ---------------------------------------------------------------------
  auto* detect = app.add_subcommand(
      "detect", "Hand presence and bounding boxes from energy maps");
  detect->set_config("--config");
  std::string energy_dir, detect_out;
  double tau_abs = 0.1, det_margin = 0.15;
  CameraFlags detect_cam;
  detect->add_option("--energy-dir", energy_dir,
                     "Directory of <frame>_<side>.pgm|.hmb energy maps")
      ->required();
  detect->add_option("--out", detect_out, "Output dataset")->required();
  detect->add_option("--tau-abs", tau_abs, "Absence threshold on peak energy");
  detect->add_option("--margin", det_margin, "BBox margin fraction");
  detect_cam.attach(detect);

  // evaluate ----------------------------------------------------------------------
  auto* eval = app.add_subcommand(
      "evaluate", "Compare a predicted dataset against ground truth");
  eval->set_config("--config");
  std::string gt_path, pred_path, report_path, curves_dir;
  eval->add_option("--gt", gt_path, "Ground-truth dataset")->required();
  eval->add_option("--pred", pred_path, "Predicted dataset")->required();
  eval->add_option("--report", report_path, "Report JSON output path")
      ->required();
  eval->add_option("--curves-dir", curves_dir,
                   "Directory for PCK curve CSV files");

  // heatmap encode/decode ------------------------------------------------------------
  auto* heatmap_cmd =
      app.add_subcommand("heatmap", "Joint heatmap encoding and decoding");
  heatmap_cmd->require_subcommand(1);
  auto* hm_encode = heatmap_cmd->add_subcommand(
      "encode", "Write per-hand z-heatmap stacks from 2D + canonical joints");
  std::string hm_in, hm_out_dir;
  int hm_res = 32;
  double hm_sigma = 1.5;
  hm_encode->add_option("--in", hm_in, "Input dataset")->required();
  hm_encode->add_option("--out-dir", hm_out_dir, "Output directory")
      ->required();
  hm_encode->add_option("--res", hm_res, "Heatmap resolution");
  hm_encode->add_option("--sigma", hm_sigma, "Gaussian sigma in cells");

  auto* hm_decode = heatmap_cmd->add_subcommand(
      "decode", "Recover 2D joints from heatmap stacks");
  std::string hm_in_dir, hm_out;
  CameraFlags hm_cam;
  hm_decode->add_option("--in-dir", hm_in_dir, "Directory of .hmb stacks")
      ->required();
  hm_decode->add_option("--out", hm_out, "Output dataset")->required();
  hm_cam.attach(hm_decode);

  CLI11_PARSE(app, argc, argv);

  if (*synth) {
    SynthParams params;
    params.seed = seed;
    params.drop_rate = drop_rate;
    params.depth_min_cm = depth_min;
    params.depth_max_cm = depth_max;
    params.image_margin = margin;
    params.max_root_step_cm = max_step;
    params.keyframe_interval = keyframe_interval;
    params.camera = synth_cam.intrinsics();
    const auto records =
        sequences > 0
            ? sequence_records(params, sequences, frames)
            : batch::synth_records(params, frames, 0, params.camera,
                                   batch::Exec::Parallel);
    write_dataset(records, out_path);
    std::cout << "wrote " << records.size() << " frames to " << out_path
              << "\n";
  } else if (*canon) {
    auto records = read_dataset(canon_in);
    batch::canonicalize_records(records, batch::Exec::Parallel, bbox_margin);
    write_dataset(records, canon_out);
    std::cout << "canonicalized " << records.size() << " frames\n";
  } else if (*recon) {
    auto records = read_dataset(recon_in);
    batch::reconstruct_records(records, key_bone_length,
                               batch::Exec::Parallel);
    write_dataset(records, recon_out);
    std::cout << "reconstructed " << records.size() << " frames\n";
  } else if (*pert) {
    auto records = read_dataset(pert_in);
    batch::perturb_records(records, NoiseModel{sigma_2d, sigma_can, pert_seed},
                           batch::Exec::Parallel, keep_xyz);
    write_dataset(records, pert_out);
    std::cout << "perturbed " << records.size() << " frames\n";
  } else if (*track) {
    auto records = read_dataset(track_in);
    std::stable_sort(records.begin(), records.end(),
                     [](const FrameRecord& a, const FrameRecord& b) {
                       return a.frame < b.frame;
                     });
    for (Handedness side : {Handedness::Left, Handedness::Right}) {
      TrackState state;
      state.side = side;
      state.capacity = window;
      state.degree = degree;
      state.include_current = !extrapolate;
      for (FrameRecord& rec : records) {
        HandEntry& entry = rec.hand(side);
        if (!entry.present || !entry.xyz_cm) continue;
        const double r_raw = (*entry.xyz_cm)[joints::kMiddleMcp].norm();
        const double r_smooth = push_and_estimate(state, rec.frame, r_raw);
        const double scale = r_smooth / r_raw;
        for (auto& j : *entry.xyz_cm) j *= scale;
      }
    }
    write_dataset(records, track_out);
    std::cout << "tracked " << records.size() << " frames\n";
  } else if (*detect) {
    const auto files = scan_energy_dir(energy_dir);
    if (files.empty()) {
      throw Error("io", "no <frame>_<side>.pgm|.hmb files in " + energy_dir);
    }
    const CameraIntrinsics cam = detect_cam.intrinsics();
    std::map<long, FrameRecord> by_frame;
    for (const EnergyFile& file : files) {
      auto [it, inserted] = by_frame.try_emplace(file.frame);
      if (inserted) {
        it->second.frame = file.frame;
        it->second.camera = cam;
      }
      const Heatmap energy = load_energy(file.path);
      const DetectionOutcome outcome =
          energy_bbox(energy, cam.height_px, cam.width_px,
                      {tau_abs, det_margin});
      HandEntry& entry = it->second.hand(file.side);
      entry.present = outcome.present;
      entry.bbox = outcome.bbox;
    }
    std::vector<FrameRecord> records;
    records.reserve(by_frame.size());
    for (auto& [frame, rec] : by_frame) records.push_back(std::move(rec));
    write_dataset(records, detect_out);
    std::cout << "detected over " << records.size() << " frames\n";
  } else if (*eval) {
    const auto gt = read_dataset(gt_path);
    const auto pred = read_dataset(pred_path);
    const EvaluationReport report = evaluate_dataset(gt, pred);
    write_report_json(report, report_path);
    if (!curves_dir.empty()) write_report_curves(report, curves_dir);
    std::cout << "evaluated " << report.frames << " frames";
    if (report.average.auc_3d) {
      std::cout << "; auc_3d(avg) = " << *report.average.auc_3d;
    }
    if (report.average.epe_mean_mm) {
      std::cout << "; epe_mean(avg) = " << *report.average.epe_mean_mm
                << " mm";
    }
    std::cout << "\n";
  } else if (*hm_encode) {
    const auto records = read_dataset(hm_in);
    fs::create_directories(hm_out_dir);
    EncodeParams params;
    params.res = hm_res;
    params.sigma = hm_sigma;
    long written = 0;
    for (const FrameRecord& rec : records) {
      for (Handedness side : {Handedness::Left, Handedness::Right}) {
        const HandEntry& entry = rec.hand(side);
        if (!entry.present || !entry.rc || !entry.can) continue;
        std::array<double, joints::kCount> z{};
        for (int j = 0; j < joints::kCount; ++j) z[j] = (*entry.can)[j].z();
        const auto maps =
            encode_z_heatmaps(to_pose2d(entry, side), z, params);
        const std::string name = std::to_string(rec.frame) + "_" +
                                 to_string(side) + ".hmb";
        write_heatmap_stack((fs::path(hm_out_dir) / name).string(),
                            std::vector<Heatmap>(maps.begin(), maps.end()));
        ++written;
      }
    }
    std::cout << "wrote " << written << " heatmap stacks\n";
  } else if (*hm_decode) {
    const auto files = scan_energy_dir(hm_in_dir);
    if (files.empty()) {
      throw Error("io", "no <frame>_<side>.hmb stacks in " + hm_in_dir);
    }
    const CameraIntrinsics cam = hm_cam.intrinsics();
    std::map<long, FrameRecord> by_frame;
    for (const EnergyFile& file : files) {
      if (file.path.extension() != ".hmb") continue;
      const auto maps = read_heatmap_stack(file.path.string());
      if (maps.size() != size_t(joints::kCount)) {
        throw Error("schema",
                    file.path.string() + ": expected 21 maps in the stack");
      }
      std::array<Heatmap, joints::kCount> stack;
      std::copy_n(maps.begin(), joints::kCount, stack.begin());
      const DecodedJoints decoded = decode_heatmaps(stack);
      auto [it, inserted] = by_frame.try_emplace(file.frame);
      if (inserted) {
        it->second.frame = file.frame;
        it->second.camera = cam;
      }
      HandEntry& entry = it->second.hand(file.side);
      entry.present = true;
      entry.rc = decoded.pose.joints;
    }
    std::vector<FrameRecord> records;
    records.reserve(by_frame.size());
    for (auto& [frame, rec] : by_frame) records.push_back(std::move(rec));
    write_dataset(records, hm_out);
    std::cout << "decoded " << records.size() << " frames\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "{\"error\":\"" << e.code() << "\",\"message\":\"" << e.what()
              << "\"}\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what()
              << "\"}\n";
    return 1;
  }
}
