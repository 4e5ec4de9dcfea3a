#include "hand3d/heatmap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace hand3d {

namespace {

int snap_cell(double pos, int res) {
  int c = int(std::lround(pos));
  return std::clamp(c, 0, res - 1);
}

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw Error("io", "truncated heatmap header");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

}  // namespace

std::array<Heatmap, joints::kCount> encode_z_heatmaps(
    const Pose2D& p, const std::array<double, joints::kCount>& z_can,
    const EncodeParams& params) {
  if (params.res < 8) throw Error("domain", "heatmap resolution below 8");
  if (!(params.sigma > 0.0)) throw Error("domain", "sigma must be positive");

  std::array<Heatmap, joints::kCount> maps;
  const double inv_two_sigma2 = 1.0 / (2.0 * params.sigma * params.sigma);
  for (int j = 0; j < joints::kCount; ++j) {
    Heatmap& map = maps[j];
    map = Heatmap(params.res, params.res);
    const Vec2& rc = p.joints[j];
    if (rc[0] < 0.0 || rc[0] > 1.0 || rc[1] < 0.0 || rc[1] > 1.0 ||
        !rc.allFinite()) {
      continue;  // out of frame: all-zero map
    }
    // Quantized center: the peak cell carries the amplitude exactly, so
    // decoding recovers the depth ordering bit for bit.
    const int cy = snap_cell(rc[0] * params.res, params.res);
    const int cx = snap_cell(rc[1] * params.res, params.res);
    const double amp = params.amplitude(z_can[j]);
    for (int r = 0; r < params.res; ++r) {
      const double dr = r - cy;
      for (int c = 0; c < params.res; ++c) {
        const double dc = c - cx;
        map.at(r, c) = amp * std::exp(-(dr * dr + dc * dc) * inv_two_sigma2);
      }
    }
  }
  return maps;
}

DecodedJoints decode_heatmaps(const std::array<Heatmap, joints::kCount>& maps) {
  DecodedJoints out;
  for (int j = 0; j < joints::kCount; ++j) {
    const Heatmap& map = maps[j];
    if (map.rows <= 0 || map.cols <= 0) {
      throw Error("domain", "empty heatmap");
    }
    int best_r = 0, best_c = 0;
    double best = -1.0;
    for (int r = 0; r < map.rows; ++r) {
      for (int c = 0; c < map.cols; ++c) {
        if (map.at(r, c) > best) {  // strict: ties keep the smallest (r, c)
          best = map.at(r, c);
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best <= 0.0) {
      out.missing[j] = true;
      out.amplitudes[j] = 0.0;
      out.pose.joints[j] = {0.0, 0.0};
      continue;
    }
    out.missing[j] = false;
    out.amplitudes[j] = best;
    out.pose.joints[j] = {double(best_r) / map.rows, double(best_c) / map.cols};
  }
  return out;
}

int otsu_threshold_bin(const Heatmap& energy) {
  if (energy.values.empty()) throw Error("domain", "empty heatmap");
  const auto [mn_it, mx_it] =
      std::minmax_element(energy.values.begin(), energy.values.end());
  const double mn = *mn_it, mx = *mx_it;
  if (!(mx > mn)) {
    throw Error("no-contrast", "energy map has no dynamic range");
  }

  constexpr int kBins = 256;
  std::array<std::int64_t, kBins> hist{};
  const double scale = kBins / (mx - mn);
  for (double v : energy.values) {
    int b = int((v - mn) * scale);
    hist[std::min(b, kBins - 1)] += 1;
  }

  const std::int64_t total = std::int64_t(energy.values.size());
  double total_mean = 0.0;
  for (int b = 0; b < kBins; ++b) total_mean += double(b) * double(hist[b]);
  total_mean /= double(total);

  // Exhaustive split search: class 0 is bins <= t, class 1 the rest.
  int best_bin = 0;
  double best_var = -1.0;
  std::int64_t w0 = 0;
  double sum0 = 0.0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += hist[t];
    sum0 += double(t) * double(hist[t]);
    const std::int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / double(w0);
    const double mu1 = (total_mean * double(total) - sum0) / double(w1);
    const double var =
        double(w0) * double(w1) * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {  // strict: ties keep the lowest threshold
      best_var = var;
      best_bin = t;
    }
  }
  return best_bin;
}

double otsu_threshold(const Heatmap& energy) {
  const int bin = otsu_threshold_bin(energy);
  const auto [mn_it, mx_it] =
      std::minmax_element(energy.values.begin(), energy.values.end());
  // Upper edge of the chosen bin, back in original units.
  return *mn_it + (*mx_it - *mn_it) * (double(bin) + 1.0) / 256.0;
}

DetectionOutcome energy_bbox(const Heatmap& energy, int img_h, int img_w,
                             const DetectionParams& params) {
  DetectionOutcome out;
  if (energy.values.empty() || img_h <= 0 || img_w <= 0) {
    throw Error("domain", "empty energy map or image");
  }
  out.peak_energy = *std::max_element(energy.values.begin(),
                                      energy.values.end());
  if (out.peak_energy < params.tau_abs) {
    out.present = false;
    return out;
  }
  out.present = true;

  // Supra-threshold support by bin index, so the box is consistent with the
  // histogram split. Constant maps above tau_abs keep every cell.
  int split = -1;
  double mn = 0.0, range = 0.0;
  try {
    split = otsu_threshold_bin(energy);
    const auto [mn_it, mx_it] =
        std::minmax_element(energy.values.begin(), energy.values.end());
    mn = *mn_it;
    range = *mx_it - *mn_it;
  } catch (const Error&) {
    split = -1;  // no contrast: everything is support
  }

  int rmin = energy.rows, rmax = -1, cmin = energy.cols, cmax = -1;
  for (int r = 0; r < energy.rows; ++r) {
    for (int c = 0; c < energy.cols; ++c) {
      bool high = true;
      if (split >= 0) {
        int b = int((energy.at(r, c) - mn) * 256.0 / range);
        high = std::min(b, 255) > split;
      }
      if (high) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
    }
  }
  // With a valid split at least the peak cell is supra-threshold.

  // Continuous cell box -> pixel box, then per-side margin, then clamp.
  const double sy = double(img_h) / energy.rows;
  const double sx = double(img_w) / energy.cols;
  double r0 = rmin * sy, r1 = (rmax + 1) * sy;
  double c0 = cmin * sx, c1 = (cmax + 1) * sx;
  const double mr = params.margin * (r1 - r0);
  const double mc = params.margin * (c1 - c0);
  r0 -= mr;
  r1 += mr;
  c0 -= mc;
  c1 += mc;

  BBox box;
  box.row_min = std::clamp(int(std::floor(r0)), 0, img_h - 1);
  box.row_max = std::clamp(int(std::ceil(r1)) - 1, box.row_min, img_h - 1);
  box.col_min = std::clamp(int(std::floor(c0)), 0, img_w - 1);
  box.col_max = std::clamp(int(std::ceil(c1)) - 1, box.col_min, img_w - 1);
  out.bbox = box;
  return out;
}

Vec2 crop_to_image(const Vec2& crop_rc, const BBox& bbox, int img_h,
                   int img_w) {
  return {(bbox.row_min + crop_rc[0] * bbox.height()) / img_h,
          (bbox.col_min + crop_rc[1] * bbox.width()) / img_w};
}

Vec2 image_to_crop(const Vec2& image_rc, const BBox& bbox, int img_h,
                   int img_w) {
  return {(image_rc[0] * img_h - bbox.row_min) / bbox.height(),
          (image_rc[1] * img_w - bbox.col_min) / bbox.width()};
}

void write_heatmap(std::ostream& out, const Heatmap& map) {
  std::string buf;
  buf.reserve(8 + map.values.size() * 4);
  append_u32_le(buf, std::uint32_t(map.rows));
  append_u32_le(buf, std::uint32_t(map.cols));
  for (double v : map.values) {
    float f = float(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    append_u32_le(buf, bits);
  }
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw Error("io", "failed to write heatmap");
}

Heatmap read_heatmap(std::istream& in) {
  Heatmap map;
  map.rows = int(read_u32_le(in));
  map.cols = int(read_u32_le(in));
  if (map.rows <= 0 || map.cols <= 0 || map.rows > 1 << 16 ||
      map.cols > 1 << 16) {
    throw Error("io", "implausible heatmap dimensions");
  }
  map.values.resize(size_t(map.rows) * map.cols);
  for (double& v : map.values) {
    std::uint32_t bits = read_u32_le(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = double(f);
  }
  return map;
}

void write_heatmap_stack(const std::string& path,
                         std::span<const Heatmap> maps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot open " + path + " for writing");
  for (const Heatmap& m : maps) write_heatmap(out, m);
}

std::vector<Heatmap> read_heatmap_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::vector<Heatmap> maps;
  while (in.peek() != std::char_traits<char>::eof()) {
    maps.push_back(read_heatmap(in));
  }
  return maps;
}

void write_pgm(const std::string& path, const Heatmap& map) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot open " + path + " for writing");
  const double peak = map.values.empty()
                          ? 0.0
                          : *std::max_element(map.values.begin(),
                                              map.values.end());
  out << "P2\n" << map.cols << " " << map.rows << "\n255\n";
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      int v = peak > 0.0 ? int(std::lround(255.0 * map.at(r, c) / peak)) : 0;
      out << std::clamp(v, 0, 255) << (c + 1 == map.cols ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw Error("io", "failed to write " + path);
}

namespace {

int next_pgm_token(std::istream& in) {
  // Skips whitespace and '#' comment lines.
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (ch != std::char_traits<char>::eof() &&
               std::isspace(static_cast<unsigned char>(ch))) {
      in.get();
    } else {
      break;
    }
  }
  int value;
  if (!(in >> value)) throw Error("io", "malformed PGM header");
  return value;
}

}  // namespace

Heatmap read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") {
    throw Error("io", path + ": not a P2/P5 PGM file");
  }
  const int cols = next_pgm_token(in);
  const int rows = next_pgm_token(in);
  const int maxval = next_pgm_token(in);
  if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error("io", path + ": malformed PGM header");
  }
  Heatmap map(rows, cols);
  if (magic == "P2") {
    for (double& v : map.values) {
      int raw;
      if (!(in >> raw)) throw Error("io", path + ": truncated PGM data");
      v = double(raw) / maxval;
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    for (double& v : map.values) {
      unsigned char b[2] = {0, 0};
      in.read(reinterpret_cast<char*>(b), bytes);
      if (!in) throw Error("io", path + ": truncated PGM data");
      int raw = bytes == 2 ? (int(b[0]) << 8 | b[1]) : int(b[0]);
      v = double(raw) / maxval;
    }
  }
  return map;
}

}  // namespace hand3d
