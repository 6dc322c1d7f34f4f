// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "moma/error.hpp"

namespace moma {

using json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::kIo, "write failed: " + path);
}

// --- PFM -------------------------------------------------------------------

DepthMap read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  if (!(in >> magic >> width >> height >> scale)) {
    fail(ErrorCode::kParse, path + ": malformed PFM header");
  }
  if (magic != "Pf") {
    fail(ErrorCode::kParse, path + ": only grayscale PFM (Pf) is supported");
  }
  if (width < 1 || height < 1 || scale == 0.0) {
    fail(ErrorCode::kParse, path + ": invalid PFM dimensions or scale");
  }
  in.get();  // single whitespace byte ends the header
  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(std::uint32_t)) {
    fail(ErrorCode::kParse, path + ": truncated PFM data");
  }
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  std::vector<double> data(count);
  for (int row = 0; row < height; ++row) {
    const int v = height - 1 - row;  // bottom row first
    for (int u = 0; u < width; ++u) {
      std::uint32_t bits = raw[static_cast<std::size_t>(row) * width + u];
      if (file_little != host_little) bits = __builtin_bswap32(bits);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      data[static_cast<std::size_t>(v) * width + u] = f;
    }
  }
  return DepthMap::from_measurements(width, height, std::move(data));
}

void write_pfm(const std::string& path, const DepthMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  const bool host_little = std::endian::native == std::endian::little;
  out << "Pf\n" << map.width() << " " << map.height() << "\n"
      << (host_little ? "-1" : "1") << "\n";
  std::vector<float> row(static_cast<std::size_t>(map.width()));
  for (int v = map.height() - 1; v >= 0; --v) {
    for (int u = 0; u < map.width(); ++u) row[u] = static_cast<float>(map.at(u, v));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) fail(ErrorCode::kIo, "write failed: " + path);
}

// --- PNG -------------------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;  // rows, big-endian samples as stored
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  *err = msg;
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

PngImage read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(ErrorCode::kIo, "cannot open " + path);
  std::string err;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::kIo, "libpng initialization failed");
  }
  PngImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kParse, path + ": " + err);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  img.pixels.resize(stride * img.height);
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, int width, int height, int bit_depth,
               const std::vector<std::uint8_t>& pixels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(ErrorCode::kIo, "cannot write " + path);
  std::string err;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::kIo, "libpng initialization failed");
  }
  const std::size_t stride = static_cast<std::size_t>(width) * (bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels.data() + y * stride);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, path + ": " + err);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void check_scale(double depth_scale) {
  if (!(depth_scale > 0.0) || !std::isfinite(depth_scale)) {
    fail(ErrorCode::kInvalidArgument, "depth scale must be positive");
  }
}

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

DepthMap read_png_depth(const std::string& path, double depth_scale) {
  check_scale(depth_scale);
  const PngImage img = read_png(path);
  if (img.bit_depth != 16 || img.channels != 1) {
    fail(ErrorCode::kParse, path + ": depth PNG must be 16-bit grayscale");
  }
  std::vector<double> data(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned raw = (img.pixels[2 * i] << 8) | img.pixels[2 * i + 1];
    data[i] = raw * depth_scale;
  }
  return DepthMap::from_measurements(img.width, img.height, std::move(data));
}

void write_png_depth(const std::string& path, const DepthMap& map,
                     double depth_scale) {
  check_scale(depth_scale);
  const auto data = map.data();
  std::vector<std::uint8_t> bytes(data.size() * 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    unsigned raw = 0;
    if (is_valid_measurement(data[i])) {
      raw = static_cast<unsigned>(
          std::clamp(std::lround(data[i] / depth_scale), 0L, 65535L));
    }
    bytes[2 * i] = static_cast<std::uint8_t>(raw >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(raw & 0xff);
  }
  write_png(path, map.width(), map.height(), 16, bytes);
}

DepthMap load_depth(const std::string& path, double depth_scale) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return read_pfm(path);
  if (ext == ".png") return read_png_depth(path, depth_scale);
  fail(ErrorCode::kInvalidArgument,
       path + ": unsupported depth format (expected .pfm or .png)");
}

void save_depth(const std::string& path, const DepthMap& map, double depth_scale) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") return write_pfm(path, map);
  if (ext == ".png") return write_png_depth(path, map, depth_scale);
  fail(ErrorCode::kInvalidArgument,
       path + ": unsupported depth format (expected .pfm or .png)");
}

Mask load_mask(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pfm") {
    const DepthMap m = read_pfm(path);
    std::vector<std::uint8_t> bits(m.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = is_valid(m.data()[i]);
    return Mask(m.width(), m.height(), std::move(bits));
  }
  if (ext != ".png") {
    fail(ErrorCode::kInvalidArgument, path + ": masks must be .png or .pfm");
  }
  const PngImage img = read_png(path);
  const std::size_t bytes_per_sample = img.bit_depth / 8;
  const std::size_t pixel_bytes = bytes_per_sample * img.channels;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bool set = false;
    for (std::size_t b = 0; b < bytes_per_sample; ++b) {
      set |= img.pixels[i * pixel_bytes + b] != 0;
    }
    bits[i] = set ? 1 : 0;
  }
  return Mask(img.width, img.height, std::move(bits));
}

void save_mask_png(const std::string& path, const Mask& mask) {
  std::vector<std::uint8_t> bytes(mask.bits().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.bits()[i] ? 255 : 0;
  write_png(path, mask.width(), mask.height(), 8, bytes);
}

// --- Sample CSV ------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kParse, "samples CSV line " + std::to_string(line) +
                              ": bad number '" + s + "'");
}

std::string fmt17(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SampleSet parse_samples_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool has_zp = false;
  bool header = false;
  std::vector<SamplePoint> points;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells == std::vector<std::string>{"u", "v", "z_c"}) {
        has_zp = false;
      } else if (cells == std::vector<std::string>{"u", "v", "z_c", "z_p"}) {
        has_zp = true;
      } else {
        fail(ErrorCode::kParse, "samples CSV: header must be u,v,z_c[,z_p]");
      }
      header = true;
      continue;
    }
    if (cells.size() != (has_zp ? 4u : 3u)) {
      fail(ErrorCode::kParse, "samples CSV line " + std::to_string(lineno) +
                                  ": wrong column count");
    }
    SamplePoint p;
    const double u = parse_double(cells[0], lineno);
    const double v = parse_double(cells[1], lineno);
    if (u != std::floor(u) || v != std::floor(v)) {
      fail(ErrorCode::kParse, "samples CSV line " + std::to_string(lineno) +
                                  ": pixel coordinates must be integers");
    }
    p.u = static_cast<int>(u);
    p.v = static_cast<int>(v);
    p.z_c = parse_double(cells[2], lineno);
    if (has_zp) {
      const double zp = parse_double(cells[3], lineno);
      p.z_p = std::isfinite(zp) ? zp : kInvalidDepth;
    }
    points.push_back(p);
  }
  if (!header) fail(ErrorCode::kParse, "samples CSV: missing header");
  return SampleSet::from_stacked(std::move(points));
}

std::string samples_to_csv(const SampleSet& samples) {
  const bool with_zp = samples.all_paired();
  std::string out = with_zp ? "u,v,z_c,z_p\n" : "u,v,z_c\n";
  for (const SamplePoint& p : samples.points()) {
    out += std::to_string(p.u) + "," + std::to_string(p.v) + "," + fmt17(p.z_c);
    if (with_zp) out += "," + fmt17(p.z_p);
    out += "\n";
  }
  return out;
}

SampleSet load_samples_csv(const std::string& path) {
  return parse_samples_csv(read_text_file(path));
}

void save_samples_csv(const std::string& path, const SampleSet& samples) {
  write_text_file(path, samples_to_csv(samples));
}

// --- Model file ------------------------------------------------------------

std::string model_to_json(const AlignmentModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["method"] = std::string(to_string(model.method()));
  j["norm"] = std::string(to_string(model.norm));
  j["calib_dims"] = {{"width", model.calib_dims.width},
                     {"height", model.calib_dims.height}};
  j["created_at"] = model.created_at;
  j["sample_count"] = model.sample_count;
  json params;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GlobalScaleShift>) {
          params["s"] = m.s;
          params["t"] = m.t;
        } else if constexpr (std::is_same_v<T, LwlrPayload>) {
          params["bandwidth"] = m.config.bandwidth;
          params["epsilon"] = m.config.epsilon;
          json pts = json::array();
          for (const SamplePoint& p : m.samples.points()) {
            pts.push_back({p.u, p.v, p.z_c, p.z_p});
          }
          params["samples"] = std::move(pts);
        } else {
          params["s"] = m.s;
          params["theta"] = m.theta;
          params["phi"] = m.phi;
          params["t3"] = m.t3;
          params["cxp"] = m.cxp;
          params["cyp"] = m.cyp;
          params["fp"] = m.fp;
        }
      },
      model.payload);
  j["params"] = std::move(params);
  if (model.report) {
    j["fit"] = {{"init_cost", model.report->init_cost},
                {"final_cost", model.report->final_cost},
                {"iterations", model.report->iterations},
                {"converged", model.report->converged}};
  }
  return j.dump(2) + "\n";
}

AlignmentModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      fail(ErrorCode::kParse, "model file: unsupported format_version");
    }
    AlignmentModel m;
    const auto method = parse_align_method(j.at("method").get<std::string>());
    if (!method) fail(ErrorCode::kParse, "model file: unknown method");
    const auto norm = parse_normalization(j.at("norm").get<std::string>());
    if (!norm) fail(ErrorCode::kParse, "model file: unknown norm");
    m.norm = *norm;
    m.calib_dims.width = j.at("calib_dims").at("width").get<int>();
    m.calib_dims.height = j.at("calib_dims").at("height").get<int>();
    m.created_at = j.at("created_at").get<std::string>();
    m.sample_count = j.at("sample_count").get<std::size_t>();
    const json& p = j.at("params");
    switch (*method) {
      case AlignMethod::kGssa:
        m.payload = GlobalScaleShift{p.at("s").get<double>(), p.at("t").get<double>()};
        break;
      case AlignMethod::kLwlr: {
        LwlrConfig cfg{p.at("bandwidth").get<double>(), p.at("epsilon").get<double>()};
        std::vector<SamplePoint> pts;
        for (const json& row : p.at("samples")) {
          if (!row.is_array() || row.size() != 4 || row[3].is_null()) {
            fail(ErrorCode::kParse, "model file: lwlr samples need [u, v, z_c, z_p]");
          }
          pts.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>(),
                         row[3].get<double>()});
        }
        m.payload = LwlrPayload{cfg, SampleSet::from_stacked(std::move(pts), m.calib_dims)};
        break;
      }
      case AlignMethod::kSsra: {
        ThetaParams th;
        th.s = p.at("s").get<double>();
        th.theta = p.at("theta").get<double>();
        th.phi = p.at("phi").get<double>();
        th.t3 = p.at("t3").get<double>();
        th.cxp = p.at("cxp").get<double>();
        th.cyp = p.at("cyp").get<double>();
        th.fp = p.at("fp").get<double>();
        if (th.fp == 0.0) fail(ErrorCode::kZeroFocal, "model file: fp is zero");
        m.payload = th;
        break;
      }
    }
    if (j.contains("fit")) {
      const json& f = j["fit"];
      SolverReport r;
      r.init_cost = f.at("init_cost").get<double>();
      r.final_cost = f.at("final_cost").get<double>();
      r.iterations = f.at("iterations").get<int>();
      r.converged = f.at("converged").get<bool>();
      m.report = r;
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("model file: ") + e.what());
  }
}

AlignmentModel load_model(const std::string& path) {
  return model_from_json(read_text_file(path));
}

void save_model(const std::string& path, const AlignmentModel& model) {
  write_text_file(path, model_to_json(model));
}

}  // namespace moma
