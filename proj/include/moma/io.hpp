// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "moma/depth.hpp"
#include "moma/model.hpp"

namespace moma {

inline constexpr double kDefaultDepthScale = 0.001;  // meters per PNG unit

/// Grayscale PFM ("Pf"). Byte order follows the sign of the scale field;
/// files are written little-endian (scale -1), bottom row first.
DepthMap read_pfm(const std::string& path);
void write_pfm(const std::string& path, const DepthMap& map);

/// 16-bit grayscale PNG; stored value * depth_scale = meters, 0 = missing.
DepthMap read_png_depth(const std::string& path, double depth_scale);
void write_png_depth(const std::string& path, const DepthMap& map,
                     double depth_scale);

/// Dispatches on the extension (.pfm or .png).
DepthMap load_depth(const std::string& path,
                    double depth_scale = kDefaultDepthScale);
void save_depth(const std::string& path, const DepthMap& map,
                double depth_scale = kDefaultDepthScale);

/// 8-bit PNG (any channel layout is reduced to its first channel) or PFM;
/// nonzero means set.
Mask load_mask(const std::string& path);
void save_mask_png(const std::string& path, const Mask& mask);

/// CSV with header `u,v,z_c` or `u,v,z_c,z_p`.
SampleSet parse_samples_csv(std::string_view text);
std::string samples_to_csv(const SampleSet& samples);
SampleSet load_samples_csv(const std::string& path);
void save_samples_csv(const std::string& path, const SampleSet& samples);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const AlignmentModel& model);
AlignmentModel model_from_json(std::string_view text);
AlignmentModel load_model(const std::string& path);
void save_model(const std::string& path, const AlignmentModel& model);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace moma
