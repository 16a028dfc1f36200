#pragma once

#include <filesystem>

#include "simval/image.hpp"

namespace simval {

/// PFM: "PF" (3 channels) or "Pf" (1 channel), little-endian (scale -1.0),
/// rows stored bottom-up. Values are written as float32.
void write_pfm(const std::filesystem::path &path, const Image<double> &img);
Image<double> read_pfm(const std::filesystem::path &path);

/// Binary PPM (P6). maxval is 2^bits - 1; 16-bit samples are big-endian.
void write_ppm(const std::filesystem::path &path, const LdrImage &img);
LdrImage read_ppm(const std::filesystem::path &path);

/// Middlebury .flo: float32 magic 202021.25, int32 width, int32 height, then
/// interleaved (u, v) float32 in row-major order, top row first.
inline constexpr float kFloMagic = 202021.25f;
void write_flo(const std::filesystem::path &path, const FlowField &flow);
FlowField read_flo(const std::filesystem::path &path);

}  // namespace simval
