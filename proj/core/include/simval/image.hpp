#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace simval {

/// Row-major interleaved image. Row 0 is the top of the picture.
template <typename T>
class Image {
  public:
    Image() = default;
    Image(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::size_t index(int x, int y, int c = 0) const {
        assert(inside(x, y) && c >= 0 && c < channels_);
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    T &at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    const T &at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    bool same_shape(const Image &o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    friend bool operator==(const Image &, const Image &) = default;

  private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

/// Linear HDR radiance, RGB.
using RadianceImage = Image<double>;
/// Single-channel intensity in normalized units.
using GrayImage = Image<double>;
/// Two-channel (u, v) displacement in pixels per frame.
using FlowField = Image<double>;
using Mask = Image<std::uint8_t>;

/// Quantized sensor output; values lie in [0, 2^bits - 1].
struct LdrImage {
    Image<std::uint16_t> pixels;
    int bits = 8;

    int max_value() const { return (1 << bits) - 1; }
    friend bool operator==(const LdrImage &, const LdrImage &) = default;
};

/// Rec. 709 luma of an RGB image.
GrayImage to_gray(const RadianceImage &rgb);
/// Luma of an LDR image in normalized [0, 1] units.
GrayImage to_gray(const LdrImage &ldr);
/// LDR image as normalized RGB doubles.
RadianceImage to_normalized(const LdrImage &ldr);

}  // namespace simval
