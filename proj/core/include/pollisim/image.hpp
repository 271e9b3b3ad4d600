#pragma once

#include <cstdint>
#include <vector>

#include "pollisim/color.hpp"

namespace pollisim {

/// 8-bit RGB raster, row-major, 3 channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb8 fill = {0, 0, 0});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    Rgb8 at(int x, int y) const {
        const std::size_t i = idx(x, y);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    void set(int x, int y, Rgb8 c) {
        const std::size_t i = idx(x, y);
        data_[i] = c.r;
        data_[i + 1] = c.g;
        data_[i + 2] = c.b;
    }
    /// Channel value with replicate border for out-of-range coordinates.
    std::uint8_t at_clamped(int x, int y, int channel) const;

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool operator==(const Image&) const = default;

private:
    std::size_t idx(int x, int y) const { return (static_cast<std::size_t>(y) * width_ + x) * 3; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel ray range in millimeters (distance along the pixel ray from the
/// camera origin, not axial z). 0 is the reserved no-return sentinel.
class DepthMap {
public:
    static constexpr float kNoReturn = 0.0f;

    DepthMap() = default;
    DepthMap(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, float range_mm) { data_[static_cast<std::size_t>(y) * width_ + x] = range_mm; }
    static bool is_return(float value) { return value > 0.0f; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    bool operator==(const DepthMap&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Integer bounding box, half-open is NOT used here: max coordinates are
/// inclusive pixel indices.
struct PixelBox {
    int u_min = 0;
    int v_min = 0;
    int u_max = 0;
    int v_max = 0;

    int width() const { return u_max - u_min + 1; }
    int height() const { return v_max - v_min + 1; }
    long area() const { return static_cast<long>(width()) * height(); }
    double center_u() const { return 0.5 * (u_min + u_max); }
    double center_v() const { return 0.5 * (v_min + v_max); }

    PixelBox clipped(int image_width, int image_height) const;
    bool valid() const { return u_min <= u_max && v_min <= v_max; }
};

}  // namespace pollisim
