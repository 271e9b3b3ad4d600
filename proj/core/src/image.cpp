#include "pollisim/image.hpp"

#include <algorithm>

namespace pollisim {

Image::Image(int width, int height, Rgb8 fill) : width_(width), height_(height) {
    data_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

std::uint8_t Image::at_clamped(int x, int y, int channel) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[idx(x, y) + channel];
}

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
    data_.assign(static_cast<std::size_t>(width) * height, kNoReturn);
}

PixelBox PixelBox::clipped(int image_width, int image_height) const {
    PixelBox b = *this;
    b.u_min = std::max(b.u_min, 0);
    b.v_min = std::max(b.v_min, 0);
    b.u_max = std::min(b.u_max, image_width - 1);
    b.v_max = std::min(b.v_max, image_height - 1);
    return b;
}

}  // namespace pollisim
