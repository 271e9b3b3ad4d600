#include "pollisim/color.hpp"

#include <algorithm>
#include <cmath>

namespace pollisim {

Hsv8 rgb_to_hsv(const Rgb8& c) {
    const int r = c.r, g = c.g, b = c.b;
    const int v = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int chroma = v - mn;

    Hsv8 out;
    out.v = static_cast<std::uint8_t>(v);
    out.s = v == 0 ? 0 : static_cast<std::uint8_t>((255 * chroma * 2 + v) / (2 * v));
    if (chroma == 0) {
        out.h = 0;
        return out;
    }

    double hue_deg;
    if (v == r) {
        hue_deg = 60.0 * (g - b) / chroma;
    } else if (v == g) {
        hue_deg = 120.0 + 60.0 * (b - r) / chroma;
    } else {
        hue_deg = 240.0 + 60.0 * (r - g) / chroma;
    }
    if (hue_deg < 0.0) hue_deg += 360.0;
    int h = static_cast<int>(std::lround(hue_deg / 2.0)) % 180;
    out.h = static_cast<std::uint8_t>(h);
    return out;
}

Rgb8 hsv_to_rgb(const Hsv8& c) {
    if (c.s == 0) return {c.v, c.v, c.v};
    const double h = 2.0 * c.h / 60.0;  // sector in [0,6)
    const int i = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double v = c.v;
    const double s = c.s / 255.0;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));

    auto u8 = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0))); };
    switch (i) {
        case 0: return {u8(v), u8(t), u8(p)};
        case 1: return {u8(q), u8(v), u8(p)};
        case 2: return {u8(p), u8(v), u8(t)};
        case 3: return {u8(p), u8(q), u8(v)};
        case 4: return {u8(t), u8(p), u8(v)};
        default: return {u8(v), u8(p), u8(q)};
    }
}

}  // namespace pollisim
