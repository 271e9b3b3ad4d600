#pragma once

#include <cstdint>

namespace pollisim {

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb8&) const = default;
};

/// 8-bit HSV. NOTE the hue convention: H is degrees/2, so H in [0,180).
/// Every HSV bound in this codebase (flower-center band, pollen filters)
/// is expressed on that scale; a full-degree hue here is a silent 2x bug.
struct Hsv8 {
    std::uint8_t h = 0;  // [0,180)
    std::uint8_t s = 0;  // [0,255]
    std::uint8_t v = 0;  // [0,255]

    bool operator==(const Hsv8&) const = default;
};

/// V = max(R,G,B); S = 255*(V-min)/V (0 when V=0); H = degrees/2 rounded.
Hsv8 rgb_to_hsv(const Rgb8& c);

/// Rounded inverse; rgb_to_hsv(hsv_to_rgb(x)) may drift by 1 due to 8-bit
/// quantization, so tests that need exact HSV values assert on bands, not
/// round trips.
Rgb8 hsv_to_rgb(const Hsv8& c);

/// Inclusive box test on all three channels.
inline bool hsv_in_band(const Hsv8& c, const Hsv8& lo, const Hsv8& hi) {
    return c.h >= lo.h && c.h <= hi.h && c.s >= lo.s && c.s <= hi.s && c.v >= lo.v && c.v <= hi.v;
}

}  // namespace pollisim
