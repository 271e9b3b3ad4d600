#include "pollisim/inspection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pollisim/errors.hpp"

namespace pollisim {

EllipseFit find_flower_center(const Image& img, const CenterBands& bands) {
    if (img.empty()) throw CenterNotFoundError("find_flower_center: empty image");
    const int w = img.width();
    const int h = img.height();

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (hsv_in_band(rgb_to_hsv(img.at(x, y)), bands.lo, bands.hi)) {
                mask[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }

    // largest 8-connected component
    std::vector<int> best_pixels;
    std::vector<int> stack, current;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i0 = static_cast<std::size_t>(y) * w + x;
            if (mask[i0] != 1) continue;
            mask[i0] = 2;
            stack.assign(1, static_cast<int>(i0));
            current.clear();
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                current.push_back(i);
                const int px = i % w;
                const int py = i / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask[ni] == 1) {
                            mask[ni] = 2;
                            stack.push_back(static_cast<int>(ni));
                        }
                    }
                }
            }
            if (current.size() > best_pixels.size()) best_pixels.swap(current);
        }
    }

    if (best_pixels.size() < static_cast<std::size_t>(bands.min_component_px)) {
        throw CenterNotFoundError("find_flower_center: no component passed the HSV band");
    }

    // image moments of the winning component
    double su = 0.0, sv = 0.0;
    PixelBox box{w, h, 0, 0};
    for (int i : best_pixels) {
        const int px = i % w;
        const int py = i / w;
        su += px;
        sv += py;
        box.u_min = std::min(box.u_min, px);
        box.u_max = std::max(box.u_max, px);
        box.v_min = std::min(box.v_min, py);
        box.v_max = std::max(box.v_max, py);
    }
    const double n = static_cast<double>(best_pixels.size());
    const double cu = su / n;
    const double cv = sv / n;

    double muu = 0.0, mvv = 0.0, muv = 0.0;
    for (int i : best_pixels) {
        const double du = (i % w) - cu;
        const double dv = (i / w) - cv;
        muu += du * du;
        mvv += dv * dv;
        muv += du * dv;
    }
    muu /= n;
    mvv /= n;
    muv /= n;

    // eigendecomposition of the 2x2 covariance
    const double tr = muu + mvv;
    const double det = muu * mvv - muv * muv;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double l1 = tr / 2.0 + disc;
    const double l2 = std::max(0.0, tr / 2.0 - disc);

    EllipseFit fit;
    fit.center_u = cu;
    fit.center_v = cv;
    // solid-ellipse second moment is a^2/4 along each axis
    fit.semi_major = 2.0 * std::sqrt(l1);
    fit.semi_minor = std::max(2.0 * std::sqrt(l2), 0.5);
    fit.angle_rad = 0.5 * std::atan2(2.0 * muv, muu - mvv);
    fit.pixel_count = static_cast<long>(best_pixels.size());
    fit.bounding_box = box;
    return fit;
}

long count_pollen(const Image& img, const PollenBands& bands) {
    if (img.empty()) return 0;
    long count = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Hsv8 hsv = rgb_to_hsv(img.at(x, y));
            const bool in_stage1 = hsv_in_band(hsv, bands.remove_lo, bands.remove_hi);
            if (bands.stage1_selects_removed ? in_stage1 : !in_stage1) continue;
            if (hsv_in_band(hsv, bands.pollen_lo, bands.pollen_hi)) ++count;
        }
    }
    return count;
}

}  // namespace pollisim
