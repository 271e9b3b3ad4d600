#include "pollisim/focus.hpp"

#include <cmath>
#include <cstdint>

#include "pollisim/errors.hpp"

namespace pollisim {

double focus_score(const Image& img, const PixelBox& roi) {
    if (img.empty()) throw DomainError("focus_score: empty image");
    if (!roi.valid() || roi.u_min < 0 || roi.v_min < 0 || roi.u_max >= img.width() ||
        roi.v_max >= img.height() || roi.area() < 9) {
        throw DomainError("focus_score: degenerate roi");
    }

    // K = [[0,1,0],[1,-4,1],[0,1,0]], replicate border, integer responses.
    std::int64_t sum = 0;
    std::int64_t sum_sq = 0;
    for (int y = roi.v_min; y <= roi.v_max; ++y) {
        for (int x = roi.u_min; x <= roi.u_max; ++x) {
            for (int c = 0; c < 3; ++c) {
                const int center = img.at_clamped(x, y, c);
                const int resp = img.at_clamped(x, y - 1, c) + img.at_clamped(x, y + 1, c) +
                                 img.at_clamped(x - 1, y, c) + img.at_clamped(x + 1, y, c) -
                                 4 * center;
                sum += resp;
                sum_sq += static_cast<std::int64_t>(resp) * resp;
            }
        }
    }
    const double n = static_cast<double>(roi.area()) * 3.0;
    const double mean = static_cast<double>(sum) / n;
    return static_cast<double>(sum_sq) / n - mean * mean;
}

double focus_score(const Image& img) {
    return focus_score(img, {0, 0, img.width() - 1, img.height() - 1});
}

double AutofocusController::step(double score, const MicroscopeState& state) {
    if (done_) return 0.0;
    if (score >= params_.threshold) {
        done_ = true;
        converged_ = true;
        return 0.0;
    }
    if (++steps_ > params_.max_steps) {
        done_ = true;
        return 0.0;
    }

    if (has_prev_) {
        if (score < prev_score_) {  // got worse: turn around, tighten the step
            direction_ = -direction_;
            scale_ *= 0.5;
        }
        // plateaus (score unchanged) keep walking in the same direction
    }
    prev_score_ = score;
    has_prev_ = true;

    const double deficit = std::max(0.05, (params_.threshold - score) / params_.threshold);
    double delta = direction_ * scale_ * params_.gain * deficit;

    // pinned against a dial stop: reflect inward, or give up once the step
    // has collapsed
    if ((state.zoom <= 0.0 && delta < 0.0) || (state.zoom >= 1.0 && delta > 0.0)) {
        direction_ = -direction_;
        scale_ *= 0.5;
        delta = direction_ * scale_ * params_.gain * deficit;
    }
    if (std::abs(delta) < params_.min_step) {
        done_ = true;
        return 0.0;
    }
    return delta;
}

AutofocusResult run_autofocus(const std::function<Image(const MicroscopeState&)>& capture,
                              const PixelBox& roi, MicroscopeState start,
                              const AutofocusParams& params) {
    AutofocusController ctrl(params);
    MicroscopeState state = start;
    double score = focus_score(capture(state), roi);
    while (true) {
        const double delta = ctrl.step(score, state);
        if (ctrl.done()) break;
        state.set_zoom(state.zoom + delta);
        score = focus_score(capture(state), roi);
    }
    return {state, ctrl.converged(), ctrl.steps_taken(), score};
}

}  // namespace pollisim
