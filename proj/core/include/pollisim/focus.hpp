#pragma once

#include <functional>

#include "pollisim/image.hpp"
#include "pollisim/scene.hpp"

namespace pollisim {

/// Variance of the 4-neighbor Laplacian response over the ROI, pooled across
/// all three channels (no grayscale conversion, no pre-blur). Border pixels
/// replicate. Throws DomainError for ROIs below 9 px or outside the image.
double focus_score(const Image& img, const PixelBox& roi);

/// Full-image convenience overload.
double focus_score(const Image& img);

struct AutofocusParams {
    double threshold = 50.0;  // scores at or above this count as in focus
    double gain = 0.1;        // proportional dial step per unit of score deficit
    int max_steps = 100;
    double min_step = 1e-4;
};

/// Hill climber over the zoom dial with a proportional step size. Keeps a
/// travel direction, flips and halves the step when the score drops, and
/// walks through plateaus. One call = one dial command.
class AutofocusController {
public:
    explicit AutofocusController(const AutofocusParams& params) : params_(params) {}

    /// Zoom-dial delta for the current score; 0 when done (in focus or stuck).
    double step(double score, const MicroscopeState& state);

    bool done() const { return done_; }
    bool converged() const { return converged_; }
    int steps_taken() const { return steps_; }

private:
    AutofocusParams params_;
    double direction_ = -1.0;  // toward shorter focal distances first
    double prev_score_ = -1.0;
    bool has_prev_ = false;
    double scale_ = 1.0;
    int steps_ = 0;
    bool done_ = false;
    bool converged_ = false;
};

struct AutofocusResult {
    MicroscopeState state;
    bool converged = false;
    int steps = 0;
    double final_score = 0.0;
};

/// Runs the controller to termination; `capture` renders the microscope view
/// for a candidate state and `roi` is the region the score is computed on.
AutofocusResult run_autofocus(const std::function<Image(const MicroscopeState&)>& capture,
                              const PixelBox& roi, MicroscopeState start,
                              const AutofocusParams& params = {});

}  // namespace pollisim
