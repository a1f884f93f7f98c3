#pragma once

#include "sketchgait/raster.hpp"

namespace sketchgait {

// Signed gradient rasters plus derived magnitude/orientation.
// magnitude[i] = sqrt(gx[i]^2 + gy[i]^2); orientation folded into [0, pi).
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx, gy, magnitude, orientation;
};

// Gaussian smoothing with kernel radius ceil(3*sigma), reflect borders.
// The sampled kernel is normalized to unit sum, so constants map to themselves.
// Throws ParameterError when sigma <= 0 or sigma > min(width, height) / 4.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Classical 3x3 Sobel operator with reflect borders. Raw responses are scaled
// by 1/8 so inputs in [0,1] keep gx, gy in [-1,1]. Requires width, height >= 3.
GradientField sobel_gradients(const GrayImage& img);

// Soft edge map: Sobel magnitude normalized by its maximum (all-zero when flat).
SketchMap sobel_sketch(const GrayImage& img);

// Canny detector: blur -> Sobel -> non-maximum suppression (orientation
// quantized to 4 bins) -> double threshold at low/high fractions of the
// pre-suppression maximum magnitude -> 8-connected hysteresis from strong
// pixels. Output is binary. NMS keeps a pixel only when strictly greater than
// both neighbors along the quantized gradient direction; out-of-image
// neighbors count as zero. A flat image yields an all-zero map.
// Throws ParameterError unless 0 < low < high < 1.
SketchMap canny(const GrayImage& img, double sigma, double low, double high);

struct CannyParams {
    double sigma = 1.4;
    double low = 0.1;
    double high = 0.3;
};

}  // namespace sketchgait
