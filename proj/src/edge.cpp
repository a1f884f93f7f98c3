#include "sketchgait/edge.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sketchgait {

namespace {

// Reflect index into [0, n) without repeating the border sample (b c b a | a b c d | d c b a).
int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = int(std::ceil(3.0 * sigma));
    std::vector<double> k(size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
        k[size_t(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (!(sigma > 0.0))
        throw ParameterError("gaussian_blur: sigma must be positive");
    if (sigma > std::min(img.width, img.height) / 4.0)
        throw ParameterError("gaussian_blur: sigma too large for image size");

    const auto kernel = gaussian_kernel(sigma);
    const int radius = int(kernel.size() / 2);
    const int w = img.width, h = img.height;

    // Separable: rows then columns. The sampled 2D Gaussian factorizes exactly,
    // so this equals direct convolution with the normalized 2D kernel.
    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[size_t(k + radius)] * img.at(reflect(x + k, w), y);
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[size_t(k + radius)] * tmp.at(x, reflect(y + k, h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

GradientField sobel_gradients(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw ParameterError("sobel_gradients: image must be at least 3x3");

    const int w = img.width, h = img.height;
    GradientField g;
    g.width = w;
    g.height = h;
    g.gx.resize(size_t(w) * h);
    g.gy.resize(size_t(w) * h);
    g.magnitude.resize(size_t(w) * h);
    g.orientation.resize(size_t(w) * h);

    for (int y = 0; y < h; ++y) {
        const int ym = reflect(y - 1, h), yp = reflect(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xm = reflect(x - 1, w), xp = reflect(x + 1, w);
            const double gx = (img.at(xp, ym) - img.at(xm, ym)) +
                              2.0 * (img.at(xp, y) - img.at(xm, y)) +
                              (img.at(xp, yp) - img.at(xm, yp));
            const double gy = (img.at(xm, yp) - img.at(xm, ym)) +
                              2.0 * (img.at(x, yp) - img.at(x, ym)) +
                              (img.at(xp, yp) - img.at(xp, ym));
            const size_t i = size_t(y) * w + x;
            g.gx[i] = gx / 8.0;
            g.gy[i] = gy / 8.0;
            g.magnitude[i] = std::hypot(g.gx[i], g.gy[i]);
            double theta = std::atan2(g.gy[i], g.gx[i]);
            if (theta < 0.0) theta += M_PI;
            if (theta >= M_PI) theta -= M_PI;  // atan2(0,-x) gives exactly pi
            g.orientation[i] = theta;
        }
    }
    return g;
}

SketchMap sobel_sketch(const GrayImage& img) {
    const GradientField g = sobel_gradients(img);
    SketchMap out(img.width, img.height);
    const double maxmag = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    if (maxmag > 0.0) {
        for (size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = g.magnitude[i] / maxmag;
    }
    return out;
}

SketchMap canny(const GrayImage& img, double sigma, double low, double high) {
    if (!(low > 0.0 && high < 1.0 && low < high))
        throw ParameterError("canny: thresholds must satisfy 0 < low < high < 1");

    const GrayImage smooth = gaussian_blur(img, sigma);
    const GradientField g = sobel_gradients(smooth);
    const int w = img.width, h = img.height;

    const double maxmag = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    SketchMap out(w, h);
    if (maxmag == 0.0) return out;

    // Non-maximum suppression along the quantized gradient direction. Neighbor
    // offsets per bin, in image coordinates (y grows downward).
    auto mag_at = [&](int x, int y) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
        return g.magnitude[size_t(y) * w + x];
    };
    std::vector<double> nms(size_t(w) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = size_t(y) * w + x;
            const double m = g.magnitude[i];
            if (m == 0.0) continue;
            const int bin = int(std::lround(g.orientation[i] / (M_PI / 4.0))) % 4;
            int dx = 0, dy = 0;
            switch (bin) {
                case 0: dx = 1; dy = 0; break;   // gradient ~horizontal
                case 1: dx = 1; dy = 1; break;   // ~45 degrees
                case 2: dx = 0; dy = 1; break;   // ~vertical
                case 3: dx = -1; dy = 1; break;  // ~135 degrees
            }
            // Strict comparison against both neighbors; ties suppress.
            if (m > mag_at(x + dx, y + dy) && m > mag_at(x - dx, y - dy))
                nms[i] = m;
        }
    }

    const double tlow = low * maxmag;
    const double thigh = high * maxmag;

    // 0 = below low, 1 = weak, 2 = strong.
    std::vector<uint8_t> cls(size_t(w) * h, 0);
    std::vector<size_t> stack;
    for (size_t i = 0; i < cls.size(); ++i) {
        if (nms[i] >= thigh) {
            cls[i] = 2;
            stack.push_back(i);
        } else if (nms[i] >= tlow) {
            cls[i] = 1;
        }
    }

    // Hysteresis: 8-connected flood from strong pixels through weak ones.
    std::vector<uint8_t> keep(size_t(w) * h, 0);
    for (size_t s : stack) keep[s] = 1;
    while (!stack.empty()) {
        const size_t i = stack.back();
        stack.pop_back();
        const int x = int(i % w), y = int(i / w);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const size_t j = size_t(ny) * w + nx;
                if (cls[j] >= 1 && !keep[j]) {
                    keep[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    for (size_t i = 0; i < keep.size(); ++i) out.data[i] = keep[i] ? 1.0 : 0.0;
    return out;
}

}  // namespace sketchgait
