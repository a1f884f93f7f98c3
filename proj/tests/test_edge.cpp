#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "oracles.hpp"
#include "sketchgait/edge.hpp"
#include "sketchgait/hook.hpp"
#include "sketchgait/png_io.hpp"

using namespace sketchgait;

TEST_CASE("gaussian_blur keeps constants constant") {
    GrayImage img(9, 7, 0.37);
    for (double sigma : {0.5, 1.0, 1.6}) {
        const GrayImage out = gaussian_blur(img, sigma);
        for (double v : out.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
    }
}

TEST_CASE("gaussian_blur on a single pixel is the identity") {
    GrayImage img(1, 1);
    img.data[0] = 0.81;
    // sigma constrained by the size precondition
    const GrayImage out = gaussian_blur(img, 0.25);
    CHECK(out.data[0] == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("gaussian_blur impulse response equals the direct 2D kernel convolution") {
    GrayImage img(5, 5, 0.0);
    img.at(2, 2) = 1.0;
    const GrayImage got = gaussian_blur(img, 1.0);
    const GrayImage want = oracle::gaussian_blur_direct(img, 1.0);
    REQUIRE(got.data.size() == want.data.size());
    for (size_t i = 0; i < got.data.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
}

TEST_CASE("gaussian_blur rejects bad sigma") {
    GrayImage img(8, 8, 0.5);
    CHECK_THROWS_AS(gaussian_blur(img, 0.0), ParameterError);
    CHECK_THROWS_AS(gaussian_blur(img, -1.0), ParameterError);
    CHECK_THROWS_AS(gaussian_blur(img, 3.0), ParameterError);  // > min(w,h)/4
}

TEST_CASE("sobel_gradients is zero on constants") {
    GrayImage img(6, 5, 0.42);
    const GradientField g = sobel_gradients(img);
    for (size_t i = 0; i < g.magnitude.size(); ++i) {
        CHECK(g.gx[i] == 0.0);
        CHECK(g.gy[i] == 0.0);
        CHECK(g.magnitude[i] == 0.0);
    }
}

TEST_CASE("sobel_gradients horizontal ramp has gx = 1/(w-1) interior") {
    const int w = 5, h = 5;
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = double(x) / (w - 1);
    const GradientField g = sobel_gradients(img);
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            CHECK(g.gx[size_t(y) * w + x] == doctest::Approx(1.0 / (w - 1)).epsilon(1e-12));
            CHECK(g.gy[size_t(y) * w + x] == doctest::Approx(0.0));
        }
}

TEST_CASE("sobel_gradients matches the direct convolution oracle on random images") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = oracle::random_image(9, 7, rng);
        const GradientField got = sobel_gradients(img);
        const oracle::SobelDirect want = oracle::sobel_direct(img);
        for (size_t i = 0; i < got.magnitude.size(); ++i) {
            CHECK(std::abs(got.gx[i] - want.gx[i]) < 1e-9);
            CHECK(std::abs(got.gy[i] - want.gy[i]) < 1e-9);
            CHECK(std::abs(got.magnitude[i] - want.magnitude[i]) < 1e-9);
            // GradientField invariant
            CHECK(std::abs(got.magnitude[i] -
                           std::sqrt(got.gx[i] * got.gx[i] + got.gy[i] * got.gy[i])) < 1e-9);
        }
    }
}

TEST_CASE("sobel_gradients orientation at a horizontal step row is pi/2") {
    const int w = 7, h = 8;
    GrayImage img(w, h);
    for (int y = h / 2; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = 1.0;
    const GradientField g = sobel_gradients(img);
    // rows adjacent to the step carry the response
    for (int x = 0; x < w; ++x) {
        const size_t i = size_t(h / 2) * w + x;
        CHECK(g.magnitude[i] > 0.0);
        CHECK(g.orientation[i] == doctest::Approx(M_PI / 2).epsilon(1e-6));
    }
}

TEST_CASE("sobel_gradients rejects images smaller than 3x3") {
    CHECK_THROWS_AS(sobel_gradients(GrayImage(2, 5, 0.0)), ParameterError);
    CHECK_THROWS_AS(sobel_gradients(GrayImage(5, 2, 0.0)), ParameterError);
}

TEST_CASE("sobel_sketch normalization contract") {
    GrayImage flat(5, 5, 0.9);
    const SketchMap zero = sobel_sketch(flat);
    for (double v : zero.data) CHECK(v == 0.0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const GrayImage img = oracle::random_image(8, 8, rng);
        const SketchMap s = sobel_sketch(img);
        const double mx = *std::max_element(s.data.begin(), s.data.end());
        CHECK((mx == 0.0 || mx == 1.0));
        for (double v : s.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("sobel_sketch is invariant to affine brightness rescaling") {
    std::mt19937_64 rng(17);
    const GrayImage img = oracle::random_image(10, 9, rng);
    GrayImage scaled(10, 9);
    for (size_t i = 0; i < img.data.size(); ++i) scaled.data[i] = 0.4 * img.data[i] + 0.2;
    const SketchMap a = sobel_sketch(img);
    const SketchMap b = sobel_sketch(scaled);
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-9));
}

TEST_CASE("sobel_sketch vertical step concentrates on the columns astride the step") {
    const int w = 10, h = 6;
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = w / 2; x < w; ++x) img.at(x, y) = 1.0;
    const SketchMap s = sobel_sketch(img);
    const oracle::SobelDirect want = oracle::sobel_direct(img);
    double maxmag = 0.0;
    for (double m : want.magnitude) maxmag = std::max(maxmag, m);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            CHECK(s.at(x, y) ==
                  doctest::Approx(want.magnitude[size_t(y) * w + x] / maxmag).epsilon(1e-9));
    // response confined to the two columns astride the step
    for (int y = 1; y < h - 1; ++y) {
        CHECK(s.at(w / 2 - 1, y) == doctest::Approx(1.0));
        CHECK(s.at(w / 2, y) == doctest::Approx(1.0));
        CHECK(s.at(1, y) == doctest::Approx(0.0));
        CHECK(s.at(w - 2, y) == doctest::Approx(0.0));
    }
}

TEST_CASE("blur and sobel are translation equivariant away from borders") {
    // A blob with >= kernel-radius zero padding, shifted by (2, 1).
    const int w = 24, h = 24;
    GrayImage a(w, h), b(w, h);
    auto blob = [](int x, int y, int cx, int cy) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return std::exp(-d2 / 6.0);
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            a.at(x, y) = blob(x, y, 10, 11);
            b.at(x, y) = blob(x, y, 12, 12);
        }
    const GrayImage ba = gaussian_blur(a, 1.0);
    const GrayImage bb = gaussian_blur(b, 1.0);
    const GradientField ga = sobel_gradients(a);
    const GradientField gb = sobel_gradients(b);
    for (int y = 6; y < 16; ++y)
        for (int x = 6; x < 16; ++x) {
            CHECK(ba.at(x, y) == doctest::Approx(bb.at(x + 2, y + 1)).epsilon(1e-12));
            CHECK(ga.magnitude[size_t(y) * w + x] ==
                  doctest::Approx(gb.magnitude[size_t(y + 1) * w + x + 2]).epsilon(1e-12));
        }
}

TEST_CASE("canny rejects bad thresholds") {
    GrayImage img(16, 16, 0.5);
    CHECK_THROWS_AS(canny(img, 1.0, 0.3, 0.3), ParameterError);
    CHECK_THROWS_AS(canny(img, 1.0, 0.5, 0.2), ParameterError);
    CHECK_THROWS_AS(canny(img, 1.0, 0.0, 0.3), ParameterError);
    CHECK_THROWS_AS(canny(img, 1.0, 0.1, 1.0), ParameterError);
}

TEST_CASE("canny of a constant image is all zero") {
    GrayImage img(16, 16, 0.7);
    const SketchMap out = canny(img, 1.0, 0.1, 0.3);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("canny thins a strong vertical step to a single-pixel line") {
    // The transition column pins the gradient peak to a pixel center;
    // a half-pixel step would tie both columns and NMS would suppress them.
    const int w = 24, h = 16;
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = x < w / 2 ? 0.0 : (x == w / 2 ? 0.5 : 1.0);
    const SketchMap out = canny(img, 1.0, 0.1, 0.3);

    for (int y = 2; y < h - 2; ++y) {
        int ones = 0, where = -1;
        for (int x = 0; x < w; ++x)
            if (out.at(x, y) == 1.0) {
                ++ones;
                where = x;
            }
        CHECK(ones == 1);
        CHECK(where == w / 2);
    }
    // binary contract
    for (double v : out.data) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("canny matches the brute-force oracle bit for bit on 100 random images") {
    std::mt19937_64 rng(1234);
    for (int seed = 0; seed < 100; ++seed) {
        const GrayImage img = oracle::random_image(16, 16, rng);
        const SketchMap got = canny(img, 1.0, 0.1, 0.3);
        const SketchMap want = oracle::canny_direct(img, 1.0, 0.1, 0.3);
        REQUIRE(got.data == want.data);
    }
}

TEST_CASE("canny is deterministic") {
    std::mt19937_64 rng(5);
    const GrayImage img = oracle::random_image(16, 16, rng);
    const SketchMap a = canny(img, 1.4, 0.1, 0.3);
    const SketchMap b = canny(img, 1.4, 0.1, 0.3);
    CHECK(a.data == b.data);
}

namespace {

Frame gradient_frame(int w, int h) {
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // values on the 8-bit grid so the PNG round-trip is exact
            f.at(x, y, 0) = double((x * 7 + y * 3) % 256) / 255.0;
            f.at(x, y, 1) = double((x * 2 + y * 11) % 256) / 255.0;
            f.at(x, y, 2) = double((x * 5 + y * 5) % 256) / 255.0;
        }
    return f;
}

std::filesystem::path write_script(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path, std::ios::trunc);
    f << "#!/bin/sh\n" << body;
    f.close();
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path;
}

}  // namespace

TEST_CASE("external detector pass-through hook returns the input luminance") {
    const Frame frame = gradient_frame(12, 9);
    ExternalHookConfig hook;
    hook.command = "cp {in} {out}";
    const SketchMap out = run_external_detector(frame, hook);
    REQUIRE(out.width == frame.width);
    REQUIRE(out.height == frame.height);
    const GrayImage lum = luminance(frame);
    for (size_t i = 0; i < out.data.size(); ++i) {
        // the exchange quantizes to 8 bits
        CHECK(std::abs(out.data[i] - lum.data[i]) <= 0.5 / 255.0 + 1e-12);
    }
}

TEST_CASE("external detector rejects wrong-sized output") {
    const auto script = write_script("sgk_wrongsize.sh", R"(python3 - "$1" <<'EOF'
import struct, sys, zlib
def chunk(t, d):
    return struct.pack('>I', len(d)) + t + d + struct.pack('>I', zlib.crc32(t + d))
w, h = 3, 3
raw = b''.join(b'\x00' + bytes([128] * w) for _ in range(h))
png = (b'\x89PNG\r\n\x1a\n'
       + chunk(b'IHDR', struct.pack('>IIBBBBB', w, h, 8, 0, 0, 0, 0))
       + chunk(b'IDAT', zlib.compress(raw))
       + chunk(b'IEND', b''))
open(sys.argv[1], 'wb').write(png)
EOF
)");
    ExternalHookConfig hook;
    hook.command = script.string() + " {out} < {in}";
    CHECK_THROWS_AS(run_external_detector(gradient_frame(8, 8), hook), ExternalToolError);
}

TEST_CASE("external detector constant-0.5 stub yields a uniform map") {
    // emit an 8x8 gray PNG of 128s next to the requested output path
    const auto script = write_script("sgk_const.sh", R"(python3 - "$1" <<'EOF'
import struct, sys, zlib
def chunk(t, d):
    return struct.pack('>I', len(d)) + t + d + struct.pack('>I', zlib.crc32(t + d))
w = h = 8
raw = b''.join(b'\x00' + bytes([128] * w) for _ in range(h))
png = (b'\x89PNG\r\n\x1a\n'
       + chunk(b'IHDR', struct.pack('>IIBBBBB', w, h, 8, 0, 0, 0, 0))
       + chunk(b'IDAT', zlib.compress(raw))
       + chunk(b'IEND', b''))
open(sys.argv[1], 'wb').write(png)
EOF
)");
    ExternalHookConfig hook;
    hook.command = script.string() + " {out}";
    const SketchMap out = run_external_detector(gradient_frame(8, 8), hook);
    for (double v : out.data) CHECK(v == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("external detector propagates nonzero exit status with diagnostics") {
    ExternalHookConfig hook;
    hook.command = "echo boom >&2; exit 9";
    try {
        run_external_detector(gradient_frame(6, 6), hook);
        FAIL("expected ExternalToolError");
    } catch (const ExternalToolError& e) {
        CHECK(std::string(e.what()).find("status 9") != std::string::npos);
        CHECK(e.diagnostics().find("boom") != std::string::npos);
    }
}

TEST_CASE("external detector missing output file is an error") {
    ExternalHookConfig hook;
    hook.command = "true";
    CHECK_THROWS_AS(run_external_detector(gradient_frame(6, 6), hook), ExternalToolError);
}

TEST_CASE("external detector enforces the timeout") {
    ExternalHookConfig hook;
    hook.command = "sleep 5; cp {in} {out}";
    hook.timeout_seconds = 0.3;
    try {
        run_external_detector(gradient_frame(6, 6), hook);
        FAIL("expected ExternalToolError");
    } catch (const ExternalToolError& e) {
        CHECK(std::string(e.what()).find("timed out") != std::string::npos);
    }
}
