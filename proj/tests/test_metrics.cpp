#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hazealign/error.hpp"
#include "hazealign/metrics.hpp"
#include "testing.hpp"

using namespace hazealign;
namespace ht = hazealign::testing;

namespace {

ImageBuffer add_noise(const ImageBuffer& img, int amplitude, std::mt19937_64& rng) {
    ImageBuffer out = img;
    std::uniform_int_distribution<int> noise(-amplitude, amplitude);
    for (Rgb& px : out.pixels()) {
        for (auto& v : px) v = static_cast<std::uint8_t>(std::clamp(v + noise(rng), 0, 255));
    }
    return out;
}

ImageBuffer correlated(const ImageBuffer& img, std::mt19937_64& rng) { return add_noise(img, 40, rng); }

// 2x2 mean pooling written out for the oracle.
std::vector<double> pool(const std::vector<double>& v, int& width, int& height) {
    const int w = width / 2;
    const int h = height / 2;
    std::vector<double> out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto at = [&](int xx, int yy) { return v[static_cast<std::size_t>(yy * width + xx)]; };
            out.push_back((at(2 * x, 2 * y) + at(2 * x + 1, 2 * y) + at(2 * x, 2 * y + 1) + at(2 * x + 1, 2 * y + 1)) / 4);
        }
    }
    width = w;
    height = h;
    return out;
}

double oracle_ms_ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p, int scales) {
    std::vector<double> w(kMsSsimWeights.begin(), kMsSsimWeights.begin() + scales);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    double sum = 0;
    for (int c = 0; c < 3; ++c) {
        auto va = ht::channel_values(a, c);
        auto vb = ht::channel_values(b, c);
        int width = a.width();
        int height = a.height();
        double value = 1;
        for (int j = 0; j < scales; ++j) {
            const auto o = ht::naive_ssim(va, vb, width, height, p.window_size, p.sigma, p.c1(), p.c2());
            value *= std::pow(std::max(o.contrast_structure, 0.0), w[static_cast<std::size_t>(j)]);
            if (j == scales - 1) {
                value *= std::pow(std::max(o.luminance, 0.0), w[static_cast<std::size_t>(j)]);
            } else {
                int w2 = width, h2 = height;
                va = pool(va, w2, h2);
                vb = pool(vb, width, height);
            }
        }
        sum += value;
    }
    return sum / 3;
}

}  // namespace

TEST_CASE("psnr anchors") {
    std::mt19937_64 rng(1);
    const ImageBuffer img = ht::random_image(rng, 20, 10);
    CHECK(psnr(img, img) == std::numeric_limits<double>::infinity());
    CHECK(psnr(ImageBuffer(4, 4, Rgb{255, 255, 255}), ImageBuffer(4, 4)) == 0.0);

    ImageBuffer base(8, 8, Rgb{100, 50, 200});
    ImageBuffer plus_one(8, 8, Rgb{101, 51, 201});
    // 20 log10(255) = 48.130803608679103 (mpmath).
    CHECK(psnr(plus_one, base) == doctest::Approx(48.130803608679103).epsilon(1e-12));
    CHECK_THROWS_AS(psnr(ImageBuffer(2, 2), ImageBuffer(2, 3)), InvalidArgument);
}

TEST_CASE("psnr decreases with noise amplitude") {
    std::mt19937_64 rng(10);
    const ImageBuffer img(64, 64, Rgb{128, 128, 128});
    for (int seed = 0; seed < 5; ++seed) {
        double previous = std::numeric_limits<double>::infinity();
        for (int amplitude : {1, 2, 4, 8, 16, 32, 64}) {
            const double v = psnr(add_noise(img, amplitude, rng), img);
            CHECK(v < previous);
            previous = v;
        }
    }
}

TEST_CASE("ssim parameter defaults") {
    const SsimParams p;
    CHECK(p.c1() == doctest::Approx(6.5025));
    CHECK(p.c2() == doctest::Approx(58.5225));
    const auto taps = gaussian_taps(11, 1.5);
    double total = 0;
    for (double a : taps) {
        for (double b : taps) total += a * b;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((SsimParams{.window_size = 4}).validate(), InvalidArgument);
    CHECK_THROWS_AS((SsimParams{.sigma = 0}).validate(), InvalidArgument);
}

TEST_CASE("ssim identity symmetry and bounds") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const ImageBuffer a = ht::random_image(rng, 30, 25);
        const ImageBuffer b = correlated(a, rng);
        CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
        CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
        CHECK(std::abs(ssim(a, b)) <= 1.0);
        CHECK(std::abs(ssim(a, ht::random_image(rng, 30, 25))) <= 1.0);
    }
}

TEST_CASE("ssim of constant black vs white matches the closed form") {
    const SsimParams p;
    const double expected = p.c1() / (255.0 * 255.0 + p.c1());  // 9.99900009999e-5
    CHECK(expected == doctest::Approx(9.999000099990001e-05).epsilon(1e-12));
    CHECK(std::abs(ssim(ImageBuffer(16, 16), ImageBuffer(16, 16, Rgb{255, 255, 255})) - expected) <= 1e-8);
}

TEST_CASE("separable ssim matches the direct-definition oracle and serial reference") {
    std::mt19937_64 rng(3);
    const SsimParams p;
    for (int trial = 0; trial < 10; ++trial) {
        const ImageBuffer a = ht::random_image(rng, 16 + static_cast<int>(rng() % 10), 16 + static_cast<int>(rng() % 10));
        const ImageBuffer b = trial % 2 ? correlated(a, rng) : ht::random_image(rng, a.width(), a.height());
        for (int c = 0; c < 3; ++c) {
            const auto oracle = ht::naive_ssim(ht::channel_values(a, c), ht::channel_values(b, c), a.width(),
                                               a.height(), 11, 1.5, p.c1(), p.c2());
            const Plane pa = channel_plane(a, kChannels[static_cast<std::size_t>(c)]);
            const Plane pb = channel_plane(b, kChannels[static_cast<std::size_t>(c)]);
            const SsimComponents fast = ssim_components(pa, pb, p);
            const SsimComponents ref = ssim_components_reference(pa, pb, p);
            CHECK(std::abs(fast.ssim - oracle.ssim) <= 1e-6);
            CHECK(std::abs(fast.luminance - oracle.luminance) <= 1e-6);
            CHECK(std::abs(fast.contrast_structure - oracle.contrast_structure) <= 1e-6);
            CHECK(std::abs(ref.ssim - oracle.ssim) <= 1e-6);
        }
    }
}

TEST_CASE("ssim input validation") {
    CHECK_THROWS_AS(ssim(ImageBuffer(16, 16), ImageBuffer(16, 17)), InvalidArgument);
    CHECK_THROWS_WITH_AS(ssim(ImageBuffer(10, 16), ImageBuffer(10, 16)), doctest::Contains("smaller than"),
                         InvalidArgument);
}

TEST_CASE("ms-ssim weights renormalize") {
    const double raw = std::accumulate(kMsSsimWeights.begin(), kMsSsimWeights.end(), 0.0);
    CHECK(raw == doctest::Approx(1.0001));
    for (int scales = 1; scales <= 5; ++scales) {
        const auto w = normalized_ms_ssim_weights(kMsSsimWeights, scales);
        CHECK(w.size() == static_cast<std::size_t>(scales));
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-15);
    }
    CHECK_THROWS_AS(normalized_ms_ssim_weights(kMsSsimWeights, 0), InvalidArgument);
    CHECK_THROWS_AS(normalized_ms_ssim_weights(kMsSsimWeights, 6), InvalidArgument);
}

TEST_CASE("ms-ssim feasible scale count") {
    CHECK(feasible_ms_ssim_scales(176, 176, 11) == 5);
    CHECK(feasible_ms_ssim_scales(175, 400, 11) == 4);
    CHECK(feasible_ms_ssim_scales(64, 64, 11) == 3);
    CHECK(feasible_ms_ssim_scales(10, 64, 11) == 0);
    CHECK(feasible_ms_ssim_scales(64, 64, 3) == 5);
}

TEST_CASE("ms-ssim of identical images is one") {
    std::mt19937_64 rng(4);
    const ImageBuffer a = ht::random_image(rng, 64, 64);
    const MsSsimResult r = ms_ssim(a, a);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.scales == 3);
}

TEST_CASE("ms-ssim equals a literal five-scale composition on 64x64") {
    std::mt19937_64 rng(5);
    const SsimParams p{.window_size = 3, .sigma = 0.8};
    for (int trial = 0; trial < 3; ++trial) {
        const ImageBuffer a = ht::random_image(rng, 64, 64);
        const ImageBuffer b = correlated(a, rng);
        const MsSsimResult r = ms_ssim(a, b, p);
        CHECK(r.scales == 5);
        CHECK(std::abs(r.value - oracle_ms_ssim(a, b, p, 5)) <= 1e-9);
    }
}

TEST_CASE("ms-ssim with default window composes five scales at 192x192") {
    std::mt19937_64 rng(6);
    const ImageBuffer a = ht::random_image(rng, 192, 192);
    const ImageBuffer b = correlated(a, rng);
    const MsSsimResult r = ms_ssim(a, b);
    CHECK(r.scales == 5);
    CHECK(std::abs(r.value - oracle_ms_ssim(a, b, SsimParams{}, 5)) <= 1e-9);
}

TEST_CASE("ms-ssim falls back to fewer scales on small images") {
    std::mt19937_64 rng(7);
    const ImageBuffer a = ht::random_image(rng, 64, 40);
    const ImageBuffer b = correlated(a, rng);
    const MsSsimResult r = ms_ssim(a, b);
    CHECK(r.scales == 2);
    CHECK(std::abs(r.value - oracle_ms_ssim(a, b, SsimParams{}, 2)) <= 1e-9);
    CHECK_THROWS_AS(ms_ssim(ImageBuffer(8, 8), ImageBuffer(8, 8)), InvalidArgument);
}

TEST_CASE("smooth l1 knots") {
    CHECK(smooth_l1(0.0) == 0.0);
    CHECK(smooth_l1(0.5) == 0.125);
    CHECK(smooth_l1(-0.5) == 0.125);
    CHECK(smooth_l1(1.0) == 0.5);
    CHECK(smooth_l1(-1.0) == 0.5);
    CHECK(smooth_l1(2.0) == 1.5);
    CHECK(smooth_l1(std::nextafter(1.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-15));
    for (double z = -3; z <= 3; z += 0.01) CHECK(smooth_l1(z) >= 0.0);
}

TEST_CASE("smooth l1 loss over arrays and images") {
    const std::vector<double> a{0.0, 0.0, 0.0, 0.0};
    const std::vector<double> b{0.0, 0.5, 1.0, 2.0};
    CHECK(smooth_l1_loss(a, a) == 0.0);
    CHECK(smooth_l1_loss(a, b) == doctest::Approx((0 + 0.125 + 0.5 + 1.5) / 4));
    CHECK_THROWS_AS(smooth_l1_loss(a, std::vector<double>{1.0}), InvalidArgument);

    const ImageBuffer black(2, 2);
    const ImageBuffer white(2, 2, Rgb{255, 255, 255});
    CHECK(smooth_l1_loss(black, black) == 0.0);
    CHECK(smooth_l1_loss(black, white) == doctest::Approx(0.5));
    CHECK(smooth_l1_loss(black, white, IntensityScale::raw) == doctest::Approx(254.5));
    CHECK_THROWS_AS(smooth_l1_loss(black, ImageBuffer(2, 3)), InvalidArgument);
}

TEST_CASE("total loss weights") {
    CHECK(total_loss({0, 0, 0, 0}) == 0.0);
    CHECK(total_loss({1, 1, 1, 1}) == doctest::Approx(1.5105).epsilon(1e-15));
    CHECK(total_loss({1, 0, 0, 0}) == 1.0);
    CHECK(total_loss({0, 1, 0, 0}) == 0.5);
    CHECK(total_loss({0, 0, 1, 0}) == 0.01);
    CHECK(total_loss({0, 0, 0, 1}) == 0.0005);
    CHECK_THROWS_AS(total_loss({NAN, 0, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(total_loss({0, 0, 0, INFINITY}), InvalidArgument);
}

TEST_CASE("metric report aggregates are per-pair means") {
    const MetricReport r = summarize({{"a", 20, 0.5, 0.6, 3}, {"b", 30, 0.7, 0.8, 3}});
    CHECK(r.mean_psnr == 25.0);
    CHECK(r.mean_ssim == doctest::Approx(0.6));
    CHECK(r.mean_ms_ssim == doctest::Approx(0.7));

    std::mt19937_64 rng(8);
    const ImageBuffer img = ht::random_image(rng, 32, 32);
    const PairMetrics same = evaluate_pair("x", img, img);
    CHECK(std::isinf(same.psnr));
    CHECK(same.ssim == doctest::Approx(1.0));
    CHECK(same.ms_ssim == doctest::Approx(1.0));
}
