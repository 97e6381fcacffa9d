#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hazealign/gamma.hpp"
#include "testing.hpp"

using namespace hazealign;

namespace {

ChannelHistogram single_bin(int bin, std::uint64_t count = 100, Channel c = Channel::R) {
    ChannelHistogram h{c, {}};
    h.bins[static_cast<std::size_t>(bin)] = count;
    return h;
}

ChannelHistogram random_interior_histogram(std::mt19937_64& rng) {
    ChannelHistogram h{Channel::G, {}};
    const int occupied = 1 + static_cast<int>(rng() % 40);
    for (int k = 0; k < occupied; ++k) h.bins[1 + rng() % 254] += 1 + rng() % 5000;
    if (rng() % 3 == 0) h.bins[0] += rng() % 2000;
    if (rng() % 3 == 0) h.bins[255] += rng() % 2000;
    return h;
}

// 255 * (i/255)^(1/gamma) in long double, averaged pixel by pixel.
long double oracle_mean_after_gamma(const ChannelHistogram& h, long double gamma) {
    long double sum = 0, n = 0;
    for (int i = 0; i < 256; ++i) {
        for (std::uint64_t k = 0; k < h.bins[static_cast<std::size_t>(i)]; ++k) {
            sum += 255.0L * std::pow(static_cast<long double>(i) / 255.0L, 1.0L / gamma);
            n += 1;
        }
    }
    return sum / n;
}

}  // namespace

TEST_CASE("gamma lut fixed points and identity") {
    const GammaLut identity = gamma_lut(1.0);
    for (int i = 0; i < 256; ++i) CHECK(identity[static_cast<std::size_t>(i)] == i);
    for (double g : {0.05, 0.3, 0.77, 1.0, 2.0, 3.5, 40.0}) {
        const GammaLut lut = gamma_lut(g);
        CHECK(lut[0] == 0);
        CHECK(lut[255] == 255);
        CHECK(std::is_sorted(lut.begin(), lut.end()));
    }
}

TEST_CASE("gamma lut entry against high-precision curve") {
    // 255 * sqrt(64/255) = 127.7497553813705 (mpmath, 40 digits) -> 128.
    CHECK(gamma_curve(64, 2.0) == doctest::Approx(127.7497553813705).epsilon(1e-15));
    CHECK(gamma_lut(2.0)[64] == 128);
}

TEST_CASE("quantization rounds half away from zero and clamps") {
    CHECK(quantize_intensity(127.5) == 128);
    CHECK(quantize_intensity(127.4999) == 127);
    CHECK(quantize_intensity(-3.0) == 0);
    CHECK(quantize_intensity(300.0) == 255);
}

TEST_CASE("invalid gammas are rejected") {
    for (double g : std::initializer_list<double>{0.0, -1.0, std::nan(""), INFINITY}) {
        CHECK_THROWS_AS(gamma_lut(g), InvalidArgument);
        CHECK_THROWS_AS(mean_after_gamma(single_bin(10), g), InvalidArgument);
        CHECK_THROWS_AS(gamma_apply(ImageBuffer(1, 1), GammaTriple{g, 1, 1}), InvalidArgument);
    }
}

TEST_CASE("gamma_apply examples") {
    std::mt19937_64 rng(21);
    const ImageBuffer img = hazealign::testing::random_image(rng, 33, 17);
    CHECK(gamma_apply(img, GammaTriple{}) == img);
    const ImageBuffer zero(8, 8);
    CHECK(gamma_apply(zero, GammaTriple{0.3, 2.5, 7.0}) == zero);
    const ImageBuffer mid = gamma_apply(ImageBuffer(1, 1, Rgb{64, 64, 64}), GammaTriple{2, 1, 1});
    CHECK(mid.at(0, 0) == Rgb{128, 64, 64});
}

TEST_CASE("parallel gamma_apply matches the serial reference") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const ImageBuffer img = hazealign::testing::random_image(rng, 1 + static_cast<int>(rng() % 90),
                                                                 1 + static_cast<int>(rng() % 90));
        const GammaTriple g{0.2 + (rng() % 100) / 20.0, 0.2 + (rng() % 100) / 20.0, 0.2 + (rng() % 100) / 20.0};
        CHECK(gamma_apply(img, g) == gamma_apply_serial(img, g));
    }
}

TEST_CASE("round trip through inverse gammas stays within one level") {
    std::mt19937_64 rng(4);
    const ImageBuffer img = hazealign::testing::random_image(rng, 64, 64);
    for (GammaTriple g : {GammaTriple{1.3, 0.8, 1.1}, GammaTriple{1.05, 0.95, 1.2}}) {
        const ImageBuffer back = gamma_apply(gamma_apply(img, g), g.inverse());
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(std::abs(img.pixels()[i][c] - back.pixels()[i][c]) <= 1);
            }
        }
    }
}

TEST_CASE("mean_after_gamma examples") {
    ChannelHistogram h{Channel::B, {}};
    h.bins[10] = 3;
    h.bins[200] = 1;
    CHECK(mean_after_gamma(h, 1.0) == doctest::Approx(57.5).epsilon(1e-15));
    for (double g : {0.1, 1.0, 9.0}) {
        CHECK(mean_after_gamma(single_bin(0), g) == 0.0);
        ChannelHistogram ends{Channel::R, {}};
        ends.bins[0] = 50;
        ends.bins[255] = 50;
        CHECK(mean_after_gamma(ends, g) == 127.5);
    }
    CHECK_THROWS_AS(mean_after_gamma(ChannelHistogram{}, 1.0), InvalidArgument);
}

TEST_CASE("mean_after_gamma agrees with a per-pixel long double oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        ChannelHistogram h{Channel::R, {}};
        for (int k = 0; k < 30; ++k) h.bins[rng() % 256] += 1 + rng() % 20;
        const double g = 0.1 + static_cast<double>(rng() % 1000) / 100.0;
        CHECK(mean_after_gamma(h, g) == doctest::Approx(static_cast<double>(oracle_mean_after_gamma(h, g))).epsilon(1e-13));
    }
}

TEST_CASE("mean_after_gamma is strictly increasing on interior mass") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const ChannelHistogram h = random_interior_histogram(rng);
        double previous = -1.0;
        for (int k = 0; k < 100; ++k) {
            const double g = std::exp(std::log(0.1) + k * (std::log(10.0) - std::log(0.1)) / 99.0);
            const double m = mean_after_gamma(h, g);
            CHECK(m > previous);
            previous = m;
        }
    }
}

TEST_CASE("achievable range limits") {
    ChannelHistogram h{Channel::R, {}};
    h.bins[0] = 1;
    h.bins[100] = 2;
    h.bins[255] = 1;
    const MeanRange r = achievable_mean_range(h);
    CHECK(r.low == 255.0 / 4);
    CHECK(r.high == 255.0 * 3 / 4);
    CHECK(mean_after_gamma(h, 1e-3) == doctest::Approx(r.low));
    CHECK(mean_after_gamma(h, 1e4) == doctest::Approx(r.high).epsilon(1e-3));
}

TEST_CASE("solve_gamma examples") {
    std::mt19937_64 rng(6);
    const ChannelHistogram h = random_interior_histogram(rng);
    CHECK(solve_gamma(h, mean_after_gamma(h, 1.0)) == 1.0);

    // Constant channel at 64: closed form ln(64/255)/ln(128/255) = 2.005678627871976 (mpmath).
    const double g = solve_gamma(single_bin(64), 128.0);
    CHECK(g == doctest::Approx(2.005678627871976).epsilon(1e-6));
    CHECK(std::abs(mean_after_gamma(single_bin(64), g) - 128.0) <= 1e-6);

    CHECK_THROWS_WITH_AS(solve_gamma(single_bin(0), 100.0), doctest::Contains("target unachievable"),
                         UnachievableTarget);
}

TEST_CASE("solve_gamma reports the achievable interval") {
    ChannelHistogram h{Channel::G, {}};
    h.bins[0] = 1;
    h.bins[128] = 1;
    try {
        solve_gamma(h, 200.0);
        FAIL("expected UnachievableTarget");
    } catch (const UnachievableTarget& e) {
        CHECK(e.channel() == Channel::G);
        CHECK(e.range().low == 0.0);
        CHECK(e.range().high == 127.5);
    }
    CHECK_THROWS_AS(solve_gamma(h, 0.0), UnachievableTarget);
    CHECK_THROWS_AS(solve_gamma(h, 255.0), UnachievableTarget);
    CHECK_THROWS_AS(solve_gamma(h, std::nan("")), UnachievableTarget);
}

TEST_CASE("degenerate histograms only admit their own mean") {
    ChannelHistogram ends{Channel::R, {}};
    ends.bins[0] = 3;
    ends.bins[255] = 1;
    CHECK(solve_gamma(ends, 63.75) == 1.0);
    CHECK_THROWS_AS(solve_gamma(ends, 80.0), UnachievableTarget);
}

TEST_CASE("solver hits random achievable targets") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const ChannelHistogram h = random_interior_histogram(rng);
        const MeanRange r = achievable_mean_range(h);
        const double lo = r.low + 0.5;
        const double hi = r.high - 0.5;
        if (!(lo < hi)) continue;
        const double target = lo + (hi - lo) * unit(rng);
        const double g = solve_gamma(h, target);
        CHECK(std::abs(mean_after_gamma(h, g) - target) <= 1e-6);
    }
}

TEST_CASE("quantized mean stays within half a level of the continuous mean") {
    std::mt19937_64 rng(77);
    std::vector<ImageBuffer> images;
    for (int i = 0; i < 6; ++i) images.push_back(hazealign::testing::random_image(rng, 40, 30));
    const RgbHistogram pooled = [&] {
        RgbHistogram h;
        for (const auto& img : images) h = merge_histograms(h, histogram_of(img));
        return h;
    }();
    const GammaTriple g{1.7, 0.6, 1.1};
    std::vector<ImageBuffer> out;
    for (const auto& img : images) out.push_back(gamma_apply(img, g));
    const RgbStats after = channel_stats(out);
    for (Channel c : kChannels) {
        CHECK(std::abs(after[c].mean - mean_after_gamma(pooled[c], g[c])) <= 0.5);
        CHECK(after[c].mean == quantized_mean_after_gamma(pooled[c], g[c]));
    }
}
