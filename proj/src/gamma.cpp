#include "hazealign/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace hazealign {

namespace {

std::string describe(double value) {
    std::ostringstream out;
    out.precision(10);
    out << value;
    return out.str();
}

void require_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("gamma must be positive and finite, got " + describe(gamma));
    }
}

std::array<GammaLut, 3> luts_for(const GammaTriple& gammas) {
    gammas.validate();
    return {gamma_lut(gammas.r), gamma_lut(gammas.g), gamma_lut(gammas.b)};
}

}  // namespace

void GammaTriple::validate() const {
    require_gamma(r);
    require_gamma(g);
    require_gamma(b);
}

double gamma_curve(double intensity, double gamma) noexcept {
    return 255.0 * std::pow(intensity / 255.0, 1.0 / gamma);
}

std::uint8_t quantize_intensity(double value) noexcept {
    return static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
}

GammaLut gamma_lut(double gamma) {
    require_gamma(gamma);
    GammaLut lut{};
    for (int i = 0; i < kBins; ++i) lut[i] = quantize_intensity(gamma_curve(i, gamma));
    return lut;
}

ImageBuffer gamma_apply_serial(const ImageBuffer& image, const GammaTriple& gammas) {
    const auto luts = luts_for(gammas);
    ImageBuffer out = image;
    for (Rgb& px : out.pixels()) {
        for (std::size_t c = 0; c < 3; ++c) px[c] = luts[c][px[c]];
    }
    return out;
}

ImageBuffer gamma_apply(const ImageBuffer& image, const GammaTriple& gammas) {
    const auto luts = luts_for(gammas);
    ImageBuffer out = image;
    const auto pixels = out.pixels();
    const auto count = static_cast<long long>(pixels.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        Rgb& px = pixels[static_cast<std::size_t>(i)];
        px[0] = luts[0][px[0]];
        px[1] = luts[1][px[1]];
        px[2] = luts[2][px[2]];
    }
    return out;
}

double mean_after_gamma(const ChannelHistogram& histogram, double gamma) {
    require_gamma(gamma);
    const std::uint64_t total = histogram.total();
    if (total == 0) throw InvalidArgument("mean_after_gamma: empty histogram");
    double sum = 0.0;
    for (int i = 1; i < kBins; ++i) {
        if (histogram.bins[i] != 0) sum += static_cast<double>(histogram.bins[i]) * gamma_curve(i, gamma);
    }
    return sum / static_cast<double>(total);
}

double quantized_mean_after_gamma(const ChannelHistogram& histogram, double gamma) {
    const auto lut = gamma_lut(gamma);
    const std::uint64_t total = histogram.total();
    if (total == 0) throw InvalidArgument("quantized_mean_after_gamma: empty histogram");
    std::uint64_t sum = 0;
    for (int i = 0; i < kBins; ++i) sum += histogram.bins[i] * lut[i];
    return static_cast<double>(sum) / static_cast<double>(total);
}

MeanRange achievable_mean_range(const ChannelHistogram& histogram) {
    const std::uint64_t total = histogram.total();
    if (total == 0) throw InvalidArgument("achievable_mean_range: empty histogram");
    const auto n = static_cast<double>(total);
    const auto nonzero = static_cast<double>(total - histogram.bins[0]);
    return {255.0 * static_cast<double>(histogram.bins[kBins - 1]) / n, 255.0 * nonzero / n};
}

UnachievableTarget::UnachievableTarget(Channel channel, double target, MeanRange range,
                                       const std::string& detail)
    : Error("target-unachievable",
            "target unachievable: channel " + std::string(channel_name(channel)) + " target mean " +
                describe(target) + " outside achievable interval (" + describe(range.low) + ", " +
                describe(range.high) + ")" + (detail.empty() ? "" : ": " + detail)),
      channel_(channel),
      target_(target),
      range_(range) {}

double solve_gamma(const ChannelHistogram& histogram, double target_mean, const SolveOptions& options) {
    if (!(options.tolerance > 0.0)) throw InvalidArgument("solve_gamma: tolerance must be positive");
    const MeanRange range = achievable_mean_range(histogram);
    const Channel channel = histogram.channel;
    const double tol = options.tolerance;
    const auto mean_at = [&](double gamma) { return mean_after_gamma(histogram, gamma); };

    if (!std::isfinite(target_mean)) throw UnachievableTarget(channel, target_mean, range, "non-finite");
    const double identity_mean = mean_at(1.0);
    if (std::abs(identity_mean - target_mean) <= tol) return 1.0;

    const std::uint64_t total = histogram.total();
    if (histogram.bins[0] + histogram.bins[kBins - 1] == total) {
        throw UnachievableTarget(channel, target_mean, range,
                                 "all mass at 0 or 255, the transform cannot move the mean");
    }
    if (!(target_mean > 0.0 && target_mean < 255.0) || !(target_mean > range.low) ||
        !(target_mean < range.high)) {
        throw UnachievableTarget(channel, target_mean, range, {});
    }

    const double limit = options.bracket_limit;
    double lo = 1.0;
    double hi = 1.0;
    if (identity_mean < target_mean) {
        hi = 2.0;
        for (double m = mean_at(hi); m < target_mean; m = mean_at(hi)) {
            if (std::abs(m - target_mean) <= tol) return hi;
            lo = hi;
            hi *= 2.0;
            if (hi > limit) {
                throw UnachievableTarget(channel, target_mean, range,
                                         "needs gamma above " + describe(limit));
            }
        }
    } else {
        lo = 0.5;
        for (double m = mean_at(lo); m > target_mean; m = mean_at(lo)) {
            if (std::abs(m - target_mean) <= tol) return lo;
            hi = lo;
            lo *= 0.5;
            if (lo < 1.0 / limit) {
                throw UnachievableTarget(channel, target_mean, range,
                                         "needs gamma below " + describe(1.0 / limit));
            }
        }
    }
    if (std::abs(mean_at(lo) - target_mean) <= tol) return lo;
    if (std::abs(mean_at(hi) - target_mean) <= tol) return hi;

    // mean_after_gamma is increasing in gamma; bisect the bracket in log space.
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;  // bracket exhausted at double precision
        const double m = mean_at(mid);
        if (std::abs(m - target_mean) <= tol) return mid;
        if (m < target_mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw Error("no-convergence", "solve_gamma: channel " + std::string(channel_name(channel)) +
                                      " did not reach tolerance " + describe(tol) + " for target " +
                                      describe(target_mean));
}

GammaTriple solve_gamma_triple(const RgbHistogram& histogram, const std::array<double, 3>& target_means,
                               const SolveOptions& options) {
    return {solve_gamma(histogram[Channel::R], target_means[0], options),
            solve_gamma(histogram[Channel::G], target_means[1], options),
            solve_gamma(histogram[Channel::B], target_means[2], options)};
}

}  // namespace hazealign
