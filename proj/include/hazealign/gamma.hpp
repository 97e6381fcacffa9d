#pragma once

#include <array>
#include <cstdint>

#include "hazealign/channel_stats.hpp"
#include "hazealign/error.hpp"
#include "hazealign/image.hpp"

namespace hazealign {

/// Per-channel gamma factors. Each must be positive and finite; 1 is identity.
struct GammaTriple {
    double r = 1.0;
    double g = 1.0;
    double b = 1.0;

    double operator[](Channel c) const noexcept {
        switch (c) {
            case Channel::R: return r;
            case Channel::G: return g;
            case Channel::B: return b;
        }
        return 1.0;
    }

    GammaTriple inverse() const noexcept { return {1.0 / r, 1.0 / g, 1.0 / b}; }

    /// Throws InvalidArgument unless every factor is positive and finite.
    void validate() const;

    friend bool operator==(const GammaTriple&, const GammaTriple&) = default;
};

using GammaLut = std::array<std::uint8_t, kBins>;

/// Continuous power-law curve 255 * (i / 255)^(1 / gamma), i in [0, 255].
double gamma_curve(double intensity, double gamma) noexcept;

/// Round to nearest (ties away from zero) and clamp to [0, 255].
std::uint8_t quantize_intensity(double value) noexcept;

GammaLut gamma_lut(double gamma);

ImageBuffer gamma_apply(const ImageBuffer& image, const GammaTriple& gammas);
ImageBuffer gamma_apply_serial(const ImageBuffer& image, const GammaTriple& gammas);

/// Mean of the channel after the continuous (unquantized) curve, computed
/// from the histogram alone. Throws InvalidArgument on an empty histogram.
double mean_after_gamma(const ChannelHistogram& histogram, double gamma);

/// Mean of the channel after the quantized LUT, i.e. what an 8-bit image
/// written with `gamma_lut(gamma)` would measure.
double quantized_mean_after_gamma(const ChannelHistogram& histogram, double gamma);

/// Open interval of means reachable by some gamma in (0, inf):
/// low = limit as gamma -> 0 (only bin 255 survives), high = limit as
/// gamma -> inf (every nonzero bin goes to 255).
struct MeanRange {
    double low = 0.0;
    double high = 0.0;
};

MeanRange achievable_mean_range(const ChannelHistogram& histogram);

class UnachievableTarget : public Error {
public:
    UnachievableTarget(Channel channel, double target, MeanRange range, const std::string& detail);

    Channel channel() const noexcept { return channel_; }
    double target() const noexcept { return target_; }
    MeanRange range() const noexcept { return range_; }

private:
    Channel channel_;
    double target_;
    MeanRange range_;
};

struct SolveOptions {
    double tolerance = 1e-6;      // intensity levels
    int max_iterations = 200;
    double bracket_limit = 1048576.0;  // 2^20; bracket stays inside [1/limit, limit]
};

/// Finds gamma such that |mean_after_gamma(histogram, gamma) - target_mean|
/// <= tolerance. The bracket grows geometrically from gamma = 1 by factors
/// of two until it encloses the target, then bisects in log(gamma).
double solve_gamma(const ChannelHistogram& histogram, double target_mean,
                   const SolveOptions& options = {});

GammaTriple solve_gamma_triple(const RgbHistogram& histogram,
                               const std::array<double, 3>& target_means,
                               const SolveOptions& options = {});

}  // namespace hazealign
