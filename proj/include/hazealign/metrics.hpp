#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hazealign/image.hpp"

namespace hazealign {

/// Gaussian-windowed SSIM parameters. Defaults are the usual 11x11 window,
/// sigma 1.5, K1 = 0.01, K2 = 0.03 on 8-bit data.
struct SsimParams {
    int window_size = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    void validate() const;
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(int size, double sigma);

/// A single channel as doubles, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const noexcept {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                       static_cast<std::size_t>(x)];
    }
};

Plane channel_plane(const ImageBuffer& image, Channel channel);

/// 2x2 mean pooling; an odd trailing row or column is dropped.
Plane downsample_2x(const Plane& plane);

/// Means over the valid (unpadded) region of the SSIM map and of its
/// luminance and contrast-structure factors.
struct SsimComponents {
    double ssim = 0.0;
    double luminance = 0.0;
    double contrast_structure = 0.0;
};

// Separable-filter kernel, rows split across OpenMP threads.
SsimComponents ssim_components(const Plane& a, const Plane& b, const SsimParams& params);
// Serial reference: direct 2-D window sums at every valid position.
SsimComponents ssim_components_reference(const Plane& a, const Plane& b, const SsimParams& params);

/// Peak signal-to-noise ratio in dB, MSE pooled over pixels and channels.
/// Identical images give +infinity.
double psnr(const ImageBuffer& pred, const ImageBuffer& gt, double dynamic_range = 255.0);

/// Mean SSIM over valid pixels, averaged over R, G and B.
double ssim(const ImageBuffer& pred, const ImageBuffer& gt, const SsimParams& params = {});

inline constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// First `scales` weights rescaled to sum to exactly 1.
std::vector<double> normalized_ms_ssim_weights(std::span<const double> weights, int scales);

/// Largest scale count (<= max_scales) for which the window still fits
/// after the dyadic downsamplings; 0 if not even one scale fits.
int feasible_ms_ssim_scales(int width, int height, int window_size, int max_scales = 5);

struct MsSsimResult {
    double value = 0.0;
    int scales = 0;
};

// Product of the contrast-structure means at every scale and the luminance
// mean at the coarsest scale, each raised to its weight; per channel, then
// averaged over channels. Negative factors are clamped to 0 before
// exponentiation. Too-small images use fewer scales with renormalized weights.
MsSsimResult ms_ssim(const ImageBuffer& pred, const ImageBuffer& gt, const SsimParams& params = {},
                     std::span<const double> weights = kMsSsimWeights);
MsSsimResult ms_ssim(const Plane& pred, const Plane& gt, const SsimParams& params = {},
                     std::span<const double> weights = kMsSsimWeights);

/// 0.5 z^2 if |z| < 1, |z| - 0.5 otherwise.
double smooth_l1(double z) noexcept;

/// Mean smooth-L1 of the element-wise difference.
double smooth_l1_loss(std::span<const double> pred, std::span<const double> gt);

enum class IntensityScale { normalized, raw };

std::string_view intensity_scale_name(IntensityScale scale) noexcept;

/// Image variant: by default intensities are divided by 255 first.
double smooth_l1_loss(const ImageBuffer& pred, const ImageBuffer& gt,
                      IntensityScale scale = IntensityScale::normalized);

struct LossTerms {
    double l1 = 0.0;
    double ms_ssim = 0.0;
    double perceptual = 0.0;
    double adversarial = 0.0;
};

inline constexpr LossTerms kTotalLossWeights{1.0, 0.5, 0.01, 0.0005};

/// Weighted sum of the four training-loss terms; the perceptual and
/// adversarial values are supplied by the caller.
double total_loss(const LossTerms& terms);

struct PairMetrics {
    std::string id;
    double psnr = 0.0;
    double ssim = 0.0;
    double ms_ssim = 0.0;
    int ms_ssim_scales = 0;
};

struct MetricReport {
    std::vector<PairMetrics> pairs;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double mean_ms_ssim = 0.0;
};

PairMetrics evaluate_pair(std::string id, const ImageBuffer& pred, const ImageBuffer& gt,
                          const SsimParams& params = {});

/// Fills the aggregate fields with arithmetic means of the per-pair values.
MetricReport summarize(std::vector<PairMetrics> pairs);

}  // namespace hazealign
