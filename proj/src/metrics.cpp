#include "hazealign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hazealign/error.hpp"

namespace hazealign {

void SsimParams::validate() const {
    if (window_size <= 0 || window_size % 2 == 0) {
        throw InvalidArgument("SSIM window size must be odd and positive, got " + std::to_string(window_size));
    }
    if (!(sigma > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
        throw InvalidArgument("SSIM sigma, K1, K2 and dynamic range must be positive");
    }
}

std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> taps(static_cast<std::size_t>(size));
    const double center = (size - 1) / 2.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - center;
        taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) t /= sum;
    return taps;
}

Plane channel_plane(const ImageBuffer& image, Channel channel) {
    Plane plane{image.width(), image.height(), {}};
    plane.values.reserve(image.pixel_count());
    const auto k = index_of(channel);
    for (const Rgb& px : image.pixels()) plane.values.push_back(px[k]);
    return plane;
}

Plane downsample_2x(const Plane& plane) {
    Plane out{plane.width / 2, plane.height / 2, {}};
    out.values.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double sum = plane.at(2 * x, 2 * y) + plane.at(2 * x + 1, 2 * y) +
                               plane.at(2 * x, 2 * y + 1) + plane.at(2 * x + 1, 2 * y + 1);
            out.values[static_cast<std::size_t>(y) * out.width + x] = 0.25 * sum;
        }
    }
    return out;
}

namespace {

void check_planes(const Plane& a, const Plane& b, const SsimParams& params) {
    params.validate();
    if (a.width != b.width || a.height != b.height) {
        throw InvalidArgument("SSIM inputs differ in size: " + std::to_string(a.width) + "x" +
                              std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                              std::to_string(b.height));
    }
    if (a.width < params.window_size || a.height < params.window_size) {
        throw InvalidArgument("image " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                              " is smaller than the " + std::to_string(params.window_size) + "px SSIM window");
    }
}

struct LocalMoments {
    double mean_a, mean_b, sq_a, sq_b, cross;
};

struct MapTerms {
    double luminance;
    double contrast_structure;
};

MapTerms ssim_terms(const LocalMoments& m, double c1, double c2) {
    const double var_a = m.sq_a - m.mean_a * m.mean_a;
    const double var_b = m.sq_b - m.mean_b * m.mean_b;
    const double cov = m.cross - m.mean_a * m.mean_b;
    return {(2.0 * m.mean_a * m.mean_b + c1) / (m.mean_a * m.mean_a + m.mean_b * m.mean_b + c1),
            (2.0 * cov + c2) / (var_a + var_b + c2)};
}

struct RowSums {
    double ssim = 0.0;
    double luminance = 0.0;
    double contrast_structure = 0.0;
};

SsimComponents finish(const std::vector<RowSums>& rows, std::size_t valid) {
    SsimComponents out;
    for (const auto& r : rows) {
        out.ssim += r.ssim;
        out.luminance += r.luminance;
        out.contrast_structure += r.contrast_structure;
    }
    const auto n = static_cast<double>(valid);
    out.ssim /= n;
    out.luminance /= n;
    out.contrast_structure /= n;
    return out;
}

}  // namespace

SsimComponents ssim_components(const Plane& a, const Plane& b, const SsimParams& params) {
    check_planes(a, b, params);
    const auto taps = gaussian_taps(params.window_size, params.sigma);
    const int ws = params.window_size;
    const int width = a.width;
    const int height = a.height;
    const int out_w = width - ws + 1;
    const int out_h = height - ws + 1;
    const double c1 = params.c1();
    const double c2 = params.c2();

    // Horizontal pass: five moment planes of size out_w x height.
    constexpr int kMoments = 5;
    const auto stride = static_cast<std::size_t>(out_w);
    std::vector<double> horizontal(kMoments * stride * static_cast<std::size_t>(height));
    const auto plane_offset = [&](int m) { return static_cast<std::size_t>(m) * stride * height; };

#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        const double* ra = a.values.data() + static_cast<std::size_t>(y) * width;
        const double* rb = b.values.data() + static_cast<std::size_t>(y) * width;
        const std::size_t row = static_cast<std::size_t>(y) * stride;
        for (int x = 0; x < out_w; ++x) {
            double s[kMoments] = {};
            for (int t = 0; t < ws; ++t) {
                const double w = taps[static_cast<std::size_t>(t)];
                const double va = ra[x + t];
                const double vb = rb[x + t];
                s[0] += w * va;
                s[1] += w * vb;
                s[2] += w * va * va;
                s[3] += w * vb * vb;
                s[4] += w * va * vb;
            }
            for (int m = 0; m < kMoments; ++m) horizontal[plane_offset(m) + row + x] = s[m];
        }
    }

    std::vector<RowSums> rows(static_cast<std::size_t>(out_h));
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        RowSums sums;
        for (int x = 0; x < out_w; ++x) {
            double s[kMoments] = {};
            for (int t = 0; t < ws; ++t) {
                const double w = taps[static_cast<std::size_t>(t)];
                const std::size_t at = static_cast<std::size_t>(y + t) * stride + x;
                for (int m = 0; m < kMoments; ++m) s[m] += w * horizontal[plane_offset(m) + at];
            }
            const MapTerms terms = ssim_terms({s[0], s[1], s[2], s[3], s[4]}, c1, c2);
            sums.ssim += terms.luminance * terms.contrast_structure;
            sums.luminance += terms.luminance;
            sums.contrast_structure += terms.contrast_structure;
        }
        rows[static_cast<std::size_t>(y)] = sums;
    }
    return finish(rows, static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h));
}

SsimComponents ssim_components_reference(const Plane& a, const Plane& b, const SsimParams& params) {
    check_planes(a, b, params);
    const auto taps = gaussian_taps(params.window_size, params.sigma);
    const int ws = params.window_size;
    const int out_w = a.width - ws + 1;
    const int out_h = a.height - ws + 1;
    std::vector<RowSums> rows(static_cast<std::size_t>(out_h));
    for (int y = 0; y < out_h; ++y) {
        RowSums sums;
        for (int x = 0; x < out_w; ++x) {
            LocalMoments m{};
            for (int j = 0; j < ws; ++j) {
                for (int i = 0; i < ws; ++i) {
                    const double w = taps[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(j)];
                    const double va = a.at(x + i, y + j);
                    const double vb = b.at(x + i, y + j);
                    m.mean_a += w * va;
                    m.mean_b += w * vb;
                    m.sq_a += w * va * va;
                    m.sq_b += w * vb * vb;
                    m.cross += w * va * vb;
                }
            }
            const MapTerms terms = ssim_terms(m, params.c1(), params.c2());
            sums.ssim += terms.luminance * terms.contrast_structure;
            sums.luminance += terms.luminance;
            sums.contrast_structure += terms.contrast_structure;
        }
        rows[static_cast<std::size_t>(y)] = sums;
    }
    return finish(rows, static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h));
}

namespace {

void check_same_shape(const ImageBuffer& a, const ImageBuffer& b, std::string_view what) {
    if (!a.same_shape(b)) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                              std::to_string(b.height()));
    }
}

}  // namespace

double psnr(const ImageBuffer& pred, const ImageBuffer& gt, double dynamic_range) {
    check_same_shape(pred, gt, "psnr");
    const auto p = pred.pixels();
    const auto g = gt.pixels();
    std::uint64_t sq = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const int d = static_cast<int>(p[i][c]) - static_cast<int>(g[i][c]);
            sq += static_cast<std::uint64_t>(d * d);
        }
    }
    if (sq == 0) return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(sq) / (3.0 * static_cast<double>(p.size()));
    return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

double ssim(const ImageBuffer& pred, const ImageBuffer& gt, const SsimParams& params) {
    check_same_shape(pred, gt, "ssim");
    double sum = 0.0;
    for (Channel c : kChannels) sum += ssim_components(channel_plane(pred, c), channel_plane(gt, c), params).ssim;
    return sum / 3.0;
}

std::vector<double> normalized_ms_ssim_weights(std::span<const double> weights, int scales) {
    if (scales <= 0 || static_cast<std::size_t>(scales) > weights.size()) {
        throw InvalidArgument("MS-SSIM needs between 1 and " + std::to_string(weights.size()) +
                              " scales, got " + std::to_string(scales));
    }
    std::vector<double> out(weights.begin(), weights.begin() + scales);
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (!(sum > 0.0)) throw InvalidArgument("MS-SSIM weights must have a positive sum");
    for (double& w : out) w /= sum;
    return out;
}

int feasible_ms_ssim_scales(int width, int height, int window_size, int max_scales) {
    int scales = 0;
    while (scales < max_scales && (width >> scales) >= window_size && (height >> scales) >= window_size) {
        ++scales;
    }
    return scales;
}

MsSsimResult ms_ssim(const Plane& pred, const Plane& gt, const SsimParams& params,
                     std::span<const double> weights) {
    params.validate();
    const int scales =
        feasible_ms_ssim_scales(pred.width, pred.height, params.window_size, static_cast<int>(weights.size()));
    if (scales == 0) check_planes(pred, gt, params);  // throws the size error
    const auto w = normalized_ms_ssim_weights(weights, scales);

    Plane a = pred;
    Plane b = gt;
    double value = 1.0;
    for (int j = 0; j < scales; ++j) {
        const SsimComponents comps = ssim_components(a, b, params);
        value *= std::pow(std::max(comps.contrast_structure, 0.0), w[static_cast<std::size_t>(j)]);
        if (j + 1 == scales) {
            value *= std::pow(std::max(comps.luminance, 0.0), w[static_cast<std::size_t>(j)]);
        } else {
            a = downsample_2x(a);
            b = downsample_2x(b);
        }
    }
    return {value, scales};
}

MsSsimResult ms_ssim(const ImageBuffer& pred, const ImageBuffer& gt, const SsimParams& params,
                     std::span<const double> weights) {
    check_same_shape(pred, gt, "ms_ssim");
    MsSsimResult out;
    for (Channel c : kChannels) {
        const MsSsimResult r = ms_ssim(channel_plane(pred, c), channel_plane(gt, c), params, weights);
        out.value += r.value;
        out.scales = r.scales;
    }
    out.value /= 3.0;
    return out;
}

double smooth_l1(double z) noexcept {
    const double a = std::abs(z);
    return a < 1.0 ? 0.5 * z * z : a - 0.5;
}

double smooth_l1_loss(std::span<const double> pred, std::span<const double> gt) {
    if (pred.size() != gt.size()) {
        throw InvalidArgument("smooth_l1_loss: shape mismatch " + std::to_string(pred.size()) + " vs " +
                              std::to_string(gt.size()));
    }
    if (pred.empty()) throw InvalidArgument("smooth_l1_loss: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += smooth_l1(gt[i] - pred[i]);
    return sum / static_cast<double>(pred.size());
}

std::string_view intensity_scale_name(IntensityScale scale) noexcept {
    return scale == IntensityScale::normalized ? "normalized-0-1" : "raw-0-255";
}

double smooth_l1_loss(const ImageBuffer& pred, const ImageBuffer& gt, IntensityScale scale) {
    check_same_shape(pred, gt, "smooth_l1_loss");
    const double factor = scale == IntensityScale::normalized ? 1.0 / 255.0 : 1.0;
    const auto p = pred.pixels();
    const auto g = gt.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            sum += smooth_l1((static_cast<double>(g[i][c]) - static_cast<double>(p[i][c])) * factor);
        }
    }
    return sum / (3.0 * static_cast<double>(p.size()));
}

double total_loss(const LossTerms& terms) {
    for (double v : {terms.l1, terms.ms_ssim, terms.perceptual, terms.adversarial}) {
        if (!std::isfinite(v)) throw InvalidArgument("total_loss: non-finite loss term");
    }
    const LossTerms& w = kTotalLossWeights;
    return w.l1 * terms.l1 + w.ms_ssim * terms.ms_ssim + w.perceptual * terms.perceptual +
           w.adversarial * terms.adversarial;
}

PairMetrics evaluate_pair(std::string id, const ImageBuffer& pred, const ImageBuffer& gt, const SsimParams& params) {
    PairMetrics m;
    m.id = std::move(id);
    try {
        m.psnr = psnr(pred, gt, params.dynamic_range);
        m.ssim = ssim(pred, gt, params);
        const MsSsimResult ms = ms_ssim(pred, gt, params);
        m.ms_ssim = ms.value;
        m.ms_ssim_scales = ms.scales;
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("pair " + m.id + ": " + e.what());
    }
    return m;
}

MetricReport summarize(std::vector<PairMetrics> pairs) {
    MetricReport report;
    report.pairs = std::move(pairs);
    if (report.pairs.empty()) return report;
    for (const auto& p : report.pairs) {
        report.mean_psnr += p.psnr;
        report.mean_ssim += p.ssim;
        report.mean_ms_ssim += p.ms_ssim;
    }
    const auto n = static_cast<double>(report.pairs.size());
    report.mean_psnr /= n;
    report.mean_ssim /= n;
    report.mean_ms_ssim /= n;
    return report;
}

}  // namespace hazealign
