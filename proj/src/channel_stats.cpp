#include "hazealign/channel_stats.hpp"

#include <numeric>
#include <string>
#include <vector>

#include "hazealign/detail/parallel.hpp"
#include "hazealign/error.hpp"
#include "hazealign/png_io.hpp"

namespace hazealign {

std::uint64_t ChannelHistogram::total() const noexcept {
    return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

ChannelHistogram merge_histograms(const ChannelHistogram& a, const ChannelHistogram& b) {
    if (a.channel != b.channel) {
        throw InvalidArgument("cannot merge histograms of channels " +
                              std::string(channel_name(a.channel)) + " and " +
                              std::string(channel_name(b.channel)));
    }
    ChannelHistogram out{a.channel, {}};
    for (int i = 0; i < kBins; ++i) out.bins[i] = a.bins[i] + b.bins[i];
    return out;
}

RgbHistogram merge_histograms(const RgbHistogram& a, const RgbHistogram& b) {
    RgbHistogram out;
    for (Channel c : kChannels) out[c] = merge_histograms(a[c], b[c]);
    return out;
}

ChannelStats ChannelStats::from_histogram(const ChannelHistogram& histogram) {
    using u128 = unsigned __int128;
    u128 count = 0;
    u128 first = 0;
    u128 second = 0;
    for (int i = 0; i < kBins; ++i) {
        const u128 n = histogram.bins[i];
        count += n;
        first += n * static_cast<u128>(i);
        second += n * static_cast<u128>(i) * static_cast<u128>(i);
    }
    ChannelStats stats;
    stats.channel = histogram.channel;
    stats.histogram = histogram;
    stats.pixel_count = static_cast<std::uint64_t>(count);
    if (count == 0) return stats;
    // n * sum(i^2 n_i) - (sum(i n_i))^2 is exact and non-negative.
    const u128 scaled_variance = count * second - first * first;
    const auto n = static_cast<double>(count);
    stats.mean = static_cast<double>(first) / n;
    stats.variance = static_cast<double>(scaled_variance) / (n * n);
    return stats;
}

RgbStats stats_from_histogram(const RgbHistogram& histogram) {
    RgbStats out;
    for (Channel c : kChannels) out.channels[index_of(c)] = ChannelStats::from_histogram(histogram[c]);
    return out;
}

namespace {

using FlatCounts = std::array<std::uint64_t, 3 * kBins>;

RgbHistogram unflatten(const FlatCounts& counts) {
    RgbHistogram out;
    for (Channel c : kChannels) {
        const auto offset = index_of(c) * kBins;
        for (int i = 0; i < kBins; ++i) out[c].bins[i] = counts[offset + i];
    }
    return out;
}

}  // namespace

RgbHistogram histogram_of_serial(const ImageBuffer& image) {
    RgbHistogram out;
    for (const Rgb& px : image.pixels()) {
        ++out[Channel::R].bins[px[0]];
        ++out[Channel::G].bins[px[1]];
        ++out[Channel::B].bins[px[2]];
    }
    return out;
}

RgbHistogram histogram_of(const ImageBuffer& image) {
    FlatCounts total{};
    const auto pixels = image.pixels();
    const int width = image.width();
    const int height = image.height();
#pragma omp parallel
    {
        FlatCounts local{};
#pragma omp for schedule(static) nowait
        for (int y = 0; y < height; ++y) {
            const Rgb* row = pixels.data() + static_cast<std::size_t>(y) * width;
            for (int x = 0; x < width; ++x) {
                ++local[row[x][0]];
                ++local[kBins + row[x][1]];
                ++local[2 * kBins + row[x][2]];
            }
        }
#pragma omp critical(hazealign_histogram_merge)
        for (std::size_t i = 0; i < local.size(); ++i) total[i] += local[i];
    }
    return unflatten(total);
}

RgbStats channel_stats_serial(std::span<const ImageBuffer> images) {
    if (images.empty()) throw InvalidArgument("channel_stats needs at least one image");
    RgbHistogram pooled;
    for (const auto& image : images) pooled = merge_histograms(pooled, histogram_of_serial(image));
    return stats_from_histogram(pooled);
}

RgbStats channel_stats(std::span<const ImageBuffer> images) {
    if (images.empty()) throw InvalidArgument("channel_stats needs at least one image");
    FlatCounts total{};
    const auto count = static_cast<long long>(images.size());
#pragma omp parallel
    {
        FlatCounts local{};
#pragma omp for schedule(dynamic, 1) nowait
        for (long long i = 0; i < count; ++i) {
            for (const Rgb& px : images[static_cast<std::size_t>(i)].pixels()) {
                ++local[px[0]];
                ++local[kBins + px[1]];
                ++local[2 * kBins + px[2]];
            }
        }
#pragma omp critical(hazealign_histogram_merge)
        for (std::size_t i = 0; i < local.size(); ++i) total[i] += local[i];
    }
    return stats_from_histogram(unflatten(total));
}

RgbHistogram histogram_of_files(std::span<const std::filesystem::path> paths) {
    std::vector<RgbHistogram> per_file(paths.size());
    detail::parallel_for(paths.size(), [&](std::size_t i) {
        per_file[i] = histogram_of_serial(load_image(paths[i]));
    });
    RgbHistogram pooled;
    for (const auto& h : per_file) pooled = merge_histograms(pooled, h);
    return pooled;
}

}  // namespace hazealign
