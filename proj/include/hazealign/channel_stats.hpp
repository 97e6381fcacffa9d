#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>

#include "hazealign/image.hpp"

namespace hazealign {

inline constexpr int kBins = 256;

struct ChannelHistogram {
    Channel channel = Channel::R;
    std::array<std::uint64_t, kBins> bins{};

    std::uint64_t total() const noexcept;

    friend bool operator==(const ChannelHistogram&, const ChannelHistogram&) = default;
};

/// Bin-wise sum. Throws InvalidArgument when the channel tags differ.
ChannelHistogram merge_histograms(const ChannelHistogram& a, const ChannelHistogram& b);

/// Histograms for R, G and B, in that order.
struct RgbHistogram {
    std::array<ChannelHistogram, 3> channels{
        ChannelHistogram{Channel::R, {}}, ChannelHistogram{Channel::G, {}},
        ChannelHistogram{Channel::B, {}}};

    const ChannelHistogram& operator[](Channel c) const noexcept { return channels[index_of(c)]; }
    ChannelHistogram& operator[](Channel c) noexcept { return channels[index_of(c)]; }

    std::uint64_t pixel_count() const noexcept { return channels[0].total(); }

    friend bool operator==(const RgbHistogram&, const RgbHistogram&) = default;
};

RgbHistogram merge_histograms(const RgbHistogram& a, const RgbHistogram& b);

// Mean and variance come from the integer moments sum(i * n_i) and
// sum(i^2 * n_i), each reduced to a double by a single division, so the
// result does not depend on accumulation order.
struct ChannelStats {
    Channel channel = Channel::R;
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t pixel_count = 0;
    ChannelHistogram histogram;

    static ChannelStats from_histogram(const ChannelHistogram& histogram);

    friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

struct RgbStats {
    std::array<ChannelStats, 3> channels;

    const ChannelStats& operator[](Channel c) const noexcept { return channels[index_of(c)]; }

    std::array<double, 3> means() const noexcept {
        return {channels[0].mean, channels[1].mean, channels[2].mean};
    }

    friend bool operator==(const RgbStats&, const RgbStats&) = default;
};

RgbStats stats_from_histogram(const RgbHistogram& histogram);

// Per-image histogram kernels. The parallel variant splits rows across
// OpenMP threads with thread-local counts; the serial one is the reference.
RgbHistogram histogram_of(const ImageBuffer& image);
RgbHistogram histogram_of_serial(const ImageBuffer& image);

/// Pooled statistics over every pixel of every image (images may differ in
/// size). Throws InvalidArgument on an empty sequence.
RgbStats channel_stats(std::span<const ImageBuffer> images);
RgbStats channel_stats_serial(std::span<const ImageBuffer> images);

/// Streams the files through `load_image` a few at a time (one per thread)
/// and accumulates their pooled histogram.
RgbHistogram histogram_of_files(std::span<const std::filesystem::path> paths);

}  // namespace hazealign
