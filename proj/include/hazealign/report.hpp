#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hazealign/align.hpp"
#include "hazealign/channel_stats.hpp"
#include "hazealign/metrics.hpp"

namespace hazealign {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Resolved command configuration, echoed verbatim into every report.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal; infinities print as "inf" / "-inf".
std::string format_double(double value);

/// Line-oriented "key = value" text. Keys are emitted in insertion order.
class KeyValueWriter {
public:
    void add(std::string_view key, std::string_view value);
    void add(std::string_view key, double value);
    void add(std::string_view key, std::uint64_t value);
    void add(std::string_view key, int value) { add(key, static_cast<std::uint64_t>(value)); }
    void add_config(const ConfigEcho& config);

    const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
};

void write_text_file(const std::filesystem::path& path, std::string_view text);

/// prefix.mean.R, prefix.variance.R, ...; optionally one key per bin.
void append_stats(KeyValueWriter& out, std::string_view prefix, const RgbStats& stats,
                  bool include_histogram);

std::string format_stats_report(const RgbStats& stats, const ConfigEcho& config);
std::string format_alignment_report(const AlignmentReport& report, const ConfigEcho& config);
std::string format_metric_report(const MetricReport& report, const ConfigEcho& config);

/// "id,psnr,ssim,ms_ssim" header, one row per pair.
std::string format_metric_csv(const MetricReport& report);

/// "bin,R,G,B" header, 256 rows of per-channel normalized frequencies.
std::string format_histogram_csv(const RgbHistogram& histogram);

}  // namespace hazealign
