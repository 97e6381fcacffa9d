#include "hazealign/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "hazealign/error.hpp"

namespace hazealign {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void KeyValueWriter::add(std::string_view key, std::string_view value) {
    text_.append(key);
    text_ += " = ";
    text_.append(value);
    text_ += '\n';
}

void KeyValueWriter::add(std::string_view key, double value) { add(key, format_double(value)); }

void KeyValueWriter::add(std::string_view key, std::uint64_t value) { add(key, std::to_string(value)); }

void KeyValueWriter::add_config(const ConfigEcho& config) {
    for (const auto& [key, value] : config) add("config." + key, value);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoError("failed writing " + path.string());
}

void append_stats(KeyValueWriter& out, std::string_view prefix, const RgbStats& stats, bool include_histogram) {
    const std::string p(prefix);
    for (Channel c : kChannels) {
        const std::string ch(channel_name(c));
        out.add(p + ".mean." + ch, stats[c].mean);
        out.add(p + ".variance." + ch, stats[c].variance);
        out.add(p + ".pixel_count." + ch, stats[c].pixel_count);
    }
    if (!include_histogram) return;
    for (Channel c : kChannels) {
        const std::string ch(channel_name(c));
        for (int i = 0; i < kBins; ++i) {
            out.add(p + ".histogram." + ch + "." + std::to_string(i), stats[c].histogram.bins[i]);
        }
    }
}

namespace {

void header(KeyValueWriter& out, std::string_view format, const ConfigEcho& config) {
    out.add("format", format);
    out.add("tool_version", kToolVersion);
    out.add_config(config);
}

void append_subset(KeyValueWriter& out, std::string_view name, const SubsetAlignment& a) {
    const std::string p(name);
    out.add(p + ".aligned", a.aligned ? "true" : "false");
    out.add(p + ".gamma.R", a.gammas.r);
    out.add(p + ".gamma.G", a.gammas.g);
    out.add(p + ".gamma.B", a.gammas.b);
    for (Channel c : kChannels) {
        out.add(p + ".residual_continuous." + std::string(channel_name(c)), a.residual_continuous[index_of(c)]);
    }
    for (Channel c : kChannels) {
        out.add(p + ".residual_quantized." + std::string(channel_name(c)), a.residual_quantized[index_of(c)]);
    }
    append_stats(out, p + ".target", a.target, false);
    append_stats(out, p + ".source_before", a.source_before, false);
    append_stats(out, p + ".source_after", a.source_after, false);
}

}  // namespace

std::string format_stats_report(const RgbStats& stats, const ConfigEcho& config) {
    KeyValueWriter out;
    header(out, "hazealign-stats/1", config);
    append_stats(out, "stats", stats, true);
    return out.str();
}

std::string format_alignment_report(const AlignmentReport& report, const ConfigEcho& config) {
    KeyValueWriter out;
    header(out, "hazealign-alignment-report/1", config);
    out.add("source.name", report.source_name);
    out.add("target.name", report.target_name);
    out.add("tolerance", report.options.tolerance);
    out.add("subset", subset_name(report.options.subset));
    out.add("mean_matching", "continuous-curve-then-round-half-away-from-zero");
    append_subset(out, "gt", report.gt);
    append_subset(out, "hazy", report.hazy);
    return out.str();
}

std::string format_metric_report(const MetricReport& report, const ConfigEcho& config) {
    KeyValueWriter out;
    header(out, "hazealign-metrics/1", config);
    out.add("ssim.window", "gaussian");
    out.add("ssim.border", "valid");
    out.add("ssim.color", "per-channel-mean");
    out.add("ms_ssim.downsample", "2x2-mean");
    out.add("pairs", static_cast<std::uint64_t>(report.pairs.size()));
    out.add("mean.psnr", report.mean_psnr);
    out.add("mean.ssim", report.mean_ssim);
    out.add("mean.ms_ssim", report.mean_ms_ssim);
    for (const auto& p : report.pairs) {
        out.add("pair." + p.id + ".psnr", p.psnr);
        out.add("pair." + p.id + ".ssim", p.ssim);
        out.add("pair." + p.id + ".ms_ssim", p.ms_ssim);
        out.add("pair." + p.id + ".ms_ssim_scales", p.ms_ssim_scales);
    }
    return out.str();
}

std::string format_metric_csv(const MetricReport& report) {
    std::string out = "id,psnr,ssim,ms_ssim\n";
    for (const auto& p : report.pairs) {
        out += p.id + ',' + format_double(p.psnr) + ',' + format_double(p.ssim) + ',' + format_double(p.ms_ssim) + '\n';
    }
    return out;
}

std::string format_histogram_csv(const RgbHistogram& histogram) {
    std::string out = "bin,R,G,B\n";
    std::array<double, 3> totals{};
    for (Channel c : kChannels) totals[index_of(c)] = static_cast<double>(histogram[c].total());
    for (int i = 0; i < kBins; ++i) {
        out += std::to_string(i);
        for (Channel c : kChannels) {
            const double total = totals[index_of(c)];
            const double freq = total > 0 ? static_cast<double>(histogram[c].bins[i]) / total : 0.0;
            out += ',' + format_double(freq);
        }
        out += '\n';
    }
    return out;
}

}  // namespace hazealign
