#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hazealign/align.hpp"
#include "hazealign/augment.hpp"
#include "hazealign/manifest.hpp"
#include "hazealign/metrics.hpp"
#include "hazealign/report.hpp"

namespace hazealign::cli {

namespace fs = std::filesystem;

struct StatsCommand {
    fs::path manifest;
    Subset subset = Subset::both;
    fs::path out;
};

struct AlignCommand {
    fs::path source;
    fs::path target;
    fs::path out_dir;
    double tolerance = 1e-6;
    Subset subset = Subset::both;
    fs::path report;  // default: out_dir/alignment_report.txt
};

struct TransformCommand {
    fs::path manifest;
    GammaTriple gammas;
    Subset subset = Subset::both;
    fs::path out_dir;
};

struct EvalCommand {
    fs::path pred_dir;
    fs::path gt_manifest;
    fs::path out_report;
    fs::path out_csv;
    std::optional<Split> split;  // evaluate only records with this tag
};

struct HistCommand {
    fs::path manifest;
    Subset subset = Subset::gt;
    fs::path out_csv;
};

struct AugmentSampleCommand {
    fs::path hazy;
    fs::path gt;
    std::uint64_t seed = 0;
    int crop_size = 256;
    fs::path out_dir;
    fs::path replay_plan;  // when set, replaces seed/crop_size sampling
};

struct SplitCommand {
    fs::path manifest;
    std::string policy;
    SplitParams params;
    fs::path out;
};

RgbStats cmd_stats(const StatsCommand& cmd);
AlignmentReport cmd_align(const AlignCommand& cmd);
DatasetManifest cmd_transform(const TransformCommand& cmd);
MetricReport cmd_eval(const EvalCommand& cmd);
RgbHistogram cmd_hist(const HistCommand& cmd);
AugmentPlan cmd_augment_sample(const AugmentSampleCommand& cmd);
SplitResult cmd_split(const SplitCommand& cmd);

/// "2" or "2,1,1".
GammaTriple parse_gamma_triple(std::string_view text);

/// Full command line front end. Returns the process exit status; failures
/// print exactly one "error: <code>: <message>" line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hazealign::cli
