#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "hazealign/channel_stats.hpp"
#include "hazealign/gamma.hpp"
#include "hazealign/manifest.hpp"

namespace hazealign {

enum class Subset { gt, hazy, both };

std::string_view subset_name(Subset subset) noexcept;
Subset parse_subset(std::string_view text);

/// Pooled histogram over the selected member(s) of every record.
RgbHistogram manifest_histogram(const DatasetManifest& manifest, Subset subset);

struct SubsetAlignment {
    bool aligned = false;  // false: passed through with identity gammas
    RgbStats source_before;
    RgbStats source_after;  // measured on the written 8-bit images
    RgbStats target;
    GammaTriple gammas;
    std::array<double, 3> residual_continuous{};
    std::array<double, 3> residual_quantized{};
};

struct AlignOptions {
    double tolerance = 1e-6;
    Subset subset = Subset::both;
};

struct AlignmentReport {
    std::string source_name;
    std::string target_name;
    std::filesystem::path out_dir;
    AlignOptions options;
    SubsetAlignment gt;
    SubsetAlignment hazy;
};

// Solves one GammaTriple for the ground-truth images and one for the hazy
// images, then writes transformed copies to out_dir/gt and out_dir/hazy
// (source filenames kept) plus out_dir/manifest.tsv. Output is staged in a
// sibling directory and renamed into place, so a failed run leaves no
// out_dir behind.
AlignmentReport align_dataset(const DatasetManifest& source, const DatasetManifest& target,
                              const std::filesystem::path& out_dir, const AlignOptions& options = {});

/// Applies fixed gammas to the selected subset(s) and copies the rest.
DatasetManifest transform_dataset(const DatasetManifest& source, const GammaTriple& gammas,
                                  Subset subset, const std::filesystem::path& out_dir);

}  // namespace hazealign
