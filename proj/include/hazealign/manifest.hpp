#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hazealign {

inline constexpr std::string_view kManifestVersion = "hazealign-manifest/1";

enum class Split { train, test, val, unassigned };

std::string_view split_name(Split split) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct PairRecord {
    std::string id;
    std::filesystem::path hazy_path;
    std::filesystem::path gt_path;
    Split split = Split::unassigned;

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Paired hazy/ground-truth records in numeric-stem order. Paths are stored
/// verbatim; relative paths are resolved against `base_dir`, which is set by
/// `read_manifest` to the manifest's directory and is not serialized.
struct DatasetManifest {
    std::string name;
    std::string policy = "none";
    std::vector<PairRecord> records;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    std::filesystem::path hazy_file(const PairRecord& r) const { return resolve(r.hazy_path); }
    std::filesystem::path gt_file(const PairRecord& r) const { return resolve(r.gt_path); }

    std::size_t count(Split split) const noexcept;
    std::vector<PairRecord> with_split(Split split) const;

    /// Throws FormatError on an empty record list or duplicate ids.
    void validate() const;

    friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
        return a.name == b.name && a.policy == b.policy && a.records == b.records;
    }
};

/// Natural ordering: digit runs compare numerically, so "2" < "10".
bool natural_less(std::string_view a, std::string_view b) noexcept;

/// Dataset-style suffixes such as "_hazy" and "_GT" are stripped so that
/// "01_hazy.png" pairs with "01_GT.png".
std::string pairing_stem(const std::filesystem::path& file);

/// Pairs *.png files of the two directories by stem; split = unassigned.
DatasetManifest scan_directory(const std::filesystem::path& hazy_dir,
                               const std::filesystem::path& gt_dir,
                               std::string name = {});

struct SplitParams {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    std::filesystem::path list_file;  // official-split only
};

struct SplitResult {
    DatasetManifest manifest;
    std::vector<std::string> warnings;
};

// Policies: nh23-comparison (35/5), nh23-ablation (40/0), nh21 (20/5),
// official-split (explicit "id<TAB>split" list), custom (head counts).
SplitResult apply_split(const DatasetManifest& manifest, std::string_view policy,
                        const SplitParams& params = {});

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});

}  // namespace hazealign
