#include "hazealign/align.hpp"

#include <cmath>
#include <set>
#include <system_error>
#include <vector>

#include "hazealign/detail/parallel.hpp"
#include "hazealign/error.hpp"
#include "hazealign/png_io.hpp"

namespace hazealign {

namespace fs = std::filesystem;

std::string_view subset_name(Subset subset) noexcept {
    switch (subset) {
        case Subset::gt: return "gt";
        case Subset::hazy: return "hazy";
        case Subset::both: return "both";
    }
    return "both";
}

Subset parse_subset(std::string_view text) {
    if (text == "gt") return Subset::gt;
    if (text == "hazy") return Subset::hazy;
    if (text == "both") return Subset::both;
    throw InvalidArgument("unknown subset '" + std::string(text) + "' (expected gt, hazy or both)");
}

namespace {

bool includes_gt(Subset s) { return s != Subset::hazy; }
bool includes_hazy(Subset s) { return s != Subset::gt; }

std::vector<fs::path> subset_files(const DatasetManifest& m, Subset subset) {
    std::vector<fs::path> out;
    for (const auto& r : m.records) {
        if (includes_hazy(subset)) out.push_back(m.hazy_file(r));
        if (includes_gt(subset)) out.push_back(m.gt_file(r));
    }
    return out;
}

struct WrittenDataset {
    DatasetManifest manifest;
    RgbHistogram gt_after;
    RgbHistogram hazy_after;
};

void check_unique_filenames(const DatasetManifest& m) {
    std::set<std::string> hazy_names;
    std::set<std::string> gt_names;
    for (const auto& r : m.records) {
        if (!hazy_names.insert(r.hazy_path.filename().string()).second) {
            throw InvalidArgument("two hazy images share the filename " + r.hazy_path.filename().string());
        }
        if (!gt_names.insert(r.gt_path.filename().string()).second) {
            throw InvalidArgument("two gt images share the filename " + r.gt_path.filename().string());
        }
    }
}

// Removes the staging directory unless release() was called.
class StagingDir {
public:
    explicit StagingDir(const fs::path& final_dir) : final_(final_dir) {
        if (fs::exists(final_) && !(fs::is_directory(final_) && fs::is_empty(final_))) {
            throw IoError("output directory exists and is not empty: " + final_.string());
        }
        path_ = final_;
        path_ += ".partial";
        fs::remove_all(path_);
        fs::create_directories(path_ / "gt");
        fs::create_directories(path_ / "hazy");
    }
    ~StagingDir() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(path_, ec);
        }
    }
    StagingDir(const StagingDir&) = delete;
    StagingDir& operator=(const StagingDir&) = delete;

    const fs::path& path() const noexcept { return path_; }

    void commit() {
        if (fs::exists(final_)) fs::remove(final_);
        fs::rename(path_, final_);
        committed_ = true;
    }

private:
    fs::path final_;
    fs::path path_;
    bool committed_ = false;
};

RgbHistogram merge_all(const std::vector<RgbHistogram>& parts) {
    RgbHistogram total;
    for (const auto& h : parts) total = merge_histograms(total, h);
    return total;
}

WrittenDataset write_transformed(const DatasetManifest& source, const GammaTriple& gt_gammas,
                                 const GammaTriple& hazy_gammas, const fs::path& out_dir,
                                 std::string name) {
    source.validate();
    gt_gammas.validate();
    hazy_gammas.validate();
    check_unique_filenames(source);

    StagingDir staging(out_dir);
    WrittenDataset written;
    written.manifest.name = std::move(name);
    written.manifest.policy = source.policy;
    for (const auto& r : source.records) {
        written.manifest.records.push_back({r.id, fs::path("hazy") / r.hazy_path.filename(),
                                            fs::path("gt") / r.gt_path.filename(), r.split});
    }

    const std::size_t n = source.records.size();
    std::vector<RgbHistogram> gt_parts(n);
    std::vector<RgbHistogram> hazy_parts(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const PairRecord& r = source.records[i];
        const PairRecord& out = written.manifest.records[i];
        const ImageBuffer hazy = gamma_apply_serial(load_image(source.hazy_file(r)), hazy_gammas);
        const ImageBuffer gt = gamma_apply_serial(load_image(source.gt_file(r)), gt_gammas);
        if (!hazy.same_shape(gt)) {
            throw FormatError("pair " + r.id + ": hazy and gt dimensions differ");
        }
        save_image(hazy, staging.path() / out.hazy_path);
        save_image(gt, staging.path() / out.gt_path);
        hazy_parts[i] = histogram_of_serial(hazy);
        gt_parts[i] = histogram_of_serial(gt);
    });
    write_manifest(written.manifest, staging.path() / "manifest.tsv");
    staging.commit();

    written.manifest.base_dir = out_dir;
    written.gt_after = merge_all(gt_parts);
    written.hazy_after = merge_all(hazy_parts);
    return written;
}

}  // namespace

RgbHistogram manifest_histogram(const DatasetManifest& manifest, Subset subset) {
    manifest.validate();
    const auto files = subset_files(manifest, subset);
    return histogram_of_files(files);
}

AlignmentReport align_dataset(const DatasetManifest& source, const DatasetManifest& target,
                              const fs::path& out_dir, const AlignOptions& options) {
    source.validate();
    target.validate();

    const RgbHistogram source_gt = manifest_histogram(source, Subset::gt);
    const RgbHistogram source_hazy = manifest_histogram(source, Subset::hazy);
    const RgbStats target_gt = stats_from_histogram(manifest_histogram(target, Subset::gt));
    const RgbStats target_hazy = stats_from_histogram(manifest_histogram(target, Subset::hazy));

    const SolveOptions solve{.tolerance = options.tolerance};
    AlignmentReport report;
    report.source_name = source.name;
    report.target_name = target.name;
    report.out_dir = out_dir;
    report.options = options;

    report.gt.aligned = includes_gt(options.subset);
    report.hazy.aligned = includes_hazy(options.subset);
    if (report.gt.aligned) report.gt.gammas = solve_gamma_triple(source_gt, target_gt.means(), solve);
    if (report.hazy.aligned) report.hazy.gammas = solve_gamma_triple(source_hazy, target_hazy.means(), solve);

    const WrittenDataset written = write_transformed(source, report.gt.gammas, report.hazy.gammas, out_dir,
                                                     source.name + "+aligned-to-" + target.name);

    const auto fill = [](SubsetAlignment& a, const RgbHistogram& before, const RgbHistogram& after,
                         const RgbStats& target_stats) {
        a.source_before = stats_from_histogram(before);
        a.source_after = stats_from_histogram(after);
        a.target = target_stats;
        for (Channel c : kChannels) {
            const auto k = index_of(c);
            a.residual_continuous[k] = std::abs(mean_after_gamma(before[c], a.gammas[c]) - target_stats[c].mean);
            a.residual_quantized[k] = std::abs(a.source_after[c].mean - target_stats[c].mean);
        }
    };
    fill(report.gt, source_gt, written.gt_after, target_gt);
    fill(report.hazy, source_hazy, written.hazy_after, target_hazy);
    return report;
}

DatasetManifest transform_dataset(const DatasetManifest& source, const GammaTriple& gammas, Subset subset,
                                  const fs::path& out_dir) {
    gammas.validate();
    const GammaTriple identity{};
    return write_transformed(source, includes_gt(subset) ? gammas : identity,
                             includes_hazy(subset) ? gammas : identity, out_dir, source.name + "+gamma")
        .manifest;
}

}  // namespace hazealign
