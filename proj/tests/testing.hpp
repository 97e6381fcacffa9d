#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hazealign/image.hpp"
#include "hazealign/manifest.hpp"
#include "hazealign/metrics.hpp"

namespace hazealign::testing {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag = "hazealign");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const fs::path& p) const { return path_ / p; }

private:
    fs::path path_;
};

ImageBuffer random_image(std::mt19937_64& rng, int width, int height);
ImageBuffer constant_image(int width, int height, Rgb value);

/// Image whose pixel (x, y) encodes its own coordinates, for tracking where
/// a geometric op moved each pixel. Requires width, height <= 256.
ImageBuffer coordinate_tag_image(int width, int height);

struct SyntheticDataset {
    fs::path manifest_path;
    DatasetManifest manifest;
};

/// Writes `pairs` hazy/gt PNG pairs under dir/{hazy,gt} plus a manifest.
/// `make(i, is_gt)` produces each image.
template <typename Make>
SyntheticDataset write_dataset(const fs::path& dir, const std::string& name, int pairs, Make&& make);

/// Random images whose channel values are drawn around the given means.
SyntheticDataset write_random_dataset(const fs::path& dir, const std::string& name, int pairs, std::uint64_t seed,
                                      std::array<int, 3> gt_center, std::array<int, 3> hazy_center);

/// Pooled per-channel mean computed by re-reading every file, summing in
/// long double, independent of the histogram code.
std::array<double, 3> brute_force_mean(const std::vector<fs::path>& files);

/// Direct-definition SSIM on one channel: at each valid position, weighted
/// window mean first, then centered second moments. Returns mean SSIM and
/// the means of the luminance and contrast-structure factors.
struct OracleSsim {
    double ssim;
    double luminance;
    double contrast_structure;
};
OracleSsim naive_ssim(const std::vector<double>& a, const std::vector<double>& b, int width, int height,
                      int window, double sigma, double c1, double c2);

std::vector<double> channel_values(const ImageBuffer& image, int channel);

bool files_equal(const fs::path& a, const fs::path& b);

}  // namespace hazealign::testing

#include "testing_impl.hpp"
