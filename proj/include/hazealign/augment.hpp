#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hazealign/image.hpp"

namespace hazealign {

enum class AugmentKind { identity, crop, rotate90, rotate180, rotate270, hflip, vflip };

std::string_view augment_kind_name(AugmentKind kind) noexcept;

/// Rotations are clockwise. Only `crop` uses x, y and size.
struct AugmentOp {
    AugmentKind kind = AugmentKind::identity;
    int x = 0;
    int y = 0;
    int size = 0;

    static AugmentOp crop(int x, int y, int size) { return {AugmentKind::crop, x, y, size}; }

    friend bool operator==(const AugmentOp&, const AugmentOp&) = default;
};

struct AugmentPlan {
    std::uint64_t seed = 0;
    int crop_size = 256;
    int source_width = 0;
    int source_height = 0;
    std::vector<AugmentOp> ops;

    friend bool operator==(const AugmentPlan&, const AugmentPlan&) = default;
};

/// Seed for the index-th of several parallel samplers sharing `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Uniform crop offset, then one of {none, rotate90, rotate180, rotate270}
/// with probability 1/4 each, then hflip and vflip independently with
/// probability 1/2. Draws come from std::mt19937_64 with an explicit
/// rejection-sampled bounded draw, so plans replay on every platform.
AugmentPlan sample_plan(std::uint64_t seed, int width, int height, int crop_size = 256);

ImageBuffer apply_op(const ImageBuffer& image, const AugmentOp& op);
ImageBuffer apply_plan(const ImageBuffer& image, const AugmentPlan& plan);

/// Applies one plan to both members of a pair.
std::pair<ImageBuffer, ImageBuffer> sample_pair_augment(const ImageBuffer& hazy,
                                                        const ImageBuffer& gt,
                                                        const AugmentPlan& plan);

inline constexpr std::string_view kAugmentPlanVersion = "hazealign-augment-plan/1";

std::string serialize_plan(const AugmentPlan& plan);
AugmentPlan parse_plan(std::string_view text);

}  // namespace hazealign
