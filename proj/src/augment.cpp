#include "hazealign/augment.hpp"

#include <limits>
#include <random>
#include <sstream>

#include "hazealign/error.hpp"

namespace hazealign {

std::string_view augment_kind_name(AugmentKind kind) noexcept {
    switch (kind) {
        case AugmentKind::identity: return "identity";
        case AugmentKind::crop: return "crop";
        case AugmentKind::rotate90: return "rotate90";
        case AugmentKind::rotate180: return "rotate180";
        case AugmentKind::rotate270: return "rotate270";
        case AugmentKind::hflip: return "hflip";
        case AugmentKind::vflip: return "vflip";
    }
    return "identity";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    // splitmix64 finalizer over base + (index + 1) * golden ratio.
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

// Uniform draw in [0, n); std::uniform_int_distribution is not specified
// bit-for-bit across standard libraries, so plans would not replay.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r = 0;
    do {
        r = rng();
    } while (r < threshold);
    return r % n;
}

void check_crop_fits(int width, int height, int crop_size) {
    if (crop_size <= 0) throw InvalidArgument("crop size must be positive, got " + std::to_string(crop_size));
    if (crop_size > width || crop_size > height) {
        throw InvalidArgument("crop size " + std::to_string(crop_size) + " exceeds image " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

AugmentPlan sample_plan(std::uint64_t seed, int width, int height, int crop_size) {
    check_crop_fits(width, height, crop_size);
    std::mt19937_64 rng(seed);
    AugmentPlan plan{seed, crop_size, width, height, {}};
    const auto x = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(width - crop_size + 1)));
    const auto y = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(height - crop_size + 1)));
    plan.ops.push_back(AugmentOp::crop(x, y, crop_size));
    switch (bounded(rng, 4)) {
        case 1: plan.ops.push_back({AugmentKind::rotate90}); break;
        case 2: plan.ops.push_back({AugmentKind::rotate180}); break;
        case 3: plan.ops.push_back({AugmentKind::rotate270}); break;
        default: break;
    }
    if (bounded(rng, 2) == 1) plan.ops.push_back({AugmentKind::hflip});
    if (bounded(rng, 2) == 1) plan.ops.push_back({AugmentKind::vflip});
    return plan;
}

ImageBuffer apply_op(const ImageBuffer& image, const AugmentOp& op) {
    const int w = image.width();
    const int h = image.height();
    switch (op.kind) {
        case AugmentKind::identity: return image;
        case AugmentKind::crop: {
            check_crop_fits(w, h, op.size);
            if (op.x < 0 || op.y < 0 || op.x + op.size > w || op.y + op.size > h) {
                throw InvalidArgument("crop window (" + std::to_string(op.x) + "," + std::to_string(op.y) + ") size " +
                                      std::to_string(op.size) + " is outside the " + std::to_string(w) + "x" +
                                      std::to_string(h) + " image");
            }
            ImageBuffer out(op.size, op.size);
            for (int y = 0; y < op.size; ++y) {
                for (int x = 0; x < op.size; ++x) out.at(x, y) = image.at(op.x + x, op.y + y);
            }
            return out;
        }
        case AugmentKind::rotate90: {
            ImageBuffer out(h, w);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) out.at(h - 1 - y, x) = image.at(x, y);
            }
            return out;
        }
        case AugmentKind::rotate180: {
            ImageBuffer out(w, h);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) out.at(w - 1 - x, h - 1 - y) = image.at(x, y);
            }
            return out;
        }
        case AugmentKind::rotate270: {
            ImageBuffer out(h, w);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) out.at(y, w - 1 - x) = image.at(x, y);
            }
            return out;
        }
        case AugmentKind::hflip: {
            ImageBuffer out(w, h);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) out.at(w - 1 - x, y) = image.at(x, y);
            }
            return out;
        }
        case AugmentKind::vflip: {
            ImageBuffer out(w, h);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) out.at(x, h - 1 - y) = image.at(x, y);
            }
            return out;
        }
    }
    return image;
}

ImageBuffer apply_plan(const ImageBuffer& image, const AugmentPlan& plan) {
    if (image.width() != plan.source_width || image.height() != plan.source_height) {
        throw InvalidArgument("plan was sampled for " + std::to_string(plan.source_width) + "x" +
                              std::to_string(plan.source_height) + ", image is " + std::to_string(image.width()) +
                              "x" + std::to_string(image.height()));
    }
    ImageBuffer out = image;
    for (const auto& op : plan.ops) out = apply_op(out, op);
    return out;
}

std::pair<ImageBuffer, ImageBuffer> sample_pair_augment(const ImageBuffer& hazy, const ImageBuffer& gt,
                                                        const AugmentPlan& plan) {
    if (!hazy.same_shape(gt)) {
        throw InvalidArgument("hazy " + std::to_string(hazy.width()) + "x" + std::to_string(hazy.height()) +
                              " and gt " + std::to_string(gt.width()) + "x" + std::to_string(gt.height()) +
                              " differ in size");
    }
    check_crop_fits(hazy.width(), hazy.height(), plan.crop_size);
    return {apply_plan(hazy, plan), apply_plan(gt, plan)};
}

std::string serialize_plan(const AugmentPlan& plan) {
    std::ostringstream out;
    out << kAugmentPlanVersion << '\n'
        << "seed " << plan.seed << '\n'
        << "crop_size " << plan.crop_size << '\n'
        << "source " << plan.source_width << ' ' << plan.source_height << '\n';
    for (const auto& op : plan.ops) {
        out << "op " << augment_kind_name(op.kind);
        if (op.kind == AugmentKind::crop) out << ' ' << op.x << ' ' << op.y << ' ' << op.size;
        out << '\n';
    }
    return out.str();
}

AugmentPlan parse_plan(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    const auto fail = [&](const std::string& why) {
        throw FormatError("augment plan line " + std::to_string(line_no) + ": " + why);
    };
    AugmentPlan plan;
    plan.ops.clear();
    bool header = false;
    bool seen_seed = false;
    bool seen_source = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != kAugmentPlanVersion) fail("expected '" + std::string(kAugmentPlanVersion) + "'");
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "seed") {
            if (!(fields >> plan.seed)) fail("bad seed");
            seen_seed = true;
        } else if (key == "crop_size") {
            if (!(fields >> plan.crop_size)) fail("bad crop_size");
        } else if (key == "source") {
            if (!(fields >> plan.source_width >> plan.source_height)) fail("bad source size");
            seen_source = true;
        } else if (key == "op") {
            std::string name;
            fields >> name;
            AugmentOp op;
            bool known = false;
            for (AugmentKind k : {AugmentKind::identity, AugmentKind::crop, AugmentKind::rotate90,
                                  AugmentKind::rotate180, AugmentKind::rotate270, AugmentKind::hflip,
                                  AugmentKind::vflip}) {
                if (name == augment_kind_name(k)) {
                    op.kind = k;
                    known = true;
                }
            }
            if (!known) fail("unknown op '" + name + "'");
            if (op.kind == AugmentKind::crop && !(fields >> op.x >> op.y >> op.size)) fail("crop needs x y size");
            plan.ops.push_back(op);
        } else {
            fail("unknown key '" + key + "'");
        }
        std::string extra;
        if (fields >> extra) fail("trailing field '" + extra + "'");
    }
    if (!header) throw FormatError("augment plan is empty");
    if (!seen_seed || !seen_source) throw FormatError("augment plan needs seed and source lines");
    return plan;
}

}  // namespace hazealign
