#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hazealign {

enum class Channel : std::uint8_t { R = 0, G = 1, B = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::R, Channel::G, Channel::B};

constexpr std::size_t index_of(Channel c) noexcept { return static_cast<std::size_t>(c); }

constexpr std::string_view channel_name(Channel c) noexcept {
    switch (c) {
        case Channel::R: return "R";
        case Channel::G: return "G";
        case Channel::B: return "B";
    }
    return "?";
}

/// One pixel; components indexed by `index_of(Channel)`.
using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major. Width and height are always positive and
/// `pixels().size() == width() * height()`.
class ImageBuffer {
public:
    ImageBuffer(int width, int height, Rgb fill = {0, 0, 0});
    ImageBuffer(int width, int height, std::vector<Rgb> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    const Rgb& at(int x, int y) const noexcept {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }
    Rgb& at(int x, int y) noexcept {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

}  // namespace hazealign
