#include "hazealign/image.hpp"

#include <string>

#include "hazealign/error.hpp"

namespace hazealign {

namespace {

std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, Rgb fill)
    : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_area(width, height)) {
        throw InvalidArgument("pixel count " + std::to_string(pixels_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
}

}  // namespace hazealign
