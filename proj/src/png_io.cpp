#include "hazealign/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "hazealign/error.hpp"

namespace hazealign {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; the message is stashed here so it
// can be rethrown as an exception once control is back in C++ code.
struct PngErrorState {
    std::string message;
};

void on_png_error(png_structp png, png_const_charp message) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    if (state != nullptr) state->message = message;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

class PngReader {
public:
    PngReader() {
        png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &errors_, on_png_error, on_png_warning);
        if (png_ != nullptr) info_ = png_create_info_struct(png_);
        if (png_ == nullptr || info_ == nullptr) throw IoError("libpng: out of memory");
    }
    ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;

    png_structp png_ = nullptr;
    png_infop info_ = nullptr;
    PngErrorState errors_;
};

class PngWriter {
public:
    PngWriter() {
        png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, &errors_, on_png_error, on_png_warning);
        if (png_ != nullptr) info_ = png_create_info_struct(png_);
        if (png_ == nullptr || info_ == nullptr) throw IoError("libpng: out of memory");
    }
    ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
    PngWriter(const PngWriter&) = delete;
    PngWriter& operator=(const PngWriter&) = delete;

    png_structp png_ = nullptr;
    png_infop info_ = nullptr;
    PngErrorState errors_;
};

struct Header {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

// Both helpers below contain only trivially destructible locals, so a
// longjmp out of libpng never skips a destructor.
bool read_header(PngReader& r, std::FILE* file, Header& header) {
    if (setjmp(png_jmpbuf(r.png_))) return false;
    png_init_io(r.png_, file);
    png_read_info(r.png_, r.info_);
    png_get_IHDR(r.png_, r.info_, &header.width, &header.height, &header.bit_depth,
                 &header.color_type, nullptr, nullptr, nullptr);
    return true;
}

bool read_rows(PngReader& r, png_bytepp rows) {
    if (setjmp(png_jmpbuf(r.png_))) return false;
    png_set_interlace_handling(r.png_);
    png_read_update_info(r.png_, r.info_);
    png_read_image(r.png_, rows);
    png_read_end(r.png_, nullptr);
    return true;
}

bool write_rows(PngWriter& w, std::FILE* file, png_uint_32 width, png_uint_32 height,
                png_bytepp rows) {
    if (setjmp(png_jmpbuf(w.png_))) return false;
    png_init_io(w.png_, file);
    png_set_IHDR(w.png_, w.info_, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png_, w.info_);
    png_write_image(w.png_, rows);
    png_write_end(w.png_, nullptr);
    return true;
}

std::string color_type_name(int color_type) {
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY: return "grayscale";
        case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
        case PNG_COLOR_TYPE_PALETTE: return "palette";
        case PNG_COLOR_TYPE_RGB: return "rgb";
        case PNG_COLOR_TYPE_RGB_ALPHA: return "rgb+alpha";
        default: return "unknown";
    }
}

}  // namespace

ImageBuffer load_image(const fs::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open image: " + path.string());

    png_byte signature[8] = {};
    if (std::fread(signature, 1, sizeof(signature), file.get()) != sizeof(signature) ||
        png_sig_cmp(signature, 0, sizeof(signature)) != 0) {
        throw FormatError("not a PNG file: " + path.string());
    }

    PngReader reader;
    png_set_sig_bytes(reader.png_, sizeof(signature));
    Header header;
    if (!read_header(reader, file.get(), header)) {
        throw FormatError("corrupt PNG " + path.string() + ": " + reader.errors_.message);
    }
    if (header.bit_depth != 8) {
        throw FormatError("unsupported bit depth " + std::to_string(header.bit_depth) + " in " +
                          path.string() + " (expected 8)");
    }
    if (header.color_type != PNG_COLOR_TYPE_RGB) {
        throw FormatError("unsupported color model " + color_type_name(header.color_type) +
                          " in " + path.string() + " (expected rgb)");
    }
    if (header.width > 0x7fffffffu || header.height > 0x7fffffffu) {
        throw FormatError("image too large: " + path.string());
    }

    const auto width = static_cast<int>(header.width);
    const auto height = static_cast<int>(header.height);
    std::vector<Rgb> pixels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width);
    }
    if (!read_rows(reader, rows.data())) {
        throw FormatError("corrupt PNG " + path.string() + ": " + reader.errors_.message);
    }
    return ImageBuffer(width, height, std::move(pixels));
}

void save_image(const ImageBuffer& image, const fs::path& path) {
    static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot write image: " + path.string());

    const auto pixels = image.pixels();
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y) {
        // libpng's write API takes non-const row pointers but does not modify them.
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
            reinterpret_cast<const png_byte*>(pixels.data() + static_cast<std::size_t>(y) * image.width()));
    }
    PngWriter writer;
    if (!write_rows(writer, file.get(), static_cast<png_uint_32>(image.width()),
                    static_cast<png_uint_32>(image.height()), rows.data())) {
        throw IoError("failed to encode " + path.string() + ": " + writer.errors_.message);
    }
    if (std::fflush(file.get()) != 0) throw IoError("failed to flush " + path.string());
}

}  // namespace hazealign
