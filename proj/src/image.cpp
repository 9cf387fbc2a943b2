#include "haslr/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "haslr/errors.hpp"

namespace haslr {

namespace {

// Reads the next whitespace-delimited token, skipping '#' comment lines.
std::string next_pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
                tok.push_back(static_cast<char>(c));
            }
            // Leave the terminator in the stream: the byte after the maxval
            // token belongs to the header/pixel boundary, not to the token.
            if (c != EOF) in.unget();
            return tok;
        }
    }
    throw IoError("unexpected end of PGM header");
}

ImageMatrix read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') throw IoError(path + ": not a binary PGM (P5)");
    const long w = std::stol(next_pnm_token(in));
    const long h = std::stol(next_pnm_token(in));
    const long maxval = std::stol(next_pnm_token(in));
    if (w <= 0 || h <= 0) throw IoError(path + ": bad PGM dimensions");
    if (maxval <= 0 || maxval > 65535) throw IoError(path + ": unsupported PGM maxval");
    // Single whitespace byte separates the header from pixel data.
    in.get();

    ImageMatrix img(static_cast<int>(h), static_cast<int>(w));
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<size_t>(w) * bytes);
    for (long r = 0; r < h; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in) throw IoError(path + ": truncated PGM pixel data");
        for (long c = 0; c < w; ++c) {
            const unsigned v = bytes == 1 ? row[c]
                                          : (static_cast<unsigned>(row[2 * c]) << 8) | row[2 * c + 1];
            img.pixels(r, c) = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return img;
}

ImageMatrix read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open " + path);
    auto closer = std::unique_ptr<std::FILE, int (*)(std::FILE*)>(fp, &std::fclose);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": PNG decode failed");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) {
        png_set_rgb_to_gray(png, PNG_ERROR_ACTION_NONE, -1, -1);
    }
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * h);
    row_ptrs.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) row_ptrs[r] = data.data() + r * rowbytes;
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    const double maxval = depth == 16 ? 65535.0 : 255.0;
    ImageMatrix img(static_cast<int>(h), static_cast<int>(w));
    for (png_uint_32 r = 0; r < h; ++r) {
        for (png_uint_32 c = 0; c < w; ++c) {
            unsigned v;
            if (depth == 16) {
                const png_byte* p = row_ptrs[r] + 2 * c;
                v = (static_cast<unsigned>(p[1]) << 8) | p[0];  // swapped to little-endian above
            } else {
                v = row_ptrs[r][c];
            }
            img.pixels(r, c) = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

}  // namespace

ImageMatrix resize_bilinear(const ImageMatrix& img, int target_height, int target_width) {
    if (target_height <= 0 || target_width <= 0)
        throw std::invalid_argument("resize target dimensions must be positive");
    const int sh = img.height();
    const int sw = img.width();
    if (sh == target_height && sw == target_width) return img;

    ImageMatrix out(target_height, target_width);
    const double scale_r = static_cast<double>(sh) / target_height;
    const double scale_c = static_cast<double>(sw) / target_width;
    for (int r = 0; r < target_height; ++r) {
        const double src_r = std::clamp((r + 0.5) * scale_r - 0.5, 0.0, sh - 1.0);
        const int r0 = static_cast<int>(std::floor(src_r));
        const int r1 = std::min(r0 + 1, sh - 1);
        const double fr = src_r - r0;
        for (int c = 0; c < target_width; ++c) {
            const double src_c = std::clamp((c + 0.5) * scale_c - 0.5, 0.0, sw - 1.0);
            const int c0 = static_cast<int>(std::floor(src_c));
            const int c1 = std::min(c0 + 1, sw - 1);
            const double fc = src_c - c0;
            out.pixels(r, c) = (1 - fr) * ((1 - fc) * img.pixels(r0, c0) + fc * img.pixels(r0, c1)) +
                               fr * ((1 - fc) * img.pixels(r1, c0) + fc * img.pixels(r1, c1));
        }
    }
    return out;
}

ImageMatrix load_grayscale(const std::string& path, int target_height, int target_width) {
    if (target_height <= 0 || target_width <= 0)
        throw std::invalid_argument("load_grayscale: target dimensions must be positive");
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();

    ImageMatrix img;
    if (magic[0] == 'P' && magic[1] == '5') {
        img = read_pgm(path);
    } else if (magic[0] == 0x89 && magic[1] == 'P') {
        img = read_png(path);
    } else {
        throw IoError(path + ": unrecognized image format (expected PGM P5 or PNG)");
    }
    return resize_bilinear(img, target_height, target_width);
}

Eigen::VectorXd to_vector(const ImageMatrix& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.pixels.data(), img.pixels.size());
}

ImageMatrix to_matrix(const Eigen::VectorXd& v, int height, int width) {
    if (height <= 0 || width <= 0 || v.size() != static_cast<long>(height) * width)
        throw std::invalid_argument("to_matrix: vector length does not match height*width");
    ImageMatrix img(height, width);
    Eigen::Map<Eigen::VectorXd>(img.pixels.data(), v.size()) = v;
    return img;
}

void write_pgm(const ImageMatrix& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(img.width()));
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            const double v = std::clamp(img.pixels(r, c), 0.0, 1.0);
            row[c] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace haslr
