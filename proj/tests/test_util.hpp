#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "haslr/image.hpp"

namespace testutil {

// Fresh scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("haslr_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline haslr::ImageMatrix random_image(int h, int w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    haslr::ImageMatrix img(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) img.pixels(r, c) = uni(rng);
    return img;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Independent bilinear resampler (pixel-center mapping), written against
// the definition rather than the library code.
inline double bilinear_oracle_at(const haslr::ImageMatrix& img, double src_r, double src_c) {
    const int h = img.height(), w = img.width();
    src_r = std::clamp(src_r, 0.0, h - 1.0);
    src_c = std::clamp(src_c, 0.0, w - 1.0);
    const int r0 = static_cast<int>(std::floor(src_r));
    const int c0 = static_cast<int>(std::floor(src_c));
    const int r1 = std::min(r0 + 1, h - 1);
    const int c1 = std::min(c0 + 1, w - 1);
    const double fr = src_r - r0, fc = src_c - c0;
    return img.pixels(r0, c0) * (1 - fr) * (1 - fc) + img.pixels(r0, c1) * (1 - fr) * fc +
           img.pixels(r1, c0) * fr * (1 - fc) + img.pixels(r1, c1) * fr * fc;
}

}  // namespace testutil
