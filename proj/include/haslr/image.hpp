#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace haslr {

/// Grayscale raster with values in [0, 1]. pixels(r, c) addresses row r,
/// column c.
struct ImageMatrix {
    Eigen::MatrixXd pixels;

    ImageMatrix() = default;
    ImageMatrix(int height, int width) : pixels(Eigen::MatrixXd::Zero(height, width)) {}
    explicit ImageMatrix(Eigen::MatrixXd p) : pixels(std::move(p)) {}

    int height() const { return static_cast<int>(pixels.rows()); }
    int width() const { return static_cast<int>(pixels.cols()); }
    long size() const { return pixels.size(); }
};

/// Reads a PGM (binary P5, maxval <= 65535) or PNG (8/16-bit, gray or RGB)
/// raster, converts to luminance, rescales to [0, 1] and resizes to the
/// target shape with bilinear interpolation.
ImageMatrix load_grayscale(const std::string& path, int target_height, int target_width);

/// Bilinear resize with pixel-center sample mapping. An identity resize
/// reproduces the input exactly.
ImageMatrix resize_bilinear(const ImageMatrix& img, int target_height, int target_width);

/// Column-major flattening: [column 0 top-to-bottom, column 1, ...].
Eigen::VectorXd to_vector(const ImageMatrix& img);

/// Inverse of to_vector. Throws std::invalid_argument on a length mismatch.
ImageMatrix to_matrix(const Eigen::VectorXd& v, int height, int width);

/// Writes binary PGM, header "P5\n<w> <h>\n255\n", row-major bytes.
/// Values are clamped to [0, 1] and quantized to 8 bits.
void write_pgm(const ImageMatrix& img, const std::string& path);

}  // namespace haslr
