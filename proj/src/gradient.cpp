#include "haslr/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include "haslr/errors.hpp"

namespace haslr {

namespace {

// Correlation with a 3x3 kernel, replicate padding at the borders.
ImageMatrix filter3x3(const ImageMatrix& img, const double k[3][3]) {
    const int h = img.height();
    const int w = img.width();
    ImageMatrix out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0;
            for (int dr = -1; dr <= 1; ++dr) {
                const int rr = std::clamp(r + dr, 0, h - 1);
                for (int dc = -1; dc <= 1; ++dc) {
                    const int cc = std::clamp(c + dc, 0, w - 1);
                    acc += k[dr + 1][dc + 1] * img.pixels(rr, cc);
                }
            }
            out.pixels(r, c) = acc;
        }
    }
    return out;
}

// d/dr kernel; its transpose is the d/dc kernel.
constexpr double kSobelRow[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
constexpr double kSobelCol[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};

}  // namespace

MappingKind mapping_kind_from_string(const std::string& name) {
    if (name == "arctan") return MappingKind::Arctan;
    if (name == "tanh") return MappingKind::Tanh;
    if (name == "softsign") return MappingKind::Softsign;
    if (name == "sigmoid") return MappingKind::Sigmoid;
    throw std::invalid_argument("unknown mapping function: " + name);
}

std::string to_string(MappingKind kind) {
    switch (kind) {
        case MappingKind::Arctan: return "arctan";
        case MappingKind::Tanh: return "tanh";
        case MappingKind::Softsign: return "softsign";
        case MappingKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

double MappingFunction::operator()(double k) const {
    const double t = u * (k - v);
    switch (kind) {
        case MappingKind::Arctan: return std::atan(t);
        case MappingKind::Tanh: return std::tanh(t);
        case MappingKind::Softsign: return t / (1.0 + std::abs(t));
        case MappingKind::Sigmoid: return 1.0 / (1.0 + std::exp(-t));
    }
    return 0;
}

std::pair<ImageMatrix, ImageMatrix> sobel_gradients(const ImageMatrix& img) {
    if (img.height() < 3 || img.width() < 3)
        throw std::invalid_argument("sobel_gradients: image must be at least 3x3");
    return {filter3x3(img, kSobelRow), filter3x3(img, kSobelCol)};
}

ImageMatrix direction_ratio(const ImageMatrix& g_r, const ImageMatrix& g_c, double eps) {
    if (g_r.height() != g_c.height() || g_r.width() != g_c.width())
        throw std::invalid_argument("direction_ratio: shape mismatch");
    ImageMatrix out(g_r.height(), g_r.width());
    for (int r = 0; r < g_r.height(); ++r) {
        for (int c = 0; c < g_r.width(); ++c) {
            double den = g_r.pixels(r, c);
            if (std::abs(den) < eps) den = (den < 0 ? -eps : eps);
            out.pixels(r, c) = g_c.pixels(r, c) / den;
        }
    }
    return out;
}

FeatureSet extract_features(const ImageMatrix& img, const MappingFunction& map, double eps) {
    if (img.height() < 3 || img.width() < 3)
        throw std::invalid_argument("extract_features: image must be at least 3x3");
    FeatureSet fs;
    ImageMatrix g_r = img;
    ImageMatrix g_c = img;
    for (int w = 0; w < FeatureSet::kOrders; ++w) {
        g_r = filter3x3(g_r, kSobelRow);
        g_c = filter3x3(g_c, kSobelCol);
        ImageMatrix ratio = direction_ratio(g_r, g_c, eps);
        ImageMatrix mapped(ratio.height(), ratio.width());
        mapped.pixels = ratio.pixels.unaryExpr([&map](double k) { return map(k); });
        fs.orders[w] = to_vector(mapped);
    }
    return fs;
}

Eigen::VectorXd intensity_feature(const ImageMatrix& img) { return to_vector(img); }

}  // namespace haslr
