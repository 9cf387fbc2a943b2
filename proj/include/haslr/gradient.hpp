#pragma once

#include <array>
#include <string>
#include <utility>

#include "haslr/image.hpp"

namespace haslr {

enum class MappingKind { Arctan, Tanh, Softsign, Sigmoid };

MappingKind mapping_kind_from_string(const std::string& name);
std::string to_string(MappingKind kind);

/// Bounded S-shape squashing applied to gradient-direction ratios:
/// k -> phi(u * (k - v)).
struct MappingFunction {
    MappingKind kind = MappingKind::Tanh;
    double u = 7.3;
    double v = 0.51;

    double operator()(double k) const;
};

/// Per-order gradient-direction feature vectors of one image, orders 1..3.
/// Each vector has length height*width and lies in the mapping's codomain.
struct FeatureSet {
    static constexpr int kOrders = 3;
    std::array<Eigen::VectorXd, kOrders> orders;
};

/// Row and column Sobel responses (3x3 kernels, replicate-padded borders).
/// Throws std::invalid_argument for images smaller than the kernel.
std::pair<ImageMatrix, ImageMatrix> sobel_gradients(const ImageMatrix& img);

/// Elementwise g_c / g_r with |g_r| < eps replaced by sign(g_r)*eps,
/// sign(0) := +1, so every quotient is finite.
ImageMatrix direction_ratio(const ImageMatrix& g_r, const ImageMatrix& g_c, double eps);

/// Orders 1..3: the image is filtered w times with each directional kernel,
/// the direction ratio squashed through the mapping and flattened.
FeatureSet extract_features(const ImageMatrix& img, const MappingFunction& map,
                            double eps = 1e-8);

/// Identity feature (flattened raw intensities), the intensity-domain
/// baseline.
Eigen::VectorXd intensity_feature(const ImageMatrix& img);

}  // namespace haslr
