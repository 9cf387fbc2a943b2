#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "haslr/image.hpp"

namespace haslr {

/// An occlusion pattern pasted onto a face raster. The occluder is scaled
/// uniformly and center-cropped so that the pasted area equals
/// occlusion_rate * face area (within one pixel row of rounding).
struct OcclusionSpec {
    ImageMatrix occluder;
    double occlusion_rate = 0.4;             // occluder area / face area, in (0, 1)
    std::optional<std::pair<int, int>> anchor;  // top-left (row, col); nullopt = random
    std::uint64_t seed = 0;                  // drives the random anchor
};

/// Pastes the occluder opaquely; pixels outside the paste rectangle are
/// untouched. Throws std::invalid_argument when the rate is outside (0, 1)
/// or a fixed anchor would push the occluder out of bounds.
ImageMatrix apply_occlusion(const ImageMatrix& face, const OcclusionSpec& spec);

/// Deterministic textured occluder pattern (smooth random field), used by
/// the benchmark harness when no occluder image is supplied.
ImageMatrix make_occluder_texture(int height, int width, std::uint64_t seed);

}  // namespace haslr
