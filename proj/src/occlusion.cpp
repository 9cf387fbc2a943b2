#include "haslr/occlusion.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace haslr {

namespace {

struct ScalePlan {
    double scale;      // uniform factor applied to the occluder
    int crop_h, crop_w;  // pasted rectangle after center-crop
};

// Chooses a uniform scale whose cropped-to-fit area is closest to the
// target. Sweeping integer sizes along each axis hits every achievable
// (crop_h, crop_w) pair up to rounding of the free dimension.
ScalePlan plan_scale(int occ_h, int occ_w, int face_h, int face_w, long target_area) {
    ScalePlan best{0, 0, 0};
    long best_err = std::numeric_limits<long>::max();
    auto consider = [&](double s) {
        if (s <= 0) return;
        const int rh = std::max(1, static_cast<int>(std::lround(occ_h * s)));
        const int rw = std::max(1, static_cast<int>(std::lround(occ_w * s)));
        const int ch = std::min(rh, face_h);
        const int cw = std::min(rw, face_w);
        const long err = std::labs(static_cast<long>(ch) * cw - target_area);
        if (err < best_err || (err == best_err && s < best.scale)) {
            best_err = err;
            best = {s, ch, cw};
        }
    };
    for (int h = 1; h <= face_h; ++h) consider(static_cast<double>(h) / occ_h);
    for (int w = 1; w <= face_w; ++w) consider(static_cast<double>(w) / occ_w);
    return best;
}

}  // namespace

ImageMatrix apply_occlusion(const ImageMatrix& face, const OcclusionSpec& spec) {
    if (!(spec.occlusion_rate > 0.0 && spec.occlusion_rate < 1.0))
        throw std::invalid_argument("occlusion_rate must lie in (0, 1)");
    if (spec.occluder.size() == 0) throw std::invalid_argument("occluder is empty");

    const int fh = face.height();
    const int fw = face.width();
    const long target_area = std::lround(spec.occlusion_rate * fh * fw);
    const ScalePlan plan =
        plan_scale(spec.occluder.height(), spec.occluder.width(), fh, fw, target_area);

    const int rh = std::max(1, static_cast<int>(std::lround(spec.occluder.height() * plan.scale)));
    const int rw = std::max(1, static_cast<int>(std::lround(spec.occluder.width() * plan.scale)));
    ImageMatrix scaled = resize_bilinear(spec.occluder, rh, rw);
    const int off_r = (rh - plan.crop_h) / 2;
    const int off_c = (rw - plan.crop_w) / 2;

    int anchor_r, anchor_c;
    if (spec.anchor) {
        anchor_r = spec.anchor->first;
        anchor_c = spec.anchor->second;
        if (anchor_r < 0 || anchor_c < 0 || anchor_r + plan.crop_h > fh ||
            anchor_c + plan.crop_w > fw)
            throw std::invalid_argument("occluder does not fit the face at the given anchor");
    } else {
        std::mt19937_64 rng(spec.seed);
        anchor_r = static_cast<int>(std::uniform_int_distribution<int>(0, fh - plan.crop_h)(rng));
        anchor_c = static_cast<int>(std::uniform_int_distribution<int>(0, fw - plan.crop_w)(rng));
    }

    ImageMatrix out = face;
    out.pixels.block(anchor_r, anchor_c, plan.crop_h, plan.crop_w) =
        scaled.pixels.block(off_r, off_c, plan.crop_h, plan.crop_w);
    return out;
}

ImageMatrix make_occluder_texture(int height, int width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ImageMatrix img(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img.pixels(r, c) = uni(rng);

    // Two box-blur passes give a smooth texture; renormalize to [0, 1].
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXd blurred(height, width);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                double sum = 0;
                int count = 0;
                for (int dr = -2; dr <= 2; ++dr) {
                    for (int dc = -2; dc <= 2; ++dc) {
                        const int rr = std::clamp(r + dr, 0, height - 1);
                        const int cc = std::clamp(c + dc, 0, width - 1);
                        sum += img.pixels(rr, cc);
                        ++count;
                    }
                }
                blurred(r, c) = sum / count;
            }
        }
        img.pixels = blurred;
    }
    const double lo = img.pixels.minCoeff();
    const double hi = img.pixels.maxCoeff();
    if (hi > lo) img.pixels = (img.pixels.array() - lo) / (hi - lo);
    return img;
}

}  // namespace haslr
