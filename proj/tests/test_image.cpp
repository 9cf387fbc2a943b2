#include <doctest.h>

#include <cstdint>
#include <fstream>

#include "haslr/errors.hpp"
#include "haslr/image.hpp"
#include "test_util.hpp"

using haslr::ImageMatrix;
using testutil::TempDir;

namespace {

// 4x3 grayscale PNG, pixel(r, c) = 10 + 40r + 8c.
const unsigned char kTinyPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x04, 0x00, 0x00, 0x00, 0x03, 0x08, 0x00, 0x00, 0x00,
    0x00, 0x91, 0x9f, 0xf1, 0x1a, 0x00, 0x00, 0x00, 0x17, 0x49, 0x44, 0x41, 0x54, 0x78,
    0x9c, 0x63, 0xe0, 0x12, 0x92, 0x52, 0x62, 0x30, 0xb2, 0x72, 0xf2, 0x62, 0x88, 0x4a,
    0xca, 0x2a, 0x02, 0x00, 0x0f, 0x23, 0x02, 0xe9, 0xca, 0x3f, 0x1d, 0x20, 0x00, 0x00,
    0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

}  // namespace

TEST_CASE("to_vector stacks column-major") {
    ImageMatrix img(2, 2);
    img.pixels << 1.0, 2.0, 3.0, 4.0;  // [[a,b],[c,d]] = [[1,2],[3,4]]
    const Eigen::VectorXd v = haslr::to_vector(img);
    CHECK(v(0) == 1.0);
    CHECK(v(1) == 3.0);
    CHECK(v(2) == 2.0);
    CHECK(v(3) == 4.0);
}

TEST_CASE("to_vector on 1x1") {
    ImageMatrix img(1, 1);
    img.pixels(0, 0) = 0.25;
    CHECK(haslr::to_vector(img)(0) == 0.25);
}

TEST_CASE("to_matrix inverts to_vector bit-exactly") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const ImageMatrix img = testutil::random_image(42, 30, seed);
        const ImageMatrix back = haslr::to_matrix(haslr::to_vector(img), 42, 30);
        CHECK(img.pixels == back.pixels);
    }
}

TEST_CASE("to_matrix rejects length mismatch") {
    CHECK_THROWS_AS(haslr::to_matrix(Eigen::VectorXd::Zero(5), 2, 2), std::invalid_argument);
}

TEST_CASE("PGM round trip at identity size") {
    TempDir tmp("pgm");
    const ImageMatrix img = testutil::random_image(42, 30, 7);
    haslr::write_pgm(img, tmp.file("a.pgm"));
    const ImageMatrix back = haslr::load_grayscale(tmp.file("a.pgm"), 42, 30);
    REQUIRE(back.height() == 42);
    REQUIRE(back.width() == 30);
    // 8-bit quantization is the only loss.
    for (int r = 0; r < 42; ++r)
        for (int c = 0; c < 30; ++c)
            CHECK(std::abs(back.pixels(r, c) - img.pixels(r, c)) <= 0.5 / 255.0 + 1e-12);
    CHECK(back.pixels.minCoeff() >= 0.0);
    CHECK(back.pixels.maxCoeff() <= 1.0);
}

TEST_CASE("constant image survives downsampling") {
    TempDir tmp("pgm");
    ImageMatrix img(84, 60);
    img.pixels.setConstant(128.0 / 255.0);
    haslr::write_pgm(img, tmp.file("c.pgm"));
    const ImageMatrix small = haslr::load_grayscale(tmp.file("c.pgm"), 42, 30);
    for (int r = 0; r < 42; ++r)
        for (int c = 0; c < 30; ++c)
            CHECK(small.pixels(r, c) == doctest::Approx(0.50196).epsilon(1e-4));
}

TEST_CASE("bilinear resize matches independent oracle") {
    const ImageMatrix img = testutil::random_image(5, 5, 11);
    const int th = 7, tw = 6;
    const ImageMatrix out = haslr::resize_bilinear(img, th, tw);
    for (int r = 0; r < th; ++r) {
        for (int c = 0; c < tw; ++c) {
            const double src_r = (r + 0.5) * 5.0 / th - 0.5;
            const double src_c = (c + 0.5) * 5.0 / tw - 0.5;
            CHECK(out.pixels(r, c) ==
                  doctest::Approx(testutil::bilinear_oracle_at(img, src_r, src_c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ramp stays monotone through resize") {
    ImageMatrix ramp(100, 100);
    for (int r = 0; r < 100; ++r)
        for (int c = 0; c < 100; ++c) ramp.pixels(r, c) = c / 99.0;
    const ImageMatrix out = haslr::resize_bilinear(ramp, 39, 34);
    for (int r = 0; r < 39; ++r)
        for (int c = 1; c < 34; ++c) CHECK(out.pixels(r, c) > out.pixels(r, c - 1));
}

TEST_CASE("PNG loading with luminance conversion") {
    TempDir tmp("png");
    std::ofstream(tmp.file("t.png"), std::ios::binary)
        .write(reinterpret_cast<const char*>(kTinyPng), sizeof(kTinyPng));
    const ImageMatrix img = haslr::load_grayscale(tmp.file("t.png"), 3, 4);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(img.pixels(r, c) == doctest::Approx((10 + 40 * r + 8 * c) / 255.0).epsilon(1e-9));
}

TEST_CASE("load_grayscale is deterministic") {
    TempDir tmp("det");
    haslr::write_pgm(testutil::random_image(20, 16, 3), tmp.file("d.pgm"));
    const ImageMatrix a = haslr::load_grayscale(tmp.file("d.pgm"), 10, 8);
    const ImageMatrix b = haslr::load_grayscale(tmp.file("d.pgm"), 10, 8);
    CHECK(a.pixels == b.pixels);
}

TEST_CASE("load_grayscale error paths") {
    CHECK_THROWS_AS(haslr::load_grayscale("/no/such/file.pgm", 4, 4), haslr::IoError);
    TempDir tmp("err");
    haslr::write_pgm(testutil::random_image(4, 4, 1), tmp.file("x.pgm"));
    CHECK_THROWS_AS(haslr::load_grayscale(tmp.file("x.pgm"), 0, 4), std::invalid_argument);
    std::ofstream(tmp.file("junk.bin"), std::ios::binary) << "notanimage";
    CHECK_THROWS_AS(haslr::load_grayscale(tmp.file("junk.bin"), 4, 4), haslr::IoError);
}
