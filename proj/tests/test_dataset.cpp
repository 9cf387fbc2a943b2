#include <doctest.h>

#include <Eigen/SVD>
#include <fstream>

#include "haslr/dataset.hpp"
#include "haslr/errors.hpp"
#include "haslr/image.hpp"
#include "test_util.hpp"

using haslr::Manifest;
using haslr::Split;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

haslr::PipelineConfig tiny_pipeline(int h, int w) {
    haslr::PipelineConfig p;
    p.solver.image_height = h;
    p.solver.image_width = w;
    return p;
}

}  // namespace

TEST_CASE("manifest parsing") {
    testutil::TempDir tmp("manifest");
    SUBCASE("well-formed file") {
        write_text(tmp.file("m.csv"),
                   "path,label,split\na.pgm,1,train\nb.pgm,2,train\nc.pgm,1,test\n");
        const Manifest m = haslr::load_manifest(tmp.file("m.csv"), 20, 16);
        REQUIRE(m.entries.size() == 3);
        CHECK(m.image_height == 20);
        CHECK(m.image_width == 16);
        CHECK(m.entries[0].path == "a.pgm");
        CHECK(m.entries[1].label == 2);
        CHECK(m.entries[2].split == Split::Test);
        CHECK(m.split_entries(Split::Train).size() == 2);
        CHECK(m.split_entries(Split::Test).size() == 1);
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("absent.csv")), haslr::IoError);
    }
    SUBCASE("bad header") {
        write_text(tmp.file("h.csv"), "file,id,part\na.pgm,1,train\n");
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("h.csv")), std::invalid_argument);
    }
    SUBCASE("empty manifest") {
        write_text(tmp.file("e.csv"), "path,label,split\n");
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("e.csv")), std::invalid_argument);
    }
    SUBCASE("malformed row carries its line number") {
        write_text(tmp.file("r.csv"), "path,label,split\na.pgm,1,train\nb.pgm,oops,train\n");
        try {
            haslr::load_manifest(tmp.file("r.csv"));
            FAIL("expected an exception");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("3") != std::string::npos);
        }
    }
    SUBCASE("unknown split keyword") {
        write_text(tmp.file("s.csv"), "path,label,split\na.pgm,1,validation\n");
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("s.csv")), std::invalid_argument);
    }
    SUBCASE("duplicate path") {
        write_text(tmp.file("d.csv"), "path,label,split\na.pgm,1,train\na.pgm,2,train\n");
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("d.csv")), std::invalid_argument);
    }
    SUBCASE("test label absent from the train split") {
        write_text(tmp.file("t.csv"), "path,label,split\na.pgm,1,train\nb.pgm,2,test\n");
        CHECK_THROWS_AS(haslr::load_manifest(tmp.file("t.csv")), std::invalid_argument);
    }
}

TEST_CASE("synthetic dataset generation") {
    testutil::TempDir tmp_a("synth_a"), tmp_b("synth_b");
    const Manifest ma = haslr::synth_dataset(6, 42, 30, 77, tmp_a.path.string());
    REQUIRE(ma.entries.size() == 6);
    CHECK(ma.image_height == 42);
    CHECK(ma.image_width == 30);

    SUBCASE("byte-identical across reruns with the same seed") {
        const Manifest mb = haslr::synth_dataset(6, 42, 30, 77, tmp_b.path.string());
        for (size_t i = 0; i < ma.entries.size(); ++i) {
            CHECK(testutil::read_file(ma.entries[i].path) ==
                  testutil::read_file(mb.entries[i].path));
        }
        // The manifests embed their output directories; strip those before
        // comparing the remainder byte for byte.
        auto strip = [](std::string text, const std::string& dir) {
            size_t pos;
            while ((pos = text.find(dir)) != std::string::npos) text.erase(pos, dir.size());
            return text;
        };
        CHECK(strip(testutil::read_file(tmp_a.file("manifest.csv")), tmp_a.path.string()) ==
              strip(testutil::read_file(tmp_b.file("manifest.csv")), tmp_b.path.string()));
    }
    SUBCASE("different seeds give different images") {
        const Manifest mb = haslr::synth_dataset(6, 42, 30, 78, tmp_b.path.string());
        CHECK(testutil::read_file(ma.entries[0].path) != testutil::read_file(mb.entries[0].path));
    }
    SUBCASE("images are approximately low rank and mutually distinct") {
        std::vector<Eigen::MatrixXd> imgs;
        for (const auto& e : ma.entries) {
            const haslr::ImageMatrix img = haslr::load_grayscale(e.path, 42, 30);
            REQUIRE(img.height() == 42);
            REQUIRE(img.width() == 30);
            CHECK(img.pixels.minCoeff() >= 0.0);
            CHECK(img.pixels.maxCoeff() <= 1.0);
            const Eigen::VectorXd sv =
                Eigen::JacobiSVD<Eigen::MatrixXd>(img.pixels).singularValues();
            CHECK(sv(5) / sv(0) < 0.05);  // energy concentrates in a few components
            imgs.push_back(img.pixels);
        }
        for (size_t i = 0; i < imgs.size(); ++i)
            for (size_t j = i + 1; j < imgs.size(); ++j)
                CHECK((imgs[i] - imgs[j]).norm() > 1e-3);
    }
    SUBCASE("the emitted manifest round-trips through the loader") {
        const Manifest back = haslr::load_manifest(tmp_a.file("manifest.csv"), 42, 30);
        REQUIRE(back.entries.size() == 6);
        for (size_t i = 0; i < 6; ++i) CHECK(back.entries[i].label == static_cast<int>(i) + 1);
    }
}

TEST_CASE("benchmark on a tiny self-recognition problem") {
    testutil::TempDir tmp("bench");
    const Manifest m = haslr::synth_dataset(4, 20, 16, 11, tmp.path.string());
    std::vector<haslr::OcclusionCase> cases;
    cases.push_back({"none", std::nullopt});
    haslr::OcclusionSpec spec;
    spec.occluder = haslr::make_occluder_texture(12, 12, 3);
    spec.occlusion_rate = 0.2;
    spec.seed = 5;
    cases.push_back({"rate=0.20", spec});

    const haslr::BenchmarkReport rep = haslr::run_benchmark(m, cases, tiny_pipeline(20, 16));
    REQUIRE(rep.subset_accuracy.size() == 2);
    CHECK(rep.subset_accuracy[0].first == "none");
    CHECK(rep.subset_accuracy[1].first == "rate=0.20");
    REQUIRE(rep.samples.size() == 8);  // 2 cases x 4 self-recognition probes

    SUBCASE("unoccluded self-recognition is perfect") {
        CHECK(rep.subset_accuracy[0].second == doctest::Approx(1.0));
    }
    SUBCASE("stored accuracies match a recount of the samples") {
        for (const auto& [name, acc] : rep.subset_accuracy) {
            int total = 0, correct = 0;
            for (const auto& s : rep.samples) {
                if (s.subset != name) continue;
                ++total;
                if (s.correct) ++correct;
                CHECK(s.correct == (s.predicted == s.true_label));
            }
            CHECK(total == 4);
            CHECK(acc == doctest::Approx(static_cast<double>(correct) / total));
        }
        int correct = 0;
        for (const auto& s : rep.samples)
            if (s.correct) ++correct;
        CHECK(rep.overall == doctest::Approx(correct / 8.0));
    }
    SUBCASE("reports serialize deterministically") {
        haslr::emit_report(rep, tmp.file("r1.json"), "json");
        haslr::emit_report(rep, tmp.file("r2.json"), "json");
        const std::string j1 = testutil::read_file(tmp.file("r1.json"));
        CHECK(j1 == testutil::read_file(tmp.file("r2.json")));
        const auto parsed = nlohmann::json::parse(j1);
        CHECK(parsed["overall"].get<double>() == doctest::Approx(rep.overall));
        CHECK(parsed["samples"].size() == 8);
        CHECK(!parsed.contains("wall_time_seconds"));

        haslr::emit_report(rep, tmp.file("r.csv"), "csv");
        const std::string csv = testutil::read_file(tmp.file("r.csv"));
        // header + two subsets + overall
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
        CHECK(csv.find("overall") != std::string::npos);
        CHECK_THROWS_AS(haslr::emit_report(rep, tmp.file("r.xml"), "xml"),
                        std::invalid_argument);
    }
    SUBCASE("a rerun of the benchmark is bit-identical") {
        const haslr::BenchmarkReport again = haslr::run_benchmark(m, cases, tiny_pipeline(20, 16));
        CHECK(haslr::report_to_json(again) == haslr::report_to_json(rep));
    }
    SUBCASE("multithreaded runs agree with the serial result") {
        haslr::PipelineConfig par = tiny_pipeline(20, 16);
        par.jobs = 3;
        const haslr::BenchmarkReport again = haslr::run_benchmark(m, cases, par);
        CHECK(haslr::report_to_json(again) == haslr::report_to_json(rep));
    }
}

TEST_CASE("intensity mode runs the same protocol on raw pixels") {
    testutil::TempDir tmp("intensity");
    const Manifest m = haslr::synth_dataset(3, 16, 12, 21, tmp.path.string());
    haslr::PipelineConfig p = tiny_pipeline(16, 12);
    p.feature_mode = haslr::FeatureMode::Intensity;
    const haslr::BenchmarkReport rep =
        haslr::run_benchmark(m, {{"none", std::nullopt}}, p);
    CHECK(rep.subset_accuracy.size() == 1);
    CHECK(rep.subset_accuracy[0].second == doctest::Approx(1.0));
}
