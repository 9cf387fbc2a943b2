#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "haslr/classifier.hpp"
#include "haslr/occlusion.hpp"

namespace haslr {

enum class Split { Train, Test };
enum class FeatureMode { Gradient, Intensity };

struct ManifestEntry {
    std::string path;
    int label = 0;
    Split split = Split::Train;
};

/// Parsed dataset manifest. When no test entries are present the training
/// images double as test samples (the self-recognition protocol).
struct Manifest {
    std::vector<ManifestEntry> entries;
    int image_height = 42;
    int image_width = 30;

    std::vector<ManifestEntry> split_entries(Split s) const;
};

/// CSV with header "path,label,split". Validation errors carry the line
/// number.
Manifest load_manifest(const std::string& path, int image_height = 42, int image_width = 30);

/// Writes one synthetic identity image per class into out_dir (PGM) plus a
/// manifest.csv, all deterministic under the seed. Identities are rank-3
/// random outer-product sums over a smooth background, so occlusion
/// produces contiguous error structure.
Manifest synth_dataset(int classes, int height, int width, std::uint64_t seed,
                       const std::string& out_dir);

/// One benchmark subset: either unoccluded ("none") or an occlusion spec
/// applied to every test image (the anchor is re-seeded per sample).
struct OcclusionCase {
    std::string name;
    std::optional<OcclusionSpec> spec;  // nullopt = no occlusion
};

struct PipelineConfig {
    MappingFunction mapping;
    SolverConfig solver;
    double m_fraction = 0.10;
    double ratio_eps = 1e-8;
    FeatureMode feature_mode = FeatureMode::Gradient;
    int jobs = 1;
};

struct SampleRecord {
    std::string subset;
    std::string path;
    int true_label = 0;
    int predicted = 0;
    bool correct = false;
    bool solver_failed = false;
    std::array<std::vector<int>, 3> top_lists;
};

struct BenchmarkReport {
    std::vector<std::pair<std::string, double>> subset_accuracy;  // in subset order
    double overall = 0;
    std::vector<SampleRecord> samples;
    nlohmann::ordered_json config_snapshot;
    double wall_time_seconds = 0;
};

/// Builds per-order dictionaries from the train split (a single one in
/// intensity mode), classifies every (occlusion case, test image) pair and
/// aggregates accuracies. A solver failure on one sample is recorded as a
/// misclassification, not a fatal error.
BenchmarkReport run_benchmark(const Manifest& manifest, const std::vector<OcclusionCase>& cases,
                              const PipelineConfig& pipeline);

/// Serializes a report to JSON or CSV with deterministic field ordering.
/// Wall time is reported on the struct only, never in the file, so that
/// identical runs produce identical bytes.
void emit_report(const BenchmarkReport& report, const std::string& path,
                 const std::string& format);

nlohmann::ordered_json report_to_json(const BenchmarkReport& report);

}  // namespace haslr
