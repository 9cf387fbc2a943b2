#include "haslr/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "haslr/errors.hpp"

namespace haslr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Moving-average smoothing with replicate ends; keeps synthetic identity
// images spatially coherent instead of white-noise-like.
Eigen::VectorXd smooth(const Eigen::VectorXd& v, int radius) {
    const long n = v.size();
    Eigen::VectorXd out(n);
    for (long i = 0; i < n; ++i) {
        double sum = 0;
        for (long j = i - radius; j <= i + radius; ++j)
            sum += v(std::clamp(j, 0L, n - 1));
        out(i) = sum / (2 * radius + 1);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ManifestEntry> Manifest::split_entries(Split s) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries)
        if (e.split == s) out.push_back(e);
    return out;
}

Manifest load_manifest(const std::string& path, int image_height, int image_width) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    Manifest m;
    m.image_height = image_height;
    m.image_width = image_width;

    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty manifest");
    ++lineno;
    if (trim(line) != "path,label,split")
        throw std::invalid_argument(path + ":1: expected header \"path,label,split\"");

    std::set<std::string> seen_paths;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::stringstream row(line);
        std::string p, lab, split;
        if (!std::getline(row, p, ',') || !std::getline(row, lab, ',') ||
            !std::getline(row, split))
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": malformed row");
        ManifestEntry e;
        e.path = trim(p);
        try {
            e.label = std::stoi(trim(lab));
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": non-integer label \"" + trim(lab) + "\"");
        }
        const std::string sp = trim(split);
        if (sp == "train")
            e.split = Split::Train;
        else if (sp == "test")
            e.split = Split::Test;
        else
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown split \"" + sp + "\" (expected train or test)");
        if (!seen_paths.insert(e.path).second)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": duplicate path " + e.path);
        m.entries.push_back(std::move(e));
    }

    std::set<int> train_labels;
    for (const auto& e : m.entries)
        if (e.split == Split::Train) train_labels.insert(e.label);
    if (train_labels.empty()) throw std::invalid_argument(path + ": manifest has no training entries");
    for (const auto& e : m.entries) {
        if (e.split == Split::Test && !train_labels.count(e.label))
            throw std::invalid_argument(path + ": label " + std::to_string(e.label) + " has no training images");
    }
    return m;
}

Manifest synth_dataset(int classes, int height, int width, std::uint64_t seed,
                       const std::string& out_dir) {
    if (classes < 2) throw std::invalid_argument("synth_dataset: need at least 2 classes");
    if (height < 8 || width < 8)
        throw std::invalid_argument("synth_dataset: shape must be at least 8x8");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    Manifest m;
    m.image_height = height;
    m.image_width = width;
    for (int cls = 1; cls <= classes; ++cls) {
        // Rank-3 identity structure.
        Eigen::MatrixXd base = Eigen::MatrixXd::Zero(height, width);
        for (int i = 0; i < 3; ++i) {
            Eigen::VectorXd u(height), v(width);
            for (int r = 0; r < height; ++r) u(r) = gauss(rng);
            for (int c = 0; c < width; ++c) v(c) = gauss(rng);
            base += smooth(u, 2) * smooth(v, 2).transpose();
        }
        base /= std::max(base.cwiseAbs().maxCoeff(), 1e-12);

        // Smooth low-frequency background, phases drawn per class.
        const double p1 = uni(rng) * 2 * M_PI;
        const double p2 = uni(rng) * 2 * M_PI;
        ImageMatrix img(height, width);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const double bg = 0.5 + 0.15 * std::sin(2 * M_PI * r / height + p1) *
                                             std::sin(2 * M_PI * c / width + p2);
                img.pixels(r, c) = std::clamp(bg + 0.3 * base(r, c), 0.0, 1.0);
            }
        }

        std::ostringstream name;
        name << "class_" << std::setw(3) << std::setfill('0') << cls << ".pgm";
        const std::string file = (std::filesystem::path(out_dir) / name.str()).string();
        write_pgm(img, file);
        m.entries.push_back({file, cls, Split::Train});
    }

    std::ofstream csv(std::filesystem::path(out_dir) / "manifest.csv");
    if (!csv) throw IoError("cannot write manifest in " + out_dir);
    csv << "path,label,split\n";
    for (const auto& e : m.entries) csv << e.path << "," << e.label << ",train\n";
    return m;
}

namespace {

struct Task {
    size_t case_index;
    size_t sample_index;
    ManifestEntry entry;
};

SampleRecord classify_sample(const Task& task, const OcclusionCase& occ, const Manifest& manifest,
                             const PipelineConfig& pipeline,
                             const std::array<Dictionary, 3>& grad_dicts,
                             const Dictionary& intensity_dict) {
    SampleRecord rec;
    rec.subset = occ.name;
    rec.path = task.entry.path;
    rec.true_label = task.entry.label;
    try {
        ImageMatrix img =
            load_grayscale(task.entry.path, manifest.image_height, manifest.image_width);
        if (occ.spec) {
            OcclusionSpec spec = *occ.spec;
            spec.seed = splitmix64(spec.seed ^ (task.sample_index + 1));
            img = apply_occlusion(img, spec);
        }
        Verdict verdict;
        if (pipeline.feature_mode == FeatureMode::Gradient) {
            const FeatureSet feats = extract_features(img, pipeline.mapping, pipeline.ratio_eps);
            auto [v, diag] = classify(grad_dicts, feats, pipeline.solver, pipeline.m_fraction);
            verdict = v;
            rec.top_lists = diag.top_lists;
        } else {
            const Eigen::VectorXd y = intensity_feature(img);
            const SolverResult solved = admm_solve(intensity_dict, y, pipeline.solver);
            auto [ids, res] = class_residues(intensity_dict, y, solved, manifest.image_height,
                                             manifest.image_width);
            const std::vector<int> lst = top_fraction(ids, res, pipeline.m_fraction);
            rec.top_lists = {lst, lst, lst};
            verdict = poll({lst, lst, lst});
        }
        rec.predicted = verdict.identity;
        rec.correct = rec.predicted == rec.true_label;
    } catch (const std::exception&) {
        rec.solver_failed = true;
        rec.predicted = -1;
        rec.correct = false;
    }
    return rec;
}

}  // namespace

BenchmarkReport run_benchmark(const Manifest& manifest, const std::vector<OcclusionCase>& cases,
                              const PipelineConfig& pipeline) {
    const auto start = std::chrono::steady_clock::now();
    if (cases.empty()) throw std::invalid_argument("run_benchmark: no occlusion cases");

    const auto train = manifest.split_entries(Split::Train);
    if (train.empty()) throw std::invalid_argument("run_benchmark: manifest has no train split");
    auto test = manifest.split_entries(Split::Test);
    if (test.empty()) test = train;  // self-recognition protocol

    // Dictionaries from the train split.
    std::array<Dictionary, 3> grad_dicts;
    Dictionary intensity_dict;
    if (pipeline.feature_mode == FeatureMode::Gradient) {
        std::array<std::vector<std::pair<Eigen::VectorXd, int>>, 3> cols;
        for (const auto& e : train) {
            const ImageMatrix img =
                load_grayscale(e.path, manifest.image_height, manifest.image_width);
            const FeatureSet feats = extract_features(img, pipeline.mapping, pipeline.ratio_eps);
            for (int w = 0; w < 3; ++w)
                cols[static_cast<size_t>(w)].emplace_back(feats.orders[static_cast<size_t>(w)],
                                                          e.label);
        }
        for (int w = 0; w < 3; ++w)
            grad_dicts[static_cast<size_t>(w)] = build_dictionary(cols[static_cast<size_t>(w)]);
    } else {
        std::vector<std::pair<Eigen::VectorXd, int>> cols;
        for (const auto& e : train) {
            const ImageMatrix img =
                load_grayscale(e.path, manifest.image_height, manifest.image_width);
            cols.emplace_back(intensity_feature(img), e.label);
        }
        intensity_dict = build_dictionary(cols);
    }

    std::vector<Task> tasks;
    for (size_t ci = 0; ci < cases.size(); ++ci)
        for (size_t si = 0; si < test.size(); ++si) tasks.push_back({ci, si, test[si]});

    std::vector<SampleRecord> records(tasks.size());
    const int jobs = std::max(1, pipeline.jobs);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            records[i] = classify_sample(tasks[i], cases[tasks[i].case_index], manifest, pipeline,
                                         grad_dicts, intensity_dict);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    BenchmarkReport report;
    report.samples = std::move(records);
    size_t total_correct = 0;
    for (size_t ci = 0; ci < cases.size(); ++ci) {
        size_t correct = 0, count = 0;
        for (size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].case_index != ci) continue;
            ++count;
            if (report.samples[i].correct) ++correct;
        }
        report.subset_accuracy.emplace_back(
            cases[ci].name, count ? static_cast<double>(correct) / count : 0.0);
        total_correct += correct;
    }
    report.overall =
        report.samples.empty() ? 0.0 : static_cast<double>(total_correct) / report.samples.size();

    nlohmann::ordered_json cfg;
    cfg["mapping"] = {{"kind", to_string(pipeline.mapping.kind)},
                      {"u", pipeline.mapping.u},
                      {"v", pipeline.mapping.v}};
    cfg["penalty"] = {{"kind", to_string(pipeline.solver.penalty.kind)},
                      {"w0", pipeline.solver.penalty.w0},
                      {"a", pipeline.solver.penalty.a},
                      {"b", pipeline.solver.penalty.b},
                      {"delta", pipeline.solver.penalty.delta},
                      {"gamma", pipeline.solver.penalty.gamma}};
    cfg["alpha"] = pipeline.solver.alpha;
    cfg["beta"] = pipeline.solver.beta;
    cfg["rel_tol"] = pipeline.solver.rel_tol;
    cfg["max_iters"] = pipeline.solver.max_iters;
    cfg["m_fraction"] = pipeline.m_fraction;
    cfg["feature_mode"] =
        pipeline.feature_mode == FeatureMode::Gradient ? "gradient" : "intensity";
    cfg["image_shape"] = {manifest.image_height, manifest.image_width};
    cfg["subsets"] = nlohmann::ordered_json::array();
    for (const auto& c : cases) {
        nlohmann::ordered_json s;
        s["name"] = c.name;
        if (c.spec) {
            s["occlusion_rate"] = c.spec->occlusion_rate;
            s["seed"] = c.spec->seed;
        }
        cfg["subsets"].push_back(s);
    }
    report.config_snapshot = std::move(cfg);

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::ordered_json report_to_json(const BenchmarkReport& report) {
    nlohmann::ordered_json j;
    j["config"] = report.config_snapshot;
    j["subsets"] = nlohmann::ordered_json::array();
    for (const auto& [name, acc] : report.subset_accuracy)
        j["subsets"].push_back({{"name", name}, {"accuracy", acc}});
    j["overall"] = report.overall;
    j["samples"] = nlohmann::ordered_json::array();
    for (const auto& s : report.samples) {
        nlohmann::ordered_json rec;
        rec["subset"] = s.subset;
        rec["path"] = s.path;
        rec["true_label"] = s.true_label;
        rec["predicted"] = s.predicted;
        rec["correct"] = s.correct;
        rec["solver_failed"] = s.solver_failed;
        rec["top_lists"] = {s.top_lists[0], s.top_lists[1], s.top_lists[2]};
        j["samples"].push_back(std::move(rec));
    }
    return j;
}

void emit_report(const BenchmarkReport& report, const std::string& path,
                 const std::string& format) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path);
    if (format == "json") {
        out << report_to_json(report).dump(2) << "\n";
    } else if (format == "csv") {
        out << "subset,accuracy\n";
        char buf[64];
        for (const auto& [name, acc] : report.subset_accuracy) {
            std::snprintf(buf, sizeof(buf), "%.6f", acc);
            out << name << "," << buf << "\n";
        }
        std::snprintf(buf, sizeof(buf), "%.6f", report.overall);
        out << "overall," << buf << "\n";
    } else {
        throw std::invalid_argument("emit_report: format must be json or csv");
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace haslr
