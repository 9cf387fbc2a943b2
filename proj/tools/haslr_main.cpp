// haslr: occlusion-robust image recognition with gradient-direction
// features and a sparse + low-rank ADMM regression.
//
// Subcommands: extract, recognize, synth, occlude, bench.
// Exit codes: 0 success, 2 argument error, 3 I/O error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "haslr/dataset.hpp"
#include "haslr/errors.hpp"

namespace {

using nlohmann::json;

struct Options {
    std::string mapping = "tanh";
    double u = 7.3;
    double v = 0.51;
    double alpha = 100.0;
    double beta = 1.0;
    std::string penalty = "nig";
    double delta = 1.0;
    double gamma = 1e-6;
    double pen_a = 1.0;
    double pen_b = 1.0;
    double w0 = 1.0;
    double m_fraction = 0.10;
    double rel_tol = 1e-6;
    int max_iters = 500;
    std::uint64_t seed = 0;
    std::string feature_mode = "gradient";
    int height = 42;
    int width = 30;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

// HASLR_CONFIG points at a JSON file whose keys mirror the long flags;
// values there override built-in defaults, flags override both.
void apply_env_config(Options& o) {
    const char* path = std::getenv("HASLR_CONFIG");
    if (!path || !*path) return;
    std::ifstream in(path);
    if (!in) throw haslr::IoError(std::string("HASLR_CONFIG: cannot open ") + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("HASLR_CONFIG: invalid JSON: ") + e.what());
    }
    auto get = [&cfg](const char* key, auto& slot) {
        if (cfg.contains(key)) slot = cfg.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("mapping", o.mapping);
    get("u", o.u);
    get("v", o.v);
    get("alpha", o.alpha);
    get("beta", o.beta);
    get("penalty", o.penalty);
    get("delta", o.delta);
    get("gamma", o.gamma);
    get("pen_a", o.pen_a);
    get("pen_b", o.pen_b);
    get("w0", o.w0);
    get("m_fraction", o.m_fraction);
    get("rel_tol", o.rel_tol);
    get("max_iters", o.max_iters);
    get("seed", o.seed);
    get("feature_mode", o.feature_mode);
    get("height", o.height);
    get("width", o.width);
    get("jobs", o.jobs);
}

void add_common_flags(CLI::App* app, Options& o) {
    app->add_option("--mapping", o.mapping, "Mapping function: arctan|tanh|softsign|sigmoid")
        ->capture_default_str();
    app->add_option("-u,--scale", o.u, "Mapping scale u")->capture_default_str();
    app->add_option("-v,--shift", o.v, "Mapping shift v")->capture_default_str();
    app->add_option("--alpha", o.alpha, "Nuclear-norm weight")->capture_default_str();
    app->add_option("--beta", o.beta, "ADMM penalty")->capture_default_str();
    app->add_option("--penalty", o.penalty, "Sparsity penalty: constant|laplace|gent|nig")
        ->capture_default_str();
    app->add_option("--delta", o.delta, "NIG delta")->capture_default_str();
    app->add_option("--gamma", o.gamma, "NIG gamma")->capture_default_str();
    app->add_option("--pen-a", o.pen_a, "Generalized-t a")->capture_default_str();
    app->add_option("--pen-b", o.pen_b, "Laplace / generalized-t b")->capture_default_str();
    app->add_option("--w0", o.w0, "Constant penalty weight")->capture_default_str();
    app->add_option("--m-fraction", o.m_fraction, "Top residual fraction for polling")
        ->capture_default_str();
    app->add_option("--rel-tol", o.rel_tol, "ADMM convergence tolerance")->capture_default_str();
    app->add_option("--max-iters", o.max_iters, "ADMM iteration cap")->capture_default_str();
    app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app->add_option("--feature-mode", o.feature_mode, "gradient|intensity")
        ->capture_default_str();
    app->add_option("--height", o.height, "Working image height")->capture_default_str();
    app->add_option("--width", o.width, "Working image width")->capture_default_str();
    app->add_option("--jobs", o.jobs, "Worker threads for benchmarks")->capture_default_str();
}

haslr::PipelineConfig make_pipeline(const Options& o) {
    haslr::PipelineConfig p;
    p.mapping.kind = haslr::mapping_kind_from_string(o.mapping);
    p.mapping.u = o.u;
    p.mapping.v = o.v;
    p.solver.alpha = o.alpha;
    p.solver.beta = o.beta;
    switch (haslr::penalty_kind_from_string(o.penalty)) {
        case haslr::PenaltyKind::Constant:
            p.solver.penalty = haslr::PenaltyFunction::constant(o.w0);
            break;
        case haslr::PenaltyKind::Laplace:
            p.solver.penalty = haslr::PenaltyFunction::laplace(o.pen_b);
            break;
        case haslr::PenaltyKind::GeneralizedT:
            p.solver.penalty = haslr::PenaltyFunction::generalized_t(o.pen_a, o.pen_b);
            break;
        case haslr::PenaltyKind::Nig:
            p.solver.penalty = haslr::PenaltyFunction::nig(o.delta, o.gamma);
            break;
    }
    p.solver.image_height = o.height;
    p.solver.image_width = o.width;
    p.solver.rel_tol = o.rel_tol;
    p.solver.max_iters = o.max_iters;
    p.m_fraction = o.m_fraction;
    if (o.feature_mode == "gradient")
        p.feature_mode = haslr::FeatureMode::Gradient;
    else if (o.feature_mode == "intensity")
        p.feature_mode = haslr::FeatureMode::Intensity;
    else
        throw std::invalid_argument("feature-mode must be gradient or intensity");
    p.jobs = o.jobs;
    return p;
}

std::vector<haslr::OcclusionCase> make_cases(const std::vector<double>& rates,
                                             const std::optional<std::string>& occluder_path,
                                             const Options& o) {
    haslr::ImageMatrix occluder;
    if (occluder_path) {
        occluder = haslr::load_grayscale(*occluder_path, o.height, o.width);
    } else {
        occluder = haslr::make_occluder_texture(24, 24, o.seed ^ 0x5eedULL);
    }
    std::vector<haslr::OcclusionCase> cases;
    for (double r : rates) {
        haslr::OcclusionCase c;
        if (r <= 0.0) {
            c.name = "none";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "rate=%.2f", r);
            c.name = buf;
            haslr::OcclusionSpec spec;
            spec.occluder = occluder;
            spec.occlusion_rate = r;
            spec.anchor = std::nullopt;
            spec.seed = o.seed;
            c.spec = spec;
        }
        cases.push_back(std::move(c));
    }
    return cases;
}

int cmd_extract(const Options& o, const std::string& image, const std::string& out_path) {
    const haslr::ImageMatrix img = haslr::load_grayscale(image, o.height, o.width);
    haslr::MappingFunction map{haslr::mapping_kind_from_string(o.mapping), o.u, o.v};
    const haslr::FeatureSet fs = haslr::extract_features(img, map);

    nlohmann::ordered_json j;
    for (int w = 0; w < 3; ++w) {
        std::vector<double> vals(fs.orders[static_cast<size_t>(w)].begin(),
                                 fs.orders[static_cast<size_t>(w)].end());
        j["order" + std::to_string(w + 1)] = vals;
    }
    j["shape"] = {o.height, o.width};
    j["mapping"] = {{"kind", o.mapping}, {"u", o.u}, {"v", o.v}};

    std::ofstream out(out_path);
    if (!out) throw haslr::IoError("cannot write " + out_path);
    out << j.dump() << "\n";
    return 0;
}

int cmd_recognize(const Options& o, const std::string& image, const std::string& manifest_path,
                  const std::string& diagnostics_path) {
    const haslr::Manifest manifest = haslr::load_manifest(manifest_path, o.height, o.width);
    const haslr::PipelineConfig pipeline = make_pipeline(o);

    const auto train = manifest.split_entries(haslr::Split::Train);
    std::array<std::vector<std::pair<Eigen::VectorXd, int>>, 3> cols;
    for (const auto& e : train) {
        const haslr::ImageMatrix img = haslr::load_grayscale(e.path, o.height, o.width);
        const haslr::FeatureSet fs = haslr::extract_features(img, pipeline.mapping);
        for (int w = 0; w < 3; ++w)
            cols[static_cast<size_t>(w)].emplace_back(fs.orders[static_cast<size_t>(w)], e.label);
    }
    std::array<haslr::Dictionary, 3> dicts;
    for (int w = 0; w < 3; ++w)
        dicts[static_cast<size_t>(w)] = haslr::build_dictionary(cols[static_cast<size_t>(w)]);

    const haslr::ImageMatrix img = haslr::load_grayscale(image, o.height, o.width);
    const haslr::FeatureSet fs = haslr::extract_features(img, pipeline.mapping);
    auto [verdict, diag] = haslr::classify(dicts, fs, pipeline.solver, pipeline.m_fraction);

    std::cout << "identity=" << verdict.identity
              << " frequency=" << verdict.frequencies[verdict.identity]
              << " tie_broken=" << (verdict.tie_broken ? "true" : "false") << "\n";

    if (!diagnostics_path.empty()) {
        nlohmann::ordered_json j;
        j["identity"] = verdict.identity;
        j["tie_broken"] = verdict.tie_broken;
        j["class_ids"] = diag.residuals.class_ids;
        for (int w = 0; w < 3; ++w) {
            const auto ws = std::to_string(w + 1);
            j["residues_order" + ws] = diag.residuals.residues[static_cast<size_t>(w)];
            j["top_order" + ws] = diag.top_lists[static_cast<size_t>(w)];
            j["iterations_order" + ws] = diag.solves[static_cast<size_t>(w)].iterations;
            j["converged_order" + ws] = diag.solves[static_cast<size_t>(w)].converged;
        }
        std::ofstream out(diagnostics_path);
        if (!out) throw haslr::IoError("cannot write " + diagnostics_path);
        out << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_bench(const Options& o, const std::string& manifest_path, int synth_classes,
              const std::string& synth_dir, const std::vector<double>& rates,
              const std::optional<std::string>& occluder_path, const std::string& out_path,
              const std::string& format) {
    haslr::Manifest manifest;
    if (synth_classes > 0) {
        manifest = haslr::synth_dataset(synth_classes, o.height, o.width, o.seed, synth_dir);
    } else if (!manifest_path.empty()) {
        manifest = haslr::load_manifest(manifest_path, o.height, o.width);
    } else {
        throw std::invalid_argument("bench needs either --manifest or --synth");
    }
    const auto cases = make_cases(rates.empty() ? std::vector<double>{0.0} : rates,
                                  occluder_path, o);
    const haslr::BenchmarkReport report =
        haslr::run_benchmark(manifest, cases, make_pipeline(o));
    if (!out_path.empty()) haslr::emit_report(report, out_path, format);
    std::printf("overall=%.4f\n", report.overall);
    std::fprintf(stderr, "wall_time=%.2fs\n", report.wall_time_seconds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occlusion-robust recognition via gradient-direction features and "
                 "sparse + low-rank regression"};
    app.require_subcommand(1);

    Options o;
    try {
        apply_env_config(o);
    } catch (const haslr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::string image, out_path, manifest_path, diagnostics_path, synth_dir = "synth_data";
    std::string occluder_path, format = "json", anchor = "random";
    std::vector<double> rates;
    int synth_classes = 0;
    double rate = 0.4;

    auto* extract = app.add_subcommand("extract", "Write gradient-direction features as JSON");
    extract->add_option("image", image, "Input image (PGM or PNG)")->required();
    extract->add_option("-o,--out", out_path, "Output JSON path")->required();
    add_common_flags(extract, o);

    auto* recognize = app.add_subcommand("recognize", "Identify one image against a manifest");
    recognize->add_option("image", image, "Test image")->required();
    recognize->add_option("-m,--manifest", manifest_path, "Dataset manifest CSV")->required();
    recognize->add_option("--diagnostics", diagnostics_path, "Optional JSON diagnostics path");
    add_common_flags(recognize, o);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
    synth->add_option("-n,--classes", synth_classes, "Number of classes")->required();
    synth->add_option("-o,--out-dir", synth_dir, "Output directory")->capture_default_str();
    add_common_flags(synth, o);

    auto* occlude = app.add_subcommand("occlude", "Paste an occluder onto a face image");
    occlude->add_option("image", image, "Face image")->required();
    occlude->add_option("--occluder", occluder_path, "Occluder image (default: texture)");
    occlude->add_option("--rate", rate, "Occlusion rate in (0,1)")->capture_default_str();
    occlude->add_option("--anchor", anchor, "\"r,c\" or \"random\"")->capture_default_str();
    occlude->add_option("-o,--out", out_path, "Output PGM path")->required();
    add_common_flags(occlude, o);

    auto* bench = app.add_subcommand("bench", "Run an occlusion benchmark and emit a report");
    bench->add_option("-m,--manifest", manifest_path, "Dataset manifest CSV");
    bench->add_option("--synth", synth_classes, "Generate a synthetic dataset of N classes");
    bench->add_option("--synth-dir", synth_dir, "Directory for synthetic images")
        ->capture_default_str();
    bench->add_option("--rates", rates, "Occlusion rates (0 = unoccluded)")->delimiter(',');
    bench->add_option("--occluder", occluder_path, "Occluder image (default: texture)");
    bench->add_option("-o,--out", out_path, "Report output path");
    bench->add_option("--format", format, "json|csv")->capture_default_str();
    add_common_flags(bench, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (extract->parsed()) return cmd_extract(o, image, out_path);
        if (recognize->parsed()) return cmd_recognize(o, image, manifest_path, diagnostics_path);
        if (synth->parsed()) {
            haslr::synth_dataset(synth_classes, o.height, o.width, o.seed, synth_dir);
            std::cout << "manifest=" << synth_dir << "/manifest.csv\n";
            return 0;
        }
        if (occlude->parsed()) {
            const haslr::ImageMatrix face = haslr::load_grayscale(image, o.height, o.width);
            haslr::OcclusionSpec spec;
            if (occluder_path.empty())
                spec.occluder = haslr::make_occluder_texture(24, 24, o.seed ^ 0x5eedULL);
            else
                spec.occluder = haslr::load_grayscale(occluder_path, o.height, o.width);
            spec.occlusion_rate = rate;
            spec.seed = o.seed;
            if (anchor != "random") {
                int r, c;
                if (std::sscanf(anchor.c_str(), "%d,%d", &r, &c) != 2)
                    throw std::invalid_argument("anchor must be \"r,c\" or \"random\"");
                spec.anchor = {r, c};
            }
            haslr::write_pgm(haslr::apply_occlusion(face, spec), out_path);
            return 0;
        }
        if (bench->parsed())
            return cmd_bench(o, manifest_path, synth_classes, synth_dir, rates,
                             occluder_path.empty() ? std::nullopt
                                                   : std::optional<std::string>(occluder_path),
                             out_path, format);
    } catch (const haslr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const haslr::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
