#include "haslr/classifier.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace haslr {

std::pair<std::vector<int>, std::vector<double>> class_residues(const Dictionary& A,
                                                                const Eigen::VectorXd& y,
                                                                const SolverResult& result,
                                                                int height, int width) {
    if (y.size() != A.dim() || result.x.size() != A.size() || result.L.size() != A.dim())
        throw std::invalid_argument("class_residues: dimension mismatch");
    if (static_cast<long>(height) * width != A.dim())
        throw std::invalid_argument("class_residues: shape does not match dimension");

    const std::set<int> unique_labels(A.labels.begin(), A.labels.end());
    std::vector<int> ids(unique_labels.begin(), unique_labels.end());
    std::vector<double> residues;
    residues.reserve(ids.size());
    const Eigen::VectorXd base = y - result.L;
    for (int cls : ids) {
        Eigen::VectorXd contrib = Eigen::VectorXd::Zero(A.dim());
        for (long j = 0; j < A.size(); ++j) {
            if (A.labels[static_cast<size_t>(j)] == cls && result.x(j) != 0.0)
                contrib += A.atoms.col(j) * result.x(j);
        }
        const Eigen::VectorXd resid = base - contrib;
        const Eigen::Map<const Eigen::MatrixXd> m(resid.data(), height, width);
        residues.push_back(Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues().sum());
    }
    return {std::move(ids), std::move(residues)};
}

std::vector<int> top_fraction(const std::vector<int>& class_ids,
                              const std::vector<double>& residues, double m_fraction) {
    if (class_ids.empty() || class_ids.size() != residues.size())
        throw std::invalid_argument("top_fraction: empty or mismatched residues");
    if (!(m_fraction > 0.0 && m_fraction <= 1.0))
        throw std::invalid_argument("top_fraction: m_fraction must lie in (0, 1]");

    std::vector<size_t> order(class_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (residues[a] != residues[b]) return residues[a] < residues[b];
        return class_ids[a] < class_ids[b];
    });
    const size_t count = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(m_fraction * static_cast<double>(class_ids.size()))));
    std::vector<int> out;
    out.reserve(count);
    for (size_t i = 0; i < count && i < order.size(); ++i) out.push_back(class_ids[order[i]]);
    return out;
}

Verdict poll(const std::array<std::vector<int>, 3>& lists) {
    for (const auto& l : lists)
        if (l.empty()) throw std::invalid_argument("poll: empty top list");

    Verdict v;
    std::map<int, double> rank_sums;
    for (const auto& list : lists) {
        for (size_t i = 0; i < list.size(); ++i) {
            v.frequencies[list[i]] += 1;
            rank_sums[list[i]] += static_cast<double>(i + 1);
        }
    }
    for (const auto& [cls, sum] : rank_sums)
        v.average_ranks[cls] = sum / v.frequencies[cls];

    int max_freq = 0;
    for (const auto& [cls, freq] : v.frequencies) max_freq = std::max(max_freq, freq);
    std::vector<int> tied;
    for (const auto& [cls, freq] : v.frequencies)
        if (freq == max_freq) tied.push_back(cls);

    v.tie_broken = tied.size() > 1;
    int best = tied.front();
    for (int cls : tied) {
        if (v.average_ranks[cls] < v.average_ranks[best] ||
            (v.average_ranks[cls] == v.average_ranks[best] && cls < best))
            best = cls;
    }
    v.identity = best;
    return v;
}

std::pair<Verdict, ClassifyDiagnostics> classify(const std::array<Dictionary, 3>& dicts,
                                                 const FeatureSet& feats,
                                                 const SolverConfig& cfg, double m_fraction) {
    ClassifyDiagnostics diag;
    for (int w = 0; w < 3; ++w) {
        const auto& dict = dicts[static_cast<size_t>(w)];
        const auto& y = feats.orders[static_cast<size_t>(w)];
        diag.solves[static_cast<size_t>(w)] = admm_solve(dict, y, cfg);
        auto [ids, res] = class_residues(dict, y, diag.solves[static_cast<size_t>(w)],
                                         cfg.image_height, cfg.image_width);
        if (w == 0) diag.residuals.class_ids = ids;
        diag.residuals.residues[static_cast<size_t>(w)] = res;
        diag.top_lists[static_cast<size_t>(w)] = top_fraction(ids, res, m_fraction);
    }
    return {poll(diag.top_lists), std::move(diag)};
}

}  // namespace haslr
