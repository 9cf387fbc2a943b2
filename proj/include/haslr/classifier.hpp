#pragma once

#include <array>
#include <map>
#include <vector>

#include "haslr/gradient.hpp"
#include "haslr/solver.hpp"

namespace haslr {

/// Per-class nuclear-norm residues for the three feature orders.
struct ResidualTable {
    std::vector<int> class_ids;                       // ordered, shared by all orders
    std::array<std::vector<double>, 3> residues;      // residues[w][i] for class_ids[i]
};

struct Verdict {
    int identity = 0;
    std::map<int, int> frequencies;        // occurrences across the top lists
    std::map<int, double> average_ranks;   // mean 1-based rank over containing lists
    bool tie_broken = false;
};

struct ClassifyDiagnostics {
    std::array<SolverResult, 3> solves;
    ResidualTable residuals;
    std::array<std::vector<int>, 3> top_lists;
};

/// Per-class residue r_n = ||Mat(y - A delta_n(x) - L)||_* where delta_n
/// keeps only the coefficients of class n. Returned in ascending class-id
/// order alongside the id list.
std::pair<std::vector<int>, std::vector<double>> class_residues(const Dictionary& A,
                                                                const Eigen::VectorXd& y,
                                                                const SolverResult& result,
                                                                int height, int width);

/// Classes sorted by residue ascending (ties by class id); returns the
/// first ceil(m_fraction * class_count) of them, at least one.
std::vector<int> top_fraction(const std::vector<int>& class_ids,
                              const std::vector<double>& residues, double m_fraction);

/// Polling rule over the three per-order top lists: most frequent class
/// wins; frequency ties go to the least average rank, remaining ties to
/// the least class id.
Verdict poll(const std::array<std::vector<int>, 3>& lists);

/// Full per-sample decision: one ADMM solve, residual table and top list
/// per order, then the poll.
std::pair<Verdict, ClassifyDiagnostics> classify(const std::array<Dictionary, 3>& dicts,
                                                 const FeatureSet& feats,
                                                 const SolverConfig& cfg, double m_fraction);

}  // namespace haslr
