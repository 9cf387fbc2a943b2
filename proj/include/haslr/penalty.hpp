#pragma once

#include <string>

namespace haslr {

enum class PenaltyKind { Constant, Laplace, GeneralizedT, Nig };

PenaltyKind penalty_kind_from_string(const std::string& name);
std::string to_string(PenaltyKind kind);

/// Sparsity penalty pi(|x_i|) together with its reweighting rule
/// weight(t) = d pi / d t, used for the adaptive lasso step.
struct PenaltyFunction {
    PenaltyKind kind = PenaltyKind::Nig;
    double w0 = 1.0;      // constant: fixed weight
    double b = 1.0;       // laplace scale / generalized-t b
    double a = 1.0;       // generalized-t a
    double delta = 1.0;   // NIG delta
    double gamma = 1e-6;  // NIG gamma

    static PenaltyFunction constant(double w0);
    static PenaltyFunction laplace(double b);
    static PenaltyFunction generalized_t(double a, double b);
    static PenaltyFunction nig(double delta, double gamma);

    /// Reweighting weight at |x_i| = t. Throws std::invalid_argument on a
    /// non-finite t.
    double weight(double t) const;

    /// Penalty value pi(t) (up to an additive constant), used for the
    /// objective trace.
    double log_prior(double t) const;
};

}  // namespace haslr
