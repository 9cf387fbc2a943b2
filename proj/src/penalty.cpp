#include "haslr/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace haslr {

PenaltyKind penalty_kind_from_string(const std::string& name) {
    if (name == "constant") return PenaltyKind::Constant;
    if (name == "laplace") return PenaltyKind::Laplace;
    if (name == "gent") return PenaltyKind::GeneralizedT;
    if (name == "nig") return PenaltyKind::Nig;
    throw std::invalid_argument("unknown penalty function: " + name);
}

std::string to_string(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::Constant: return "constant";
        case PenaltyKind::Laplace: return "laplace";
        case PenaltyKind::GeneralizedT: return "gent";
        case PenaltyKind::Nig: return "nig";
    }
    return "?";
}

PenaltyFunction PenaltyFunction::constant(double w0) {
    if (w0 <= 0) throw std::invalid_argument("constant penalty needs w0 > 0");
    PenaltyFunction p;
    p.kind = PenaltyKind::Constant;
    p.w0 = w0;
    return p;
}

PenaltyFunction PenaltyFunction::laplace(double b) {
    if (b <= 0) throw std::invalid_argument("laplace penalty needs b > 0");
    PenaltyFunction p;
    p.kind = PenaltyKind::Laplace;
    p.b = b;
    return p;
}

PenaltyFunction PenaltyFunction::generalized_t(double a, double b) {
    if (a <= 0 || b <= 0) throw std::invalid_argument("generalized-t penalty needs a, b > 0");
    PenaltyFunction p;
    p.kind = PenaltyKind::GeneralizedT;
    p.a = a;
    p.b = b;
    return p;
}

PenaltyFunction PenaltyFunction::nig(double delta, double gamma) {
    if (delta <= 0 || gamma <= 0) throw std::invalid_argument("NIG penalty needs delta, gamma > 0");
    PenaltyFunction p;
    p.kind = PenaltyKind::Nig;
    p.delta = delta;
    p.gamma = gamma;
    return p;
}

double PenaltyFunction::weight(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("penalty weight: t must be finite");
    t = std::abs(t);
    switch (kind) {
        case PenaltyKind::Constant:
            return w0;
        case PenaltyKind::Laplace:
            return 1.0 / b;
        case PenaltyKind::GeneralizedT:
            return (a + 1.0) / (b + t);
        case PenaltyKind::Nig: {
            const double s2 = delta * delta + t * t;
            const double s = std::sqrt(s2);
            const double x = gamma * s;
            // K1(x) ~ 1/x for small x, so the Bessel term vanishes as
            // gamma^2 and the log(delta^2 + t^2) form takes over.
            if (x < 1e-3) return 2.0 * t / s2;
            const double k0 = std::cyl_bessel_k(0.0, x);
            const double k1 = std::cyl_bessel_k(1.0, x);
            return 2.0 * t / s2 + gamma * (t / s) * (k0 / k1);
        }
    }
    return 0;
}

double PenaltyFunction::log_prior(double t) const {
    t = std::abs(t);
    switch (kind) {
        case PenaltyKind::Constant:
            return w0 * t;
        case PenaltyKind::Laplace:
            return t / b;
        case PenaltyKind::GeneralizedT:
            return (a + 1.0) * std::log1p(t / b);
        case PenaltyKind::Nig: {
            const double s = std::sqrt(delta * delta + t * t);
            return std::log(s) - std::log(std::cyl_bessel_k(1.0, gamma * s));
        }
    }
    return 0;
}

}  // namespace haslr
