#include "haslr/dictionary.hpp"

#include <stdexcept>

namespace haslr {

Dictionary build_dictionary(const std::vector<std::pair<Eigen::VectorXd, int>>& features) {
    if (features.empty()) throw std::invalid_argument("build_dictionary: no features");
    const long d = features.front().first.size();
    const long n = static_cast<long>(features.size());

    Dictionary dict;
    dict.atoms.resize(d, n);
    dict.column_norms.resize(n);
    dict.labels.reserve(features.size());
    for (long j = 0; j < n; ++j) {
        const auto& [vec, label] = features[static_cast<size_t>(j)];
        if (vec.size() != d)
            throw std::invalid_argument("build_dictionary: ragged feature lengths");
        const double norm = vec.norm();
        if (norm == 0.0)
            throw std::invalid_argument("build_dictionary: zero feature vector at column " +
                                        std::to_string(j));
        dict.atoms.col(j) = vec / norm;
        dict.column_norms(j) = norm;
        dict.labels.push_back(label);
    }
    return dict;
}

}  // namespace haslr
