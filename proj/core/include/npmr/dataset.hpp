#pragma once

#include <string>
#include <vector>

#include "npmr/design_matrix.hpp"

namespace npmr {

/// Design plus 1-based class labels.
///
/// Invariants (checked by validate()): n, p >= 1, K >= 2, every label in
/// 1..K, names unique when given. Empty name vectors are filled with
/// defaults ("x1".., "class1"..).
struct Dataset {
    DesignMatrix X;
    std::vector<int> y;
    int K = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    void validate() const;
    std::vector<Index> class_counts() const;

    Dataset subset(std::span<const Index> rows) const;
};

/// Fills default names and validates.
Dataset make_dataset(DesignMatrix X, std::vector<int> y, int K,
                     std::vector<std::string> feature_names = {},
                     std::vector<std::string> class_names = {});

} // namespace npmr
