#include "npmr/dataset.hpp"

#include <set>

#include "npmr/errors.hpp"

namespace npmr {

namespace {

void check_unique(const std::vector<std::string>& names, const char* what)
{
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) {
            throw InvalidArgument(std::string("duplicate ") + what + " name '" + name + "'");
        }
    }
}

} // namespace

void Dataset::validate() const
{
    if (n() < 1) throw InvalidArgument("dataset needs at least one observation");
    if (p() < 1) throw InvalidArgument("dataset needs at least one predictor");
    if (K < 2) throw InvalidArgument("dataset needs at least two classes");
    if (static_cast<Index>(y.size()) != n()) {
        throw InvalidArgument("label count " + std::to_string(y.size()) + " does not match n = " +
                              std::to_string(n()));
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 1 || y[i] > K) {
            throw InvalidArgument("label " + std::to_string(y[i]) + " at row " + std::to_string(i + 1) +
                                  " outside 1.." + std::to_string(K));
        }
    }
    if (static_cast<Index>(feature_names.size()) != p()) throw InvalidArgument("feature_names must have length p");
    if (static_cast<int>(class_names.size()) != K) throw InvalidArgument("class_names must have length K");
    check_unique(feature_names, "feature");
    check_unique(class_names, "class");
    if (!X.all_finite()) throw InvalidArgument("design matrix has non-finite entries");
}

std::vector<Index> Dataset::class_counts() const
{
    std::vector<Index> counts(static_cast<std::size_t>(K), 0);
    for (int label : y) ++counts[static_cast<std::size_t>(label - 1)];
    return counts;
}

Dataset Dataset::subset(std::span<const Index> rows) const
{
    Dataset out;
    out.X = X.select_rows(rows);
    out.y.reserve(rows.size());
    for (Index r : rows) out.y.push_back(y[static_cast<std::size_t>(r)]);
    out.K = K;
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

Dataset make_dataset(DesignMatrix X, std::vector<int> y, int K, std::vector<std::string> feature_names,
                     std::vector<std::string> class_names)
{
    Dataset d;
    d.X = std::move(X);
    d.y = std::move(y);
    d.K = K;
    if (feature_names.empty()) {
        for (Index j = 0; j < d.X.cols(); ++j) feature_names.push_back("x" + std::to_string(j + 1));
    }
    if (class_names.empty()) {
        for (int k = 0; k < K; ++k) class_names.push_back("class" + std::to_string(k + 1));
    }
    d.feature_names = std::move(feature_names);
    d.class_names = std::move(class_names);
    d.validate();
    return d;
}

} // namespace npmr
