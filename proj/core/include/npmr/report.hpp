#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "npmr/prox.hpp"

namespace npmr {

struct LeaderEntry {
    std::string name;
    double score = 0.0;
};

/// Latent factors of one penalty block.
struct GroupReport {
    std::string name;
    Vector sigma;  // values above the rank tolerance
    Matrix V;      // K x r loadings, canonical signs
    /// Per latent dimension: highest and lowest scores of U diag(sigma).
    std::vector<std::vector<LeaderEntry>> top;
    std::vector<std::vector<LeaderEntry>> bottom;

    int rank() const { return static_cast<int>(sigma.size()); }
};

struct LatentReport {
    std::vector<std::string> class_names;
    std::vector<GroupReport> groups;
};

/// Decomposes each penalty block of B. Ties in a leaderboard are broken by
/// name.
LatentReport build_latent_report(const Matrix& B, const PenaltyGroups& groups,
                                 const std::vector<std::string>& group_names,
                                 const std::vector<std::string>& feature_names,
                                 const std::vector<std::string>& class_names, int top_m = 5);

void write_report_text(std::ostream& out, const LatentReport& report);
/// Long format: group,section,dimension,row,name,value
void write_report_csv(std::ostream& out, const LatentReport& report);

} // namespace npmr
