#include "npmr/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "npmr/csv.hpp"
#include "npmr/errors.hpp"

namespace npmr {

namespace {

std::string fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

LatentReport build_latent_report(const Matrix& B, const PenaltyGroups& groups,
                                 const std::vector<std::string>& group_names,
                                 const std::vector<std::string>& feature_names,
                                 const std::vector<std::string>& class_names, int top_m)
{
    groups.validate(B.rows());
    if (static_cast<Index>(feature_names.size()) != B.rows()) throw InvalidArgument("feature_names must have one entry per row of B");
    if (static_cast<Index>(class_names.size()) != B.cols()) throw InvalidArgument("class_names must have one entry per column of B");
    if (top_m < 1) throw InvalidArgument("top_m must be positive");
    if (groups.groups.empty()) throw InvalidArgument("report needs at least one penalized group");

    LatentReport report;
    report.class_names = class_names;
    for (std::size_t gi = 0; gi < groups.groups.size(); ++gi) {
        const auto& rows = groups.groups[gi];
        GroupReport g;
        g.name = gi < group_names.size() ? group_names[gi] : "group" + std::to_string(gi + 1);
        SvdTriple svd = thin_svd(gather_rows(B, rows));
        const int r = numerical_rank(svd.sigma);
        g.sigma = svd.sigma.head(r);
        g.V = svd.V.leftCols(r);
        Matrix scores = svd.U.leftCols(r) * g.sigma.asDiagonal();

        for (int d = 0; d < r; ++d) {
            std::vector<LeaderEntry> entries;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                entries.push_back({feature_names[static_cast<std::size_t>(rows[i])], scores(static_cast<Index>(i), d)});
            }
            auto m = std::min<std::size_t>(static_cast<std::size_t>(top_m), entries.size());
            std::vector<LeaderEntry> top = entries;
            std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
                return a.score != b.score ? a.score > b.score : a.name < b.name;
            });
            top.resize(m);
            std::vector<LeaderEntry> bottom = entries;
            std::sort(bottom.begin(), bottom.end(), [](const auto& a, const auto& b) {
                return a.score != b.score ? a.score < b.score : a.name < b.name;
            });
            bottom.resize(m);
            g.top.push_back(std::move(top));
            g.bottom.push_back(std::move(bottom));
        }
        report.groups.push_back(std::move(g));
    }
    return report;
}

void write_report_text(std::ostream& out, const LatentReport& report)
{
    std::size_t width = 8;
    for (const auto& c : report.class_names) width = std::max(width, c.size() + 2);

    for (const auto& g : report.groups) {
        out << "== " << g.name << " (rank " << g.rank() << ") ==\n";
        if (g.rank() == 0) {
            out << "no latent variables at this lambda\n\n";
            continue;
        }
        out << pad("", width);
        for (int d = 0; d < g.rank(); ++d) out << pad("latent" + std::to_string(d + 1), 12);
        out << '\n';
        for (std::size_t k = 0; k < report.class_names.size(); ++k) {
            out << pad(report.class_names[k], width);
            for (int d = 0; d < g.rank(); ++d) out << pad(fixed(g.V(static_cast<Index>(k), d)), 12);
            out << '\n';
        }
        out << pad("sigma", width);
        for (int d = 0; d < g.rank(); ++d) out << pad(fixed(g.sigma(d)), 12);
        out << "\n\n";

        for (int d = 0; d < g.rank(); ++d) {
            const auto& top = g.top[static_cast<std::size_t>(d)];
            const auto& bottom = g.bottom[static_cast<std::size_t>(d)];
            out << "latent" << d + 1 << " top " << top.size() << ":\n";
            for (const auto& e : top) out << "  " << pad(e.name, 32) << fixed(e.score) << '\n';
            out << "latent" << d + 1 << " bottom " << bottom.size() << ":\n";
            for (const auto& e : bottom) out << "  " << pad(e.name, 32) << fixed(e.score) << '\n';
        }
        out << '\n';
    }
}

void write_report_csv(std::ostream& out, const LatentReport& report)
{
    out << "group,section,dimension,row,name,value\n";
    auto line = [&](const std::string& group, const char* section, int dim, std::size_t row, const std::string& name,
                    double value) {
        out << csv::escape(group) << ',' << section << ',' << dim << ',' << row << ',' << csv::escape(name) << ','
            << csv::format_double(value) << '\n';
    };
    for (const auto& g : report.groups) {
        for (int d = 0; d < g.rank(); ++d) {
            line(g.name, "sigma", d + 1, 0, "", g.sigma(d));
            for (std::size_t k = 0; k < report.class_names.size(); ++k) {
                line(g.name, "loading", d + 1, k + 1, report.class_names[k], g.V(static_cast<Index>(k), d));
            }
            const auto& top = g.top[static_cast<std::size_t>(d)];
            for (std::size_t i = 0; i < top.size(); ++i) line(g.name, "top", d + 1, i + 1, top[i].name, top[i].score);
            const auto& bottom = g.bottom[static_cast<std::size_t>(d)];
            for (std::size_t i = 0; i < bottom.size(); ++i) {
                line(g.name, "bottom", d + 1, i + 1, bottom[i].name, bottom[i].score);
            }
        }
    }
}

} // namespace npmr
