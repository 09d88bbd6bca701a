#pragma once

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "skewpivot/descriptor.hpp"
#include "skewpivot/harness.hpp"

namespace skewpivot {

inline constexpr const char* csv_header =
    "experiment-id,method,law,n,coverage,mean_length,median_length,trimmed_length,infinite_count,seed";

inline void write_csv(std::ostream& os, std::span<const ExperimentReport> reports, bool header = true) {
  if (header) os << csv_header << '\n';
  for (const auto& rep : reports)
    for (const auto& a : rep.arms)
      os << rep.spec.id << ',' << a.arm << ',' << rep.spec.data_law.descriptor() << ',' << rep.spec.n << ','
         << format_real(a.coverage) << ',' << format_real(a.mean_length) << ',' << format_real(a.median_length)
         << ',' << format_real(a.trimmed_mean_length) << ',' << a.infinite_count << ',' << rep.spec.seed << '\n';
}

namespace detail {

inline void write_aligned(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << "  ";
      const std::size_t pad = width[c] - r[c].size();
      if (c < 2) os << r[c] << std::string(c + 1 < r.size() ? pad : 0, ' ');
      else os << std::string(pad, ' ') << r[c];
    }
    os << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      os << std::string(total, '-') << '\n';
    }
  }
}

inline std::string fixed3(double v) {
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

// Aligned text in the layout of the printed tables: one row per experiment, a
// coverage/length column pair per arm. Lengths are mean lengths (areas for
// bivariate runs) with the median alongside.
inline void write_table(std::ostream& os, std::span<const ExperimentReport> reports, const std::string& title = {}) {
  if (!title.empty()) os << title << '\n';
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"law", "n"};
  if (!reports.empty()) {
    for (const auto& a : reports.front().arms) {
      const std::string unit = reports.front().spec.kind == ExperimentKind::bivariate ? "area" : "length";
      head.push_back("coverage(" + a.arm + ")");
      head.push_back(unit + "(" + a.arm + ")");
      head.push_back("median");
    }
  }
  rows.push_back(head);
  for (const auto& rep : reports) {
    std::vector<std::string> r{rep.spec.data_law.label(), std::to_string(rep.spec.n)};
    for (const auto& a : rep.arms) {
      r.push_back(detail::fixed3(a.coverage));
      r.push_back(detail::fixed3(a.mean_length));
      r.push_back(detail::fixed3(a.median_length));
    }
    rows.push_back(std::move(r));
  }
  detail::write_aligned(os, rows);
}

inline void write_diagnostics_csv(std::ostream& os, const DiagnosticRecord& rec) {
  os << "panel,statistic,value,bin,bin_lo,bin_hi,count\n";
  for (const auto& p : rec.panels) {
    const double width = (p.hi - p.lo) / static_cast<double>(p.counts.size());
    for (std::size_t b = 0; b < p.counts.size(); ++b)
      os << '"' << p.label << "\"," << p.statistic_name << ',' << format_real(p.statistic) << ',' << b << ','
         << format_real(p.lo + width * static_cast<double>(b)) << ','
         << format_real(p.lo + width * static_cast<double>(b + 1)) << ',' << p.counts[b] << '\n';
  }
}

inline void write_diagnostics_table(std::ostream& os, const DiagnosticRecord& rec) {
  std::vector<std::vector<std::string>> rows{{"panel", "statistic", "value"}};
  for (const auto& p : rec.panels) rows.push_back({p.label, p.statistic_name, format_real(p.statistic)});
  detail::write_aligned(os, rows);
}

}  // namespace skewpivot
