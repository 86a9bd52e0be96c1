#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "nomamec/bench.hpp"

namespace nomamec::bench {

std::string reference_run(const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows)
    if (r.run == "exhaustive") return "exhaustive";
  return "proposed";
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) return {};
  for (const ResultRow& r : rows)
    if (r.figure != rows.front().figure) throw ModelError("rows mix figure tags");
  const std::string ref = reference_run(rows);

  // Point: everything but the run and the seed.
  using Point = std::tuple<Shape, double, double, double>;
  auto point_of = [](const ResultRow& r) { return Point{r.shape, r.sweep, r.weight_e, r.data_bits}; };

  std::map<std::tuple<Point, std::uint64_t>, double> reference;
  for (const ResultRow& r : rows)
    if (r.run == ref) reference[{point_of(r), r.seed}] = r.medt;

  struct Acc {
    std::vector<double> values, gaps;
  };
  std::map<std::tuple<Point, std::string>, Acc> groups;
  std::vector<std::tuple<Point, std::string>> order;
  for (const ResultRow& r : rows) {
    const auto key = std::tuple{point_of(r), r.run};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    if (std::isfinite(r.medt)) it->second.values.push_back(r.medt);
    const auto ref_it = reference.find({point_of(r), r.seed});
    if (ref_it != reference.end() && std::isfinite(ref_it->second) && ref_it->second > 0.0 &&
        std::isfinite(r.medt))
      it->second.gaps.push_back((r.medt - ref_it->second) / ref_it->second);
  }

  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const Acc& a = groups.at(key);
    const auto& [point, run] = key;
    SummaryRow s;
    std::tie(s.shape, s.sweep, s.weight_e, s.data_bits) = point;
    s.run = run;
    s.count = a.values.size();
    if (s.count > 0) {
      double sum = 0.0;
      for (double v : a.values) sum += v;
      s.mean = sum / static_cast<double>(s.count);
      double sq = 0.0;
      for (double v : a.values) sq += (v - s.mean) * (v - s.mean);
      s.stddev = s.count > 1 ? std::sqrt(sq / static_cast<double>(s.count - 1)) : 0.0;
    } else {
      s.mean = s.stddev = std::numeric_limits<double>::quiet_NaN();
    }
    s.gap_count = a.gaps.size();
    double g = 0.0;
    for (double v : a.gaps) g += v;
    s.gap = s.gap_count ? g / static_cast<double>(s.gap_count) : std::numeric_limits<double>::quiet_NaN();
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::string(buf);
  };
  os << "n_ues,n_helpers,n_servers,n_rbs,sweep,weight_e,data_bits,run,count,mean_medt,std_medt,gap,gap_count\n";
  for (const SummaryRow& s : rows)
    os << s.shape[0] << ',' << s.shape[1] << ',' << s.shape[2] << ',' << s.shape[3] << ',' << num(s.sweep)
       << ',' << num(s.weight_e) << ',' << num(s.data_bits) << ',' << s.run << ',' << s.count << ','
       << num(s.mean) << ',' << num(s.stddev) << ',' << num(s.gap) << ',' << s.gap_count << '\n';
}

}  // namespace nomamec::bench
