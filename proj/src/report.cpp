#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <utility>

#include "error.hpp"
#include "json.hpp"

namespace awf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void sort_rows(std::vector<EvalRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const EvalRow& a, const EvalRow& b) { return a.id < b.id; });
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void write_metrics_csv(std::vector<EvalRow> rows, const std::string& path) {
  sort_rows(rows);
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorKind::io, "report: cannot open ", path);
  out << "pair,mi,en,sd,sf,viff,scd\n";
  for (const EvalRow& r : rows) {
    out << r.id << ',' << num(r.m.mi) << ',' << num(r.m.en) << ','
        << num(r.m.sd) << ',' << num(r.m.sf) << ',' << num(r.m.viff) << ','
        << num(r.m.scd) << '\n';
  }
  out.flush();
  require(out.good(), ErrorKind::io, "report: write failed for ", path);
}

void write_metrics_summary(std::vector<EvalRow> rows,
                           const std::string& path) {
  sort_rows(rows);
  nlohmann::json j;
  j["pairs"] = rows.size();
  nlohmann::json m = nlohmann::json::object();
  const std::pair<const char*, double MetricReport::*> cols[] = {
      {"mi", &MetricReport::mi},     {"en", &MetricReport::en},
      {"sd", &MetricReport::sd},     {"sf", &MetricReport::sf},
      {"viff", &MetricReport::viff}, {"scd", &MetricReport::scd}};
  if (!rows.empty()) {
    for (const auto& [name, field] : cols) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (const EvalRow& r : rows) v.push_back(r.m.*field);
      m[name] = {{"mean", mean_of(v)}, {"median", median_of(std::move(v))}};
    }
  }
  j["metrics"] = std::move(m);
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorKind::io, "report: cannot open ", path);
  out << j.dump(2) << '\n';
  out.flush();
  require(out.good(), ErrorKind::io, "report: write failed for ", path);
}

}  // namespace awf
