#pragma once

#include <string>
#include <vector>

#include "metrics.hpp"

namespace awf {

struct EvalRow {
  std::string id;
  MetricReport m;
};

// CSV with header "pair,mi,en,sd,sf,viff,scd", one row per pair, sorted by
// pair id.
void write_metrics_csv(std::vector<EvalRow> rows, const std::string& path);

// JSON object with the pair count and per-metric mean and median.
void write_metrics_summary(std::vector<EvalRow> rows, const std::string& path);

}  // namespace awf
