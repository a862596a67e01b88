// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "reclab/config.hpp"
#include "reclab/csv.hpp"

namespace reclab {

struct NamedTable {
  std::string name;
  CsvTable table;
};

struct ExperimentOutput {
  Json report;
  std::vector<NamedTable> tables;
};

/// Runs the configured experiment. Results depend only on the config and
/// seed, never on the thread count.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Writes the report to `report_path` and each table to
/// `<stem>_<name>.csv` beside it. Returns the CSV paths written.
std::vector<std::string> write_outputs(const ExperimentOutput& output,
                                       const std::string& report_path);

}  // namespace reclab
