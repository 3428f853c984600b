// Copyright 2026 The gpmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner for the two-tank LODE-GP MPC benchmark. Runs one of the
// controller models (A: physical soft constraints, B: plus endpoint
// constraint, C: reference-band soft constraints) or sweeps all three, and
// writes traces plus a metrics table.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "gpmpc/experiment.hpp"

namespace {

void print_summary(const std::vector<std::pair<gpmpc::ModelVariant, gpmpc::MetricsReport>>& rows) {
  std::printf("%-22s", "");
  for (const auto& [model, metrics] : rows)
    std::printf("  Model (%s)", gpmpc::to_string(model).c_str());
  std::printf("\n");
  const auto line = [&](const char* name, auto get) {
    std::printf("%-22s", name);
    for (const auto& [model, metrics] : rows) std::printf("  %9.3g", get(metrics));
    std::printf("\n");
  };
  line("Control error", [](const gpmpc::MetricsReport& m) { return m.control_error; });
  line("Mean control input", [](const gpmpc::MetricsReport& m) { return m.mean_control_input; });
  line("Constraint error", [](const gpmpc::MetricsReport& m) { return m.constraint_violation; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed GP MPC for the nonlinear two-tank system"};

  std::string config_path;
  std::string model_name;
  std::string out_dir;
  bool dump_algebra = false;
  bool sweep = false;
  unsigned seed = 0;
  bool seed_given = false;

  app.add_option("--config", config_path, "Configuration file (key/value with [sections])")
      ->check(CLI::ExistingFile);
  app.add_option("--model", model_name, "Controller model: A, B or C");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--dump-algebra", dump_algebra, "Write D, W, V of the Smith form to algebra.txt");
  app.add_flag("--sweep", sweep, "Run all three models and print a summary table");
  app.add_option("--seed", seed, "Seed recorded in the run configuration")
      ->each([&](const std::string&) { seed_given = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    gpmpc::ExperimentConfig config;
    if (!config_path.empty()) config = gpmpc::load_config(config_path);
    if (!model_name.empty()) config.model = gpmpc::model_variant_from_string(model_name);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed_given) config.seed = seed;

    std::vector<gpmpc::ModelVariant> models;
    if (sweep) {
      models = {gpmpc::ModelVariant::A, gpmpc::ModelVariant::B, gpmpc::ModelVariant::C};
    } else {
      models = {config.model};
    }

    std::vector<std::pair<gpmpc::ModelVariant, gpmpc::MetricsReport>> rows;
    for (const auto model : models) {
      gpmpc::ExperimentConfig run_config = config;
      run_config.model = model;
      const gpmpc::ExperimentResult result = gpmpc::run_experiment(run_config);
      rows.emplace_back(model, result.metrics);
      std::printf("model %s: trace written to %s\n", gpmpc::to_string(model).c_str(),
                  result.trace_path.c_str());
      if (result.trace.control_clamps > 0)
        std::fprintf(stderr, "warning: model %s clamped the posterior control on %ld steps\n",
                     gpmpc::to_string(model).c_str(), result.trace.control_clamps);
      if (result.trace.clamp_events > 0)
        std::fprintf(stderr, "warning: model %s clamped plant levels %ld times\n",
                     gpmpc::to_string(model).c_str(), result.trace.clamp_events);
      if (dump_algebra) {
        const std::string dump = gpmpc::algebra_dump(result.smith);
        std::filesystem::create_directories(config.out_dir);
        std::ofstream out(config.out_dir + "/algebra.txt");
        out << dump;
        std::cout << dump;
        dump_algebra = sweep ? false : dump_algebra;  // identical for all models
      }
    }

    std::filesystem::create_directories(config.out_dir);
    gpmpc::write_metrics_csv(config.out_dir + "/metrics.csv", rows);
    print_summary(rows);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
