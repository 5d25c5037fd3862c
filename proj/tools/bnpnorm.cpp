// Copyright 2026 The bnpnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bnpnorm: Bayesian nonparametric test of multivariate normality.
//
//   bnpnorm test --input data.csv --a 15 --out results --emit qq,densities
//   bnpnorm test --generate normal_A --gen-m 2 --gen-n 50 --seed 7
//   bnpnorm simulate --families normal_A,nmix --dims 2,3 --a 1,15 --out sim
//   bnpnorm generate --family t3 --m 3 --n 50 --out sample.csv

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bnpnorm/commands.hpp"

namespace {

using bnpnorm::InvalidConfig;

struct TestFlags {
  std::string config_path;
  std::string input;
  std::string family;
  std::size_t gen_m = 2;
  std::size_t gen_n = 50;
  std::uint64_t gen_seed = 0;
  std::string emit;
  std::string base;
};

void add_tuning_flags(CLI::App* cmd, bnpnorm::TestConfig& config) {
  cmd->add_option("--N", config.N, "atoms per Dirichlet process approximation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--r1", config.r1, "prior replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--r2", config.r2, "posterior replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--M", config.M, "number of prior quantile bins")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--i0", config.i0, "bins forming the zero region (default ceil(0.05 M))");
  cmd->add_option("--seed", config.seed, "master seed");
  cmd->add_option("--threads", config.threads, "worker threads, 0 = all cores");
}

template <typename T>
void override_if(const CLI::App* cmd, const char* flag, T& target, const T& value) {
  if (cmd->count(flag) > 0) target = value;
}

bnpnorm::RunManifest build_manifest(const CLI::App* cmd, const TestFlags& f,
                                    const bnpnorm::TestConfig& cli,
                                    const std::string& out_dir) {
  bnpnorm::RunManifest mf;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw InvalidConfig("cannot read manifest '" + f.config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig(std::string("manifest is not valid JSON: ") + e.what());
    }
    mf = bnpnorm::manifest_from_json(j);
  } else {
    mf.config.i0 = bnpnorm::TestConfig::default_i0(mf.config.M);
  }
  auto& c = mf.config;
  override_if(cmd, "--a", c.a, cli.a);
  override_if(cmd, "--N", c.N, cli.N);
  override_if(cmd, "--r1", c.r1, cli.r1);
  override_if(cmd, "--r2", c.r2, cli.r2);
  if (cmd->count("--M") > 0) {
    c.M = cli.M;
    if (cmd->count("--i0") == 0) c.i0 = bnpnorm::TestConfig::default_i0(c.M);
  }
  override_if(cmd, "--i0", c.i0, cli.i0);
  override_if(cmd, "--seed", c.seed, cli.seed);
  override_if(cmd, "--threads", c.threads, cli.threads);
  if (cmd->count("--base") > 0) c.base = bnpnorm::parse_law(f.base);
  if (cmd->count("--out") > 0) mf.out_dir = out_dir;
  if (cmd->count("--emit") > 0) mf.emit = bnpnorm::parse_emit(f.emit);

  if (cmd->count("--input") > 0) {
    mf.input = f.input;
    mf.generator.reset();
  }
  if (cmd->count("--generate") > 0) {
    bnpnorm::GeneratorSpec g{f.family, f.gen_m, f.gen_n,
                             cmd->count("--gen-seed") > 0 ? f.gen_seed : c.seed};
    mf.generator = g;
    mf.input.reset();
  }
  return mf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto field : bnpnorm::detail::split_fields(s)) {
    if (!field.empty()) out.emplace_back(field);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric test of multivariate normality"};
  app.require_subcommand(1);

  bnpnorm::TestConfig cli;
  TestFlags tf;
  std::string out_dir = ".";

  auto* test = app.add_subcommand("test", "run the test on one data set");
  auto* input = test->add_option("--input", tf.input, "CSV file of observations (rows)");
  auto* gen = test->add_option("--generate", tf.family, "generate data from a named family");
  input->excludes(gen);
  test->add_option("--gen-m", tf.gen_m, "dimension of generated data")->needs(gen);
  test->add_option("--gen-n", tf.gen_n, "sample size of generated data")->needs(gen);
  test->add_option("--gen-seed", tf.gen_seed, "seed of generated data (default --seed)")
      ->needs(gen);
  test->add_option("--a", cli.a, "Dirichlet process concentration");
  add_tuning_flags(test, cli);
  test->add_option("--base", tf.base,
                   "prior base law instead of chi2(m), e.g. normal:0,1");
  test->add_option("--out", out_dir, "output directory");
  test->add_option("--emit", tf.emit, "extra artifacts: qq,densities,distances");
  test->add_option("--config", tf.config_path, "JSON manifest; flags override it");

  bnpnorm::SimulationGrid grid;
  std::string families;
  std::string dims;
  std::string concentrations;
  auto* sim = app.add_subcommand("simulate", "run a grid of simulated tests");
  sim->add_option("--families", families, "comma-separated family names");
  sim->add_option("--dims", dims, "comma-separated dimensions");
  sim->add_option("--a", concentrations, "comma-separated concentrations");
  sim->add_option("--replicates", grid.replicates, "data sets per cell");
  sim->add_option("--n", grid.n, "sample size");
  add_tuning_flags(sim, grid.config);
  sim->add_option("--out", grid.out_dir, "output directory");

  bnpnorm::GeneratorSpec gspec;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a sample from a named family");
  generate->add_option("--family", gspec.family, "family name")->required();
  generate->add_option("--m", gspec.m, "dimension");
  generate->add_option("--n", gspec.n, "sample size");
  generate->add_option("--seed", gspec.seed, "seed");
  generate->add_option("--out", gen_out, "output CSV path")->required();

  std::string family_help = "families:";
  for (const auto& f : bnpnorm::named_families()) family_help += " " + f;
  app.footer(family_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return bnpnorm::kExitBadArguments;
  }

  try {
    if (*test) {
      return bnpnorm::cmd_test(build_manifest(test, tf, cli, out_dir), std::cerr);
    }
    if (*sim) {
      grid.families = split_list(families);
      for (const auto& d : split_list(dims)) {
        grid.dims.push_back(static_cast<std::size_t>(std::stoul(d)));
      }
      for (const auto& a : split_list(concentrations)) grid.concentrations.push_back(std::stod(a));
      if (sim->count("--M") > 0 && sim->count("--i0") == 0) {
        grid.config.i0 = bnpnorm::TestConfig::default_i0(grid.config.M);
      }
      return bnpnorm::cmd_simulate(grid, std::cerr);
    }
    return bnpnorm::cmd_generate(gspec, gen_out, std::cerr);
  } catch (const bnpnorm::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    return bnpnorm::exit_code_for(e);
  } catch (const std::logic_error& e) {
    std::cerr << "InvalidConfig: " << e.what() << '\n';
    return bnpnorm::kExitBadArguments;
  }
}
