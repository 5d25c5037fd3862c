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

// Command implementations behind the bnpnorm tool: manifests, artifacts and
// exit codes. Kept in the library so they can be tested without a process.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bnpnorm/csv.hpp"
#include "bnpnorm/errors.hpp"
#include "bnpnorm/laws.hpp"
#include "bnpnorm/mahalanobis.hpp"
#include "bnpnorm/rbtest.hpp"
#include "bnpnorm/report.hpp"
#include "bnpnorm/rng.hpp"
#include "bnpnorm/simgen.hpp"
#include "bnpnorm/specialfn.hpp"

namespace bnpnorm {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNumerical = 3,
  kExitBadArguments = 4,
};

[[nodiscard]] inline int exit_code_for(const Error& e) noexcept {
  const std::string_view kind = e.kind();
  if (kind == "InvalidConfig") return kExitBadArguments;
  if (kind == "SingularCovariance" || kind == "DegenerateWeights" ||
      kind == "DegenerateGrid" || kind == "DomainError") {
    return kExitNumerical;
  }
  return kExitInputError;
}

struct GeneratorSpec {
  std::string family;
  std::size_t m = 2;
  std::size_t n = 50;
  std::uint64_t seed = 0;
};

struct EmitFlags {
  bool report = true;
  bool qq = false;
  bool densities = false;
  bool distances = false;
};

struct RunManifest {
  std::optional<std::string> input;
  std::optional<GeneratorSpec> generator;
  TestConfig config;
  std::string out_dir = ".";
  EmitFlags emit;

  void validate() const {
    if (input.has_value() == generator.has_value()) {
      throw InvalidConfig("exactly one of an input file or a generator is required");
    }
    config.validate();
  }
};

// Stream reserved for generated data; replicate streams count up from 0.
inline constexpr std::uint64_t kDataStream = 0xda7aULL << 48;

// "report,qq,densities,distances" in any order; empty selects nothing extra.
[[nodiscard]] inline EmitFlags parse_emit(std::string_view list) {
  EmitFlags flags;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item = detail::trim(list.substr(start, comma - start));
    if (item == "qq") {
      flags.qq = true;
    } else if (item == "densities") {
      flags.densities = true;
    } else if (item == "distances") {
      flags.distances = true;
    } else if (item != "report" && !item.empty()) {
      throw InvalidConfig("unknown emit flag '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return flags;
}

// name:p1,p2 with name in normal, exponential, cauchy, t, chi2, lognormal.
// Missing parameters take the standard values (normal:0,1 and so on).
[[nodiscard]] inline UnivariateLaw parse_law(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string name(detail::trim(text.substr(0, colon)));
  std::vector<double> p;
  if (colon != std::string_view::npos) {
    for (const auto field : detail::split_fields(text.substr(colon + 1))) {
      double v = 0.0;
      if (!detail::parse_number(field, v)) {
        throw InvalidConfig("bad law parameter '" + std::string(field) + "'");
      }
      p.push_back(v);
    }
  }
  const auto arg = [&p](std::size_t i, double fallback) {
    return i < p.size() ? p[i] : fallback;
  };
  const auto at_most = [&p, &name](std::size_t k) {
    if (p.size() > k) throw InvalidConfig("too many parameters for " + name);
  };
  UnivariateLaw law;
  if (name == "normal") {
    at_most(2);
    law = NormalLaw{arg(0, 0.0), arg(1, 1.0)};
  } else if (name == "exponential") {
    at_most(1);
    law = ExponentialLaw{arg(0, 1.0)};
  } else if (name == "cauchy") {
    at_most(2);
    law = CauchyLaw{arg(0, 0.0), arg(1, 1.0)};
  } else if (name == "t") {
    at_most(3);
    law = StudentTLaw{arg(0, 1.0), arg(1, 0.0), arg(2, 1.0)};
  } else if (name == "chi2") {
    at_most(1);
    law = ChiSquareLaw{arg(0, 1.0)};
  } else if (name == "lognormal") {
    at_most(2);
    law = LogNormalLaw{arg(0, 0.0), arg(1, 1.0)};
  } else {
    throw InvalidConfig("unknown law '" + name + "'");
  }
  try {
    validate(law);
  } catch (const InvalidSpec& e) {
    throw InvalidConfig(e.what());
  }
  return law;
}

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("manifest field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// Reads a manifest object. Keys: input | generate{family,m,n,seed}, out,
// emit (list of names), a, N, r1, r2, M, i0, seed, threads, base.
[[nodiscard]] inline RunManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("manifest must be a JSON object");
  RunManifest mf;
  bool i0_given = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "input") {
      mf.input = detail::json_get<std::string>(j, "input");
    } else if (key == "generate") {
      GeneratorSpec g;
      if (!value.is_object()) throw InvalidConfig("'generate' must be an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "family") {
          g.family = detail::json_get<std::string>(value, "family");
        } else if (gk == "m") {
          g.m = detail::json_get<std::size_t>(value, "m");
        } else if (gk == "n") {
          g.n = detail::json_get<std::size_t>(value, "n");
        } else if (gk == "seed") {
          g.seed = detail::json_get<std::uint64_t>(value, "seed");
        } else {
          throw InvalidConfig("unknown generator field '" + gk + "'");
        }
      }
      mf.generator = g;
    } else if (key == "out") {
      mf.out_dir = detail::json_get<std::string>(j, "out");
    } else if (key == "emit") {
      std::string list;
      for (const auto& item : detail::json_get<std::vector<std::string>>(j, "emit")) {
        list += item + ",";
      }
      mf.emit = parse_emit(list);
    } else if (key == "a") {
      mf.config.a = detail::json_get<double>(j, "a");
    } else if (key == "N") {
      mf.config.N = detail::json_get<std::size_t>(j, "N");
    } else if (key == "r1") {
      mf.config.r1 = detail::json_get<std::size_t>(j, "r1");
    } else if (key == "r2") {
      mf.config.r2 = detail::json_get<std::size_t>(j, "r2");
    } else if (key == "M") {
      mf.config.M = detail::json_get<std::size_t>(j, "M");
    } else if (key == "i0") {
      mf.config.i0 = detail::json_get<std::size_t>(j, "i0");
      i0_given = true;
    } else if (key == "seed") {
      mf.config.seed = detail::json_get<std::uint64_t>(j, "seed");
    } else if (key == "threads") {
      mf.config.threads = detail::json_get<unsigned>(j, "threads");
    } else if (key == "base") {
      mf.config.base = parse_law(detail::json_get<std::string>(j, "base"));
    } else {
      throw InvalidConfig("unknown manifest field '" + key + "'");
    }
  }
  if (!i0_given) mf.config.i0 = TestConfig::default_i0(mf.config.M);
  return mf;
}

[[nodiscard]] inline DataMatrix generate_data(const GeneratorSpec& g) {
  RngStream rng(g.seed, kDataStream);
  return generate(named_spec(g.family, g.m, g.n), rng);
}

namespace detail {

inline std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write '" + path.string() + "'");
  return out;
}

inline void prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw InvalidConfig("cannot create output directory '" + dir + "'");
  }
}

}  // namespace detail

// Q-Q pairs: i, sorted squared distance, chi2_m quantile at (i - 0.5) / n.
inline void write_qq(std::ostream& out, const SquaredDistances& d, DegreesOfFreedom m) {
  std::vector<double> sorted = d.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  out << "index,squared_distance,chi2_quantile\n";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    out << i + 1 << ',' << format_double(sorted[i]) << ','
        << format_double(chi2_quantile(p, m)) << '\n';
  }
}

inline void write_densities(std::ostream& out, const RBReport& report) {
  out << "sample,replicate,distance\n";
  for (const DistanceSample* s : {&report.prior_distances, &report.posterior_distances}) {
    const char* label = s->label == DistanceSample::Label::prior ? "prior" : "posterior";
    for (std::size_t k = 0; k < s->values.size(); ++k) {
      out << label << ',' << k << ',' << format_double(s->values[k]) << '\n';
    }
  }
}

inline void write_distances(std::ostream& out, const SquaredDistances& d) {
  out << "row,squared_distance\n";
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    out << i + 1 << ',' << format_double(d.values[i]) << '\n';
  }
}

// Runs the test and writes the requested artifacts. Errors are reported on
// `err` as "<ErrorName>: <message>" and mapped to an exit code.
inline int cmd_test(const RunManifest& manifest, std::ostream& err) {
  try {
    manifest.validate();
    const DataMatrix data =
        manifest.input ? ingest_csv(*manifest.input) : generate_data(*manifest.generator);
    const DegreesOfFreedom m(static_cast<int>(data.m()));
    const SquaredDistances d = squared_mahalanobis(data);
    const RBReport report = run_test_on_distances(d, m, manifest.config);

    std::vector<std::string> notes;
    if (manifest.generator) {
      notes = family_notes(named_family(manifest.generator->family, manifest.generator->m));
    }
    for (const auto& w : report.diagnostics.warnings) err << "warning: " << w << '\n';

    detail::prepare_out_dir(manifest.out_dir);
    const std::filesystem::path dir(manifest.out_dir);
    if (manifest.emit.report) {
      auto out = detail::open_artifact(dir / "report.json");
      out << report_json(report, manifest.config, notes).dump(2) << '\n';
    }
    if (manifest.emit.qq) {
      auto out = detail::open_artifact(dir / "qq.csv");
      write_qq(out, d, m);
    }
    if (manifest.emit.densities) {
      auto out = detail::open_artifact(dir / "densities.csv");
      write_densities(out, report);
    }
    if (manifest.emit.distances) {
      auto out = detail::open_artifact(dir / "distances.csv");
      write_distances(out, d);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// Writes a generated sample as CSV with columns x1..xm.
inline int cmd_generate(const GeneratorSpec& spec, const std::string& path,
                        std::ostream& err) {
  try {
    const DataMatrix data = generate_data(spec);
    std::vector<std::string> header;
    for (std::size_t j = 1; j <= data.m(); ++j) header.push_back("x" + std::to_string(j));
    write_csv(path, data, header);
    return kExitOk;
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// Families x dimensions x concentrations, each cell repeated on fresh data.
struct SimulationGrid {
  std::vector<std::string> families;
  std::vector<std::size_t> dims;
  std::vector<double> concentrations;
  std::size_t replicates = 20;
  std::size_t n = 50;
  TestConfig config;  // a is taken from the grid
  std::string out_dir = ".";

  void validate() const {
    if (replicates < 1) throw InvalidConfig("replicates must be >= 1");
    if (n < 2) throw InvalidConfig("n must be >= 2");
    const auto& known = named_families();
    for (const auto& f : families) {
      if (std::find(known.begin(), known.end(), f) == known.end()) {
        throw InvalidConfig("unknown family '" + f + "'");
      }
    }
    for (const auto m : dims) {
      if (m < 1) throw InvalidConfig("dimensions must be >= 1");
    }
    for (const double a : concentrations) {
      if (!(a > 0.0) || !std::isfinite(a)) throw InvalidConfig("a must be > 0");
    }
  }
};

struct CellResult {
  std::string family;
  std::size_t m = 0;
  double a = 0.0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t completed = 0;
  double rb_median = 0.0;
  double strength_median = 0.0;
  double rb_mean = 0.0;
  std::size_t rb_above_one = 0;
  std::size_t rb_below_one = 0;
  std::string status = "ok";
};

namespace detail {

// FNV-1a; std::hash is not stable across standard libraries.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

// Seed of the data set used for replicate `rep` of (family, m). It does not
// depend on a, so every concentration in a row sees the same samples.
[[nodiscard]] constexpr std::uint64_t cell_data_seed(std::uint64_t seed,
                                                     std::string_view family,
                                                     std::size_t m,
                                                     std::size_t rep) noexcept {
  return mix_seed(mix_seed(mix_seed(seed ^ detail::fnv1a(family)) + m) + rep);
}

[[nodiscard]] inline CellResult run_cell(const std::string& family, std::size_t m,
                                         double a, const SimulationGrid& grid) {
  CellResult cell;
  cell.family = family;
  cell.m = m;
  cell.a = a;
  cell.n = grid.n;
  cell.replicates = grid.replicates;
  std::vector<double> rbs;
  std::vector<double> strengths;
  std::string first_failure;
  for (std::size_t rep = 0; rep < grid.replicates; ++rep) {
    const std::uint64_t data_seed = cell_data_seed(grid.config.seed, family, m, rep);
    try {
      const DataMatrix data = generate_data(GeneratorSpec{family, m, grid.n, data_seed});
      TestConfig config = grid.config;
      config.a = a;
      config.seed = mix_seed(data_seed);
      const RBReport r = run_test(data, config);
      rbs.push_back(r.rb_at_zero);
      strengths.push_back(r.strength);
      if (r.rb_at_zero > 1.0) ++cell.rb_above_one;
      if (r.rb_at_zero < 1.0) ++cell.rb_below_one;
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = e.kind();
    }
  }
  cell.completed = rbs.size();
  if (!rbs.empty()) {
    double sum = 0.0;
    for (const double r : rbs) sum += r;
    cell.rb_mean = sum / static_cast<double>(rbs.size());
  }
  cell.rb_median = detail::median(rbs);
  cell.strength_median = detail::median(strengths);
  if (!first_failure.empty()) {
    cell.status = (rbs.empty() ? "failed:" : "partial:") + first_failure;
  }
  return cell;
}

inline void write_table_header(std::ostream& out) {
  out << "family,m,a,n,replicates,completed,rb,strength,rb_mean,rb_above_1,"
         "rb_below_1,status\n";
}

inline void write_table_row(std::ostream& out, const CellResult& c) {
  const auto num = [](double v) { return std::isnan(v) ? std::string("NA") : format_double(v); };
  out << c.family << ',' << c.m << ',' << format_double(c.a) << ',' << c.n << ','
      << c.replicates << ',' << c.completed << ',' << num(c.rb_median) << ','
      << num(c.strength_median) << ',' << num(c.rb_mean) << ',' << c.rb_above_one
      << ',' << c.rb_below_one << ',' << c.status << '\n';
}

// Writes table.csv with one row per (family, m, a) cell, medians over the
// replicates. Cells that fail are marked in the status column.
inline int cmd_simulate(const SimulationGrid& grid, std::ostream& err) {
  try {
    grid.validate();
    grid.config.validate();
    detail::prepare_out_dir(grid.out_dir);
    auto out = detail::open_artifact(std::filesystem::path(grid.out_dir) / "table.csv");
    write_table_header(out);
    for (const auto& family : grid.families) {
      for (const auto m : grid.dims) {
        for (const double a : grid.concentrations) {
          const CellResult cell = run_cell(family, m, a, grid);
          write_table_row(out, cell);
          out.flush();
          err << family << " m=" << m << " a=" << format_double(a) << ": rb "
              << format_double(cell.rb_median) << " (" << cell.status << ")\n";
        }
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace bnpnorm
