// Copyright 2026 The ORL Authors.
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

// Command-line front end for the staged pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "orl/error.h"
#include "orl/log.h"
#include "orl/parallel.h"
#include "orl/pipeline.h"
#include "orl/synthetic.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* opt = cmd->add_option("--config", f.config, "pipeline config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--seed", f.seed, "root seed");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all CPUs)");
  cmd->add_option("--mode", f.mode, "training mode")
      ->check(CLI::IsMember({"byol", "orl", "multicrop"}));
}

orl::Pipeline make_pipeline(const CommonFlags& f) {
  orl::PipelineConfig cfg = orl::PipelineConfig::read(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.mode) cfg.train.mode = orl::parse_mode(*f.mode);
  return orl::Pipeline(std::move(cfg));
}

int run(int argc, char** argv) {
  CLI::App app{"Object-level representation learning pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only print warnings and errors");

  CommonFlags f;

  orl::SyntheticParams synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic shape dataset");
  add_common(gen, f, false);
  gen->add_option("--out", synth_out, "output directory")->required();
  gen->add_option("--count", synth.count, "number of images");
  gen->add_option("--size", synth.width, "image side in pixels");
  gen->add_option("--min-shapes", synth.min_shapes, "fewest shapes per image");
  gen->add_option("--max-shapes", synth.max_shapes, "most shapes per image");
  gen->add_flag("--two-color", synth.two_color, "one color per image, red or blue");

  auto* propose = app.add_subcommand("propose", "selective search + filtering");
  add_common(propose, f, true);

  std::string kind;
  auto* embed = app.add_subcommand("embed", "embed whole images or proposals");
  add_common(embed, f, true);
  embed->add_option("--kind", kind, "image or roi")
      ->required()
      ->check(CLI::IsMember({"image", "roi"}));

  auto* knn = app.add_subcommand("knn", "nearest-neighbor images");
  add_common(knn, f, true);
  auto* pairs = app.add_subcommand("pairs", "cross-image RoI correspondence");
  add_common(pairs, f, true);
  auto* train = app.add_subcommand("train", "train the dual network");
  add_common(train, f, true);

  std::optional<int> pair_count;
  auto* viz = app.add_subcommand("viz", "render correspondence montages");
  add_common(viz, f, true);
  viz->add_option("--pairs", pair_count, "number of pairs to render");

  auto* run_all = app.add_subcommand("run-all", "every stage in order");
  add_common(run_all, f, true);
  run_all->add_option("--pairs", pair_count, "number of pairs to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  orl::set_log_level(quiet ? orl::LogLevel::kWarning : orl::LogLevel::kInfo);

  if (gen->parsed()) {
    synth.height = synth.width;
    if (f.seed) synth.seed = *f.seed;
    const auto out = orl::write_synthetic(synth_out, synth, f.workers.value_or(0) > 0
                                                                ? *f.workers
                                                                : orl::default_workers());
    std::cout << out.manifest_path.string() << '\n';
    return kExitOk;
  }

  orl::Pipeline p = make_pipeline(f);
  if (propose->parsed()) {
    p.propose();
  } else if (embed->parsed()) {
    p.embed(kind == "image" ? orl::StoreKind::kImage : orl::StoreKind::kRoi);
  } else if (knn->parsed()) {
    p.knn();
  } else if (pairs->parsed()) {
    p.pairs();
  } else if (train->parsed()) {
    p.train();
  } else if (viz->parsed()) {
    p.viz(pair_count);
  } else if (run_all->parsed()) {
    p.propose();
    p.embed(orl::StoreKind::kImage);
    p.embed(orl::StoreKind::kRoi);
    p.knn();
    p.pairs();
    p.train();
    p.viz(pair_count);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const orl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const orl::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const orl::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
