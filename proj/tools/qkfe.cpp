// Copyright 2026 The QKFE Authors
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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "qkfe/commands.hpp"
#include "qkfe/config.hpp"
#include "qkfe/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kernel-function expansion and thermal ensemble iteration laboratory"};
  app.set_version_flag("--version", std::string("qkfe ") + QKFE_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int threads = 0;
  bool json = false;
  app.add_option("--config,-c", config_path, "YAML configuration file");
  app.add_option("--set,-s", overrides, "Override a configuration key (key.path=value)")
      ->take_all();
  app.add_option("--out,-o", out_dir, "Output directory (default: config 'output', "
                                      "then $QKFE_OUTPUT_DIR, then .)");
  app.add_option("--threads,-j", threads, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", json, "Also write each table as JSON");

  for (const char* name : {"moments", "dos", "thermo", "thei", "prep", "gatecount"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("moments")->description("Fourier moment table (exact, stochastic or shot)");
  app.get_subcommand("dos")->description("Reconstructed density of states");
  app.get_subcommand("thermo")->description("Thermodynamic curve over a temperature grid");
  app.get_subcommand("thei")->description("Thermal ensemble iteration trace");
  app.get_subcommand("prep")->description("Finite-energy preparation ramp and energy trajectory");
  app.get_subcommand("gatecount")->description("Two-qubit gate count, closed form vs construction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qkfe::kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::string yaml;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw qkfe::InvalidArgument("cannot read config file '" + config_path + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      yaml = buf.str();
    }
    const qkfe::RunConfig config = qkfe::load_config(yaml, overrides);
    if (threads > 0) omp_set_num_threads(threads);

    qkfe::CommandContext ctx;
    ctx.json = json;
    ctx.log = &std::cout;
    if (!out_dir.empty()) {
      ctx.output_dir = out_dir;
    } else if (!config.output_dir.empty()) {
      ctx.output_dir = config.output_dir;
    } else if (const char* env = std::getenv("QKFE_OUTPUT_DIR"); env && *env) {
      ctx.output_dir = env;
    } else {
      ctx.output_dir = ".";
    }
    return qkfe::run_command(command, config, ctx);
  } catch (const std::exception& e) {
    std::cerr << "qkfe " << command << ": error: " << e.what() << '\n';
    return qkfe::exit_code_for(e);
  }
}
