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


#pragma once

#include <iosfwd>
#include <string>

#include "qkfe/config.hpp"

namespace qkfe {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
  kExitCapacity = 3,
};

struct CommandContext {
  std::string output_dir;  // resolved
  bool json = false;
  std::ostream* log = nullptr;  // summary lines; may be null
};

/// Runs one subcommand (moments, dos, thermo, thei, prep, gatecount) and
/// returns its exit code. Library errors map to codes by category; output
/// files are written only once their content is complete, except for an
/// aborted THEI trace, which is saved before exiting nonzero.
int run_command(const std::string& name, const RunConfig& config,
                const CommandContext& context);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& error);

}  // namespace qkfe
