// Copyright 2026 The PeGS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEGS_CLI_H_
#define PEGS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace pegs {

// Runs one `pegs` subcommand. `args` excludes the program name. Returns the
// process exit code: 0 on success, otherwise the ErrorCode of the failure,
// reported as a one-line JSON object on `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace pegs

#endif  // PEGS_CLI_H_
