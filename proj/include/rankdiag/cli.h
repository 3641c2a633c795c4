// Copyright 2026 The Rankdiag Authors.
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

#ifndef RANKDIAG_CLI_H_
#define RANKDIAG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rankdiag {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line. args excludes the program name. Domain errors are
// reported on err as {"error": name, "message": text}.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

std::string ToolVersion();

}  // namespace rankdiag

#endif  // RANKDIAG_CLI_H_
