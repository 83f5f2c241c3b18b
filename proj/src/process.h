//
// Copyright 2026 The emoflow Authors
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
//

#ifndef EMOFLOW_SRC_PROCESS_H_
#define EMOFLOW_SRC_PROCESS_H_

#include <map>
#include <string>
#include <vector>

namespace emoflow {

// Runs argv[0] (PATH lookup) with the current environment plus extra_env,
// waits for it and returns its exit status (128 + n when killed by signal
// n). stdout/stderr are inherited.
int run_process(const std::vector<std::string>& argv,
                const std::map<std::string, std::string>& extra_env = {});

}  // namespace emoflow

#endif  // EMOFLOW_SRC_PROCESS_H_
