// Copyright 2026 The BioFed Authors
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

#ifndef BIOFED_COMMON_LOG_HPP_
#define BIOFED_COMMON_LOG_HPP_

#include <spdlog/spdlog.h>

namespace biofed {

// Shared stderr logger. Level comes from BIOFED_LOG (trace, debug, info,
// warn, error, off); default is warn.
spdlog::logger& log();

}  // namespace biofed

#endif  // BIOFED_COMMON_LOG_HPP_
