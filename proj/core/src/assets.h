// Copyright 2026 The Dilemma Authors
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

#ifndef DILEMMA_SRC_ASSETS_H_
#define DILEMMA_SRC_ASSETS_H_

#include <string_view>

namespace dilemma::assets {

// Text assets compiled in from core/assets/*.txt, without the file's
// trailing newline. Throws ConfigError for an unknown name.
std::string_view Get(std::string_view name);

}  // namespace dilemma::assets

#endif  // DILEMMA_SRC_ASSETS_H_
