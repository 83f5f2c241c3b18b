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

#ifndef EMOFLOW_SRC_UTF8_H_
#define EMOFLOW_SRC_UTF8_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace emoflow::utf8 {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point at pos and advances it. Malformed sequences yield
// kInvalid and advance a single byte.
char32_t decode(std::string_view s, std::size_t& pos);
void append(std::string& out, char32_t cp);

bool is_alpha(char32_t cp);
bool is_space(char32_t cp);
char32_t to_lower(char32_t cp);

}  // namespace emoflow::utf8

#endif  // EMOFLOW_SRC_UTF8_H_
