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

#ifndef EMOFLOW_HASH_H_
#define EMOFLOW_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace emoflow {

// 64-bit FNV-1a. Stable across platforms and runs; used for cache keys and
// dataset fingerprints, never for anything security-relevant.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  // Length-prefixed field, so ("ab","c") and ("a","bc") hash differently.
  Fnv1a& field(std::string_view bytes) {
    update(std::to_string(bytes.size()));
    update(":");
    return update(bytes);
  }

  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t value);

inline std::string hash_hex(std::string_view bytes) {
  return Fnv1a().update(bytes).hex();
}

}  // namespace emoflow

#endif  // EMOFLOW_HASH_H_
