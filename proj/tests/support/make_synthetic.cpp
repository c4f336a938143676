// Copyright 2026 The aoscnn Authors.
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

// Writes the bundled synthetic corpus and vector file:
//   make_synthetic <corpus.jsonl> <vectors.txt>

#include <cstdio>
#include <fstream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <corpus.jsonl> <vectors.txt>\n", argv[0]);
    return 1;
  }
  auto ds = aos::synthetic::generate();
  std::ofstream(argv[1], std::ios::binary) << ds.corpus_jsonl;
  std::ofstream(argv[2], std::ios::binary) << ds.vectors;
  return 0;
}
