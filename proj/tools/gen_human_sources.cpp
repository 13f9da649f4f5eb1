// Copyright 2026 The reveal Authors
// SPDX-License-Identifier: Apache-2.0
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

// Writes N synthetic human source records (JSONL) for the toy pipeline.
//   gen_human_sources --count 120 --seed 2022 --out data/human_sources.jsonl

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "reveal/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate synthetic human source records"};
  std::size_t count = 120;
  std::uint64_t seed = 2022;
  std::string out;
  app.add_option("--count", count, "number of records");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output JSONL")->required();
  CLI11_PARSE(app, argc, argv);

  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return 1;
  }
  for (std::size_t i = 0; i < count; ++i) f << reveal::synthetic::make_human_source(i, seed).dump() << '\n';
  return 0;
}
