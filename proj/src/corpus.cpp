// Copyright 2026 The FormGraph Authors.
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

#include "formgraph/corpus.hpp"

#include <algorithm>
#include <json.hpp>

#include "formgraph/error.hpp"

namespace formgraph {
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("missing directory " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Corpus load_funsd_corpus(const fs::path& root) {
  Corpus c;
  for (const auto& [split, sub] : {std::pair{"train", "training_data"}, std::pair{"test", "testing_data"}}) {
    auto& docs = c[split];
    for (const auto& f : json_files(root / sub / "annotations")) docs.push_back(load_funsd(f));
  }
  return c;
}

Corpus load_naf_corpus(const fs::path& root) {
  nlohmann::json split;
  try {
    split = nlohmann::json::parse(read_text_file(root / "train_valid_test_split.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed NAF split file: ") + e.what());
  }
  if (!split.is_object()) throw DataError("NAF split file must be an object");
  Corpus c;
  for (const auto& [name, groups] : split.items()) {
    auto& docs = c[name];
    if (!groups.is_object()) throw DataError("NAF split '" + name + "' must map groups to image lists");
    for (const auto& [group, images] : groups.items()) {
      for (const auto& image : images) {
        if (!image.is_string()) throw DataError("NAF split lists a non-string image name");
        const fs::path stem = fs::path(image.get<std::string>()).stem();
        docs.push_back(load_naf(root / "groups" / group / (stem.string() + ".json")));
      }
    }
  }
  return c;
}

std::map<std::string, int> corpus_counts(const Corpus& corpus) {
  std::map<std::string, int> out;
  int total = 0;
  for (const auto& [split, docs] : corpus) {
    out[split] = static_cast<int>(docs.size());
    total += static_cast<int>(docs.size());
  }
  out["total"] = total;
  return out;
}

}  // namespace formgraph
