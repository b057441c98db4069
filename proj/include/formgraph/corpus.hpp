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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "formgraph/document.hpp"

namespace formgraph {

// Split name -> parsed documents, in file-name order.
using Corpus = std::map<std::string, std::vector<Document>>;

// <root>/training_data/annotations/*.json as "train" and
// <root>/testing_data/annotations/*.json as "test".
Corpus load_funsd_corpus(const std::filesystem::path& root);

// <root>/train_valid_test_split.json maps split -> {group: [image names]};
// each document is <root>/groups/<group>/<stem>.json.
Corpus load_naf_corpus(const std::filesystem::path& root);

// Split name -> document count, plus "total".
std::map<std::string, int> corpus_counts(const Corpus& corpus);

}  // namespace formgraph
