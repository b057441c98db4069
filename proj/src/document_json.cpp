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

#include <json.hpp>

#include "formgraph/document.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "formgraph-document";
constexpr int kVersion = 1;

ojson box_to_json(const BBox& b) { return ojson::array({b.x1, b.y1, b.x2, b.y2}); }

BBox box_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("box must be [x1, y1, x2, y2]");
  BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw DataError("invalid box");
  return b;
}

ojson line_to_json(const TextLine& l) {
  ojson j;
  j["id"] = l.id;
  j["bbox"] = box_to_json(l.bbox);
  j["confidence"] = l.confidence;
  j["class_scores"] = l.class_scores;
  if (l.text) j["text"] = *l.text;
  return j;
}

TextLine line_from_json(const ojson& j) {
  TextLine l;
  l.id = j.at("id").get<int>();
  l.bbox = box_from_json(j.at("bbox"));
  l.confidence = j.at("confidence").get<double>();
  l.class_scores = j.at("class_scores").get<std::vector<double>>();
  if (j.contains("text")) l.text = j.at("text").get<std::string>();
  return l;
}

ojson pairs_to_json(const std::vector<EntityPair>& pairs) {
  ojson arr = ojson::array();
  for (auto [a, b] : pairs) arr.push_back(ojson::array({a, b}));
  return arr;
}

std::vector<EntityPair> pairs_from_json(const ojson& j) {
  std::vector<EntityPair> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw DataError("pair must be [a, b]");
    out.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return out;
}

}  // namespace

std::string document_to_json(const Document& doc) {
  ojson j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["name"] = doc.name;
  j["image_width"] = doc.image_width;
  j["image_height"] = doc.image_height;
  j["class_set"] = doc.class_set.labels();
  j["lines"] = ojson::array();
  for (const auto& l : doc.lines) j["lines"].push_back(line_to_json(l));
  j["gt_lines"] = ojson::array();
  for (const auto& l : doc.gt_lines) j["gt_lines"].push_back(line_to_json(l));
  j["gt_entities"] = ojson::array();
  for (const auto& e : doc.gt_entities) {
    j["gt_entities"].push_back({{"line_ids", e.line_ids}, {"class", doc.class_set.label(e.label)}});
  }
  j["gt_relationships"] = pairs_to_json(doc.gt_relationships);
  j["gt_links"] = pairs_to_json(doc.gt_links);
  return j.dump(1) + "\n";
}

Document document_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw DataError(std::string("malformed document JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw DataError("not a formgraph document");
    if (j.value("version", 0) != kVersion) throw DataError("unsupported document version");
    Document doc;
    doc.name = j.value("name", "");
    doc.image_width = j.at("image_width").get<double>();
    doc.image_height = j.at("image_height").get<double>();
    doc.class_set = ClassSet(j.at("class_set").get<std::vector<std::string>>());
    for (const auto& l : j.at("lines")) doc.lines.push_back(line_from_json(l));
    for (const auto& l : j.at("gt_lines")) doc.gt_lines.push_back(line_from_json(l));
    for (const auto& e : j.at("gt_entities")) {
      Entity ent;
      ent.line_ids = e.at("line_ids").get<std::vector<int>>();
      ent.label = doc.class_set.index_of(e.at("class").get<std::string>());
      doc.gt_entities.push_back(std::move(ent));
    }
    doc.gt_relationships = normalize_pairs(pairs_from_json(j.at("gt_relationships")));
    doc.gt_links = pairs_from_json(j.value("gt_links", ojson::array()));
    validate_document(doc);
    return doc;
  } catch (const ojson::exception& e) {
    throw DataError(std::string("document JSON: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("document JSON: ") + e.what());
  }
}

void save_document(const Document& doc, const std::filesystem::path& path) {
  write_text_file(path, document_to_json(doc));
}

Document load_any_document(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  const std::string name = path.stem().string();
  if (j.is_object() && j.contains("form")) return parse_funsd(text, name);
  if (j.is_object() && (j.contains("textBBs") || j.contains("fieldBBs"))) return parse_naf(text, name);
  Document doc = document_from_json(text);
  if (doc.name.empty()) doc.name = name;
  return doc;
}

}  // namespace formgraph
