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
#include <map>

#include "formgraph/document.hpp"
#include "formgraph/error.hpp"
#include "image_probe.hpp"

namespace formgraph {
namespace {

using json = nlohmann::json;

BBox funsd_box(const json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("FUNSD box must have 4 numbers");
  BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (b.x1 > b.x2) std::swap(b.x1, b.x2);
  if (b.y1 > b.y2) std::swap(b.y1, b.y2);
  if (!b.valid()) throw DataError("FUNSD box is not finite");
  return b;
}

Document funsd_from_json(const json& root, std::string name,
                         std::optional<std::pair<double, double>> image_size) {
  if (!root.is_object() || !root.contains("form") || !root["form"].is_array()) {
    throw DataError("FUNSD file has no \"form\" array");
  }
  Document doc;
  doc.name = std::move(name);
  doc.class_set = ClassSet::funsd();

  const json& form = root["form"];
  std::map<int, int> index_of_id;
  for (std::size_t i = 0; i < form.size(); ++i) {
    const int id = form[i].contains("id") ? form[i]["id"].get<int>() : static_cast<int>(i);
    if (!index_of_id.emplace(id, static_cast<int>(i)).second) {
      throw DataError("duplicate FUNSD entity id " + std::to_string(id));
    }
  }

  std::vector<BBox> all_boxes;
  std::vector<EntityPair> links;
  for (const json& item : form) {
    const int label = doc.class_set.index_of(item.at("label").get<std::string>());
    std::vector<Word> words;
    for (const json& w : item.value("words", json::array())) {
      words.push_back({w.value("text", ""), funsd_box(w.at("box"))});
    }
    // A few distributed entities carry no word list; the entity box stands in.
    if (words.empty()) words.push_back({item.value("text", ""), funsd_box(item.at("box"))});
    if (item.contains("box")) all_boxes.push_back(funsd_box(item.at("box")));

    Entity entity;
    entity.label = label;
    for (TextLine& line : group_words_into_lines(words, label, doc.class_set,
                                                 static_cast<int>(doc.gt_lines.size()))) {
      entity.line_ids.push_back(line.id);
      all_boxes.push_back(line.bbox);
      doc.gt_lines.push_back(std::move(line));
    }
    doc.gt_entities.push_back(std::move(entity));

    for (const json& pair : item.value("linking", json::array())) {
      if (!pair.is_array() || pair.size() != 2) throw DataError("FUNSD linking entry must be a pair");
      const int a = pair[0].get<int>(), b = pair[1].get<int>();
      const auto ia = index_of_id.find(a), ib = index_of_id.find(b);
      if (ia == index_of_id.end() || ib == index_of_id.end()) {
        throw DataError("FUNSD linking references unknown entity id");
      }
      if (ia->second != ib->second) links.emplace_back(ia->second, ib->second);
    }
  }

  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  doc.gt_links = links;
  doc.gt_relationships = normalize_pairs(std::move(links));
  doc.lines = doc.gt_lines;

  const auto [w, h] = image_size ? *image_size : detail::extent_of(all_boxes);
  doc.image_width = w;
  doc.image_height = h;
  validate_document(doc);
  return doc;
}

}  // namespace

Document parse_funsd(const std::string& json_text, std::string name) {
  try {
    return funsd_from_json(json::parse(json_text), std::move(name), std::nullopt);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed FUNSD annotation: ") + e.what());
  }
}

Document load_funsd(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return funsd_from_json(json::parse(text), path.stem().string(), detail::sibling_image_size(path));
  } catch (const json::exception& e) {
    throw DataError("malformed FUNSD annotation '" + path.string() + "': " + e.what());
  }
}

}  // namespace formgraph
