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

#include <algorithm>
#include <cctype>
#include <json.hpp>
#include <map>

#include "formgraph/constants.hpp"
#include "formgraph/document.hpp"
#include "formgraph/error.hpp"
#include "formgraph/log.hpp"
#include "image_probe.hpp"

namespace formgraph {
namespace {

using json = nlohmann::json;

bool is_table_type(std::string type) {
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return type.find("table") != std::string::npos || type == "fieldrow" || type == "fieldcol" ||
         type == "fieldregion";
}

BBox polygon_box(const json& item) {
  const json* pts = nullptr;
  if (item.contains("poly_points")) {
    pts = &item["poly_points"];
  } else if (item.contains("points")) {
    pts = &item["points"];
  }
  if (pts == nullptr || !pts->is_array() || pts->empty()) throw DataError("NAF box has no polygon");
  BBox box{1e300, 1e300, -1e300, -1e300};
  for (const json& p : *pts) {
    if (!p.is_array() || p.size() < 2) throw DataError("NAF polygon point must be [x, y]");
    const double x = p[0].get<double>() * kNafScale;
    const double y = p[1].get<double>() * kNafScale;
    box = {std::min(box.x1, x), std::min(box.y1, y), std::max(box.x2, x), std::max(box.y2, y)};
  }
  if (!box.valid()) throw DataError("NAF polygon is not finite");
  return box;
}

Document naf_from_json(const json& root, std::string name,
                       std::optional<std::pair<double, double>> image_size) {
  if (!root.is_object()) throw DataError("NAF annotation must be a JSON object");
  Document doc;
  doc.name = std::move(name);
  doc.class_set = ClassSet::naf();

  std::map<std::string, int> entity_of_id;
  std::map<std::string, bool> dropped;
  std::vector<BBox> all_boxes;
  const auto add_boxes = [&](const char* key, int label) {
    if (!root.contains(key)) return;
    if (!root[key].is_array()) throw DataError(std::string("NAF \"") + key + "\" must be an array");
    for (const json& item : root[key]) {
      const std::string id = item.at("id").get<std::string>();
      if (entity_of_id.count(id) || dropped.count(id)) throw DataError("duplicate NAF box id " + id);
      if (is_table_type(item.value("type", ""))) {
        dropped[id] = true;
        continue;
      }
      TextLine line;
      line.id = static_cast<int>(doc.gt_lines.size());
      line.bbox = polygon_box(item);
      line.confidence = 1.0;
      line.class_scores = doc.class_set.one_hot(label);
      entity_of_id[id] = static_cast<int>(doc.gt_entities.size());
      doc.gt_entities.push_back(Entity{{line.id}, label});
      all_boxes.push_back(line.bbox);
      doc.gt_lines.push_back(std::move(line));
    }
  };
  add_boxes("textBBs", 0);
  add_boxes("fieldBBs", 1);

  std::vector<EntityPair> links;
  for (const char* key : {"pairs", "samePairs"}) {
    if (!root.contains(key)) continue;
    for (const json& pair : root[key]) {
      if (!pair.is_array() || pair.size() != 2) throw DataError("NAF pair must have two ids");
      const std::string a = pair[0].get<std::string>(), b = pair[1].get<std::string>();
      const auto ia = entity_of_id.find(a), ib = entity_of_id.find(b);
      if (ia == entity_of_id.end() || ib == entity_of_id.end()) {
        if (dropped.count(a) || dropped.count(b)) {
          log::warn("NAF '" + doc.name + "': dropping pair (" + a + ", " + b + ") touching a table box");
          continue;
        }
        throw DataError("NAF pair references unknown box id (" + a + ", " + b + ")");
      }
      if (ia->second != ib->second) links.emplace_back(ia->second, ib->second);
    }
  }
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  doc.gt_links = links;
  doc.gt_relationships = normalize_pairs(std::move(links));
  doc.lines = doc.gt_lines;

  if (image_size) {
    doc.image_width = image_size->first * kNafScale;
    doc.image_height = image_size->second * kNafScale;
  } else {
    std::tie(doc.image_width, doc.image_height) = detail::extent_of(all_boxes);
  }
  validate_document(doc);
  return doc;
}

}  // namespace

Document parse_naf(const std::string& json_text, std::string name) {
  try {
    return naf_from_json(json::parse(json_text), std::move(name), std::nullopt);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed NAF annotation: ") + e.what());
  }
}

Document load_naf(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return naf_from_json(json::parse(text), path.stem().string(), detail::sibling_image_size(path));
  } catch (const json::exception& e) {
    throw DataError("malformed NAF annotation '" + path.string() + "': " + e.what());
  }
}

}  // namespace formgraph
