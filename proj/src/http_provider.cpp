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

// Eigen (via features.hpp) must precede httplib, whose resolver headers
// define a `_res` macro that collides with Eigen identifiers.
#include "formgraph/features.hpp"

#include <httplib.h>

#include <json.hpp>
#include <mutex>
#include <regex>

#include "formgraph/error.hpp"

namespace formgraph {

struct HttpProvider::Impl {
  std::unique_ptr<httplib::Client> client;
  std::string path;
  std::mutex mutex;  // httplib::Client is not safe for concurrent requests
};

HttpProvider::HttpProvider(const std::string& url, int size) : impl_(std::make_unique<Impl>()), size_(size) {
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw UsageError("provider URL must look like http://host:port/path");
  impl_->client = std::make_unique<httplib::Client>(m[1].str());
  impl_->client->set_read_timeout(60, 0);
  impl_->path = m[2].matched ? m[2].str() : "/";
}

HttpProvider::~HttpProvider() = default;

std::vector<float> HttpProvider::extract(const ProviderRequest& request) {
  std::lock_guard lock(impl_->mutex);
  auto res = impl_->client->Post(impl_->path, request_to_json(request), "application/json");
  if (!res) throw DataError("provider request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw DataError("provider returned HTTP " + std::to_string(res->status));
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("features").get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed provider response: ") + e.what());
  }
}

}  // namespace formgraph
