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

#include "formgraph/log.hpp"

#include <atomic>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace formgraph::log {
namespace {

std::atomic<std::size_t> g_warnings{0};

spdlog::logger& logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = spdlog::stderr_color_mt("formgraph");
    instance->set_pattern("[%l] %v");
    instance->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FORMGRAPH_LOG"); env != nullptr && *env != '\0') {
      instance->set_level(spdlog::level::from_str(env));
    }
  });
  return *instance;
}

}  // namespace

void init_from_env() { logger(); }

void debug(std::string_view message) { logger().debug("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }

void warn(std::string_view message) {
  ++g_warnings;
  logger().warn("{}", message);
}

void error(std::string_view message) { logger().error("{}", message); }

std::size_t warning_count() { return g_warnings.load(); }

}  // namespace formgraph::log
