// Copyright 2026 The matchprobe Authors
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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace matchprobe::detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint parse_endpoint(const std::string& url);

// POSTs a JSON body and parses a JSON reply. Connection failures and 5xx
// replies raise TransportError after `retries` extra attempts; other non-200
// statuses and unparseable bodies raise ContractError.
nlohmann::json post_json(const Endpoint& endpoint, const std::string& path, const nlohmann::json& body,
                         double timeout_seconds, int retries,
                         const std::vector<std::pair<std::string, std::string>>& headers = {});

}  // namespace matchprobe::detail
