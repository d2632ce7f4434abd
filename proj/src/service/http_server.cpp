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

#include <httplib.h>

#include "matchprobe/error.hpp"
#include "matchprobe/service.hpp"

namespace matchprobe {
namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"schema_version", kSchemaVersion}, {"status", status}, {"error", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, std::string("malformed JSON body: ") + e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& manager;
  std::string token;
  httplib::Server server;

  template <typename F>
  httplib::Server::Handler guarded(F f, int ok_status = 200) {
    return [this, f, ok_status](const httplib::Request& req, httplib::Response& res) {
      try {
        if (!token.empty() && req.get_header_value("Authorization") != "Bearer " + token) {
          throw ServiceError(401, "missing or wrong API token");
        }
        reply(res, ok_status, f(req));
      } catch (const ServiceError& e) {
        reply_error(res, e.status(), e.what());
      } catch (const NotFoundError& e) {
        reply_error(res, 404, e.what());
      } catch (const DegenerateInputError& e) {
        reply_error(res, 422, e.what());
      } catch (const TransportError& e) {
        reply_error(res, 502, e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, e.what());
      }
    };
  }

  Impl(SessionManager& m, std::string t) : manager(m), token(std::move(t)) {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, manager.health()); });
    server.Get("/sessions", guarded([this](const httplib::Request&) { return manager.list_sessions(); }));
    server.Post("/sessions",
                guarded([this](const httplib::Request& req) { return manager.create_session(parse_body(req)); }, 201));
    server.Get(R"(/sessions/([^/]+))",
               guarded([this](const httplib::Request& req) { return manager.get_session(req.matches[1]); }));
    server.Post(R"(/sessions/([^/]+)/drafts)", guarded([this](const httplib::Request& req) {
                  return manager.submit_draft(req.matches[1], parse_body(req));
                }));
    server.Get(R"(/sessions/([^/]+)/keywords)", guarded([this](const httplib::Request& req) {
                 int k = AttackBudget{}.K;
                 if (req.has_param("k")) {
                   try {
                     k = std::stoi(req.get_param_value("k"));
                   } catch (const std::logic_error&) {
                     throw ServiceError(422, "k must be an integer");
                   }
                 }
                 return manager.keywords(req.matches[1], k);
               }));
    server.Post(R"(/sessions/([^/]+)/early-stop-check)", guarded([this](const httplib::Request& req) {
                  return manager.early_stop_check(req.matches[1], parse_body(req));
                }));
    server.Post(R"(/sessions/([^/]+)/close)",
                guarded([this](const httplib::Request& req) { return manager.close_session(req.matches[1]); }));
  }
};

HttpServer::HttpServer(SessionManager& manager, std::string token)
    : impl_(std::make_unique<Impl>(manager, std::move(token))) {}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size()) {
    throw ContractError("bind address must look like host:port, got " + bind);
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw ContractError("bad port in bind address " + bind);
  }
  if (port < 0 || port > 65535) throw ContractError("port out of range in " + bind);
  return {bind.substr(0, colon), port};
}

}  // namespace matchprobe
