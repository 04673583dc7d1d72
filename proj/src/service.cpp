// Copyright 2026 The dspolicy Authors.
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

#include <mutex>

#include "dspolicy/simulator.hpp"
#include "httplib.h"

namespace dspolicy {

using json = nlohmann::json;

namespace {

void reply(httplib::Response& res, const json& body) {
  res.status = body.contains("error") ? 400 : 200;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

void serve(ProviderConnector& connector, const std::string& host, int port) {
  httplib::Server server;
  std::mutex executor;

  auto route = [&](const std::string& type) {
    return [&, type](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return reply(res, {{"error", "body must be a JSON object"}});
      auto at = parse_datetime(body.value("at", std::string()));
      if (!at) return reply(res, {{"error", "missing or bad 'at'"}});
      if (!body.contains("consumer")) return reply(res, {{"error", "missing 'consumer'"}});
      Message m{type, *at, Iri(body["consumer"].get<std::string>()), body};
      std::lock_guard lock(executor);
      try {
        connector.tick(*at);
        reply(res, connector.handle(m));
      } catch (const IllegalTransition& e) {
        res.status = 409;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    };
  };
  server.Post("/negotiate", route("negotiate"));
  server.Post("/request", route("request"));
  server.Post("/evidence", route("evidence"));
  server.Get("/audit", [&](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(executor);
    res.set_content(connector.log().to_ndjson(), "application/x-ndjson");
  });
  if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace dspolicy
