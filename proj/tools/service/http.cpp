#include <filesystem>

#include "httplib.h"
#include "service.hpp"

namespace epc::service {

bool serve(Service& service, const ServeOptions& options) {
  httplib::Server server;
  if (!options.ui_assets.empty()) {
    if (!std::filesystem::is_directory(options.ui_assets)) return false;
    server.set_mount_point("/", options.ui_assets);
  }
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto bridge = [&service](const httplib::Request& in, httplib::Response& out) {
    Request req{in.method, in.path, {}, in.body};
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    const Response r = service.handle(req);
    out.status = r.status;
    out.set_content(r.body, r.content_type);
  };
  const std::string api = R"(/api/.*)";
  server.Get(api, bridge);
  server.Post(api, bridge);
  server.Put(api, bridge);
  server.Delete(api, bridge);
  server.Options(api, bridge);
  return server.listen(options.host, options.port);
}

}  // namespace epc::service
