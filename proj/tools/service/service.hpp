#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "epc/layout.hpp"

namespace epc::service {

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct Session;

/// In-memory sessions behind the HTTP API. `handle` is safe to call from
/// several threads: requests on one session take its lock, shared for reads
/// and exclusive for mutations.
class Service {
 public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

 private:
  std::shared_ptr<Session> find(const std::string& id);
  std::string add(std::shared_ptr<Session> session);

  Response upload(const Request& request);
  Response import_snapshot(const Request& request);

  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_assets;  // directory served at "/", optional
};

/// Blocks serving HTTP until the process is stopped. Returns false when the
/// socket cannot be bound or the asset directory does not exist.
bool serve(Service& service, const ServeOptions& options);

/// "1,2.5,3" to numbers; throws ConfigurationError on a bad item.
std::vector<double> parse_number_list(std::string_view text);

/// "cx,cy,W,H" to an ellipse; throws ConfigurationError.
EllipseSpec parse_ellipse(std::string_view text);

}  // namespace epc::service
