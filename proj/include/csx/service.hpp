#pragma once

#include "csx/explore.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace csx::service {

struct Response {
  int status = 200;
  std::string body; // JSON
};

/// Workspace store and request handlers. Transport-independent so the
/// handlers can be driven directly; mount() wires them to an HTTP server.
class Service {
public:
  explicit Service(SolveOptions defaults = SolveOptions());

  /// PUT /workspace
  Response put_workspace(const std::string& body);
  /// GET /workspace/{id}
  Response get_workspace(const std::string& id);
  /// GET /workspace/{id}/devices
  Response devices(const std::string& id);
  /// POST /workspace/{id}/solve
  Response solve(const std::string& id, const std::string& body);
  /// POST /workspace/{id}/eval
  Response eval(const std::string& id, const std::string& body);
  /// POST /workspace/{id}/scenarios
  Response scenarios(const std::string& id, const std::string& body);

  void mount(httplib::Server& server);

private:
  struct Workspace;
  std::shared_ptr<Workspace> find(const std::string& id);

  SolveOptions defaults_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Workspace>> workspaces_;
  std::uint64_t next_id_ = 1;
};

/// Serves until the process is stopped. Returns false if binding fails.
bool serve(Service& service, const std::string& host, int port);

} // namespace csx::service
