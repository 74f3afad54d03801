#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "rguard/proposal_store.hpp"

namespace httplib {
class Server;
}

namespace rguard {

struct ServiceOptions {
  std::string bind_address = "127.0.0.1";  // localhost only unless widened
  int port = 8420;                         // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;  // static assets served under "/"
};

/// Local JSON API over a ProposalStore. There is no authentication; keep the
/// bind address on loopback unless the network is trusted.
///
///   GET  /api/proposals?status=&confidence=   summaries
///   GET  /api/proposals/{id}                  full proposal | 404
///   POST /api/proposals/{id}/accept           200 | 404 | 409 | 422
///   POST /api/proposals/{id}/reject           200 | 404 | 409
///   GET  /api/summary
class ReviewService {
 public:
  ReviewService(ProposalStore& store, AnalysisConfig config, ServiceOptions options,
                const AdapterRegistry& registry = default_registry());
  ~ReviewService();
  ReviewService(const ReviewService&) = delete;
  ReviewService& operator=(const ReviewService&) = delete;

  /// Binds the socket; returns the bound port. Throws Error when the port is
  /// in use or the address is invalid.
  int bind();
  /// Serves until stop(). bind() must have succeeded.
  void run();
  void stop();

 private:
  void install_routes();

  ProposalStore& store_;
  AnalysisConfig config_;
  ServiceOptions options_;
  const AdapterRegistry& registry_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
  std::atomic<bool> in_run_{false};
  std::atomic<bool> stop_requested_{false};
};

}  // namespace rguard
