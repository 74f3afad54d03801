#include "rguard/review_service.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

namespace rguard {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  send_json(res, status, json{{"error", kind}, {"message", message}});
}

constexpr const char* kNoUiPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>refactor-guard</title></head>"
    "<body><h1>refactor-guard review service</h1>"
    "<p>No review UI directory was configured. The JSON API is available at "
    "<a href=\"/api/proposals\">/api/proposals</a> and <a href=\"/api/summary\">/api/summary</a>.</p>"
    "</body></html>";

}  // namespace

ReviewService::ReviewService(ProposalStore& store, AnalysisConfig config, ServiceOptions options,
                             const AdapterRegistry& registry)
    : store_(store),
      config_(std::move(config)),
      options_(std::move(options)),
      registry_(registry),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ReviewService::~ReviewService() { stop(); }

void ReviewService::install_routes() {
  httplib::Server& srv = *server_;
  // httplib's defaults include SO_REUSEPORT, which would let a second
  // service share the port silently instead of failing to start.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  srv.Get("/api/proposals", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<ProposalStatus> status;
    std::optional<Confidence> confidence;
    if (req.has_param("status") && !req.get_param_value("status").empty()) {
      status = proposal_status_from_string(req.get_param_value("status"));
      if (!status) return send_error(res, 400, "BadRequest", "unknown status filter");
    }
    if (req.has_param("confidence") && !req.get_param_value("confidence").empty()) {
      confidence = confidence_from_string(req.get_param_value("confidence"));
      if (!confidence || *confidence == Confidence::Discard)
        return send_error(res, 400, "BadRequest", "unknown confidence filter");
    }
    json items = json::array();
    for (const RefactoringProposal& p : store_.list()) {
      if (status && p.status != *status) continue;
      if (confidence && p.confidence != *confidence) continue;
      items.push_back(proposal_summary(p));
    }
    send_json(res, 200, items);
  });

  srv.Get(R"(/api/proposals/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto p = store_.load(req.matches[1].str());
    if (!p) return send_error(res, 404, "NotFound", "no such proposal");
    send_json(res, 200, json(*p));
  });

  srv.Post(R"(/api/proposals/([^/]+)/accept)", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const ApplyResult r = store_.accept(req.matches[1].str(), config_, registry_);
      send_json(res, 200, json{{"file", r.file}, {"new_file_health", r.new_file_health}});
    } catch (const NotFound& e) {
      send_error(res, 404, "NotFound", e.what());
    } catch (const AlreadyDecided& e) {
      send_error(res, 409, "AlreadyDecided", e.what());
    } catch (const SourceDrifted& e) {
      send_error(res, 422, "SourceDrifted", e.what());
    }
  });

  srv.Post(R"(/api/proposals/([^/]+)/reject)", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> reason;
    if (!req.body.empty()) {
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object())
        return send_error(res, 400, "BadRequest", "body must be a JSON object");
      if (body.contains("reason") && !body["reason"].is_null()) {
        if (!body["reason"].is_string()) return send_error(res, 400, "BadRequest", "reason must be a string");
        reason = body["reason"].get<std::string>();
      }
    }
    try {
      const RefactoringProposal p = store_.reject(req.matches[1].str(), reason);
      send_json(res, 200, json{{"id", p.id}, {"status", std::string(to_string(p.status))}});
    } catch (const NotFound& e) {
      send_error(res, 404, "NotFound", e.what());
    } catch (const AlreadyDecided& e) {
      send_error(res, 409, "AlreadyDecided", e.what());
    }
  });

  srv.Get("/api/summary", [this](const httplib::Request&, httplib::Response& res) {
    const StoreSummary s = store_.summary();
    send_json(res, 200, json{{"pending", s.pending},
                             {"accepted", s.accepted},
                             {"rejected", s.rejected},
                             {"mean_health_delta", s.mean_health_delta}});
  });

  if (options_.ui_dir) {
    if (!srv.set_mount_point("/", options_.ui_dir->string()))
      throw Error("review UI directory not found: " + options_.ui_dir->string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kNoUiPage, "text/html");
    });
  }

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "InternalError", message);
  });
}

int ReviewService::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.bind_address);
  } else if (server_->bind_to_port(options_.bind_address, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ < 0)
    throw Error("cannot listen on " + options_.bind_address + ":" + std::to_string(options_.port) +
                " (port in use or address unavailable)");
  return port_;
}

void ReviewService::run() {
  if (port_ < 0) throw Error("service is not bound");
  in_run_.store(true);
  if (!stop_requested_.load()) server_->listen_after_bind();
  in_run_.store(false);
}

// httplib ignores stop() until its accept loop has started, so a stop that
// races a fresh run() waits for the loop before shutting it down.
void ReviewService::stop() {
  stop_requested_.store(true);
  if (!server_) return;
  while (in_run_.load() && !server_->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  server_->stop();
}

}  // namespace rguard
