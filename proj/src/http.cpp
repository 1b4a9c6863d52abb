#include "afeng/http.hpp"

#include <charconv>
#include <httplib.h>

#include "afeng/resources.hpp"

namespace afeng::service {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

}  // namespace

std::unique_ptr<httplib::Server> make_server(Engine& engine,
                                             std::optional<std::filesystem::path> ui_dir) {
  auto srv = std::make_unique<httplib::Server>();

  srv->Post("/api/interact", [&engine](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
      send_error(res, 400, "BadRequest", "expected a JSON object with a string 'text' field");
      return;
    }
    try {
      send_json(res, 200, to_json(engine.interact(body["text"].get<std::string>())));
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const memory::MemoryError& e) {
      send_error(res, 500, "StorageFailure", e.what());
    }
  });

  srv->Get("/api/history", [&engine](const httplib::Request& req, httplib::Response& res) {
    std::size_t n = 10;
    if (req.has_param("n")) {
      const auto s = req.get_param_value("n");
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        send_error(res, 400, "BadRequest", "n must be a non-negative integer");
        return;
      }
    }
    json out = json::array();
    for (const auto& r : engine.history(n)) out.push_back(to_json(r));
    send_json(res, 200, out);
  });

  srv->Get("/api/model/info", [&engine](const httplib::Request&, httplib::Response& res) {
    try {
      send_json(res, 200, engine.model_info());
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    }
  });

  if (ui_dir) {
    srv->set_mount_point("/", ui_dir->string());
  } else {
    srv->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(resources::console_html()), "text/html; charset=utf-8");
    });
  }
  return srv;
}

}  // namespace afeng::service
