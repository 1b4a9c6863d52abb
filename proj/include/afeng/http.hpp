#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "afeng/service.hpp"

namespace httplib {
class Server;
}

namespace afeng::service {

// Routes:
//   POST /api/interact        {"text": "..."}
//   GET  /api/history?n=K     most recent first (default n = 10)
//   GET  /api/model/info
//   GET  /                    console page (or files under ui_dir)
std::unique_ptr<httplib::Server> make_server(Engine& engine,
                                             std::optional<std::filesystem::path> ui_dir = {});

}  // namespace afeng::service
