#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "cgns/errors.hpp"
#include "cgns/version.hpp"

namespace cgns::app {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json manifest_base(const RunConfig& cfg, const std::string& command) {
  const nlohmann::json config = to_json(cfg);
  return {{"config", config},
          {"seed", cfg.seed},
          {"files", nlohmann::json::object()},
          {"created_at", utc_timestamp()},
          {"version", cgns::version()},
          {"config_hash", config_hash(config)},
          {"command", command},
          {"components",
           {{"cgns", cgns::version()}, {"eigen", eigen_version()}, {"fftw", fftw_version()}}}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace cgns::app
