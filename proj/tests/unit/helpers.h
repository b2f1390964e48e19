#pragma once

#include "revguard/backend/mock_backend.h"
#include "revguard/backend/registry.h"
#include "revguard/core/taxonomy.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(REVGUARD_FIXTURES_DIR) + "/" + name; }
inline std::string data_file(const std::string& name) { return std::string(REVGUARD_TEST_DATA_DIR) + "/" + name; }

inline const revguard::Taxonomy& default_taxonomy() {
  static const revguard::Taxonomy t = revguard::load_taxonomy_file(data_file("taxonomy/default.json"));
  return t;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("revguard-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Registry with the built-in lexicon and one mock chat backend.
inline std::pair<std::shared_ptr<revguard::backend::BackendRegistry>, std::shared_ptr<revguard::backend::MockChatBackend>>
registry_with_mock(const std::string& id = "mock") {
  auto registry = std::make_shared<revguard::backend::BackendRegistry>();
  auto mock = std::make_shared<revguard::backend::MockChatBackend>(id);
  registry->add_chat(mock);
  return {registry, mock};
}

}  // namespace testing
