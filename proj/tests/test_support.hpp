#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "audit/catalog.hpp"

namespace testsupport {

inline std::filesystem::path fixtures_dir() { return FIXTURES_DIR; }

inline audit::Catalog movie_catalog() {
  return audit::load_catalog(fixtures_dir() / "catalogs" / "movie.csv", "movie");
}

inline audit::Catalog music_catalog() {
  return audit::load_catalog(fixtures_dir() / "catalogs" / "music.csv", "music");
}

// Fresh scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 gen(std::random_device{}());
    path_ = base / ("audit-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

}  // namespace testsupport
