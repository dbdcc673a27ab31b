#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "radtext/corpus.hpp"

namespace radtext::fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Record make_record(const std::string& id, const std::string& body, const std::string& source = "Valley Herald",
                          int year = 2010) {
  Record r;
  r.id = id;
  r.source_name = source;
  r.source_type = SourceType::news;
  r.date.year = year;
  r.body = body;
  return r;
}

inline LabeledRecord make_labeled(const std::string& id, Label label, const std::string& body = "text",
                                  const std::string& source = "Valley Herald", int year = 2010) {
  return {make_record(id, body, source, year), label, "gold"};
}

}  // namespace radtext::fixture
