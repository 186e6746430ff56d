#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "hychoice/dataset.hpp"

namespace testutil {

// Three-alternative dataset with fixed choice counts and no covariates.
inline hychoice::Dataset counts_dataset(int n_frt, int n_odt, int n_indiff) {
  hychoice::Dataset data;
  data.alternatives = {{1, "FRT"}, {2, "ODT"}, {3, "Indifferent"}};
  int id = 0;
  auto push = [&](int choice, int count) {
    for (int i = 0; i < count; ++i) {
      hychoice::Observation obs;
      obs.id = "obs-" + std::to_string(++id);
      obs.choice = choice;
      data.observations.push_back(std::move(obs));
    }
  };
  push(1, n_frt);
  push(2, n_odt);
  push(3, n_indiff);
  return data;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Scratch file in the system temp directory, removed on destruction. Names
// must be unique within one test binary; tests never run concurrently.
class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_((std::filesystem::temp_directory_path() / ("hychoice-test-" + name))
                  .string()) {}
  TempFile(const std::string& name, const std::string& content) : TempFile(name) {
    write(content);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }
  void write(const std::string& content) const {
    std::ofstream out(path_, std::ios::binary);
    out << content;
  }
  std::string read() const { return slurp(path_); }

 private:
  std::string path_;
};

}  // namespace testutil
