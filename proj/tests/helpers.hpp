#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ftaq/model_text.hpp"
#include "ftaq/script.hpp"

#ifndef FTAQ_DATA_DIR
#define FTAQ_DATA_DIR "data"
#endif

namespace helpers {

inline std::string data_path(const std::string& rel) { return std::string(FTAQ_DATA_DIR) + "/" + rel; }

inline ftaq::TreeModel load_model(const std::string& name) {
  return ftaq::parse_model_file(data_path("models/" + name + ".ftat"));
}

inline ftaq::Script load_script(const std::string& rel) {
  return ftaq::parse_script_file(data_path("scripts/" + rel));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Engine set lists and oracle sets compare as sorted families.
inline std::vector<std::set<std::string>> as_family(const std::vector<std::vector<std::string>>& sets) {
  std::vector<std::set<std::string>> out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::set<std::string>> sorted_family(std::vector<std::set<std::string>> sets) {
  std::sort(sets.begin(), sets.end());
  return sets;
}

}  // namespace helpers
