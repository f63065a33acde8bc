#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wqed::cli {

/// Fixed-format number for tables; identical inputs give identical text.
std::string num(double v);

/// CSV table with '#' header lines followed by a column row.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(const std::string& line) { comments_.push_back(line); }
  void row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::string> rows_;
};

struct PendingFile {
  std::filesystem::path path;
  std::string content;
};

/// Writes every file through a temporary sibling and a rename, after all
/// content is ready. Throws Error(Io).
void commit(const std::vector<PendingFile>& files);

}  // namespace wqed::cli
