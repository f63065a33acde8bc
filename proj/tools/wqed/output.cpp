#include "wqed/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wqed/error.hpp"

namespace wqed::cli {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Table::row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw std::logic_error("row width does not match the columns");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += num(values[i]);
  }
  rows_.push_back(std::move(line));
}

std::string Table::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& r : rows_) out += r + "\n";
  return out;
}

void commit(const std::vector<PendingFile>& files) {
  namespace fs = std::filesystem;
  for (const auto& f : files) {
    std::error_code ec;
    if (f.path.has_parent_path()) {
      fs::create_directories(f.path.parent_path(), ec);
      if (ec) fail(ErrorCode::Io, "cannot create directory '" + f.path.parent_path().string() + "'");
    }
    const fs::path tmp = f.path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
      out << f.content;
      if (!out.flush()) fail(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, f.path, ec);
    if (ec) {
      fs::remove(tmp, ec);
      fail(ErrorCode::Io, "cannot move output into place at '" + f.path.string() + "'");
    }
  }
}

}  // namespace wqed::cli
