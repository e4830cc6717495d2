#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pvyield {

// Minimal CSV support for the fixed schemas this project reads and writes:
// comma-separated, no quoting, one header line, '#' comment lines ignored.

struct CsvRow {
  long line = 0;  // 1-based line number in the file, for error messages
  std::vector<std::string> fields;
};

class CsvReader {
 public:
  // Opens `path` and checks the header matches `expected_header` exactly.
  CsvReader(const std::string& path, const std::string& expected_header);

  // Returns false at end of file. Blank and comment lines are skipped.
  bool next(CsvRow& row);

  const std::string& path() const { return path_; }
  size_t n_columns() const { return n_columns_; }

 private:
  std::string path_;
  std::vector<std::string> lines_;
  size_t pos_ = 0;
  size_t n_columns_ = 0;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  void write_row(const std::vector<std::string>& fields);
  // Flushes and closes; throws on write failure. Called by the destructor if
  // not invoked explicitly, but explicit calls surface errors.
  void close();
  ~CsvWriter();

 private:
  std::string path_;
  std::string buffer_;
  size_t n_columns_ = 0;
  bool closed_ = false;
};

std::vector<std::string> split_csv_line(std::string_view line);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pvyield
