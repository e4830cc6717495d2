#include "pvyield/util/csv.hpp"

#include <fstream>
#include <sstream>

#include "pvyield/errors.hpp"

namespace pvyield {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(errc::io_error, "read failed: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot open for write: " + path);
  out << content;
  out.flush();
  if (!out) fail(errc::io_error, "write failed: " + path);
}

namespace {

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

CsvReader::CsvReader(const std::string& path, const std::string& expected_header) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::string line;
  while (std::getline(in, line)) lines_.push_back(strip_cr(std::move(line)));
  if (in.bad()) fail(errc::io_error, "read failed: " + path);

  while (pos_ < lines_.size() && (lines_[pos_].empty() || lines_[pos_][0] == '#')) ++pos_;
  if (pos_ >= lines_.size())
    fail(errc::schema_mismatch, path + ": empty file, expected header '" + expected_header + "'");
  if (lines_[pos_] != expected_header)
    fail(errc::schema_mismatch,
         path + " line " + std::to_string(pos_ + 1) + ": header is '" + lines_[pos_] +
             "', expected '" + expected_header + "'");
  n_columns_ = split_csv_line(expected_header).size();
  ++pos_;
}

bool CsvReader::next(CsvRow& row) {
  while (pos_ < lines_.size() && (lines_[pos_].empty() || lines_[pos_][0] == '#')) ++pos_;
  if (pos_ >= lines_.size()) return false;
  row.line = static_cast<long>(pos_ + 1);
  row.fields = split_csv_line(lines_[pos_]);
  ++pos_;
  if (row.fields.size() != n_columns_)
    fail(errc::schema_mismatch, path_ + " line " + std::to_string(row.line) + ": expected " +
                                    std::to_string(n_columns_) + " fields, got " +
                                    std::to_string(row.fields.size()));
  return true;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : path_(path) {
  n_columns_ = split_csv_line(header).size();
  buffer_ = header;
  buffer_.push_back('\n');
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  if (fields.size() != n_columns_)
    fail(errc::io_error, path_ + ": row has " + std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(n_columns_));
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) buffer_.push_back(',');
    buffer_ += fields[i];
  }
  buffer_.push_back('\n');
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  write_text_file(path_, buffer_);
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; explicit close() reports failures
  }
}

}  // namespace pvyield
