#include "pairsig/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pairsig/errors.hpp"

namespace pairsig {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_cell(const std::string& raw, double& out) {
  std::string t = strip(raw);
  if (!t.empty() && t.front() == '+') t.erase(t.begin());
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SignalRecord read_csv_record(std::istream& in,
                             const std::vector<ChannelMeta>& meta,
                             const std::string& session_id) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::empty_file, "no header row");
  auto header = split_csv_line(line);
  if (header.size() != meta.size()) {
    fail(Errc::ragged_rows, "header has " + std::to_string(header.size()) +
                                " columns, expected " +
                                std::to_string(meta.size()));
  }
  for (std::size_t c = 0; c < meta.size(); ++c) {
    if (strip(header[c]) != meta[c].label) {
      fail(Errc::invalid_field, "header column " + std::to_string(c + 1) +
                                    " is '" + strip(header[c]) +
                                    "', expected '" + meta[c].label + "'");
    }
  }

  SignalRecord record;
  record.session_id = session_id;
  record.channels.resize(meta.size());
  for (std::size_t c = 0; c < meta.size(); ++c) record.channels[c].meta = meta[c];

  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (strip(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != meta.size()) {
      fail(Errc::ragged_rows, "row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) +
                                  " columns, expected " +
                                  std::to_string(meta.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_cell(cells[c], v)) {
        fail(Errc::non_numeric_cell, "row " + std::to_string(row) +
                                         ", column " + std::to_string(c + 1) +
                                         ": '" + strip(cells[c]) + "'");
      }
      record.channels[c].samples.push_back(v);
    }
  }
  if (record.channels.empty() || record.channels[0].samples.empty()) {
    fail(Errc::empty_file, "no sample rows");
  }
  return record;
}

std::vector<KssAnnotation> read_kss_sidecar(std::istream& in) {
  std::vector<KssAnnotation> annotations;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split_csv_line(t);
    if (cells.size() != 2) {
      fail(Errc::ragged_rows,
           "KSS sidecar row " + std::to_string(row) + " needs 2 columns");
    }
    double time = 0.0;
    double score = 0.0;
    if (!parse_cell(cells[0], time) || !parse_cell(cells[1], score)) {
      if (row == 1) continue;  // header row
      fail(Errc::non_numeric_cell,
           "KSS sidecar row " + std::to_string(row) + ": '" + t + "'");
    }
    int kss = static_cast<int>(score);
    if (score != kss || kss < 1 || kss > 9) {
      fail(Errc::out_of_range_kss, "KSS sidecar row " + std::to_string(row) +
                                       " has score " + strip(cells[1]) +
                                       ", expected integer in [1, 9]");
    }
    annotations.push_back({time, kss});
  }
  return annotations;
}

void write_csv_record(const SignalRecord& record, std::ostream& out) {
  for (std::size_t c = 0; c < record.channels.size(); ++c) {
    if (c) out << ',';
    out << record.channels[c].meta.label;
  }
  out << '\n';
  std::size_t rows = record.channels.empty() ? 0 : record.channels[0].samples.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < record.channels.size(); ++c) {
      if (c) out << ',';
      out << format_double(record.channels[c].samples[r]);
    }
    out << '\n';
  }
}

void write_kss_sidecar(const std::vector<KssAnnotation>& annotations,
                       std::ostream& out) {
  out << "time_seconds,kss\n";
  for (const auto& a : annotations) {
    out << format_double(a.time_seconds) << ',' << a.kss << '\n';
  }
}

}  // namespace pairsig
