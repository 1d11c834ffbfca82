#include "pairsig/edf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "pairsig/errors.hpp"

namespace pairsig {

namespace {

constexpr std::size_t kMainHeaderBytes = 256;
constexpr std::size_t kPerSignalHeaderBytes = 256;
constexpr const char* kAnnotationsLabel = "EDF Annotations";

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string_view field(std::span<const std::uint8_t> bytes, std::size_t offset,
                       std::size_t width) {
  return std::string_view(reinterpret_cast<const char*>(bytes.data()) + offset,
                          width);
}

long parse_long(std::string_view raw, const char* what) {
  std::string t = trim(raw);
  if (!t.empty() && t.front() == '+') t.erase(t.begin());
  long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(Errc::invalid_field,
         std::string(what) + " is not an integer: '" + trim(raw) + "'");
  }
  return value;
}

double parse_double(std::string_view raw, const char* what) {
  std::string t = trim(raw);
  if (!t.empty() && t.front() == '+') t.erase(t.begin());
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(Errc::invalid_field,
         std::string(what) + " is not numeric: '" + trim(raw) + "'");
  }
  return value;
}

void pad_field(std::string& out, std::string_view value, std::size_t width) {
  std::size_t n = std::min(value.size(), width);
  out.append(value.data(), n);
  out.append(width - n, ' ');
}

std::string format_number(double v) {
  double rounded = std::round(v);
  if (rounded == v && std::fabs(v) < 1e8) {
    return std::to_string(static_cast<long long>(rounded));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// LabelMap

std::string LabelMap::normalize(std::string_view raw) {
  std::string out;
  bool pending_sep = false;
  for (char c : trim(raw)) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) {
      out.push_back('-');
      pending_sep = false;
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  // Strip a trailing reference electrode suffix, e.g. "C3-A1" -> "C3".
  static const char* kRefSuffixes[] = {"-A1", "-A2", "-M1", "-M2", "-REF"};
  for (const char* suffix : kRefSuffixes) {
    std::size_t len = std::strlen(suffix);
    if (out.size() > len && out.compare(out.size() - len, len, suffix) == 0) {
      out.erase(out.size() - len);
      break;
    }
  }
  return out;
}

void LabelMap::add(std::string raw, Modality modality, std::string sub_label) {
  entries_[normalize(raw)] = {modality, std::move(sub_label)};
}

std::optional<std::pair<Modality, std::string>> LabelMap::lookup(
    std::string_view raw_label) const {
  auto it = entries_.find(normalize(raw_label));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

LabelMap LabelMap::defaults() {
  LabelMap m;
  const std::pair<const char*, const char*> eeg_sites[] = {
      {"C3", "C3"}, {"C4", "C4"}, {"CZ", "Cz"}, {"FZ", "Fz"}, {"PZ", "Pz"}};
  for (auto [key, sub] : eeg_sites) {
    m.add(key, Modality::eeg, sub);
    m.add(std::string("EEG-") + key, Modality::eeg, sub);
  }
  m.add("EOG-H", Modality::eog, "H");
  m.add("EOG-V", Modality::eog, "V");
  m.add("H-EOG", Modality::eog, "H");
  m.add("V-EOG", Modality::eog, "V");
  m.add("HEOG", Modality::eog, "H");
  m.add("VEOG", Modality::eog, "V");
  m.add("EOG-HORIZONTAL", Modality::eog, "H");
  m.add("EOG-VERTICAL", Modality::eog, "V");
  m.add("ECG", Modality::ecg, "");
  m.add("EKG", Modality::ecg, "");
  m.add("EMG", Modality::emg, "");
  m.add("EMG-CHIN", Modality::emg, "");
  m.add("CHIN-EMG", Modality::emg, "");
  return m;
}

LabelMap LabelMap::parse(std::string_view text) {
  LabelMap m;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(Errc::invalid_field, "label map line " + std::to_string(line_no) +
                                    " has no '=': '" + t + "'");
    }
    std::string raw = trim(t.substr(0, eq));
    std::string rhs = trim(t.substr(eq + 1));
    std::string mod_str = rhs;
    std::string sub;
    auto colon = rhs.find(':');
    if (colon != std::string::npos) {
      mod_str = trim(rhs.substr(0, colon));
      sub = trim(rhs.substr(colon + 1));
    }
    auto modality = modality_from_string(mod_str);
    if (raw.empty() || !modality) {
      fail(Errc::invalid_field, "label map line " + std::to_string(line_no) +
                                    " has bad modality: '" + t + "'");
    }
    m.add(std::move(raw), *modality, std::move(sub));
  }
  return m;
}

LabelMap LabelMap::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_failure, "cannot open label map: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

// ---------------------------------------------------------------------------
// EDF parsing

bool EdfSignalHeader::is_annotation_channel() const {
  return trim(label) == kAnnotationsLabel;
}

double edf_calibrate(const EdfSignalHeader& sig, std::int16_t d) {
  const double scale = (sig.physical_max - sig.physical_min) /
                       (static_cast<double>(sig.digital_max) - sig.digital_min);
  return sig.physical_min + (static_cast<double>(d) - sig.digital_min) * scale;
}

EdfHeader parse_edf_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMainHeaderBytes) {
    fail(Errc::truncated_header,
         "need 256 bytes for the main header, got " +
             std::to_string(bytes.size()));
  }
  EdfHeader h;
  h.version = trim(field(bytes, 0, 8));
  h.patient_id = trim(field(bytes, 8, 80));
  h.recording_id = trim(field(bytes, 88, 80));
  h.start_date = trim(field(bytes, 168, 8));
  h.start_time = trim(field(bytes, 176, 8));
  h.header_bytes =
      static_cast<int>(parse_long(field(bytes, 184, 8), "header bytes"));
  h.reserved = trim(field(bytes, 192, 44));
  h.num_records = parse_long(field(bytes, 236, 8), "number of data records");
  h.record_duration =
      parse_double(field(bytes, 244, 8), "data record duration");
  h.num_signals =
      static_cast<int>(parse_long(field(bytes, 252, 4), "number of signals"));

  if (h.num_signals < 1) {
    fail(Errc::invalid_field,
         "number of signals must be >= 1, got " + std::to_string(h.num_signals));
  }
  if (h.record_duration <= 0.0) {
    fail(Errc::invalid_field, "data record duration must be > 0");
  }
  if (h.num_records < -1) {
    fail(Errc::invalid_field, "number of data records must be >= 0 (or -1)");
  }

  const std::size_t ns = static_cast<std::size_t>(h.num_signals);
  const std::size_t declared = kMainHeaderBytes + ns * kPerSignalHeaderBytes;
  if (bytes.size() < declared) {
    fail(Errc::truncated_header,
         "declared header size " + std::to_string(declared) + " bytes, got " +
             std::to_string(bytes.size()));
  }

  // Signal headers are field-major: all labels, then all transducers, ...
  std::size_t off = kMainHeaderBytes;
  h.signals.resize(ns);
  auto read_block = [&](std::size_t width, auto&& assign) {
    for (std::size_t s = 0; s < ns; ++s) {
      assign(h.signals[s], field(bytes, off, width), s);
      off += width;
    }
  };
  read_block(16, [](EdfSignalHeader& s, std::string_view v, std::size_t) {
    s.label = trim(v);
  });
  read_block(80, [](EdfSignalHeader& s, std::string_view v, std::size_t) {
    s.transducer = trim(v);
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t) {
    s.physical_dimension = trim(v);
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t i) {
    s.physical_min =
        parse_double(v, ("physical min of signal " + std::to_string(i)).c_str());
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t i) {
    s.physical_max =
        parse_double(v, ("physical max of signal " + std::to_string(i)).c_str());
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t i) {
    s.digital_min = static_cast<int>(
        parse_long(v, ("digital min of signal " + std::to_string(i)).c_str()));
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t i) {
    s.digital_max = static_cast<int>(
        parse_long(v, ("digital max of signal " + std::to_string(i)).c_str()));
  });
  read_block(80, [](EdfSignalHeader& s, std::string_view v, std::size_t) {
    s.prefiltering = trim(v);
  });
  read_block(8, [](EdfSignalHeader& s, std::string_view v, std::size_t i) {
    s.samples_per_record = static_cast<int>(parse_long(
        v, ("samples per record of signal " + std::to_string(i)).c_str()));
  });
  read_block(32, [](EdfSignalHeader& s, std::string_view v, std::size_t) {
    s.reserved = trim(v);
  });

  for (std::size_t s = 0; s < ns; ++s) {
    const auto& sig = h.signals[s];
    if (sig.samples_per_record <= 0) {
      fail(Errc::invalid_field, "samples per record of signal " +
                                    std::to_string(s) + " must be > 0");
    }
    if (sig.is_annotation_channel()) continue;
    if (sig.digital_min == sig.digital_max) {
      fail(Errc::degenerate_calibration,
           "signal " + std::to_string(s) + " ('" + sig.label +
               "') has digital_min == digital_max");
    }
    if (sig.digital_min > sig.digital_max) {
      fail(Errc::invalid_field, "signal " + std::to_string(s) +
                                    " has digital_min > digital_max");
    }
  }
  return h;
}

EdfFile parse_edf_file_bytes(std::span<const std::uint8_t> bytes) {
  EdfFile file;
  file.header = parse_edf_header(bytes);
  const EdfHeader& h = file.header;
  const std::size_t ns = static_cast<std::size_t>(h.num_signals);
  const std::size_t header_size = kMainHeaderBytes + ns * kPerSignalHeaderBytes;

  std::size_t samples_per_record_total = 0;
  for (const auto& sig : h.signals) {
    samples_per_record_total += static_cast<std::size_t>(sig.samples_per_record);
  }
  const std::size_t record_bytes = samples_per_record_total * 2;
  const std::size_t available = bytes.size() - header_size;
  std::size_t records = available / record_bytes;
  if (h.num_records >= 0) {
    records = std::min(records, static_cast<std::size_t>(h.num_records));
  }

  file.digital.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    file.digital[s].reserve(records *
                            static_cast<std::size_t>(h.signals[s].samples_per_record));
  }
  const std::uint8_t* p = bytes.data() + header_size;
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t s = 0; s < ns; ++s) {
      const int n = h.signals[s].samples_per_record;
      for (int i = 0; i < n; ++i) {
        const std::uint16_t lo = p[0];
        const std::uint16_t hi = p[1];
        p += 2;
        file.digital[s].push_back(
            static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8))));
      }
    }
  }
  return file;
}

SignalRecord parse_edf(std::span<const std::uint8_t> bytes,
                       const EdfParseOptions& options, EdfParseStats* stats) {
  EdfFile file = parse_edf_file_bytes(bytes);
  const EdfHeader& h = file.header;
  LabelMap default_map;
  const LabelMap* map = options.label_map;
  if (!map) {
    default_map = LabelMap::defaults();
    map = &default_map;
  }

  SignalRecord record;
  record.session_id = !options.session_id.empty() ? options.session_id
                      : !h.recording_id.empty()   ? h.recording_id
                                                  : "edf";
  std::set<std::pair<Modality, std::string>> seen;
  for (std::size_t s = 0; s < h.signals.size(); ++s) {
    const auto& sig = h.signals[s];
    if (sig.is_annotation_channel()) {
      if (stats) ++stats->annotation_channels_skipped;
      continue;
    }
    auto mapped = map->lookup(sig.label);
    if (!mapped) {
      if (options.strict_labels) {
        fail(Errc::unknown_label,
             "channel label '" + sig.label + "' is not in the label map");
      }
      if (stats) ++stats->unknown_labels;
      continue;
    }
    if (!seen.insert(*mapped).second) {
      fail(Errc::invalid_field,
           "duplicate channel mapping for label '" + sig.label + "'");
    }
    Channel ch;
    ch.meta.label = sig.label;
    ch.meta.modality = mapped->first;
    ch.meta.sub_label = mapped->second;
    ch.meta.sampling_rate = sig.samples_per_record / h.record_duration;
    ch.meta.physical_unit = sig.physical_dimension;
    ch.samples.reserve(file.digital[s].size());
    for (std::int16_t d : file.digital[s]) {
      ch.samples.push_back(edf_calibrate(sig, d));
    }
    record.channels.push_back(std::move(ch));
  }
  return record;
}

std::vector<std::uint8_t> write_edf(
    const EdfHeader& header,
    const std::vector<std::vector<std::int16_t>>& digital) {
  const std::size_t ns = header.signals.size();
  if (ns == 0) fail(Errc::no_channels, "EDF writer needs at least one signal");
  if (digital.size() != ns) {
    fail(Errc::length_mismatch, "digital sample vectors must match signals");
  }

  long num_records = header.num_records;
  if (num_records < 0) {
    num_records = header.signals[0].samples_per_record > 0
                      ? static_cast<long>(digital[0].size() /
                                          header.signals[0].samples_per_record)
                      : 0;
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const std::size_t expected = static_cast<std::size_t>(num_records) *
                                 header.signals[s].samples_per_record;
    if (digital[s].size() != expected) {
      fail(Errc::length_mismatch,
           "signal " + std::to_string(s) + " has " +
               std::to_string(digital[s].size()) + " samples, expected " +
               std::to_string(expected));
    }
  }

  std::string out;
  out.reserve(kMainHeaderBytes + ns * kPerSignalHeaderBytes);
  pad_field(out, header.version.empty() ? "0" : header.version, 8);
  pad_field(out, header.patient_id, 80);
  pad_field(out, header.recording_id, 80);
  pad_field(out, header.start_date, 8);
  pad_field(out, header.start_time, 8);
  pad_field(out, std::to_string(kMainHeaderBytes + ns * kPerSignalHeaderBytes), 8);
  pad_field(out, header.reserved, 44);
  pad_field(out, std::to_string(num_records), 8);
  pad_field(out, format_number(header.record_duration), 8);
  pad_field(out, std::to_string(ns), 4);

  auto write_block = [&](std::size_t width, auto&& get) {
    for (std::size_t s = 0; s < ns; ++s) pad_field(out, get(header.signals[s]), width);
  };
  write_block(16, [](const EdfSignalHeader& s) { return s.label; });
  write_block(80, [](const EdfSignalHeader& s) { return s.transducer; });
  write_block(8, [](const EdfSignalHeader& s) { return s.physical_dimension; });
  write_block(8, [](const EdfSignalHeader& s) { return format_number(s.physical_min); });
  write_block(8, [](const EdfSignalHeader& s) { return format_number(s.physical_max); });
  write_block(8, [](const EdfSignalHeader& s) { return std::to_string(s.digital_min); });
  write_block(8, [](const EdfSignalHeader& s) { return std::to_string(s.digital_max); });
  write_block(80, [](const EdfSignalHeader& s) { return s.prefiltering; });
  write_block(8, [](const EdfSignalHeader& s) { return std::to_string(s.samples_per_record); });
  write_block(32, [](const EdfSignalHeader& s) { return s.reserved; });

  std::vector<std::uint8_t> bytes(out.begin(), out.end());
  bytes.reserve(bytes.size() + 2 * static_cast<std::size_t>(num_records));
  for (long r = 0; r < num_records; ++r) {
    for (std::size_t s = 0; s < ns; ++s) {
      const int n = header.signals[s].samples_per_record;
      for (int i = 0; i < n; ++i) {
        const auto v = static_cast<std::uint16_t>(
            digital[s][static_cast<std::size_t>(r) * n + i]);
        bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes.push_back(static_cast<std::uint8_t>(v >> 8));
      }
    }
  }
  return bytes;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace pairsig
