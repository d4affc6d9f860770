#include "csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <utility>
#include <vector>

namespace agenet {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail(const std::string& origin, int line_no,
                       const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double_field(const std::string& field, const std::string& origin,
                          int line_no, const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || field.empty()) {
    fail(origin, line_no, "column '" + column + "': not a number: '" + field + "'");
  }
  return value;
}

long parse_int_field(const std::string& field, const std::string& origin,
                     int line_no, const std::string& column) {
  long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || field.empty()) {
    fail(origin, line_no, "column '" + column + "': not an integer: '" + field + "'");
  }
  return value;
}

struct PendingRecording {
  std::string patient_id;
  std::string recording_id;
  double pma_weeks = 0.0;
  std::vector<std::vector<double>> rows;
  std::vector<SleepState> labels;
  bool labeled = false;
  int first_line = 0;
};

void flush(PendingRecording& pending, Dataset& dataset) {
  Recording rec;
  rec.patient_id = pending.patient_id;
  rec.recording_id = pending.recording_id;
  rec.pma_weeks = pending.pma_weeks;
  const Eigen::Index n = static_cast<Eigen::Index>(pending.rows.size());
  const Eigen::Index m = n > 0 ? static_cast<Eigen::Index>(pending.rows[0].size()) : 0;
  rec.epochs.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      rec.epochs(i, j) = pending.rows[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>(j)];
    }
  }
  if (pending.labeled) rec.sleep_labels = pending.labels;
  dataset.recordings.push_back(std::move(rec));
  pending = PendingRecording{};
}

}  // namespace

Dataset parse_epoch_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_fields(line);
  static const char* kFixed[] = {"patient_id", "recording_id", "pma_weeks",
                                 "epoch_index", "sleep_label"};
  if (header.size() < 6) {
    fail(origin, line_no, "header needs the 5 fixed columns plus at least one feature");
  }
  for (int c = 0; c < 5; ++c) {
    if (header[static_cast<std::size_t>(c)] != kFixed[c]) {
      fail(origin, line_no,
           "header column " + std::to_string(c + 1) + " must be '" +
               kFixed[c] + "', got '" + header[static_cast<std::size_t>(c)] + "'");
    }
  }
  const std::size_t n_features = header.size() - 5;

  Dataset dataset;
  dataset.feature_names.assign(header.begin() + 5, header.end());

  std::set<std::pair<std::string, std::string>> closed;
  PendingRecording pending;
  bool have_pending = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(origin, line_no,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }

    const std::string& patient = fields[0];
    const std::string& recording = fields[1];
    if (patient.empty()) fail(origin, line_no, "empty patient_id");
    if (recording.empty()) fail(origin, line_no, "empty recording_id");

    const bool same = have_pending && pending.patient_id == patient &&
                      pending.recording_id == recording;
    if (!same) {
      if (have_pending) {
        closed.insert({pending.patient_id, pending.recording_id});
        flush(pending, dataset);
      }
      if (closed.count({patient, recording})) {
        fail(origin, line_no,
             "rows of recording (" + patient + ", " + recording +
                 ") are not contiguous");
      }
      pending.patient_id = patient;
      pending.recording_id = recording;
      pending.pma_weeks = parse_double_field(fields[2], origin, line_no, "pma_weeks");
      pending.first_line = line_no;
      have_pending = true;
    } else {
      const double pma = parse_double_field(fields[2], origin, line_no, "pma_weeks");
      if (pma != pending.pma_weeks) {
        fail(origin, line_no,
             "pma_weeks changed within recording (" + patient + ", " +
                 recording + ")");
      }
    }

    const long epoch_index = parse_int_field(fields[3], origin, line_no, "epoch_index");
    const long expected = static_cast<long>(pending.rows.size());
    if (epoch_index != expected) {
      fail(origin, line_no,
           "epoch_index must be " + std::to_string(expected) + ", got " +
               std::to_string(epoch_index));
    }

    const std::string& label = fields[4];
    const bool first_row = pending.rows.empty();
    if (label.empty()) {
      if (!first_row && pending.labeled) {
        fail(origin, line_no,
             "recording (" + patient + ", " + recording +
                 ") mixes labeled and unlabeled epochs");
      }
      pending.labeled = false;
    } else {
      if (!first_row && !pending.labeled) {
        fail(origin, line_no,
             "recording (" + patient + ", " + recording +
                 ") mixes labeled and unlabeled epochs");
      }
      pending.labeled = true;
      if (label == "QS") {
        pending.labels.push_back(SleepState::QS);
      } else if (label == "NONQS") {
        pending.labels.push_back(SleepState::NonQS);
      } else {
        fail(origin, line_no,
             "sleep_label must be QS, NONQS, or empty, got '" + label + "'");
      }
    }

    std::vector<double> row(n_features);
    for (std::size_t j = 0; j < n_features; ++j) {
      row[j] = parse_double_field(fields[5 + j], origin, line_no,
                                  dataset.feature_names[j]);
    }
    pending.rows.push_back(std::move(row));
  }

  if (have_pending) flush(pending, dataset);
  if (dataset.recordings.empty()) {
    throw ParseError(origin + ": no data rows");
  }
  return dataset;
}

Dataset read_epoch_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_epoch_csv(buf.str(), path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string epoch_csv_text(const Dataset& dataset) {
  std::ostringstream out;
  out << "patient_id,recording_id,pma_weeks,epoch_index,sleep_label";
  for (const std::string& name : dataset.feature_names) {
    if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos) {
      throw std::invalid_argument("feature name contains a delimiter: " + name);
    }
    out << ',' << name;
  }
  out << '\n';
  for (const Recording& rec : dataset.recordings) {
    if (rec.patient_id.find(',') != std::string::npos ||
        rec.recording_id.find(',') != std::string::npos) {
      throw std::invalid_argument("identifier contains a comma: " +
                                  rec.patient_id + "/" + rec.recording_id);
    }
    for (Eigen::Index i = 0; i < rec.epochs.rows(); ++i) {
      out << rec.patient_id << ',' << rec.recording_id << ','
          << format_double(rec.pma_weeks) << ',' << i << ',';
      if (rec.sleep_labels) {
        out << to_string((*rec.sleep_labels)[static_cast<std::size_t>(i)]);
      }
      for (Eigen::Index j = 0; j < rec.epochs.cols(); ++j) {
        out << ',' << format_double(rec.epochs(i, j));
      }
      out << '\n';
    }
  }
  return out.str();
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    std::remove(tmp.c_str());
    throw std::runtime_error(path + ": rename failed: " + std::strerror(err));
  }
}

void write_epoch_csv(const Dataset& dataset, const std::string& path) {
  write_text_atomic(path, epoch_csv_text(dataset));
}

}  // namespace agenet
