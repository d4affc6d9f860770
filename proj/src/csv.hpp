#pragma once

#include <string>

#include "domain.hpp"

namespace agenet {

// Epoch CSV: header row, then one row per epoch with columns
//   patient_id,recording_id,pma_weeks,epoch_index,sleep_label,f_0,...,f_{m-1}
// sleep_label is QS, NONQS, or empty (unlabeled). Rows of one recording are
// contiguous with epoch_index counting from 0; a recording is either fully
// labeled or fully unlabeled. Ragged rows and violations are rejected with
// line-numbered ParseErrors.
Dataset read_epoch_csv(const std::string& path);
Dataset parse_epoch_csv(const std::string& text, const std::string& origin);

// Writes atomically (temp file + rename), with shortest round-trip decimal
// formatting for feature values.
void write_epoch_csv(const Dataset& dataset, const std::string& path);

std::string epoch_csv_text(const Dataset& dataset);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Atomic text write shared by every file-producing command.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace agenet
