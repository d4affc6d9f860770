#pragma once

#include <string>

#include "bayes_net.hpp"

namespace agenet {

// Versioned JSON model file. Doubles survive save/load bit-exactly (shortest
// round-trip serialization on write, exact binary64 parse on read).
constexpr int kModelFormatVersion = 1;

std::string model_to_text(const BnModel& model);
BnModel model_from_text(const std::string& text, const std::string& origin);

// Atomic write (temp + rename). load validates the reconstructed model.
void save_model(const BnModel& model, const std::string& path);
BnModel load_model(const std::string& path);

}  // namespace agenet
