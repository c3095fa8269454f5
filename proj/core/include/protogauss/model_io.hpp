#pragma once

#include <string>

#include "protogauss/model.hpp"

namespace protogauss {

// Versioned JSON serialization of a fitted model. Numbers survive a
// save/load/save cycle bit-exactly. load_model throws ParseError on
// malformed JSON or an unsupported format/version.
std::string save_model(const FittedModel& model);
FittedModel load_model(const std::string& text);

}  // namespace protogauss
