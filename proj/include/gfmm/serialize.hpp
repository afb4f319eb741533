#pragma once

#include <string>
#include <vector>

#include "gfmm/hyperbox.hpp"
#include "gfmm/learners.hpp"

namespace gfmm {

/// Versioned line-oriented text form of a box list. Doubles are written in
/// shortest round-trip form, so reading the text back restores every box
/// bit for bit.
std::string write_boxes(const std::vector<Hyperbox>& boxes);
std::vector<Hyperbox> read_boxes(const std::string& text);

/// Numeric model: learner configuration followed by its boxes.
std::string write_model(const GfmmModel& model);
GfmmModel read_model(const std::string& text);

}  // namespace gfmm
