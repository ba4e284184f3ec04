#pragma once

#include "wrisk/ann.hpp"
#include "wrisk/risk_pipeline.hpp"
#include "wrisk/svr.hpp"

#include <iosfwd>
#include <string>

namespace wrisk {

/// Flat line-oriented text format. Every record opens with
/// `wrisk-model <version> <type>`; numbers use shortest round-trip decimal,
/// so a reloaded model predicts bit-identically.
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const SvrModel& model);
void write_model(std::ostream& out, const AnnModel& model);
void write_model(std::ostream& out, const TwoStageModel& model);

/// Throws ModelVersionError for an unknown version or record type and
/// DataError for malformed content.
SvrModel read_svr_model(std::istream& in);
AnnModel read_ann_model(std::istream& in);
TwoStageModel read_two_stage_model(std::istream& in);

std::string to_text(const TwoStageModel& model);
TwoStageModel two_stage_from_text(const std::string& text);

} // namespace wrisk
