// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The Forge Authors.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/text.hpp"

namespace forge {

inline constexpr const char* kSilence = "SIL";

// Per-frame log-scores over a symbol inventory (SIL included).
class AcousticScores {
 public:
  AcousticScores(double frame_period_s, std::vector<std::string> symbols,
                 std::vector<double> row_major);

  double frame_period_s() const { return frame_period_s_; }
  std::size_t num_frames() const { return frames_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  // -1 when absent.
  int symbol_index(std::string_view symbol) const;
  double at(std::size_t frame, std::size_t symbol) const {
    return scores_[frame * symbols_.size() + symbol];
  }
  std::span<const double> row(std::size_t frame) const {
    return {scores_.data() + frame * symbols_.size(), symbols_.size()};
  }

  // Text format: "frame_period_s=<float>", then the symbol list, then one
  // whitespace-separated row of log-scores per frame.
  static AcousticScores parse(std::string_view file);
  static AcousticScores load(const std::filesystem::path& path);
  std::string dump() const;

 private:
  double frame_period_s_;
  std::vector<std::string> symbols_;
  std::vector<double> scores_;
  std::size_t frames_;
};

struct AlignedSegment {
  std::string symbol;
  std::size_t start_frame;
  std::size_t end_frame;  // exclusive

  bool operator==(const AlignedSegment&) const = default;
};

struct Alignment {
  std::vector<AlignedSegment> segments;
  double total_score = 0;

  // Contiguous, non-empty, covering [0, n_frames).
  bool partitions(std::size_t n_frames) const;
};

// Maximum-score monotone segmentation of the frames into `phones`, one state
// per phone with self-loops and a one-frame minimum. With
// `allow_optional_silence`, a skippable SIL state sits before, between and
// after the phones. Equal-score choices stay in the current state.
// Throws forge::Error for unknown symbols or too few frames.
Alignment force_align(const AcousticScores& scores,
                      std::span<const std::string> phones,
                      bool allow_optional_silence);

// Maximal runs of SIL segments, in seconds.
std::vector<std::pair<double, double>> silence_intervals(const Alignment& alignment,
                                                         double frame_period_s);

// Stand-in scorer for audio without external acoustic scores. Frames whose
// RMS falls below `energy_floor` favour SIL; speech frames favour the phone
// whose share of the speech frames covers them, in order.
AcousticScores energy_scores(std::span<const float> samples, int sample_rate,
                             std::span<const std::string> phones,
                             double frame_period_s = 0.010,
                             double energy_floor = 0.01);

}  // namespace forge
