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

#include <string>
#include <utility>
#include <vector>

#include "forge/audio.hpp"
#include "forge/phoneme.hpp"

namespace forge {

struct Segment {
  AudioBuffer audio;
  std::string text;
  PhonemeSequence phonemes;
  std::string source_utterance_id;
  double offset_in_source_s = 0;
  // Silence samples kept before the first and after the last speech sample.
  std::size_t lead_silence = 0;
  std::size_t trail_silence = 0;

  double duration_s() const { return audio.duration_s(); }
};

// Text and phonemes for one speech region, in order.
struct RegionLabel {
  std::string text;
  PhonemeSequence phonemes;
};

// A speech region in samples: [speech_begin, speech_end) is speech (possibly
// with short pauses inside), [keep_begin, keep_end) adds the preserved pads.
struct SpeechRegion {
  std::size_t keep_begin;
  std::size_t speech_begin;
  std::size_t speech_end;
  std::size_t keep_end;
};

using SilenceList = std::vector<std::pair<double, double>>;

// Regions left after splitting at silences strictly longer than
// `threshold_s` and trimming the utterance's leading/trailing silence; every
// region keeps min(pad_s, available) silence on each side. Throws
// forge::Error for unsorted, overlapping or out-of-range silences.
std::vector<SpeechRegion> plan_regions(std::size_t num_samples, int sample_rate,
                                       const SilenceList& silences,
                                       double threshold_s = 0.05,
                                       double pad_s = 0.025);

// Cuts the audio along plan_regions(). `labels` must hold one entry per
// resulting region.
std::vector<Segment> trim_and_split(const AudioBuffer& audio,
                                    const SilenceList& silences,
                                    const std::vector<RegionLabel>& labels,
                                    double threshold_s = 0.05, double pad_s = 0.025,
                                    const std::string& source_id = {});

// a ++ b with the junction silence trimmed or zero-padded to exactly pause_s
// (half from each side), text joined by "，", and a pause position at the
// junction syllable.
Segment concatenate(const Segment& a, const Segment& b, double pause_s = 0.05);

// Energy fallback: runs of at least `min_frames` frames whose RMS is below
// `floor`, as (start_s, end_s).
SilenceList detect_silences(const AudioBuffer& audio, double floor = 0.01,
                            double frame_s = 0.010, int min_frames = 3);

}  // namespace forge
