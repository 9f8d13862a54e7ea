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

#include "forge/segment.hpp"

#include <algorithm>
#include <cmath>

namespace forge {

namespace {

struct SampleSpan {
  std::size_t begin;
  std::size_t end;
  std::size_t length() const { return end - begin; }
};

std::size_t to_samples(double seconds, int rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

std::string strip_edge_punct(const std::string& s, bool leading) {
  auto cps = text::decode_utf8(s);
  std::size_t first = 0, last = cps.size();
  auto is_mark = [&](std::size_t i) {
    return text::is_punctuation(cps[i].value) || text::is_space(cps[i].value);
  };
  if (leading)
    while (first < last && is_mark(first)) ++first;
  else
    while (last > first && is_mark(last - 1)) --last;
  if (first == last) return {};
  const auto b = cps[first].byte_offset;
  const auto e = cps[last - 1].byte_offset + cps[last - 1].byte_length;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<SpeechRegion> plan_regions(std::size_t n, int sample_rate,
                                       const SilenceList& silences,
                                       double threshold_s, double pad_s) {
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  if (!(pad_s >= 0) || 2 * pad_s > threshold_s + 1e-12)
    throw Error("padding must satisfy 0 <= 2 * pad <= threshold");

  std::vector<SampleSpan> sil;
  for (const auto& [start, end] : silences) {
    if (!(start >= 0) || !(end > start))
      throw Error("silence interval must satisfy 0 <= start < end");
    SampleSpan s{to_samples(start, sample_rate), to_samples(end, sample_rate)};
    if (s.end > n) throw Error("silence interval extends past the audio");
    if (!sil.empty() && s.begin < sil.back().end)
      throw Error("silence intervals must be sorted and non-overlapping");
    if (s.length() == 0) continue;
    if (!sil.empty() && s.begin == sil.back().end)
      sil.back().end = s.end;
    else
      sil.push_back(s);
  }

  const std::size_t pad = to_samples(pad_s, sample_rate);
  const double threshold = threshold_s * sample_rate + 1e-6;
  std::vector<SpeechRegion> out;
  std::size_t begin = 0, avail_before = 0;
  auto emit = [&](std::size_t end, std::size_t avail_after) {
    if (end <= begin) return;
    out.push_back({begin - std::min(pad, avail_before), begin, end,
                   end + std::min(pad, avail_after)});
  };
  for (const auto& s : sil) {
    const bool leading = s.begin == 0;
    const bool trailing = s.end == n;
    if (leading && trailing) return {};
    if (leading) {
      begin = s.end;
      avail_before = s.length();
    } else if (trailing) {
      emit(s.begin, s.length());
      return out;
    } else if (static_cast<double>(s.length()) > threshold) {
      emit(s.begin, s.length());
      begin = s.end;
      avail_before = s.length();
    }
  }
  emit(n, 0);
  return out;
}

std::vector<Segment> trim_and_split(const AudioBuffer& audio,
                                    const SilenceList& silences,
                                    const std::vector<RegionLabel>& labels,
                                    double threshold_s, double pad_s,
                                    const std::string& source_id) {
  const auto regions = plan_regions(audio.samples.size(), audio.sample_rate,
                                    silences, threshold_s, pad_s);
  if (regions.size() != labels.size())
    throw Error("got " + std::to_string(labels.size()) + " text spans for " +
                std::to_string(regions.size()) + " speech regions");
  std::vector<Segment> out;
  out.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    if (labels[i].text.empty()) throw Error("empty text for speech region " + std::to_string(i));
    Segment seg;
    seg.audio.sample_rate = audio.sample_rate;
    seg.audio.samples.assign(
        audio.samples.begin() + static_cast<std::ptrdiff_t>(r.keep_begin),
        audio.samples.begin() + static_cast<std::ptrdiff_t>(r.keep_end));
    seg.text = labels[i].text;
    seg.phonemes = labels[i].phonemes;
    seg.source_utterance_id = source_id;
    seg.offset_in_source_s = static_cast<double>(r.keep_begin) / audio.sample_rate;
    seg.lead_silence = r.speech_begin - r.keep_begin;
    seg.trail_silence = r.keep_end - r.speech_end;
    out.push_back(std::move(seg));
  }
  return out;
}

Segment concatenate(const Segment& a, const Segment& b, double pause_s) {
  if (a.audio.sample_rate != b.audio.sample_rate)
    throw Error("cannot concatenate " + std::to_string(a.audio.sample_rate) +
                " Hz and " + std::to_string(b.audio.sample_rate) + " Hz segments");
  if (!(pause_s >= 0)) throw Error("pause must be non-negative");
  if (a.trail_silence > a.audio.samples.size() || b.lead_silence > b.audio.samples.size())
    throw Error("segment silence metadata exceeds its length");
  const std::size_t target = to_samples(pause_s, a.audio.sample_rate);
  const std::size_t half_a = target / 2;
  const std::size_t half_b = target - half_a;

  Segment out;
  out.audio.sample_rate = a.audio.sample_rate;
  auto& s = out.audio.samples;
  const std::size_t a_speech_end = a.audio.samples.size() - a.trail_silence;
  const std::size_t a_keep = std::min(a.trail_silence, half_a);
  s.assign(a.audio.samples.begin(),
           a.audio.samples.begin() + static_cast<std::ptrdiff_t>(a_speech_end + a_keep));
  s.insert(s.end(), half_a - a_keep, 0.0f);
  const std::size_t b_keep = std::min(b.lead_silence, half_b);
  s.insert(s.end(), half_b - b_keep, 0.0f);
  s.insert(s.end(),
           b.audio.samples.begin() + static_cast<std::ptrdiff_t>(b.lead_silence - b_keep),
           b.audio.samples.end());

  out.text = strip_edge_punct(a.text, false) + "，" + strip_edge_punct(b.text, true);
  out.phonemes.syllables = a.phonemes.syllables;
  out.phonemes.syllables.insert(out.phonemes.syllables.end(), b.phonemes.syllables.begin(),
                                b.phonemes.syllables.end());
  out.phonemes.pause_positions = a.phonemes.pause_positions;
  const std::size_t junction = a.phonemes.size();
  if (junction > 0 && !b.phonemes.empty()) out.phonemes.pause_positions.insert(junction);
  for (auto p : b.phonemes.pause_positions) out.phonemes.pause_positions.insert(p + junction);

  out.source_utterance_id = a.source_utterance_id;
  out.offset_in_source_s = a.offset_in_source_s;
  out.lead_silence = a.lead_silence;
  out.trail_silence = b.trail_silence;
  return out;
}

SilenceList detect_silences(const AudioBuffer& audio, double floor, double frame_s,
                            int min_frames) {
  const std::size_t frame = std::max<std::size_t>(1, to_samples(frame_s, audio.sample_rate));
  const std::size_t n = audio.samples.size();
  SilenceList out;
  std::size_t run_start = 0;
  int run = 0;
  auto close = [&](std::size_t end) {
    if (run >= min_frames)
      out.emplace_back(static_cast<double>(run_start) / audio.sample_rate,
                       static_cast<double>(end) / audio.sample_rate);
    run = 0;
  };
  for (std::size_t a = 0; a < n; a += frame) {
    const std::size_t b = std::min(n, a + frame);
    double e = 0;
    for (std::size_t i = a; i < b; ++i) e += double(audio.samples[i]) * audio.samples[i];
    const bool quiet = std::sqrt(e / static_cast<double>(b - a)) < floor;
    if (quiet) {
      if (run == 0) run_start = a;
      ++run;
    } else {
      close(a);
    }
  }
  close(n);
  return out;
}

}  // namespace forge
