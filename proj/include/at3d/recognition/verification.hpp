// Copyright 2026 The AT3D Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "at3d/core/image.hpp"
#include "at3d/core/types.hpp"
#include "at3d/recognition/embedding.hpp"

namespace at3d::recognition {

// <a, b> / (|a| |b|); throws kInvalidArgument for a zero vector.
double cosine_similarity(const VectorX& a, const VectorX& b);

// 1 iff cosine_similarity(embed(a), embed(b)) > delta.
int verify(const EmbeddingModel& model, const Image& a, const Image& b, double delta);
int verify_embeddings(const VectorX& a, const VectorX& b, double delta);

struct CalibrationReport {
  double accuracy = 0.0;           // balanced: (TPR + TNR) / 2
  double false_accept_rate = 0.0;  // diff pairs scored above delta
  double false_reject_rate = 0.0;  // same pairs scored at or below delta
  int same_pairs = 0;
  int diff_pairs = 0;
};

struct VerificationThreshold {
  double delta = 0.0;
  CalibrationReport report;

  std::string to_json() const;
};

inline constexpr int kMinCalibrationPairs = 50;

// Picks delta maximizing balanced accuracy among the midpoints of the sorted
// distinct scores (plus one point just below the lowest and one just above
// the highest score). Ties go to the smallest delta. Throws kInsufficientData
// with fewer than 50 pairs of either kind.
VerificationThreshold calibrate_from_scores(const std::vector<double>& same_scores,
                                            const std::vector<double>& diff_scores);

using ImagePair = std::pair<Image, Image>;
VerificationThreshold calibrate_threshold(const EmbeddingModel& model,
                                          const std::vector<ImagePair>& same_pairs,
                                          const std::vector<ImagePair>& diff_pairs);

}  // namespace at3d::recognition
