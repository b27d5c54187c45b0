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

#include "at3d/recognition/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "at3d/core/error.hpp"

namespace at3d::recognition {

double cosine_similarity(const VectorX& a, const VectorX& b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch,
          "cosine_similarity: vectors differ in length");
  const double na = a.norm();
  const double nb = b.norm();
  require(na > 0.0 && nb > 0.0, ErrorCode::kInvalidArgument,
          "cosine_similarity: zero vector");
  return a.dot(b) / (na * nb);
}

int verify_embeddings(const VectorX& a, const VectorX& b, double delta) {
  require(delta > -1.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "verify: delta must lie in (-1, 1)");
  return cosine_similarity(a, b) > delta ? 1 : 0;
}

int verify(const EmbeddingModel& model, const Image& a, const Image& b, double delta) {
  require(delta > -1.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "verify: delta must lie in (-1, 1)");
  return verify_embeddings(embed(model, a).vector, embed(model, b).vector, delta);
}

VerificationThreshold calibrate_from_scores(const std::vector<double>& same_scores,
                                            const std::vector<double>& diff_scores) {
  require(same_scores.size() >= kMinCalibrationPairs &&
              diff_scores.size() >= kMinCalibrationPairs,
          ErrorCode::kInsufficientData,
          "calibrate_threshold: need at least " +
              std::to_string(kMinCalibrationPairs) + " pairs of each kind (got " +
              std::to_string(same_scores.size()) + " same, " +
              std::to_string(diff_scores.size()) + " different)");

  std::vector<double> all(same_scores);
  all.insert(all.end(), diff_scores.begin(), diff_scores.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  constexpr double kEdge = 1e-6;
  constexpr double kLimit = 1.0 - 1e-12;
  std::vector<double> candidates;
  candidates.push_back(std::max(all.front() - kEdge, -kLimit));
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    candidates.push_back(0.5 * (all[i] + all[i + 1]));
  candidates.push_back(std::min(all.back() + kEdge, kLimit));

  // Scores sorted once; accepted counts follow from upper_bound per candidate.
  std::vector<double> same_sorted(same_scores), diff_sorted(diff_scores);
  std::sort(same_sorted.begin(), same_sorted.end());
  std::sort(diff_sorted.begin(), diff_sorted.end());
  const double ns = static_cast<double>(same_sorted.size());
  const double nd = static_cast<double>(diff_sorted.size());

  VerificationThreshold best;
  best.report.accuracy = -1.0;
  for (double delta : candidates) {
    const auto rejected_same = std::upper_bound(same_sorted.begin(), same_sorted.end(), delta) -
                               same_sorted.begin();
    const auto rejected_diff = std::upper_bound(diff_sorted.begin(), diff_sorted.end(), delta) -
                               diff_sorted.begin();
    const double tpr = (ns - static_cast<double>(rejected_same)) / ns;
    const double tnr = static_cast<double>(rejected_diff) / nd;
    const double balanced = 0.5 * (tpr + tnr);
    if (balanced > best.report.accuracy) {
      best.delta = delta;
      best.report.accuracy = balanced;
      best.report.false_accept_rate = 1.0 - tnr;
      best.report.false_reject_rate = 1.0 - tpr;
    }
  }
  best.report.same_pairs = static_cast<int>(same_scores.size());
  best.report.diff_pairs = static_cast<int>(diff_scores.size());
  return best;
}

VerificationThreshold calibrate_threshold(const EmbeddingModel& model,
                                          const std::vector<ImagePair>& same_pairs,
                                          const std::vector<ImagePair>& diff_pairs) {
  require(same_pairs.size() >= kMinCalibrationPairs &&
              diff_pairs.size() >= kMinCalibrationPairs,
          ErrorCode::kInsufficientData,
          "calibrate_threshold: need at least " +
              std::to_string(kMinCalibrationPairs) + " pairs of each kind");
  auto score = [&model](const ImagePair& p) {
    return cosine_similarity(embed(model, p.first).vector, embed(model, p.second).vector);
  };
  std::vector<double> same, diff;
  for (const auto& p : same_pairs) same.push_back(score(p));
  for (const auto& p : diff_pairs) diff.push_back(score(p));
  return calibrate_from_scores(same, diff);
}

std::string VerificationThreshold::to_json() const {
  nlohmann::json j;
  j["delta"] = delta;
  j["accuracy"] = report.accuracy;
  j["false_accept_rate"] = report.false_accept_rate;
  j["false_reject_rate"] = report.false_reject_rate;
  j["same_pairs"] = report.same_pairs;
  j["diff_pairs"] = report.diff_pairs;
  return j.dump();
}

}  // namespace at3d::recognition
