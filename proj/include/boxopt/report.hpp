// Copyright 2026 The boxopt Authors
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

#ifndef BOXOPT_REPORT_HPP_
#define BOXOPT_REPORT_HPP_

#include <cmath>
#include <cstdio>
#include <string>

#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"

namespace boxopt {

// score = empty volume / unit volume; kpi = score / (1 + score), the share
// of shipped box volume that is empty.
struct Score {
  double score = 0.0;
  double kpi = 0.0;
};

inline Score report(Volume objective, Volume total_unit_volume) {
  if (total_unit_volume <= 0) {
    throw DomainError("total packing-unit volume must be positive");
  }
  if (objective < 0) throw DomainError("objective must be non-negative");
  const long double obj = objective;
  const long double total = total_unit_volume;
  // kpi computed as obj / (obj + total), exact up to one rounding.
  return {static_cast<double>(obj / total),
          static_cast<double>(obj / (obj + total))};
}

// Inverse of the kpi transform.
inline double score_from_kpi(double kpi) { return kpi / (1.0 - kpi); }

inline std::string significant(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace boxopt

#endif  // BOXOPT_REPORT_HPP_
