#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/rng.hpp"

namespace test {

inline std::vector<double> normals(mfpkit::Rng& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = mean + sd * mfpkit::standard_normal(rng);
  return v;
}

inline std::vector<double> uniforms(mfpkit::Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * mfpkit::uniform01(rng);
  return v;
}

/// Dataset with covariates named x1..xp and outcome y.
inline mfpkit::Dataset make_data(std::vector<std::vector<double>> xs, std::vector<double> y,
                                 mfpkit::Family family = mfpkit::Family::Gaussian) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < xs.size(); ++j) names.push_back("x" + std::to_string(j + 1));
  names.emplace_back("y");
  xs.push_back(std::move(y));
  return mfpkit::Dataset(std::move(names), std::move(xs), "y", family);
}

}  // namespace test
