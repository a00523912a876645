#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <vector>

#include "mfpkit/parallel.hpp"
#include "mfpkit/rng.hpp"

using namespace mfpkit;

TEST_CASE("streams depend only on master seed and index", "[rng]") {
  Rng a = make_stream(42, 7);
  Rng b = make_stream(42, 7);
  Rng c = make_stream(42, 8);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
}

TEST_CASE("uniform draws stay in range", "[rng]") {
  Rng rng = make_stream(1, 0);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = uniform_open(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(uniform_index(rng, 7) < 7);
  }
  CHECK(sum / 20000 == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("standard normal moments", "[rng]") {
  Rng rng = make_stream(3, 0);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  CHECK(s / n == Catch::Approx(0.0).margin(0.02));
  CHECK(s2 / n == Catch::Approx(1.0).margin(0.03));
}

TEST_CASE("parallel_for fills every slot regardless of workers", "[parallel]") {
  for (unsigned w : {1u, 2u, 4u}) {
    std::vector<std::size_t> out(100, 0);
    parallel_for(out.size(), w, [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index", "[parallel]") {
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 11 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "11");
  }
}
