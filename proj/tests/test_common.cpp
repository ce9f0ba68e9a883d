#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "qsound/error.hpp"
#include "qsound/rng.hpp"
#include "qsound/wav.hpp"

namespace fs = std::filesystem;
using namespace qsound;

TEST_CASE("rng sequence is the standard mt19937_64 sequence") {
  // The 10000th output of the default-seeded engine is fixed by the standard.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("uniform draws stay in range") {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    const double o = rng.uniform_open01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(o > 0.0);
    REQUIRE(o < 1.0);
  }
}

TEST_CASE("below is unbiased enough and within bound") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
  CHECK(rng.below(1) == 0);
}

TEST_CASE("derived stream seeds differ per index and per seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_stream_seed(s, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("random permutation is a permutation and is reproducible") {
  Rng a(3), b(3);
  const auto p = random_permutation(100, a);
  CHECK(p == random_permutation(100, b));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  Rng c(3);
  CHECK(random_permutation(0, c).empty());
}

TEST_CASE("pcm16 quantization maps the peak to the requested level") {
  const std::vector<double> x{0.0, 0.5, -2.0, 1.0};
  const auto q = quantize_pcm16(x, 0.891);
  CHECK(q[2] == -static_cast<int>(std::lround(0.891 * 32767)));
  CHECK(q[1] == static_cast<int>(std::lround(0.25 * 0.891 * 32767)));
  const std::vector<double> silent(16, 0.0);
  for (auto s : quantize_pcm16(silent, 0.891)) CHECK(s == 0);
}

TEST_CASE("wav round trip") {
  const auto path = fs::temp_directory_path() / "qsound_test_roundtrip.wav";
  std::vector<double> x(2015);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * static_cast<double>(i));
  write_wav(path, x, 2015);
  const auto w = read_wav(path);
  CHECK(w.sample_rate == 2015);
  CHECK(w.channels == 1);
  CHECK(w.bits_per_sample == 16);
  REQUIRE(w.samples.size() == x.size());
  CHECK(w.duration_s() == doctest::Approx(1.0));
  const auto q = quantize_pcm16(x, kDefaultPeak);
  CHECK(std::equal(q.begin(), q.end(), w.samples.begin()));
  CHECK(fs::file_size(path) == 44 + 2 * x.size());
  fs::remove(path);
}

TEST_CASE("wav writer rejects empty input and reader rejects junk") {
  const auto path = fs::temp_directory_path() / "qsound_test_junk.wav";
  CHECK_THROWS_AS(write_wav(path, std::vector<double>{}, 44100), InvalidArgument);
  {
    std::ofstream f(path, std::ios::binary);
    f << "not a wav file at all, just text";
  }
  CHECK_THROWS(read_wav(path));
  fs::remove(path);
}
