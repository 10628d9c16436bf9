#pragma once

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <tuple>

#include <unistd.h>

#include "melseg/corpus.hpp"
#include "melseg/error.hpp"
#include "melseg/random.hpp"
#include "melseg/rbm.hpp"

namespace melseg::test {

// (onset, duration, pitch, phrase_start) tuples.
inline Melody make_melody(std::string id,
                          std::initializer_list<std::tuple<int, int, int, int>> notes) {
  Melody m;
  m.id = std::move(id);
  for (const auto& [onset, duration, pitch, start] : notes) {
    m.notes.push_back({onset, duration, pitch, start != 0});
  }
  return m;
}

// Consecutive quarter notes with the given pitches and phrase-start flags.
inline Melody flagged_melody(std::string id, std::initializer_list<int> flags) {
  Melody m;
  m.id = std::move(id);
  int t = 0;
  for (int f : flags) {
    m.notes.push_back({t, 4, 60 + (t / 4) % 5, f != 0});
    t += 4;
  }
  return m;
}

// The closed-form 6x4 model also tabulated by tests/oracle/joint_enumeration.cpp.
inline RbmModel oracle_model() {
  RbmModel m = RbmModel::zeros(6, 4);
  for (int i = 0; i < 6; ++i) {
    m.a[i] = 0.4 * std::cos(2.1 * i);
    for (int j = 0; j < 4; ++j) m.W(i, j) = 0.9 * std::sin(1.3 * i + 0.7 * j + 0.5);
  }
  for (int j = 0; j < 4; ++j) m.b[j] = 0.3 * std::sin(1.7 * j + 0.2);
  return m;
}

// Gaussian-ish weights from the library engine; used where only a fixed
// seeded model is needed, not a reference value.
inline RbmModel seeded_model(int visible, int hidden, std::uint64_t seed, double scale = 1.0) {
  RbmModel m = RbmModel::zeros(visible, hidden);
  SplitMix64Engine rng(seed);
  auto draw = [&] { return scale * (rng.uniform() + rng.uniform() + rng.uniform() - 1.5); };
  for (int i = 0; i < visible; ++i) {
    m.a[i] = draw();
    for (int j = 0; j < hidden; ++j) m.W(i, j) = draw();
  }
  for (int j = 0; j < hidden; ++j) m.b[j] = draw();
  return m;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("melseg_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace melseg::test

#define CHECK_ERROR_CODE(expr, expected)                     \
  do {                                                       \
    bool thrown_ = false;                                    \
    try {                                                    \
      (void)(expr);                                          \
    } catch (const ::melseg::Error& e_) {                    \
      thrown_ = true;                                        \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());     \
    }                                                        \
    CHECK_MESSAGE(thrown_, "expected an Error from " #expr); \
  } while (0)
