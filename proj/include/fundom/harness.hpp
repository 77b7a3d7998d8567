#pragma once

// Build configuration, the assembled construction, descriptor persistence,
// verification suites and CSV export.

#include "fundom/cantor.hpp"
#include "fundom/cocycle.hpp"
#include "fundom/conjugacy.hpp"
#include "fundom/diophantine.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fundom {

inline constexpr const char* kDescriptorVersion = "fundom-descriptor/1";

enum class SequenceMode { automatic, golden, general };

struct BuildConfig {
  std::string alpha = "golden";
  SequenceMode sequence = SequenceMode::automatic;
  std::size_t seq_terms = 0;  // 0: max(6, d + 1)
  std::size_t n_max = 4;
  std::size_t d = 6;
  long I_max = 32;
  std::size_t d_max = 24;
  std::size_t grid = 1024;
  std::vector<Prec> ladder{kDefaultLadder.begin(), kDefaultLadder.end()};
  long tolerance_log2 = kDefaultToleranceLog2;
  long gap_weight_log2 = kDefaultGapWeightLog2;
  long step_log2 = -30;       // finite-difference step of the first refinement stage
  long images = 8;            // |i| range for the image disjointness check
  long claim_range = 16;      // |n|, |m| range for translate disjointness
  std::size_t samples = 50;   // sampled points of C
  std::size_t rotation_iters = 10000;
  std::size_t max_atoms = std::size_t{1} << 20;
  unsigned long seed = 1;
  std::string output = "descriptor.json";

  std::size_t effective_terms() const;
  void validate() const;

  // Flat "key = value" text, one key per line, '#' starts a comment.
  std::string to_text() const;
  static BuildConfig parse(const std::string& text);
  void set(const std::string& key, const std::string& value);
  static const std::vector<std::string>& keys();
};

struct Construction {
  BuildConfig config;
  Alpha alpha;
  DigitSequence sequence;
  CocycleStack stack;
  WeightedAtomMeasure measure;
  ConjugacyDescriptor descriptor;
};

std::unique_ptr<Construction> build_construction(const BuildConfig& config);

std::string save_descriptor(const Construction& c);
std::unique_ptr<Construction> load_descriptor(const std::string& json_text);

enum class CheckStatus { pass, fail, undecided };
std::string_view to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::map<std::string, std::string> measured;
  double seconds = 0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;  // sorted by name
  int exit_code() const;            // 0 all pass, 3 any undecided, else 1
  std::string to_json() const;
};

// Suites: disjointness, lemma, summability, conjugacy, derivative,
// fundamental-domain, rotation-number. An empty list runs all of them.
const std::vector<std::string>& suite_names();
VerificationReport run_verification(const Construction& c, const std::vector<std::string>& suites);

// Writes `x,value,width` rows for x = j / samples, j = 0..samples.
// what is one of phi, F, derivative, cdf.
void export_csv(const Construction& c, const std::string& what, std::size_t samples, std::ostream& out);
bool is_export_kind(const std::string& what);

std::string inspect_json(const Construction& c);

}  // namespace fundom
