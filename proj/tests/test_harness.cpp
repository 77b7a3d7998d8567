#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fundom/error.hpp"
#include "fundom/harness.hpp"

#include <json.hpp>

#include <sstream>

using namespace fundom;

namespace {

BuildConfig small_config() {
  BuildConfig c;
  c.d = 4;
  c.I_max = 8;
  c.images = 4;
  c.grid = 256;
  c.samples = 8;
  c.rotation_iters = 2000;
  return c;
}

const std::string& small_descriptor() {
  static const std::string s = save_descriptor(*build_construction(small_config()));
  return s;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config text round-trips") {
  BuildConfig c = small_config();
  c.alpha = "cf:2,1,3,1";
  c.ladder = {53, 200};
  c.output = "out/x.json";
  std::string text = c.to_text();
  BuildConfig back = BuildConfig::parse(text);
  CHECK(back.to_text() == text);
  CHECK(back.alpha == "cf:2,1,3,1");
  CHECK(back.ladder == std::vector<Prec>{53, 200});
  CHECK(BuildConfig::parse(BuildConfig{}.to_text()).to_text() == BuildConfig{}.to_text());
}

TEST_CASE("config defaults") {
  BuildConfig c;
  CHECK(c.n_max == 4);
  CHECK(c.d == 6);
  CHECK(c.I_max == 32);
  CHECK(c.d_max == 24);
  CHECK(c.grid == 1024);
  CHECK(c.ladder == std::vector<Prec>{64, 128, 256, 512});
  CHECK(c.tolerance_log2 == -40);
  CHECK(c.effective_terms() == 7);
}

TEST_CASE("config parse errors and comments") {
  BuildConfig c = BuildConfig::parse("# comment\n\n d = 5   # trailing\nalpha=golden\n");
  CHECK(c.d == 5);
  CHECK_THROWS_AS(BuildConfig::parse("nonsense = 1\n"), Error);
  CHECK_THROWS_AS(BuildConfig::parse("d = five\n"), Error);
  CHECK_THROWS_AS(BuildConfig::parse("just a line\n"), Error);
  BuildConfig bad;
  bad.n_max = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = BuildConfig{};
  bad.d = 30;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("rational alpha is rejected at build") {
  BuildConfig c = small_config();
  c.alpha = "0.5";
  try {
    build_construction(c);
    FAIL("rational accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RationalInput);
  }
}

TEST_CASE("descriptor round-trip is bit exact") {
  const std::string& s = small_descriptor();
  auto c = load_descriptor(s);
  CHECK(save_descriptor(*c) == s);
  // Same config, same bytes.
  CHECK(save_descriptor(*build_construction(small_config())) == s);
  auto j = nlohmann::json::parse(s);
  CHECK(j["version"] == kDescriptorVersion);
  CHECK(j["measure"]["atoms"].size() == 17 * 16);
}

TEST_CASE("malformed descriptors are parse errors") {
  CHECK_THROWS_AS(load_descriptor("{"), Error);
  auto j = nlohmann::json::parse(small_descriptor());
  j["version"] = "other";
  CHECK_THROWS_AS(load_descriptor(j.dump()), Error);
  j = nlohmann::json::parse(small_descriptor());
  j["measure"].erase("atoms");
  CHECK_THROWS_AS(load_descriptor(j.dump()), Error);
}

TEST_CASE("full suite passes on a small golden build") {
  auto c = load_descriptor(small_descriptor());
  VerificationReport r = run_verification(*c, {});
  for (const auto& chk : r.checks) {
    INFO(chk.name);
    CHECK(chk.status == CheckStatus::pass);
  }
  CHECK(r.exit_code() == 0);
  CHECK(std::is_sorted(r.checks.begin(), r.checks.end(),
                       [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; }));
  auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["exit_code"] == 0);
}

TEST_CASE("suite filter runs only the selected checks") {
  auto c = load_descriptor(small_descriptor());
  VerificationReport r = run_verification(*c, {"lemma"});
  REQUIRE(r.checks.size() == 2);
  CHECK(r.checks[0].name == "lemma.decay");
  CHECK(r.checks[1].name == "lemma.equality");
  CHECK_THROWS_AS(run_verification(*c, {"nope"}), Error);
}

TEST_CASE("a negated atom mass fails normalization") {
  auto j = nlohmann::json::parse(small_descriptor());
  auto& atom = j["measure"]["atoms"][3];
  std::string lo = atom[2], hi = atom[3];
  atom[2] = "-" + hi;
  atom[3] = "-" + lo;
  auto c = load_descriptor(j.dump());
  VerificationReport r = run_verification(*c, {"conjugacy"});
  bool found = false;
  for (const auto& chk : r.checks)
    if (chk.name == "conjugacy.normalization") {
      found = true;
      CHECK(chk.status == CheckStatus::fail);
    }
  CHECK(found);
  CHECK(r.exit_code() == 1);
}

TEST_CASE("undecided outranks pass but not fail") {
  VerificationReport r;
  r.checks.push_back({"a", CheckStatus::pass, {}, 0});
  r.checks.push_back({"b", CheckStatus::undecided, {}, 0});
  CHECK(r.exit_code() == 3);
  r.checks.push_back({"c", CheckStatus::fail, {}, 0});
  CHECK(r.exit_code() == 1);
}

TEST_CASE("exports have the fixed header and inclusive grid") {
  auto c = load_descriptor(small_descriptor());
  for (const char* what : {"phi", "F", "derivative", "cdf"}) {
    std::ostringstream out;
    export_csv(*c, what, 100, out);
    auto ls = lines(out.str());
    REQUIRE(ls.size() == 102);
    CHECK(ls[0] == "x,value,width");
  }
  std::ostringstream f, der;
  export_csv(*c, "F", 200, f);
  export_csv(*c, "derivative", 200, der);
  auto fl = lines(f.str()), dl = lines(der.str());
  double prev = -1;
  for (std::size_t i = 1; i < fl.size(); ++i) {
    double v = std::stod(fl[i].substr(fl[i].find(',') + 1));
    CHECK(v > prev);
    prev = v;
    double dv = std::stod(dl[i].substr(dl[i].find(',') + 1));
    CHECK(dv > 0);
  }
  std::ostringstream junk;
  CHECK_THROWS_AS(export_csv(*c, "bogus", 10, junk), Error);
  CHECK_THROWS_AS(export_csv(*c, "phi", 1, junk), Error);
  CHECK_FALSE(is_export_kind("bogus"));
}

TEST_CASE("inspect summarizes the construction") {
  auto c = load_descriptor(small_descriptor());
  auto j = nlohmann::json::parse(inspect_json(*c));
  CHECK(j["alpha"] == "golden");
  CHECK(j["measure"]["atoms"] == 17 * 16);
  CHECK(j["levels"].size() == 4);
}
