#include "fundom/harness.hpp"

#include "fundom/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace fundom {

using nlohmann::json;

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view mode_name(SequenceMode m) {
  switch (m) {
    case SequenceMode::automatic: return "auto";
    case SequenceMode::golden: return "golden";
    case SequenceMode::general: return "general";
  }
  return "auto";
}

std::string ladder_text(const std::vector<Prec>& ladder) {
  std::string s;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ladder[i]);
  }
  return s;
}

// Key/value pairs in canonical order.
std::vector<std::pair<std::string, std::string>> entries(const BuildConfig& c) {
  return {
      {"alpha", c.alpha},
      {"sequence", std::string(mode_name(c.sequence))},
      {"seq_terms", std::to_string(c.seq_terms)},
      {"n_max", std::to_string(c.n_max)},
      {"d", std::to_string(c.d)},
      {"I_max", std::to_string(c.I_max)},
      {"d_max", std::to_string(c.d_max)},
      {"grid", std::to_string(c.grid)},
      {"ladder", ladder_text(c.ladder)},
      {"tolerance_log2", std::to_string(c.tolerance_log2)},
      {"gap_weight_log2", std::to_string(c.gap_weight_log2)},
      {"step_log2", std::to_string(c.step_log2)},
      {"images", std::to_string(c.images)},
      {"claim_range", std::to_string(c.claim_range)},
      {"samples", std::to_string(c.samples)},
      {"rotation_iters", std::to_string(c.rotation_iters)},
      {"max_atoms", std::to_string(c.max_atoms)},
      {"seed", std::to_string(c.seed)},
      {"output", c.output},
  };
}

}  // namespace

// --------------------------------------------------------------- config --

std::size_t BuildConfig::effective_terms() const { return seq_terms ? seq_terms : std::max<std::size_t>(6, d + 1); }

const std::vector<std::string>& BuildConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (auto& [key, v] : entries(BuildConfig{})) out.push_back(key);
    return out;
  }();
  return k;
}

void BuildConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "alpha") {
    alpha = v;
  } else if (key == "sequence") {
    if (v == "auto") sequence = SequenceMode::automatic;
    else if (v == "golden") sequence = SequenceMode::golden;
    else if (v == "general") sequence = SequenceMode::general;
    else throw Error(ErrorCode::ParseError, "sequence must be auto, golden or general");
  } else if (key == "seq_terms") {
    seq_terms = parse_number<std::size_t>(key, v);
  } else if (key == "n_max") {
    n_max = parse_number<std::size_t>(key, v);
  } else if (key == "d") {
    d = parse_number<std::size_t>(key, v);
  } else if (key == "I_max") {
    I_max = parse_number<long>(key, v);
  } else if (key == "d_max") {
    d_max = parse_number<std::size_t>(key, v);
  } else if (key == "grid") {
    grid = parse_number<std::size_t>(key, v);
  } else if (key == "ladder") {
    ladder.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) ladder.push_back(parse_number<Prec>(key, trim(item)));
  } else if (key == "tolerance_log2") {
    tolerance_log2 = parse_number<long>(key, v);
  } else if (key == "gap_weight_log2") {
    gap_weight_log2 = parse_number<long>(key, v);
  } else if (key == "step_log2") {
    step_log2 = parse_number<long>(key, v);
  } else if (key == "images") {
    images = parse_number<long>(key, v);
  } else if (key == "claim_range") {
    claim_range = parse_number<long>(key, v);
  } else if (key == "samples") {
    samples = parse_number<std::size_t>(key, v);
  } else if (key == "rotation_iters") {
    rotation_iters = parse_number<std::size_t>(key, v);
  } else if (key == "max_atoms") {
    max_atoms = parse_number<std::size_t>(key, v);
  } else if (key == "seed") {
    seed = parse_number<unsigned long>(key, v);
  } else if (key == "output") {
    output = v;
  } else {
    throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
  }
}

std::string BuildConfig::to_text() const {
  std::string out = "# fundom build configuration\n";
  for (auto& [k, v] : entries(*this)) out += k + " = " + v + "\n";
  return out;
}

BuildConfig BuildConfig::parse(const std::string& text) {
  BuildConfig c;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

void BuildConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  need(!alpha.empty(), "alpha must be set");
  need(n_max >= 1, "n_max must be >= 1");
  need(d >= 1 && d <= 24, "d must be in 1..24");
  need(I_max >= 1, "I_max must be >= 1");
  need(d_max >= 1 && d_max <= 24, "d_max must be in 1..24");
  need(grid >= 2, "grid must be >= 2");
  need(!ladder.empty() && std::is_sorted(ladder.begin(), ladder.end()) && ladder.front() >= 2,
       "ladder must be a non-empty increasing list of precisions");
  need(tolerance_log2 < 0 && gap_weight_log2 < 0 && step_log2 < 0, "log2 tolerances must be negative");
  need(images >= 0 && images <= I_max, "images must be in 0..I_max");
  need(claim_range >= 1, "claim_range must be >= 1");
  need(samples >= 1 && rotation_iters >= 1 && max_atoms >= 1, "sample and iteration budgets must be >= 1");
  need(seq_terms == 0 || seq_terms >= d + 1, "seq_terms must be at least d + 1");
}

// ---------------------------------------------------------------- build --

std::unique_ptr<Construction> build_construction(const BuildConfig& config) {
  config.validate();
  Alpha alpha = Alpha::parse(config.alpha);
  bool golden = config.sequence == SequenceMode::golden ||
                (config.sequence == SequenceMode::automatic && alpha.is_golden());
  if (golden && !alpha.is_golden())
    throw Error(ErrorCode::InvalidArgument, "the golden sequence requires alpha = golden");
  DigitSequence seq;
  if (golden) {
    seq = golden_digit_sequence(config.effective_terms());
  } else {
    ApproximationProfile profile(alpha);
    seq = build_digit_sequence(profile, config.effective_terms());
  }
  CocycleStack stack = CocycleStack::build(alpha, seq, config.n_max, config.d_max, config.ladder);
  WeightedAtomMeasure mu = assemble_mu(stack, config.I_max, config.d, config.max_atoms);
  ConjugacyDescriptor desc(mu, alpha, config.gap_weight_log2, config.tolerance_log2);
  return std::make_unique<Construction>(
      Construction{config, std::move(alpha), std::move(seq), std::move(stack), std::move(mu), std::move(desc)});
}

// ---------------------------------------------------------- persistence --

std::string save_descriptor(const Construction& c) {
  json j;
  j["version"] = kDescriptorVersion;
  json cfg = json::object();
  for (auto& [k, v] : entries(c.config))
    if (k != "output") cfg[k] = v;
  j["config"] = cfg;
  j["alpha"] = c.alpha.spec();

  json q = json::array();
  for (const auto& v : c.sequence.q) q.push_back(v.get_str());
  j["sequence"] = {{"provenance", std::string(to_string(c.sequence.provenance))}, {"q", q}};

  json levels = json::array();
  for (const auto& lv : c.stack.levels())
    levels.push_back({{"level", lv.level()},
                      {"depth", lv.geometry().depth},
                      {"epsilon", lv.geometry().epsilon.str()},
                      {"gap", lv.geometry().gap.str()}});
  j["levels"] = levels;

  const auto& mu = c.measure;
  json atoms = json::array();
  for (const auto& a : mu.atoms())
    atoms.push_back(json::array({a.block, a.cylinder, a.mass.lo().str(), a.mass.hi().str()}));
  j["measure"] = {{"radius", mu.radius()},
                  {"depth", mu.depth()},
                  {"normalizer", json::array({mu.normalizer().lo().str(), mu.normalizer().hi().str()})},
                  {"atoms", atoms}};
  return j.dump(1) + "\n";
}

std::unique_ptr<Construction> load_descriptor(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("descriptor is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<std::string>() != kDescriptorVersion)
      throw Error(ErrorCode::ParseError, "unsupported descriptor version");
    BuildConfig config;
    for (auto& [k, v] : j.at("config").items()) config.set(k, v.get<std::string>());
    config.validate();
    Alpha alpha = Alpha::parse(j.at("alpha").get<std::string>());

    DigitSequence seq;
    const auto& js = j.at("sequence");
    std::string prov = js.at("provenance").get<std::string>();
    if (prov == to_string(SequenceProvenance::golden_fast_path)) seq.provenance = SequenceProvenance::golden_fast_path;
    else if (prov == to_string(SequenceProvenance::general_construction))
      seq.provenance = SequenceProvenance::general_construction;
    else throw Error(ErrorCode::ParseError, "unknown sequence provenance '" + prov + "'");
    for (const auto& v : js.at("q")) seq.q.emplace_back(v.get<std::string>(), 10);
    if (seq.q.empty() || seq.q.front() != 1) throw Error(ErrorCode::ParseError, "digit sequence must start with 1");

    std::vector<BumpLevel> levels;
    for (const auto& lv : j.at("levels")) {
      LevelGeometry g;
      g.depth = lv.at("depth").get<std::size_t>();
      g.epsilon = BigFloat::parse(lv.at("epsilon").get<std::string>());
      g.gap = BigFloat::parse(lv.at("gap").get<std::string>());
      levels.emplace_back(lv.at("level").get<std::size_t>(), seq, std::move(g));
    }
    CocycleStack stack(alpha, seq, std::move(levels));

    const auto& jm = j.at("measure");
    const auto& jn = jm.at("normalizer");
    Interval z(BigFloat::parse(jn.at(0).get<std::string>()), BigFloat::parse(jn.at(1).get<std::string>()));
    std::vector<std::pair<long, std::uint32_t>> ids;
    std::vector<Interval> masses;
    for (const auto& a : jm.at("atoms")) {
      ids.emplace_back(a.at(0).get<long>(), a.at(1).get<std::uint32_t>());
      masses.emplace_back(BigFloat::parse(a.at(2).get<std::string>()), BigFloat::parse(a.at(3).get<std::string>()));
    }
    WeightedAtomMeasure mu = WeightedAtomMeasure::from_masses(stack, jm.at("radius").get<long>(),
                                                              jm.at("depth").get<std::size_t>(), z, std::move(ids),
                                                              std::move(masses));
    ConjugacyDescriptor desc(mu, alpha, config.gap_weight_log2, config.tolerance_log2);
    return std::make_unique<Construction>(
        Construction{config, std::move(alpha), std::move(seq), std::move(stack), std::move(mu), std::move(desc)});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed descriptor: ") + e.what());
  }
}

std::string inspect_json(const Construction& c) {
  json j;
  j["version"] = kDescriptorVersion;
  j["alpha"] = c.alpha.spec();
  json q = json::array();
  for (const auto& v : c.sequence.q) {
    std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
    q.push_back(bits <= 64 ? v.get_str() : "2^" + std::to_string(bits - 1) + "..");
  }
  j["sequence"] = {{"provenance", std::string(to_string(c.sequence.provenance))}, {"q", q}};
  json levels = json::array();
  for (const auto& lv : c.stack.levels())
    levels.push_back({{"level", lv.level()},
                      {"depth", lv.geometry().depth},
                      {"epsilon", lv.geometry().epsilon.to_double()},
                      {"gap", lv.geometry().gap.to_double()}});
  j["levels"] = levels;
  const auto& mu = c.measure;
  j["measure"] = {{"radius", mu.radius()},
                  {"depth", mu.depth()},
                  {"atoms", mu.atoms().size()},
                  {"normalizer", mu.normalizer().mid_double()},
                  {"position_bits", mu.position_prec()},
                  {"coverage_lower", mu.coverage().lo().to_double()},
                  {"all_level_tail", mu.all_level_tail().hi().to_double()},
                  {"block_tail", mu.block_tail().hi().to_double()}};
  j["descriptor"] = {{"pieces", c.descriptor.pieces()}, {"bits", c.descriptor.prec()}};
  return j.dump(2) + "\n";
}

}  // namespace fundom
