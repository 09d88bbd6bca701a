#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "skewpivot/datagen.hpp"
#include "skewpivot/descriptor.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/harness.hpp"
#include "skewpivot/weights.hpp"

// Spec files are INI-like:
//
//   seed = 7          # keys before the first section are defaults
//   [lognormal-n10]
//   data = lognormal(0,1)
//   weights = multinomial-sym
//   method = I.2
//   theta = solve(1e-4)
//   n = 10

namespace skewpivot {

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const long long x = parse_integer(v);
  if (x < 0) fail(ErrorKind::config_error, key + " must be non-negative");
  return static_cast<std::size_t>(x);
}

inline std::string canonical_key(std::string k) {
  k = lowercase(trim(k));
  for (auto& c : k)
    if (c == '_') c = '-';
  if (k == "replications" || k == "reps") return "reps";
  if (k == "b" || k == "bootstrap-resamples" || k == "resamples") return "b";
  if (k == "policy" || k == "bootstrap-policy" || k == "resample-policy") return "bootstrap-policy";
  if (k == "denominator-mode") return "denominator";
  return k;
}

}  // namespace detail

inline ExperimentSpec spec_from_keys(const std::string& id, const KeyValues& kv) {
  ExperimentSpec s;
  s.id = id;
  bool kind_given = false;
  std::string side;
  for (const auto& [key, v] : kv) {
    if (key == "kind") {
      s.kind = parse_kind(v);
      kind_given = true;
    } else if (key == "data") {
      s.data_law = parse_data_law(v);
    } else if (key == "weights") {
      s.weight_scheme = parse_weight_scheme(v);
    } else if (key == "method") {
      s.method = parse_method(v);
    } else if (key == "theta") {
      s.theta = parse_theta(v);
    } else if (key == "side") {
      side = lowercase(trim(v));
    } else if (key == "n") {
      s.n = detail::parse_count(key, v);
    } else if (key == "reps") {
      s.replications = detail::parse_count(key, v);
    } else if (key == "alpha") {
      s.alpha = parse_real(v);
    } else if (key == "b") {
      s.bootstrap_resamples = detail::parse_count(key, v);
    } else if (key == "seed") {
      const long long x = parse_integer(v);
      if (x < 0) fail(ErrorKind::config_error, "seed must be non-negative");
      s.seed = static_cast<std::uint64_t>(x);
    } else if (key == "denominator") {
      const std::string m = lowercase(trim(v));
      if (m == "expected") s.denominator_mode = DenominatorMode::expected;
      else if (m == "empirical") s.denominator_mode = DenominatorMode::empirical;
      else fail(ErrorKind::config_error, "denominator must be expected or empirical");
    } else if (key == "bootstrap-policy") {
      const std::string m = lowercase(trim(v));
      if (m == "propagate-infinite" || m == "infinite") s.resample_policy = ResamplePolicy::propagate_infinite;
      else if (m == "redraw") s.resample_policy = ResamplePolicy::redraw;
      else fail(ErrorKind::config_error, "bootstrap-policy must be propagate-infinite or redraw");
    } else {
      fail(ErrorKind::config_error, "unknown key '" + key + "' in [" + id + "]");
    }
  }
  if (!side.empty()) {
    if (s.theta.mode != ThetaSpec::Mode::solve) fail(ErrorKind::config_error, "side only applies to theta = solve(...)");
    if (side == "below") s.theta.side = Side::below_mean;
    else if (side == "above") s.theta.side = Side::above_mean;
    else fail(ErrorKind::config_error, "side must be above or below");
  }
  if (!kind_given && s.data_law.dimension() == 2) s.kind = ExperimentKind::bivariate;
  validate(s);
  return s;
}

inline std::vector<ExperimentSpec> parse_spec_stream(std::istream& in) {
  KeyValues defaults;
  std::vector<std::pair<std::string, KeyValues>> sections;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::config_error, where + "unterminated section header");
      std::string id = trim(line.substr(1, line.size() - 2));
      if (id.empty()) fail(ErrorKind::config_error, where + "empty section name");
      for (const auto& sec : sections)
        if (sec.first == id) fail(ErrorKind::config_error, where + "duplicate section [" + id + "]");
      sections.emplace_back(std::move(id), KeyValues{});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::config_error, where + "expected key = value");
    const std::string key = detail::canonical_key(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::config_error, where + "empty key");
    KeyValues& target = sections.empty() ? defaults : sections.back().second;
    if (target.count(key)) fail(ErrorKind::config_error, where + "duplicate key '" + key + "'");
    target[key] = value;
  }
  if (sections.empty()) fail(ErrorKind::config_error, "spec file has no [experiment] sections");
  std::vector<ExperimentSpec> out;
  for (auto& [id, kv] : sections) {
    KeyValues merged = defaults;
    for (auto& [k, v] : kv) merged[k] = v;
    out.push_back(spec_from_keys(id, merged));
  }
  return out;
}

inline std::vector<ExperimentSpec> parse_spec_text(const std::string& text) {
  std::istringstream is(text);
  return parse_spec_stream(is);
}

// Round-trips through parse_spec_text.
inline std::string format_spec(const ExperimentSpec& s) {
  std::ostringstream os;
  os << '[' << s.id << "]\n";
  os << "kind = " << kind_name(s.kind) << '\n';
  os << "data = " << s.data_law.descriptor() << '\n';
  if (s.weight_scheme) os << "weights = " << s.weight_scheme->descriptor() << '\n';
  os << "method = " << method_name(s.method) << '\n';
  os << "theta = " << s.theta.descriptor() << '\n';
  os << "n = " << s.n << '\n';
  os << "reps = " << s.replications << '\n';
  os << "alpha = " << format_real(s.alpha) << '\n';
  os << "B = " << s.bootstrap_resamples << '\n';
  os << "seed = " << s.seed << '\n';
  os << "denominator = " << (s.denominator_mode == DenominatorMode::expected ? "expected" : "empirical") << '\n';
  os << "bootstrap-policy = "
     << (s.resample_policy == ResamplePolicy::propagate_infinite ? "propagate-infinite" : "redraw") << '\n';
  return os.str();
}

}  // namespace skewpivot
