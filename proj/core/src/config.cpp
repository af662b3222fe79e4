#include "evalbandit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace evalbandit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw data_error("config line " + std::to_string(line_number) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw data_error("config line " + std::to_string(line_number) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '"' && value.back() == '"' && value.size() >= 2)
      value = value.substr(1, value.size() - 2);
    if (!section.empty()) key = section + "." + key;
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open config file: " + path);
  return parse_key_values(in);
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw data_error("override must look like key=value: " + assignment);
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

namespace {

struct FieldErrors {
  std::vector<std::string> fields;
  void bad(const std::string& key, const std::string& why) { fields.push_back(key + " (" + why + ")"); }
};

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_vector(const std::string& s, std::vector<double>& out) {
  out.clear();
  for (const auto& part : split_list(s)) {
    double v = 0.0;
    if (!parse_double(part, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

/// Applies one option key to `opts`; returns false when the key is unknown.
bool apply_option_key(const std::string& key, const std::string& value, PolicyOptions& opts,
                      FieldErrors& errors) {
  auto want_double = [&](double& slot) {
    double v = 0.0;
    if (parse_double(value, v))
      slot = v;
    else
      errors.bad(key, "not a number");
  };
  if (key == "delta") {
    want_double(opts.delta);
  } else if (key == "eps_scale") {
    want_double(opts.eps_scale);
  } else if (key == "eps_power") {
    want_double(opts.eps_power);
  } else if (key == "mle_ridge") {
    if (value == "auto")
      opts.mle_ridge = -1.0;
    else
      want_double(opts.mle_ridge);
  } else if (key == "resolve_every") {
    std::int64_t v = 0;
    if (parse_int(value, v) && v >= 1)
      opts.resolve_every = static_cast<int>(v);
    else
      errors.bad(key, "not a positive integer");
  } else if (key == "lin_ucb_ridge") {
    want_double(opts.lin_ucb_ridge);
  } else if (key == "lin_ucb_theta_bound") {
    want_double(opts.lin_ucb_theta_bound);
  } else if (key == "exp4p_pmin_scale") {
    want_double(opts.exp4p_pmin_scale);
  } else {
    return false;
  }
  return true;
}

}  // namespace

ExperimentConfig config_from_key_values(const KeyValues& kv, const ExperimentConfig& base) {
  ExperimentConfig config = base;
  FieldErrors errors;

  auto get_double = [&](const std::string& key, double& slot) {
    double v = 0.0;
    if (parse_double(kv.at(key), v))
      slot = v;
    else
      errors.bad(key, "not a number");
  };
  auto get_int = [&](const std::string& key, auto& slot) {
    std::int64_t v = 0;
    if (parse_int(kv.at(key), v))
      slot = static_cast<std::decay_t<decltype(slot)>>(v);
    else
      errors.bad(key, "not an integer");
  };

  // Policy-scoped options are applied after the globals so a scoped override
  // always wins regardless of key order.
  std::vector<std::pair<std::string, std::string>> scoped;

  for (const auto& [key, value] : kv) {
    if (key == "setting") {
      if (value == "glm") {
        config.setting = Setting::glm;
        config.link = LinkKind::logistic;
        config.noise = NoiseKind::truncated_gaussian;
      } else if (value == "linear") {
        config.setting = Setting::linear;
        config.link = LinkKind::identity;
        config.noise = NoiseKind::gaussian;
      } else {
        errors.bad(key, "expected glm or linear");
      }
    } else if (key == "link") {
      if (value == "identity")
        config.link = LinkKind::identity;
      else if (value == "logistic")
        config.link = LinkKind::logistic;
      else
        errors.bad(key, "expected identity or logistic");
    } else if (key == "noise") {
      if (value == "gaussian")
        config.noise = NoiseKind::gaussian;
      else if (value == "truncated_gaussian")
        config.noise = NoiseKind::truncated_gaussian;
      else
        errors.bad(key, "expected gaussian or truncated_gaussian");
    } else if (key == "horizon") {
      get_int(key, config.horizon);
    } else if (key == "arms_select") {
      get_int(key, config.k_select);
    } else if (key == "arms_max") {
      get_int(key, config.k_max);
    } else if (key == "arm_schedule") {
      if (value == "constant")
        config.variable_arm_count = false;
      else if (value == "uniform")
        config.variable_arm_count = true;
      else
        errors.bad(key, "expected constant or uniform");
    } else if (key == "evaluators") {
      get_int(key, config.evaluators);
    } else if (key == "runs") {
      get_int(key, config.runs);
    } else if (key == "seed") {
      get_int(key, config.seed);
    } else if (key == "delta") {
      get_double(key, config.delta);
      config.options.delta = config.delta;  // policies inherit the confidence
    } else if (key == "alpha0") {
      get_double(key, config.alpha0);
    } else if (key == "sigma0") {
      get_double(key, config.sigma0);
    } else if (key == "alpha") {
      if (!parse_vector(value, config.alpha_explicit)) errors.bad(key, "not a number list");
    } else if (key == "sigma") {
      if (!parse_vector(value, config.sigma_explicit)) errors.bad(key, "not a number list");
    } else if (key == "reward_dist") {
      if (value == "truncated_gaussian")
        config.reward.kind = RewardKind::truncated_gaussian;
      else if (value == "uniform")
        config.reward.kind = RewardKind::uniform;
      else if (value == "bernoulli")
        config.reward.kind = RewardKind::bernoulli;
      else
        errors.bad(key, "expected truncated_gaussian, uniform or bernoulli");
    } else if (key == "reward_mu") {
      get_double(key, config.reward.mu);
    } else if (key == "reward_sd") {
      get_double(key, config.reward.sd);
    } else if (key == "reward_lo") {
      get_double(key, config.reward.lo);
    } else if (key == "reward_hi") {
      get_double(key, config.reward.hi);
    } else if (key == "reward_p") {
      get_double(key, config.reward.p);
    } else if (key == "reward_scale") {
      get_double(key, config.reward.scale);
    } else if (key == "policies") {
      config.policies = split_list(value);
    } else if (key == "record_every") {
      get_int(key, config.record_every);
    } else if (key == "threads") {
      get_int(key, config.threads);
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else if (apply_option_key(key, value, config.options, errors)) {
      // global policy option
    } else if (key.find('.') != std::string::npos &&
               is_known_policy(key.substr(0, key.find('.')))) {
      scoped.emplace_back(key, value);
    } else {
      errors.bad(key, "unknown key");
    }
  }

  for (const auto& [key, value] : scoped) {
    const auto dot = key.find('.');
    const std::string policy = key.substr(0, dot);
    const std::string option = key.substr(dot + 1);
    auto [it, inserted] = config.per_policy.try_emplace(policy, config.options);
    (void)inserted;
    if (!apply_option_key(option, value, it->second, errors)) errors.bad(key, "unknown key");
  }

  if (!errors.fields.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& f : errors.fields) message += "\n  - " + f;
    throw validation_error(message, errors.fields);
  }
  config.validate();
  return config;
}

}  // namespace evalbandit
