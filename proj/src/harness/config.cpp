#include "harness/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace harness {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("key '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double out = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + value + "'");
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cur = trim(cur);
  if (!cur.empty() || !parts.empty()) parts.push_back(cur);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> parse;
  std::function<std::string(const ExperimentConfig&)> format;
};

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto add = [&f](const std::string& key, auto parse, auto format) {
      f.push_back(Field{key, parse, format});
    };
    auto int_field = [&](const std::string& key, auto member) {
      add(key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = static_cast<std::remove_reference_t<decltype(c.*member)>>(
                parse_int(key, v));
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.*member);
          });
    };
    auto str_field = [&](const std::string& key, auto member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; });
    };

    str_field("learner", &ExperimentConfig::learner);

    auto env_int = [&](const std::string& key, auto member) {
      add(key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.env.*member = static_cast<int>(parse_int(key, v));
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.env.*member);
          });
    };
    auto env_dbl = [&](const std::string& key, auto member) {
      add(key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.env.*member = parse_double(key, v);
          },
          [member](const ExperimentConfig& c) {
            return format_double(c.env.*member);
          });
    };
    env_int("env.grid_width", &matchenv::EnvConfig::grid_width);
    env_int("env.grid_height", &matchenv::EnvConfig::grid_height);
    env_int("env.num_agents", &matchenv::EnvConfig::num_agents);
    env_dbl("env.dar", &matchenv::EnvConfig::dar);
    add("env.zone_rates",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<double> rates;
          for (const std::string& part : split_commas(v))
            rates.push_back(parse_double("env.zone_rates", part));
          c.env.zone_rates = std::move(rates);
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (size_t i = 0; i < c.env.zone_rates.size(); ++i) {
            if (i) out += ",";
            out += format_double(c.env.zone_rates[i]);
          }
          return out;
        });
    env_int("env.ttl", &matchenv::EnvConfig::ttl);
    add("env.trip_pattern",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "uniform")
            c.env.trip_pattern = matchenv::TripPattern::uniform;
          else if (v == "non_uniform")
            c.env.trip_pattern = matchenv::TripPattern::non_uniform;
          else
            throw ConfigError(
                "key 'env.trip_pattern' expects uniform or non_uniform, got '" +
                v + "'");
        },
        [](const ExperimentConfig& c) {
          return c.env.trip_pattern == matchenv::TripPattern::uniform
                     ? "uniform"
                     : "non_uniform";
        });
    add("env.arrival",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "constant")
            c.env.arrival = matchenv::ArrivalSchedule::constant;
          else if (v == "sine")
            c.env.arrival = matchenv::ArrivalSchedule::sine;
          else if (v == "alternate")
            c.env.arrival = matchenv::ArrivalSchedule::alternate;
          else
            throw ConfigError(
                "key 'env.arrival' expects constant, sine or alternate, got '" +
                v + "'");
        },
        [](const ExperimentConfig& c) -> std::string {
          switch (c.env.arrival) {
            case matchenv::ArrivalSchedule::constant: return "constant";
            case matchenv::ArrivalSchedule::sine: return "sine";
            case matchenv::ArrivalSchedule::alternate: return "alternate";
          }
          return "constant";
        });
    env_dbl("env.arrival_period", &matchenv::EnvConfig::arrival_period);
    env_dbl("env.arrival_amplitude", &matchenv::EnvConfig::arrival_amplitude);
    env_dbl("env.travel_time_scale", &matchenv::EnvConfig::travel_time_scale);
    env_dbl("env.revenue_base", &matchenv::EnvConfig::revenue_base);
    env_dbl("env.revenue_per_distance",
            &matchenv::EnvConfig::revenue_per_distance);

    auto hp_int = [&](const std::string& key, auto member) {
      add(key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.hp.*member = static_cast<int>(parse_int(key, v));
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.hp.*member);
          });
    };
    auto hp_dbl = [&](const std::string& key, auto member) {
      add(key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.hp.*member = parse_double(key, v);
          },
          [member](const ExperimentConfig& c) {
            return format_double(c.hp.*member);
          });
    };
    hp_dbl("hp.gamma", &learners::HyperParams::gamma);
    hp_dbl("hp.lr", &learners::HyperParams::lr);
    hp_dbl("hp.lr_policy", &learners::HyperParams::lr_policy);
    hp_dbl("hp.lr_value", &learners::HyperParams::lr_value);
    hp_dbl("hp.beta", &learners::HyperParams::beta);
    hp_dbl("hp.lambda", &learners::HyperParams::lambda);
    hp_dbl("hp.epsilon_start", &learners::HyperParams::epsilon_start);
    hp_dbl("hp.epsilon_floor", &learners::HyperParams::epsilon_floor);
    hp_int("hp.replay_capacity", &learners::HyperParams::replay_capacity);
    hp_int("hp.replay_min_fill", &learners::HyperParams::replay_min_fill);
    hp_int("hp.batch_size", &learners::HyperParams::batch_size);
    hp_int("hp.target_sync", &learners::HyperParams::target_sync);
    hp_int("hp.k_step", &learners::HyperParams::k_step);
    hp_dbl("hp.alpha", &learners::HyperParams::alpha);
    add("hp.alpha_anneal",
        [](ExperimentConfig& c, const std::string& v) {
          c.hp.alpha_anneal = parse_bool("hp.alpha_anneal", v);
        },
        [](const ExperimentConfig& c) {
          return c.hp.alpha_anneal ? "true" : "false";
        });
    add("hp.hidden",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<int> sizes;
          for (const std::string& part : split_commas(v))
            sizes.push_back(static_cast<int>(parse_int("hp.hidden", part)));
          c.hp.hidden = std::move(sizes);
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (size_t i = 0; i < c.hp.hidden.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(c.hp.hidden[i]);
          }
          return out;
        });
    hp_dbl("hp.dropout", &learners::HyperParams::dropout);
    hp_int("hp.train_period", &learners::HyperParams::train_period);
    hp_int("hp.density_buckets", &learners::HyperParams::density_buckets);
    add("hp.density_head",
        [](ExperimentConfig& c, const std::string& v) {
          if (v != "auto" && v != "on" && v != "off")
            throw ConfigError(
                "key 'hp.density_head' expects auto, on or off, got '" + v +
                "'");
          c.density_head = v;
        },
        [](const ExperimentConfig& c) { return c.density_head; });
    add("hp.shared_brain",
        [](ExperimentConfig& c, const std::string& v) {
          c.shared_brain = parse_bool("hp.shared_brain", v);
        },
        [](const ExperimentConfig& c) {
          return c.shared_brain ? "true" : "false";
        });

    int_field("run.steps", &ExperimentConfig::steps);
    int_field("run.eval_period", &ExperimentConfig::eval_period);
    int_field("run.converged_periods", &ExperimentConfig::converged_periods);
    add("run.seeds",
        [](ExperimentConfig& c, const std::string& v) {
          std::vector<uint64_t> seeds;
          for (const std::string& part : split_commas(v))
            seeds.push_back(
                static_cast<uint64_t>(parse_int("run.seeds", part)));
          c.seeds = std::move(seeds);
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (size_t i = 0; i < c.seeds.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(c.seeds[i]);
          }
          return out;
        });
    str_field("run.out", &ExperimentConfig::out);
    return f;
  }();
  return fields;
}

const Field* find_field(const std::string& key) {
  for (const Field& f : schema())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace

learners::LearnerKind ExperimentConfig::kind() const {
  try {
    return learners::learner_kind_from(learner);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

int ExperimentConfig::density_head_flag() const {
  if (density_head == "on") return 1;
  if (density_head == "off") return 0;
  return -1;
}

void ExperimentConfig::validate() const {
  learners::LearnerKind k = kind();
  try {
    env.validate();
    hp.validate();
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  if ((k == learners::LearnerKind::dedqn ||
       k == learners::LearnerKind::dea2c) &&
      density_head == "off")
    throw ConfigError("learner '" + learner + "' requires hp.density_head on");
  if ((k == learners::LearnerKind::tabq || k == learners::LearnerKind::mmfq) &&
      density_head == "on")
    throw ConfigError("learner '" + learner + "' has no density head");
  if (steps < 1) throw ConfigError("run.steps must be >= 1");
  if (eval_period < 1) throw ConfigError("run.eval_period must be >= 1");
  if (converged_periods < 0)
    throw ConfigError("run.converged_periods must be >= 0");
  if (steps % eval_period != 0)
    throw ConfigError("run.steps must be a multiple of run.eval_period");
  if (static_cast<long long>(converged_periods) * eval_period > steps)
    throw ConfigError(
        "run.converged_periods must fit inside run.steps / run.eval_period");
  if (seeds.empty()) throw ConfigError("run.seeds must list at least one seed");
  if (out.empty()) throw ConfigError("run.out must not be empty");
}

void apply_config_stream(ExperimentConfig& cfg, std::istream& in,
                         const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno += 1;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string text = trim(line);
    if (text.empty()) continue;
    size_t eq = text.find('=');
    std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos)
      throw ConfigError(where + "expected 'key = value'");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      f->parse(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  apply_config_stream(cfg, in, path);
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must look like key=value");
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown key '" + key + "'");
  f->parse(cfg, value);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const Field& f : schema()) os << f.key << " = " << f.format(cfg) << "\n";
  return os.str();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : schema()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

}  // namespace harness
