#include "psdrl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace psdrl {

Mode mode_from_string(const std::string& s) {
  if (s == "psdrl") return Mode::psdrl;
  if (s == "eps-exploit") return Mode::eps_exploit;
  if (s == "eps-explore") return Mode::eps_explore;
  if (s == "fresh-value") return Mode::fresh_value;
  throw std::invalid_argument("unknown mode: " + s);
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::psdrl: return "psdrl";
    case Mode::eps_exploit: return "eps-exploit";
    case Mode::eps_explore: return "eps-explore";
    case Mode::fresh_value: return "fresh-value";
  }
  return "?";
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<T>(std::stoull(item)));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env.name", [](RunConfig& c, const std::string& v) { c.env_name = v; }},
      {"env.size", [](RunConfig& c, const std::string& v) { c.env_size = std::stoull(v); }},
      {"run.total_steps", [](RunConfig& c, const std::string& v) { c.total_steps = std::stoull(v); }},
      {"run.seeds", [](RunConfig& c, const std::string& v) { c.seeds = parse_list<std::uint64_t>(v); }},
      {"run.mode", [](RunConfig& c, const std::string& v) { c.mode = mode_from_string(v); }},
      {"run.out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"run.eval_interval", [](RunConfig& c, const std::string& v) { c.eval_interval = std::stoull(v); }},
      {"run.eval_episodes", [](RunConfig& c, const std::string& v) { c.eval_episodes = std::stoull(v); }},
      {"run.checkpoint_interval", [](RunConfig& c, const std::string& v) { c.checkpoint_interval = std::stoull(v); }},
      {"model.latent_dim", [](RunConfig& c, const std::string& v) { c.latent_dim = std::stoull(v); }},
      {"model.hidden_dim", [](RunConfig& c, const std::string& v) { c.hidden_dim = std::stoull(v); }},
      {"model.feature_dim", [](RunConfig& c, const std::string& v) { c.feature_dim = std::stoull(v); }},
      {"model.ae_hidden", [](RunConfig& c, const std::string& v) { c.ae_hidden = parse_list<std::size_t>(v); }},
      {"model.trunk_hidden", [](RunConfig& c, const std::string& v) { c.trunk_hidden = parse_list<std::size_t>(v); }},
      {"model.term_hidden", [](RunConfig& c, const std::string& v) { c.term_hidden = parse_list<std::size_t>(v); }},
      {"model.value_hidden", [](RunConfig& c, const std::string& v) { c.value_hidden = parse_list<std::size_t>(v); }},
      {"train.lr", [](RunConfig& c, const std::string& v) { c.lr = std::stod(v); }},
      {"train.batch_size", [](RunConfig& c, const std::string& v) { c.batch_size = std::stoull(v); }},
      {"train.seq_len", [](RunConfig& c, const std::string& v) { c.seq_len = std::stoull(v); }},
      {"train.iterations", [](RunConfig& c, const std::string& v) { c.training_iterations = std::stoull(v); }},
      {"train.bptt_horizon", [](RunConfig& c, const std::string& v) { c.bptt_horizon = std::stoull(v); }},
      {"train.target_update_freq", [](RunConfig& c, const std::string& v) { c.target_update_freq = std::stoull(v); }},
      {"train.gamma", [](RunConfig& c, const std::string& v) { c.gamma = std::stod(v); }},
      {"train.eps_hat", [](RunConfig& c, const std::string& v) { c.eps_hat = std::stod(v); }},
      {"posterior.sigma_s2", [](RunConfig& c, const std::string& v) { c.sigma_s2 = std::stod(v); }},
      {"posterior.sigma_r2", [](RunConfig& c, const std::string& v) { c.sigma_r2 = std::stod(v); }},
      {"posterior.noise2", [](RunConfig& c, const std::string& v) { c.noise2 = std::stod(v); }},
      {"buffer.capacity", [](RunConfig& c, const std::string& v) { c.buffer_capacity = std::stoull(v); }},
      {"schedule.m_early", [](RunConfig& c, const std::string& v) { c.m_early = std::stoull(v); }},
      {"schedule.m_late", [](RunConfig& c, const std::string& v) { c.m_late = std::stoull(v); }},
      {"schedule.early_cutoff", [](RunConfig& c, const std::string& v) { c.early_cutoff = std::stoull(v); }},
      {"ablation.eps_final", [](RunConfig& c, const std::string& v) { c.eps_final = std::stod(v); }},
      {"ablation.exploit_frac", [](RunConfig& c, const std::string& v) { c.exploit_frac = std::stod(v); }},
      {"ablation.fresh_value_multiplier", [](RunConfig& c, const std::string& v) { c.fresh_value_multiplier = std::stoull(v); }},
  };
  return table;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (env_name != "deep_sea" && env_name != "grid_maze" && env_name != "two_rooms")
    fail("env.name must be deep_sea, grid_maze, or two_rooms");
  if (env_name == "deep_sea" && env_size < 2) fail("env.size must be >= 2");
  if (total_steps == 0) fail("run.total_steps must be positive");
  if (seeds.empty()) fail("run.seeds must be non-empty");
  if (eval_episodes == 0) fail("run.eval_episodes must be positive");
  if (latent_dim == 0 || hidden_dim == 0) fail("model dims must be positive");
  if (feature_dim < 2) fail("model.feature_dim must be >= 2");
  if (lr <= 0.0) fail("train.lr must be positive");
  if (batch_size == 0 || seq_len == 0) fail("train.batch_size and train.seq_len must be positive");
  if (training_iterations == 0) fail("train.iterations must be positive");
  if (bptt_horizon == 0) fail("train.bptt_horizon must be positive");
  if (target_update_freq == 0) fail("train.target_update_freq must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("train.gamma must be in [0,1)");
  if (!(eps_hat >= 0.0 && eps_hat <= 1.0)) fail("train.eps_hat must be in [0,1]");
  if (!(sigma_s2 > 0.0 && sigma_r2 > 0.0 && noise2 > 0.0))
    fail("posterior variances must be positive");
  if (buffer_capacity == 0) fail("buffer.capacity must be positive");
  if (m_early == 0 || m_late == 0) fail("schedule periods must be positive");
  if (m_early > m_late) fail("schedule.m_early must be <= schedule.m_late");
  if (!(eps_final >= 0.0 && eps_final <= 1.0)) fail("ablation.eps_final must be in [0,1]");
  if (!(exploit_frac > 0.0 && exploit_frac <= 1.0))
    fail("ablation.exploit_frac must be in (0,1]");
  if (fresh_value_multiplier == 0) fail("ablation.fresh_value_multiplier must be positive");
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "env.name=" << env_name << "\n";
  os << "env.size=" << env_size << "\n";
  os << "run.total_steps=" << total_steps << "\n";
  os << "run.seeds=" << join_seeds(seeds) << "\n";
  os << "run.mode=" << mode_name(mode) << "\n";
  os << "run.out_dir=" << out_dir << "\n";
  os << "run.eval_interval=" << eval_interval << "\n";
  os << "run.eval_episodes=" << eval_episodes << "\n";
  os << "run.checkpoint_interval=" << checkpoint_interval << "\n";
  os << "model.latent_dim=" << latent_dim << "\n";
  os << "model.hidden_dim=" << hidden_dim << "\n";
  os << "model.feature_dim=" << feature_dim << "\n";
  os << "model.ae_hidden=" << join_sizes(ae_hidden) << "\n";
  os << "model.trunk_hidden=" << join_sizes(trunk_hidden) << "\n";
  os << "model.term_hidden=" << join_sizes(term_hidden) << "\n";
  os << "model.value_hidden=" << join_sizes(value_hidden) << "\n";
  os << "train.lr=" << fmt_double(lr) << "\n";
  os << "train.batch_size=" << batch_size << "\n";
  os << "train.seq_len=" << seq_len << "\n";
  os << "train.iterations=" << training_iterations << "\n";
  os << "train.bptt_horizon=" << bptt_horizon << "\n";
  os << "train.target_update_freq=" << target_update_freq << "\n";
  os << "train.gamma=" << fmt_double(gamma) << "\n";
  os << "train.eps_hat=" << fmt_double(eps_hat) << "\n";
  os << "posterior.sigma_s2=" << fmt_double(sigma_s2) << "\n";
  os << "posterior.sigma_r2=" << fmt_double(sigma_r2) << "\n";
  os << "posterior.noise2=" << fmt_double(noise2) << "\n";
  os << "buffer.capacity=" << buffer_capacity << "\n";
  os << "schedule.m_early=" << m_early << "\n";
  os << "schedule.m_late=" << m_late << "\n";
  os << "schedule.early_cutoff=" << early_cutoff << "\n";
  os << "ablation.eps_final=" << fmt_double(eps_final) << "\n";
  os << "ablation.exploit_frac=" << fmt_double(exploit_frac) << "\n";
  os << "ablation.fresh_value_multiplier=" << fresh_value_multiplier << "\n";
  return os.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": field '" +
                                  key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return RunConfig::from_text(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config file: " + path);
  os << cfg.to_text();
}

}  // namespace psdrl
