#include "psdrl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psdrl {

namespace {

constexpr char kCkptMagic[8] = {'P', 'S', 'D', 'R', 'L', 'C', 'K', '1'};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}
std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("checkpoint: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string resolve_out_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("PSDRL_OUT_DIR"); env && *env) return env;
  return cfg.out_dir;
}

void write_pgm(const std::string& path, const Vec& img, std::size_t rows,
               std::size_t cols) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write image: " + path);
  os << "P5\n" << cols << " " << rows << "\n255\n";
  for (double v : img) {
    double c = std::min(1.0, std::max(0.0, v));
    os.put(static_cast<char>(static_cast<int>(c * 255.0 + 0.5)));
  }
}

}  // namespace

double evaluate(const Agent& agent, const Env& env_proto, std::size_t episodes) {
  double total = 0.0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    auto env = env_proto.clone_fresh();
    Vec s = env->reset();
    Vec h(agent.config().hidden_dim, 0.0);
    bool terminal = false;
    double ret = 0.0;
    while (!terminal) {
      Vec z = agent.autoencoder().encode(s);
      Vec h_next;
      int a = agent.act_greedy(z, h, h_next);
      double r;
      Vec s_next;
      env->step(a, r, s_next, terminal);
      ret += r;
      s = std::move(s_next);
      h = std::move(h_next);
    }
    total += ret;
  }
  return total / static_cast<double>(episodes);
}

std::string metrics_csv_header() {
  return "step,train_return,eval_return,loss_ae,loss_fw,loss_term,loss_value,"
         "trace_sigma_s,model_id";
}

std::string metrics_csv_row(const MetricsRecord& rec) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : ""; };
  std::ostringstream os;
  os << rec.step << "," << opt(rec.train_return) << "," << opt(rec.eval_return) << ","
     << opt(rec.loss_ae) << "," << opt(rec.loss_fw) << "," << opt(rec.loss_term) << ","
     << opt(rec.loss_value) << "," << opt(rec.trace_sigma_s) << ","
     << (rec.model_id ? std::to_string(*rec.model_id) : "");
  return os.str();
}

void save_checkpoint(const std::string& path, const Agent& agent, const Env& env) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os.write(kCkptMagic, sizeof(kCkptMagic));
  std::string cfg_text = agent.config().to_text();
  write_u64(os, cfg_text.size());
  os.write(cfg_text.data(), static_cast<std::streamsize>(cfg_text.size()));
  agent.save(os);
  env.save_state(os);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCkptMagic, sizeof(kCkptMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic header");
  std::string cfg_text(read_u64(is), '\0');
  is.read(cfg_text.data(), static_cast<std::streamsize>(cfg_text.size()));
  Checkpoint ck;
  ck.cfg = RunConfig::from_text(cfg_text);
  ck.agent = std::make_unique<Agent>(Agent::load(is, ck.cfg));
  ck.env = make_env(ck.cfg.env_name, ck.cfg.env_size);
  ck.env->load_state(is);
  return ck;
}

namespace {

SeedResult run_one_seed(const RunConfig& cfg, std::uint64_t seed,
                        const std::string& out_dir) {
  SeedResult result;
  result.seed = seed;
  result.csv_path = out_dir + "/metrics_seed" + std::to_string(seed) + ".csv";
  std::ofstream csv(result.csv_path);
  if (!csv) throw std::runtime_error("cannot write CSV: " + result.csv_path);
  csv << metrics_csv_header() << "\n";

  auto env = make_env(cfg.env_name, cfg.env_size);
  Agent agent(cfg, seed);
  double last_eval = 0.0;
  MetricsSink sink = [&](const MetricsRecord& rec) {
    if (rec.eval_return) last_eval = *rec.eval_return;
    csv << metrics_csv_row(rec) << "\n";
    if (!csv) throw std::runtime_error("CSV write failure: " + result.csv_path);
  };
  EvalFn eval_fn = [&](const Agent& a) { return evaluate(a, *env, cfg.eval_episodes); };
  CheckpointFn ckpt_fn;
  if (cfg.checkpoint_interval)
    ckpt_fn = [&](const Agent& a, std::size_t step) {
      save_checkpoint(out_dir + "/ckpt_seed" + std::to_string(seed) + "_step" +
                          std::to_string(step) + ".bin",
                      a, *env);
    };
  agent.run(*env, sink, eval_fn, ckpt_fn);
  csv.flush();
  result.final_eval_return = last_eval;
  return result;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  std::string out_dir = resolve_out_dir(cfg);
  std::filesystem::create_directories(out_dir);

  {
    // Timestamps live only here, never in the metrics CSVs.
    std::ofstream manifest(out_dir + "/run_manifest.txt");
    auto now = std::chrono::system_clock::now();
    manifest << "started_unix="
             << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
             << "\n"
             << cfg.to_text();
  }

  ExperimentResult result;
  for (std::uint64_t seed : cfg.seeds)
    result.seeds.push_back(run_one_seed(cfg, seed, out_dir));

  std::vector<double> finals;
  for (const SeedResult& s : result.seeds) finals.push_back(s.final_eval_return);
  result.median_final_eval = median(finals);
  double sum = 0.0;
  for (double v : finals) sum += v;
  result.mean_final_eval = sum / static_cast<double>(finals.size());

  std::ofstream summary(out_dir + "/summary.csv");
  summary << "seed,final_eval_return\n";
  for (const SeedResult& s : result.seeds)
    summary << s.seed << "," << fmt_double(s.final_eval_return) << "\n";
  summary << "median," << fmt_double(result.median_final_eval) << "\n";
  summary << "mean," << fmt_double(result.mean_final_eval) << "\n";
  return result;
}

SeedResult resume_run(const std::string& checkpoint_path, const std::string& csv_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  SeedResult result;
  result.seed = ck.agent->seed();
  result.csv_path = csv_path;
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write CSV: " + csv_path);
  csv << metrics_csv_header() << "\n";
  double last_eval = 0.0;
  MetricsSink sink = [&](const MetricsRecord& rec) {
    if (rec.eval_return) last_eval = *rec.eval_return;
    csv << metrics_csv_row(rec) << "\n";
  };
  EvalFn eval_fn = [&](const Agent& a) {
    return evaluate(a, *ck.env, ck.cfg.eval_episodes);
  };
  ck.agent->run(*ck.env, sink, eval_fn);
  result.final_eval_return = last_eval;
  return result;
}

void dump_rollout(const Agent& agent, Env& env, std::size_t horizon,
                  const std::string& out_dir) {
  if (horizon < 1) throw std::invalid_argument("dump_rollout: horizon must be >= 1");
  std::filesystem::create_directories(out_dir);
  const EnvSpec& spec = env.spec();
  std::size_t rows = spec.obs_rows ? spec.obs_rows : 1;
  std::size_t cols = spec.obs_cols ? spec.obs_cols : spec.obs_dim;

  std::ofstream csv(out_dir + "/mse.csv");
  csv << "step,mse\n";

  Vec s = env.reset();
  Vec z_pred = agent.autoencoder().encode(s);
  Vec h_pred(agent.config().hidden_dim, 0.0);
  Vec h_pol(agent.config().hidden_dim, 0.0);
  const ForwardModel& model = agent.sampled().model;

  for (std::size_t i = 1; i <= horizon; ++i) {
    Vec z_true = agent.autoencoder().encode(s);
    Vec h_pol_next;
    int a = agent.act_greedy(z_true, h_pol, h_pol_next);

    double r;
    Vec s_next;
    bool terminal;
    env.step(a, r, s_next, terminal);

    Vec z_next, h_pred_next;
    double r_pred;
    model.step(z_pred, a, h_pred, z_next, r_pred, h_pred_next);
    Vec decoded = agent.autoencoder().decode(z_next);

    Vec err(decoded.size());
    double mse = 0.0;
    for (std::size_t j = 0; j < decoded.size(); ++j) {
      double d = decoded[j] - s_next[j];
      err[j] = std::abs(d);
      mse += d * d;
    }
    mse /= static_cast<double>(decoded.size());

    std::string base = out_dir + "/step" + std::to_string(i);
    write_pgm(base + "_true.pgm", s_next, rows, cols);
    write_pgm(base + "_pred.pgm", decoded, rows, cols);
    write_pgm(base + "_err.pgm", err, rows, cols);
    csv << i << "," << fmt_double(mse) << "\n";

    if (terminal) break;
    s = std::move(s_next);
    z_pred = std::move(z_next);
    h_pred = std::move(h_pred_next);
    h_pol = std::move(h_pol_next);
  }
}

}  // namespace psdrl
