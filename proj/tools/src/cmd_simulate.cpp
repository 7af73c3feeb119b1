#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/backend.hpp"
#include "nomiclaw/ledger.hpp"

namespace nomiclaw::cli {

namespace {

struct RunSpec {
  GameConfig config;
  Vignette vignette;
  std::vector<AgentBinding> roster;
  std::string run_id;
  int run_index = 0;
};

std::vector<AgentId> rotated_seats(const std::vector<AgentBinding>& roster,
                                   int run_index, bool rotate) {
  std::vector<AgentId> seats;
  const int n = static_cast<int>(roster.size());
  int shift = rotate ? (run_index - 1) % n : 0;
  for (int i = 0; i < n; ++i) seats.push_back(roster[(i + shift) % n].agent_id);
  return seats;
}

}  // namespace

int run_simulate(const SimulateArgs& args) {
  RunManifest manifest = read_manifest(args.manifest);
  if (!args.out_override.empty()) manifest.out_dir = args.out_override;
  if (args.jobs_override > 0) manifest.jobs = args.jobs_override;
  if (args.has_seed_override) manifest.seed = args.seed_override;
  if (!args.backend_url_override.empty())
    manifest.backend_url = args.backend_url_override;
  if (const char* env = std::getenv("NOMIC_JOBS"); env && *env && args.jobs_override == 0)
    manifest.jobs = std::max(1, std::atoi(env));

  std::vector<Vignette> vignettes = load_vignettes(manifest.vignettes);
  std::filesystem::create_directories(manifest.out_dir);

  // One roster per run. Fixed-roster mode repeats the file's roster;
  // model-pool mode builds a same-model group per pool entry.
  std::vector<RunSpec> specs;
  auto push_spec = [&](const Vignette& v, const std::vector<AgentBinding>& roster,
                       int run_index) {
    GameConfig config;
    config.num_agents = static_cast<int>(roster.size());
    config.num_rounds = manifest.rounds;
    config.points_win = manifest.points_win;
    config.points_tie = manifest.points_tie;
    config.condition = manifest.condition;
    config.seat_order = rotated_seats(roster, run_index, manifest.rotate_seats);
    config.rng_seed = Rng::mix(manifest.seed,
                               Rng::mix(Rng::hash_string(v.id), run_index));
    config.backend_params["temperature"] = format_double(manifest.temperature);
    RunSpec spec;
    spec.config = std::move(config);
    spec.vignette = v;
    spec.roster = roster;
    spec.run_index = run_index;
    spec.run_id = make_run_id(manifest.condition, v.id, run_index);
    specs.push_back(std::move(spec));
  };

  if (!manifest.roster.empty()) {
    std::vector<AgentBinding> roster = load_roster(manifest.roster);
    for (const auto& v : vignettes)
      for (int r = 1; r <= manifest.runs_per_vignette; ++r) push_spec(v, roster, r);
  } else {
    std::vector<std::string> pool = load_model_pool(manifest.model_pool);
    if (manifest.condition != Condition::homogeneous)
      throw ConfigError("model_pool mode requires condition = homogeneous");
    for (const auto& v : vignettes) {
      int run_index = 0;
      for (const auto& model : pool) {
        for (int r = 1; r <= manifest.runs_per_vignette; ++r) {
          std::vector<AgentBinding> roster;
          for (int a = 1; a <= manifest.group_size; ++a) {
            AgentBinding b;
            char buf[24];
            std::snprintf(buf, sizeof buf, "agent_%02d", a);
            b.agent_id = buf;
            b.model_id = model;
            if (manifest.pool_agent_kind == "backend") {
              b.kind = AgentBinding::Kind::backend;
            } else if (manifest.pool_agent_kind == "scripted") {
              b.kind = AgentBinding::Kind::scripted;
              b.policy_params["policy"] = manifest.pool_policy;
            } else if (manifest.pool_agent_kind == "stochastic") {
              b.kind = AgentBinding::Kind::stochastic;
              b.policy_params["policy"] = "uniform_random";
            } else {
              throw ConfigError("unknown pool_agent_kind " + manifest.pool_agent_kind);
            }
            roster.push_back(std::move(b));
          }
          push_spec(v, roster, ++run_index);
        }
      }
    }
  }

  BackendParams params;
  params.temperature = manifest.temperature;
  params.timeout = std::chrono::milliseconds(manifest.timeout_ms);
  params.max_retries = manifest.retries;
  auto limiter = manifest.rate_per_sec > 0
                     ? std::make_shared<RateLimiter>(manifest.rate_per_sec)
                     : nullptr;
  auto transport = std::make_shared<BackendClient>(
      BackendClient::resolve_base_url(manifest.backend_url), limiter);
  TemplateSet templates = manifest.templates.empty()
                              ? TemplateSet::builtin()
                              : TemplateSet::load_dir(manifest.templates);
  AgentFactory factory = mixed_agent_factory(transport, params, templates);

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex io_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      const RunSpec& spec = specs[i];
      try {
        RunLog log =
            play_run(spec.config, spec.vignette, spec.roster, factory,
                     spec.run_id, spec.run_index);
        std::filesystem::path path = write_run_log(log, manifest.out_dir);

        std::map<AgentId, int> wins;
        int ties = 0, excluded = 0;
        for (const auto& round : log.rounds) {
          if (round.excluded) ++excluded;
          else if (round.outcome.kind == OutcomeKind::winner)
            wins[*round.outcome.winners.begin()] += 1;
          else ++ties;
        }
        std::lock_guard<std::mutex> lock(io_mu);
        std::cout << spec.run_id << ": ";
        for (const auto& [id, w] : wins) std::cout << id << " x" << w << " ";
        std::cout << "ties=" << ties << " excluded=" << excluded << " -> "
                  << path.filename().string() << "\n";
      } catch (const ConfigError&) {
        throw;  // configuration problems abort the whole batch
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        std::lock_guard<std::mutex> lock(io_mu);
        std::cerr << spec.run_id << ": failed: " << e.what() << "\n";
      }
    }
  };

  int jobs = std::max(1, manifest.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr config_error;
    std::mutex err_mu;
    for (int t = 0; t < jobs; ++t)
      threads.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!config_error) config_error = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    if (config_error) std::rethrow_exception(config_error);
  }

  std::cout << specs.size() - failures.load() << "/" << specs.size()
            << " runs written to " << manifest.out_dir.string() << "\n";
  return failures.load() == 0 ? kOk : kRuntimeFailure;
}

}  // namespace nomiclaw::cli
