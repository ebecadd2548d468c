#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "haunted/analyzer.hpp"
#include "haunted/harness.hpp"
#include "haunted/oracle.hpp"
#include "haunted/service.hpp"
#include "haunted/stub_endpoint.hpp"

namespace haunted::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return out.str();
}

fs::path output_dir(const std::string& flag) {
  return flag.empty() ? fs::path("transcripts") / timestamp() : fs::path(flag);
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_outputs(const fs::path& dir, std::span<const Transcript> ts, const json& summary) {
  fs::create_directories(dir);
  write_transcripts(dir / "transcripts.jsonl", ts);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

BatchSummary summarize(std::span<const Transcript> ts) {
  BatchSummary s;
  s.requested = s.finished = static_cast<int>(ts.size());
  for (const auto& t : ts) {
    if (t.outcome.status == OutcomeStatus::Invalid) {
      ++s.invalid;
      continue;
    }
    if (t.outcome.status == OutcomeStatus::Escaped) ++s.passes;
    const SubObjectiveFlags f = detect_subobjectives(t);
    const bool flags[] = {f.found_key, f.returned_c1, f.reached_a2, f.avoided_a3, f.escaped};
    for (int i = 0; i < 5; ++i) s.subobjectives[i] += flags[i];
  }
  return s;
}

std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("address must be host:port, got " + addr);
  try {
    const int port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    return {addr.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw UsageError("bad port in " + addr);
  }
}

InstructionVariant variant_flag(const std::string& text) {
  try {
    return parse_variant(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Blocks until SIGINT/SIGTERM.
void wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  int sig = 0;
  sigwait(&set, &sig);
}

// --- play ---

struct PlayOptions {
  std::string variant = "original";
  std::string locale = "en";
  std::string catalogs;
  std::string out;
};

int cmd_play(const PlayOptions& o, std::istream& in, std::ostream& out) {
  const InstructionVariant variant = variant_flag(o.variant);
  CatalogSet catalogs = CatalogSet::with_defaults();
  if (!o.catalogs.empty()) catalogs.load_directory(o.catalogs);
  if (!catalogs.contains(o.locale)) throw UsageError("unknown locale: " + o.locale);
  const MessageCatalog& catalog = catalogs.at(o.locale);

  const Engine engine(Scenario::canonical());
  GameRecorder recorder(engine, variant, catalog);
  const int limit = engine.scenario().move_limit;

  out << instructions(variant, catalog) << "\n\n";
  std::string line;
  while (!recorder.finished()) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    if (line == "quit" || line == "exit") break;
    auto cmd = parse_command(line, variant, ParseMode::Strict);
    if (!cmd) {
      out << reprompt_text(variant, catalog) << "\n";
      continue;
    }
    const MoveRecord& rec = recorder.play(*cmd);
    out << rec.rendered_feedback << "\n";
    out << "move " << recorder.state().moves_used << "/" << limit << "\n";
  }

  Transcript t = recorder.transcript("play-" + timestamp(), AgentInfo{AgentKind::Human, std::nullopt});
  t.outcome.subobjectives = detect_subobjectives(t);
  const fs::path dir = output_dir(o.out);
  write_outputs(dir, std::span(&t, 1), to_json(summarize(std::span(&t, 1))));
  out << "outcome: " << to_string(t.outcome.status) << "\n";
  out << "transcript saved to " << (dir / "transcripts.jsonl").string() << "\n";
  return kExitOk;
}

// --- sim ---

struct SimOptions {
  std::string agent = "optimal";
  std::uint64_t seed = 0;
  int n = 1;
  std::string variant = "original";
  std::string out;
};

int cmd_sim(const SimOptions& o, std::ostream& out) {
  const InstructionVariant variant = variant_flag(o.variant);
  AgentFactory factory;
  if (o.agent == "optimal") {
    factory = [variant](int) { return optimal_agent(variant); };
  } else if (o.agent == "random") {
    factory = [variant, seed = o.seed](int i) { return random_agent(trial_seed(seed, i), variant); };
  } else {
    throw UsageError("unknown agent: " + o.agent);
  }

  TrialPolicy policy;
  policy.variant = variant;
  BatchOptions batch;
  batch.n = o.n;
  batch.session_prefix = "sim-" + o.agent;
  const BatchResult result = run_batch(factory, Scenario::canonical(), policy, batch);

  json summary = to_json(result.summary);
  summary["agent"] = o.agent;
  summary["seed"] = o.seed;
  summary["variant"] = to_string(variant);
  const fs::path dir = output_dir(o.out);
  write_outputs(dir, result.transcripts, summary);
  out << "passes " << result.summary.passes << "/" << result.summary.valid() << " ("
      << std::fixed << std::setprecision(4) << result.summary.pass_rate() << ")\n";
  out << "written to " << dir.string() << "\n";
  return kExitOk;
}

// --- eval ---

struct EvalOptions {
  std::string endpoint;
  std::string model;
  int n = 20;
  std::string variant = "original";
  std::string out;
  std::string credential_env = "HAUNTED_API_KEY";
  bool credential_env_given = false;
  int parallel = 1;
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> top_k;
  int timeout_ms = 60000;
  int pacing_ms = 1000;
  int max_retries = 3;
  int backoff_ms = 1000;
  int parse_retries = 2;
};

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  const InstructionVariant variant = variant_flag(o.variant);
  AgentConfig config;
  config.endpoint_url = o.endpoint;
  config.model_id = o.model;
  config.credential_env = o.credential_env;
  // The default variable is optional; an explicitly named one must be set.
  if (!o.credential_env_given && !std::getenv(o.credential_env.c_str())) config.credential_env.clear();
  if (!config.credential_env.empty() && !std::getenv(config.credential_env.c_str())) {
    throw UsageError("environment variable " + config.credential_env + " is not set");
  }
  config.sampling = {o.temperature, o.top_p, o.top_k};
  config.timeout = std::chrono::milliseconds(o.timeout_ms);
  config.request_pacing = std::chrono::milliseconds(o.pacing_ms);
  config.max_transport_retries = o.max_retries;
  config.backoff_initial = std::chrono::milliseconds(o.backoff_ms);
  config.max_parse_retries = o.parse_retries;

  auto transport = make_http_transport();
  auto pacer = std::make_shared<RequestPacer>(config.request_pacing);
  AgentFactory factory = [&](int) { return chat_agent(config, transport, pacer); };

  TrialPolicy policy;
  policy.variant = variant;
  policy.max_parse_retries = o.parse_retries;
  BatchOptions batch;
  batch.n = o.n;
  batch.parallelism = o.parallel;
  batch.session_prefix = "eval";
  batch.on_transcript = [&err](const Transcript& t) {
    err << t.session_id << ": " << to_string(t.outcome.status) << " after " << t.outcome.moves_used
        << " moves\n";
  };
  const BatchResult result = run_batch(factory, Scenario::canonical(), policy, batch);

  json summary = to_json(result.summary);
  summary["model"] = o.model;
  summary["variant"] = to_string(variant);
  const fs::path dir = output_dir(o.out);
  write_outputs(dir, result.transcripts, summary);
  out << "passes " << result.summary.passes << "/" << result.summary.valid() << ", invalid "
      << result.summary.invalid << "\n";
  out << "written to " << dir.string() << "\n";
  if (result.summary.valid() == 0) {
    err << "no trial completed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// --- analyze ---

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  std::string mode = "walls";
  std::string format = "text";
  std::string group_by = "agent";
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  BeliefMode mode;
  ReportFormat format;
  try {
    mode = parse_belief_mode(o.mode);
    format = parse_report_format(o.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.group_by != "agent" && o.group_by != "file" && o.group_by != "variant") {
    throw UsageError("--group-by must be agent, file or variant");
  }

  std::vector<Transcript> all;
  std::vector<std::string> labels;
  for (const std::string& path : o.inputs) {
    if (!fs::exists(path)) throw std::runtime_error("no such file: " + path);
    for (Transcript& t : read_transcripts(path)) {
      if (o.group_by == "file") labels.push_back(path);
      else if (o.group_by == "variant") labels.push_back(t.agent.label() + "/" + to_string(t.variant));
      else labels.push_back(t.agent.label());
      all.push_back(std::move(t));
    }
  }
  out << render(aggregate(all, labels, mode), format);
  return kExitOk;
}

// --- oracle ---

int cmd_oracle(const std::string& out_path, int move_limit, std::ostream& out) {
  if (move_limit < 1) throw UsageError("--move-limit must be positive");
  const std::string text = oracle::to_json(oracle::compute_derived_values(move_limit)).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    const fs::path path(out_path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text(path, text);
  }
  return kExitOk;
}

// --- serve ---

struct ServeOptions {
  std::string addr = "127.0.0.1:8080";
  std::string store = "haunted-sessions.jsonl";
  std::string admin_token;
  std::string locale = "en";
  std::string catalogs;
  std::string static_dir;
};

int cmd_serve(const ServeOptions& o, std::ostream& out) {
  const auto [host, port] = split_addr(o.addr);
  ServiceConfig config;
  config.store_path = o.store;
  config.admin_token = o.admin_token;
  if (config.admin_token.empty()) {
    if (const char* env = std::getenv("HAUNTED_ADMIN_TOKEN")) config.admin_token = env;
  }
  config.default_locale = o.locale;
  if (!o.catalogs.empty()) config.catalogs.load_directory(o.catalogs);
  if (!config.catalogs.contains(o.locale)) throw UsageError("unknown locale: " + o.locale);

  SessionService service(std::move(config));
  HttpService http(service, o.static_dir);
  const int bound = http.start(host, port);
  out << "serving on http://" << host << ":" << bound << " (" << service.session_count()
      << " sessions restored)" << std::endl;
  wait_for_signal();
  http.stop();
  return kExitOk;
}

int cmd_stub(const std::string& addr, const std::string& variant_text, std::ostream& out) {
  const auto [host, port] = split_addr(addr);
  StubChatServer stub(StubChatServer::optimal_script(variant_flag(variant_text)));
  stub.start(host, port);
  out << "stub endpoint at " << stub.url() << std::endl;
  wait_for_signal();
  stub.stop();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Haunted House text-game toolkit", "haunted"};
  app.require_subcommand(1);

  PlayOptions play;
  auto* play_cmd = app.add_subcommand("play", "Play in the terminal");
  play_cmd->add_option("--variant", play.variant, "original, ghost or coordinates");
  play_cmd->add_option("--locale", play.locale);
  play_cmd->add_option("--catalogs", play.catalogs, "Directory of extra <locale>.catalog files");
  play_cmd->add_option("--out", play.out, "Output directory (default transcripts/<timestamp>)");

  SimOptions sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run scripted agents");
  sim_cmd->add_option("--agent", sim.agent, "optimal or random");
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--n", sim.n)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--variant", sim.variant);
  sim_cmd->add_option("--out", sim.out);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a chat-completion model");
  eval_cmd->add_option("--endpoint", eval.endpoint, "Chat completions URL")->required();
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--n", eval.n)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--variant", eval.variant);
  eval_cmd->add_option("--out", eval.out);
  auto* cred = eval_cmd->add_option("--credential-env", eval.credential_env,
                                    "Environment variable holding the API key");
  eval_cmd->add_option("--parallel", eval.parallel)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--temperature", eval.temperature);
  eval_cmd->add_option("--top-p", eval.top_p);
  eval_cmd->add_option("--top-k", eval.top_k);
  eval_cmd->add_option("--timeout-ms", eval.timeout_ms)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--pacing-ms", eval.pacing_ms)->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--max-retries", eval.max_retries)->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--backoff-ms", eval.backoff_ms)->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--parse-retries", eval.parse_retries)->check(CLI::NonNegativeNumber);

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Score transcripts");
  analyze_cmd->add_option("--in", analyze.inputs, "Transcript JSONL files")->required();
  analyze_cmd->add_option("--mode", analyze.mode, "walls or clues");
  analyze_cmd->add_option("--format", analyze.format, "text, csv or json");
  analyze_cmd->add_option("--group-by", analyze.group_by, "agent, variant or file");

  std::string oracle_out;
  int oracle_limit = 20;
  auto* oracle_cmd = app.add_subcommand("oracle", "Compute exact derived values");
  oracle_cmd->add_option("--out", oracle_out, "Output file (default stdout)");
  oracle_cmd->add_option("--move-limit", oracle_limit);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session service");
  serve_cmd->add_option("--addr", serve.addr, "host:port");
  serve_cmd->add_option("--store", serve.store, "Append-only session log");
  serve_cmd->add_option("--admin-token", serve.admin_token, "Export token (or HAUNTED_ADMIN_TOKEN)");
  serve_cmd->add_option("--locale", serve.locale, "Default locale");
  serve_cmd->add_option("--catalogs", serve.catalogs);
  serve_cmd->add_option("--static-dir", serve.static_dir, "Directory served at /");

  std::string stub_addr = "127.0.0.1:8199";
  std::string stub_variant = "original";
  auto* stub_cmd = app.add_subcommand("stub-endpoint", "Serve a scripted optimal chat endpoint");
  stub_cmd->add_option("--addr", stub_addr);
  stub_cmd->add_option("--variant", stub_variant);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }
  eval.credential_env_given = cred->count() > 0;

  try {
    if (*play_cmd) return cmd_play(play, in, out);
    if (*sim_cmd) return cmd_sim(sim, out);
    if (*eval_cmd) return cmd_eval(eval, out, err);
    if (*analyze_cmd) return cmd_analyze(analyze, out);
    if (*oracle_cmd) return cmd_oracle(oracle_out, oracle_limit, out);
    if (*serve_cmd) return cmd_serve(serve, out);
    if (*stub_cmd) return cmd_stub(stub_addr, stub_variant, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace haunted::cli
