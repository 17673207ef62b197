// sqlfix command line: ingest -> build-pool -> correct -> evaluate -> report.

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sqlfix/correct.hpp"
#include "sqlfix/dataset.hpp"
#include "sqlfix/errors.hpp"
#include "sqlfix/eval.hpp"
#include "sqlfix/pool.hpp"
#include "sqlfix/retrieve.hpp"
#include "sqlfix/util.hpp"

namespace {

using sqlfix::Error;

// --config <file> holds a flat JSON object of option defaults; explicit
// flags win over config values.
std::map<std::string, std::string> load_config(int argc, char** argv) {
  std::map<std::string, std::string> config;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--config") continue;
    nlohmann::json j = nlohmann::json::parse(sqlfix::read_file(argv[i + 1]));
    for (const auto& [key, value] : j.items()) {
      if (value.is_string())
        config[key] = value.get<std::string>();
      else
        config[key] = value.dump();
    }
  }
  return config;
}

void apply_config(CLI::App* cmd, const std::map<std::string, std::string>& config) {
  for (const auto& [key, value] : config) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    opt->default_val(value);
  }
}

std::vector<sqlfix::DatasetRecord> load_split(const std::string& path,
                                              const std::string& split) {
  std::vector<sqlfix::DatasetRecord> records = sqlfix::load_dataset(path);
  if (split == "all") return records;
  std::vector<sqlfix::DatasetRecord> filtered;
  for (auto& r : records)
    if (r.split == split) filtered.push_back(std::move(r));
  return filtered;
}

// Generator backed by an LLM client spec ("live" or "mock:<path>").
class ClientSqlGenerator : public sqlfix::SqlGenerator {
 public:
  explicit ClientSqlGenerator(const std::string& spec)
      : client_(sqlfix::make_llm_client(spec)) {}

  std::string generate(const sqlfix::DatasetRecord& record) override {
    return sqlfix::generate_sql(record.nlq, record.schema_ddl, *client_);
  }

  sqlfix::LlmClient& client() { return *client_; }

 private:
  std::unique_ptr<sqlfix::LlmClient> client_;
};

std::unique_ptr<sqlfix::Embedder> make_embedder(const std::string& spec,
                                                size_t dim,
                                                const std::string& id) {
  if (spec == "hash3gram")
    return std::make_unique<sqlfix::HashedTrigramEmbedder>(dim);
  if (spec.rfind("process:", 0) == 0) {
    if (id.empty())
      throw Error("--embedder-id is required for a process embedder");
    return std::make_unique<sqlfix::ProcessEmbedder>(spec.substr(8), id, dim);
  }
  throw Error("unknown embedder '" + spec + "' (want hash3gram or process:<cmd>)");
}

int cmd_ingest(const std::string& input, const std::string& output,
               const std::string& report_path) {
  auto records = sqlfix::load_dataset(input);
  auto [kept, report] = sqlfix::filter_records(records);
  sqlfix::save_dataset(kept, output);
  if (!report_path.empty()) sqlfix::write_file(report_path, report.to_json());
  std::cout << "ingest: " << records.size() << " records, kept " << report.kept
            << ", dropped " << report.dropped_db_creation << " (db creation), "
            << report.dropped_golden_error << " (golden error), "
            << report.dropped_golden_empty << " (golden empty)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SQL error-correction pipeline"};
  app.require_subcommand(1);

  std::map<std::string, std::string> config;
  try {
    config = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option defaults");
  app.fallthrough();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Filter a JSONL dataset");
  std::string in_input, in_output, in_report;
  ingest->add_option("--input", in_input, "input dataset (JSONL)");
  ingest->add_option("--output", in_output, "kept records output");
  ingest->add_option("--report", in_report, "filter report output (JSON)");

  // build-pool
  auto* build = app.add_subcommand("build-pool", "Build the correction-example pool");
  std::string bp_input, bp_generator, bp_out, bp_split = "all";
  std::string bp_embedder = "hash3gram", bp_embedder_id, bp_checkpoint;
  size_t bp_dim = 512;
  bool bp_error_class = false;
  build->add_option("--input", bp_input, "kept records (JSONL)");
  build->add_option("--generator", bp_generator, "live or mock:<script>");
  build->add_option("--out", bp_out, "pool output path");
  build->add_option("--split", bp_split, "train|test|all (default all)");
  build->add_option("--embedder", bp_embedder, "hash3gram or process:<cmd>");
  build->add_option("--embedder-dim", bp_dim, "embedding dimension");
  build->add_option("--embedder-id", bp_embedder_id, "id for a process embedder");
  build->add_flag("--embed-error-with-class", bp_error_class,
                  "embed error text prefixed with its class");
  build->add_option("--checkpoint", bp_checkpoint,
                    "partial pool path written on infrastructure failure");

  // correct
  auto* correct = app.add_subcommand("correct", "Generate and correct predictions");
  std::string co_input, co_pool, co_client, co_generator, co_out;
  std::string co_mode = "ragprompt", co_strategy = "nlq+sql+error", co_split = "all";
  std::string co_template, co_zeroshot_template;
  std::string co_embedder = "hash3gram", co_embedder_id;
  size_t co_dim = 512;
  int co_shots = 1;
  bool co_widen = false;
  correct->add_option("--input", co_input, "kept records (JSONL)");
  correct->add_option("--pool", co_pool, "pool file (ragprompt/applyscript)");
  correct->add_option("--client", co_client, "correction client: live or mock:<script>");
  correct->add_option("--generator", co_generator,
                      "prediction client (defaults to --client spec)");
  correct->add_option("--mode", co_mode, "none|simple0shot|ragprompt|applyscript");
  correct->add_option("--strategy", co_strategy,
                      "error|nlq|sql|nlq+sql|nlq+sql+error");
  correct->add_option("--shots", co_shots, "0, 1 or 3");
  correct->add_option("--split", co_split, "train|test|all (default all)");
  correct->add_option("--out", co_out, "attempts output (JSONL)");
  correct->add_option("--template", co_template, "few-shot prompt template file");
  correct->add_option("--zeroshot-template", co_zeroshot_template,
                      "zero-shot prompt template file");
  correct->add_option("--embedder", co_embedder, "hash3gram or process:<cmd>");
  correct->add_option("--embedder-dim", co_dim, "embedding dimension");
  correct->add_option("--embedder-id", co_embedder_id, "id for a process embedder");
  correct->add_flag("--widen-trigger", co_widen,
                    "also correct wrong-result predictions");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score attempts against golden SQL");
  std::string ev_input, ev_attempts, ev_out, ev_report_out;
  evaluate->add_option("--input", ev_input, "kept records (JSONL)");
  evaluate->add_option("--attempts", ev_attempts, "attempts file (JSONL)");
  evaluate->add_option("--out", ev_out, "outcomes output (JSONL)");
  evaluate->add_option("--report-out", ev_report_out,
                       "also write a report for these outcomes");

  // report
  auto* report = app.add_subcommand("report", "Render the strategy-grid report");
  std::vector<std::string> rp_outcomes;
  std::string rp_format = "text", rp_out;
  report->add_option("--outcomes", rp_outcomes, "outcomes files (JSONL)")
      ->expected(-1);
  report->add_option("--format", rp_format, "text|csv");
  report->add_option("--out", rp_out, "write the report here as well");

  for (CLI::App* cmd : {ingest, build, correct, evaluate, report})
    apply_config(cmd, config);

  CLI11_PARSE(app, argc, argv);

  // Required values may come from the command line or the config file.
  auto require = [](const std::string& value, const char* flag) {
    if (value.empty())
      throw Error(std::string("missing required option ") + flag);
  };

  try {
    if (*ingest) {
      require(in_input, "--input");
      require(in_output, "--output");
      return cmd_ingest(in_input, in_output, in_report);
    }

    if (*build) {
      require(bp_input, "--input");
      require(bp_generator, "--generator");
      require(bp_out, "--out");
      auto records = load_split(bp_input, bp_split);
      ClientSqlGenerator generator(bp_generator);
      auto embedder = make_embedder(bp_embedder, bp_dim, bp_embedder_id);
      sqlfix::PoolBuildOptions opts;
      opts.embed_error_with_class = bp_error_class;
      opts.checkpoint_path = bp_checkpoint;
      sqlfix::Pool pool = sqlfix::build_pool(records, generator, *embedder, opts);
      sqlfix::save_pool(pool, bp_out);
      std::cout << "build-pool: stored " << pool.manifest.build_stats.stored
                << ", skipped " << pool.manifest.build_stats.correct_skipped
                << " correct, discarded "
                << pool.manifest.build_stats.unparseable_discarded
                << " unparseable, "
                << pool.manifest.build_stats.diff_failed_discarded
                << " diff failures\n";
      return 0;
    }

    if (*correct) {
      require(co_input, "--input");
      require(co_client, "--client");
      require(co_out, "--out");
      auto records = load_split(co_input, co_split);
      auto embedder = make_embedder(co_embedder, co_dim, co_embedder_id);

      sqlfix::CorrectionConfig cfg;
      cfg.mode = sqlfix::mode_from_name(co_mode);
      cfg.shots = co_shots;
      cfg.strategy = co_strategy;
      cfg.weights = sqlfix::StrategyWeights::preset(co_strategy);
      cfg.widen_trigger = co_widen;
      if (cfg.mode == sqlfix::CorrectionMode::RagPrompt &&
          cfg.shots != 1 && cfg.shots != 3)
        throw Error("ragprompt takes --shots 1 or 3");
      if ((cfg.mode == sqlfix::CorrectionMode::None ||
           cfg.mode == sqlfix::CorrectionMode::Simple0Shot) &&
          cfg.shots != 0)
        throw Error(co_mode + " takes --shots 0");
      if (!co_template.empty()) cfg.fewshot_template = sqlfix::read_file(co_template);
      if (!co_zeroshot_template.empty())
        cfg.zeroshot_template = sqlfix::read_file(co_zeroshot_template);

      std::unique_ptr<sqlfix::PoolIndex> index;
      bool needs_pool = cfg.mode == sqlfix::CorrectionMode::RagPrompt ||
                        cfg.mode == sqlfix::CorrectionMode::ApplyScript;
      if (needs_pool && !co_pool.empty()) {
        sqlfix::Pool pool = sqlfix::load_pool(co_pool, embedder->id());
        index = std::make_unique<sqlfix::PoolIndex>(std::move(pool));
        if (index->size() == 0)
          std::cerr << "warning: pool is empty; " << co_mode
                    << " falls back to simple 0-shot correction\n";
      } else if (needs_pool) {
        std::cerr << "warning: no pool given; " << co_mode
                  << " falls back to simple 0-shot correction\n";
      }

      ClientSqlGenerator generator(co_generator.empty() ? co_client : co_generator);
      auto client = sqlfix::make_llm_client(co_client);

      std::vector<sqlfix::CorrectionAttempt> attempts;
      for (const sqlfix::DatasetRecord& record : records) {
        std::string predicted;
        std::optional<sqlfix::SqlError> error;
        try {
          predicted = generator.generate(record);
          sqlfix::Database db = sqlfix::provision_database(record);
          error = sqlfix::execute(db, predicted).error;
        } catch (const sqlfix::ExtractionFailed& e) {
          predicted = "";
          error = sqlfix::SqlError{std::string("generation failed: ") + e.what(),
                                   sqlfix::SqlErrorClass::Other};
        }
        attempts.push_back(sqlfix::correct_sql(record, predicted, error, *client,
                                               index.get(), *embedder, cfg));
      }
      sqlfix::write_file(co_out, sqlfix::attempts_to_jsonl(attempts));
      std::cout << "correct: wrote " << attempts.size() << " attempts ("
                << co_mode << ", " << co_shots << "-shot, " << co_strategy
                << ")\n";
      return 0;
    }

    if (*evaluate) {
      require(ev_input, "--input");
      require(ev_attempts, "--attempts");
      require(ev_out, "--out");
      auto records = sqlfix::load_dataset(ev_input);
      auto attempts = sqlfix::attempts_from_jsonl(sqlfix::read_file(ev_attempts));
      auto outcomes = sqlfix::evaluate(attempts, records);
      sqlfix::write_file(ev_out, sqlfix::outcomes_to_jsonl(outcomes));
      sqlfix::EvalReport rep = sqlfix::compute_report(outcomes);
      if (!ev_report_out.empty())
        sqlfix::write_file(ev_report_out, sqlfix::render_report_text(rep));
      for (const sqlfix::EvalRow& row : rep.rows)
        std::cout << "evaluate: mode=" << row.mode << " shots=" << row.shots
                  << " strategy=" << row.strategy << " total=" << row.total
                  << " accuracy=" << row.execution_accuracy
                  << " fixed=" << row.fixed << "/" << row.pre_exec_error << '\n';
      return 0;
    }

    if (*report) {
      if (rp_outcomes.empty()) throw Error("missing required option --outcomes");
      std::vector<sqlfix::EvalOutcome> outcomes;
      for (const std::string& path : rp_outcomes) {
        auto part = sqlfix::outcomes_from_jsonl(sqlfix::read_file(path));
        outcomes.insert(outcomes.end(), part.begin(), part.end());
      }
      sqlfix::EvalReport rep = sqlfix::compute_report(outcomes);
      std::string text = rp_format == "csv" ? sqlfix::render_report_csv(rep)
                                            : sqlfix::render_report_text(rep);
      std::cout << text;
      if (!rp_out.empty()) sqlfix::write_file(rp_out, text);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
