#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <memory>

#include "evschema/commands.hpp"
#include "evschema/error.hpp"
#include "evschema/server.hpp"

using namespace evschema;

namespace {

// Flags are bound to scratch variables and copied onto the config only when
// given, so they win over the environment and the config file.
struct Overrides {
  std::vector<std::function<void(Config&)>> apply;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T Config::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply.push_back([opt, value, field](Config& c) {
      if (opt->count() > 0) c.*field = *value;
    });
    return opt;
  }

  template <class T, class Get>
  CLI::Option* add_nested(CLI::App* app, const std::string& flag, Get get, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply.push_back([opt, value, get](Config& c) {
      if (opt->count() > 0) get(c) = *value;
    });
    return opt;
  }
};

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event schema induction, curation and evaluation toolkit"};
  app.require_subcommand(1);
  Overrides ov;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file (flags > EVSCHEMA_* env > file > defaults)");
  ov.add(&app, "--ontology", &Config::ontology, "ontology JSON");
  ov.add(&app, "--library", &Config::library, "schema library directory");
  ov.add(&app, "--mapping", &Config::mapping, "event-type mapping JSON (default: identity)");
  ov.add(&app, "--seed", &Config::seed, "random seed");

  MineArgs mine;
  auto* c_mine = app.add_subcommand("mine", "frequent event-type itemsets from a corpus");
  c_mine->add_option("--corpus", mine.corpus, "document file or directory")->required();
  c_mine->add_option("--transactions-out", mine.transactions_out)->required();
  c_mine->add_option("--itemsets-out", mine.itemsets_out)->required();
  ov.add_nested<std::size_t>(c_mine, "--min-support", [](Config& c) -> auto& { return c.mining.min_support; }, "absolute support");
  ov.add_nested<std::size_t>(c_mine, "--min-items", [](Config& c) -> auto& { return c.mining.min_items; }, "");
  ov.add_nested<std::size_t>(c_mine, "--max-items", [](Config& c) -> auto& { return c.mining.max_items; }, "");

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-skeletons", "score, filter and chain itemsets into skeletons");
  c_build->add_option("--itemsets", build.itemsets)->required();
  c_build->add_option("--transactions", build.transactions, "source for the default PMI scorer");
  c_build->add_option("--scorer-table", build.scorer_table, "pairwise score table instead");
  c_build->add_option("--queue-out", build.queue_out)->required();
  c_build->add_option("--skeletons-out", build.skeletons_out)->required();
  ov.add_nested<std::size_t>(c_build, "--top-sequences", [](Config& c) -> auto& { return c.builder.top_sequences; }, "");
  ov.add_nested<std::size_t>(c_build, "--reuse-cap", [](Config& c) -> auto& { return c.builder.reuse_cap; }, "");
  ov.add_nested<std::size_t>(c_build, "--top-chains", [](Config& c) -> auto& { return c.builder.top_chains; }, "");

  InstantiateArgs inst;
  auto* c_inst = app.add_subcommand("instantiate", "turn a skeleton into a partially filled schema");
  c_inst->add_option("--skeletons", inst.skeletons)->required();
  c_inst->add_option("--id", inst.skeleton_id)->required();
  c_inst->add_option("--out", inst.out)->required();

  std::vector<std::string> validate_files;
  auto* c_val = app.add_subcommand("validate", "type-check schema documents");
  c_val->add_option("schemas", validate_files)->required();

  CoverageArgs cov;
  auto* c_cov = app.add_subcommand("coverage", "Cov@t of a library over a corpus");
  c_cov->add_option("--corpus", cov.corpus)->required();
  c_cov->add_option("--json", cov.json_out);
  ov.add(c_cov, "--thresholds", &Config::thresholds, "e.g. 0.5,0.7,0.9");
  ov.add(c_cov, "--strata", &Config::strata, "e.g. 1:5,5:10,10:");

  RankArgs rank;
  std::string rank_mode = "schemas";
  auto* c_rank = app.add_subcommand("rank", "rank schemas per document or documents per schema");
  c_rank->add_option("--corpus", rank.corpus)->required();
  c_rank->add_option("--gold", rank.gold, "doc_id<TAB>schema_id lines")->required();
  c_rank->add_option("--mode", rank_mode)->check(CLI::IsMember({"schemas", "documents"}));
  c_rank->add_option("--k", rank.ks, "recall cutoffs");
  c_rank->add_option("--json", rank.json_out);
  ov.add(c_rank, "--strata", &Config::strata, "");

  InferArgs inf;
  auto* c_inf = app.add_subcommand("infer", "soft-logic schema matching per document");
  c_inf->add_option("--corpus", inf.corpus)->required();
  c_inf->add_option("--out", inf.out)->required();
  ov.add_nested<std::size_t>(c_inf, "--top-k", [](Config& c) -> auto& { return c.inference.top_k; }, "prefiltered schemas per document");
  ov.add_nested<std::size_t>(c_inf, "--max-bindings", [](Config& c) -> auto& { return c.inference.caps.max_bindings; }, "");

  IntrusionGenArgs ig;
  std::string ig_method = "library";
  auto* c_ig = app.add_subcommand("intrusion-gen", "generate schema intrusion tasks");
  c_ig->add_option("--method", ig_method)->check(CLI::IsMember({"library", "corpus"}));
  c_ig->add_option("--corpus", ig.corpus, "documents to match (corpus method)");
  c_ig->add_option("--matches", ig.matches, "precomputed infer output (corpus method)");
  c_ig->add_option("--tasks-per-schema", ig.tasks_per_schema);
  c_ig->add_option("--out-dir", ig.out_dir)->required();

  IntrusionScoreArgs is;
  std::string is_json;
  auto* c_is = app.add_subcommand("intrusion-score", "score annotator responses");
  c_is->add_option("--answers", is.answers)->required();
  c_is->add_option("--responses", is.responses)->required();
  c_is->add_option("--json", is_json);

  auto* c_serve = app.add_subcommand("serve", "HTTP API for the editor and jobs");
  ov.add(c_serve, "--host", &Config::host, "");
  ov.add(c_serve, "--port", &Config::port, "");
  ov.add(c_serve, "--workers", &Config::workers, "");
  ov.add(c_serve, "--jobs-dir", &Config::jobs_dir, "");
  ov.add(c_serve, "--skeletons", &Config::skeletons, "skeleton JSONL to offer for instantiation");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = load_config(config_file.empty() ? std::nullopt
                                                 : std::optional<std::filesystem::path>(config_file));
    for (const auto& f : ov.apply) f(cfg);

    std::shared_ptr<const Ontology> ontology;
    const auto need_ontology = [&]() -> const Ontology& {
      if (!ontology) {
        if (cfg.ontology.empty()) throw PreconditionError("--ontology is required");
        ontology = std::make_shared<const Ontology>(load_ontology_file(cfg.ontology));
      }
      return *ontology;
    };
    const auto need_library = [&]() -> std::filesystem::path {
      if (cfg.library.empty()) throw PreconditionError("--library is required");
      return cfg.library;
    };

    CommandResult r;
    if (*c_mine) {
      r = run_mine(mine, need_ontology(), cfg);
    } else if (*c_build) {
      if (build.transactions.empty() && build.scorer_table.empty())
        throw PreconditionError("give --transactions or --scorer-table");
      r = run_build(build, need_ontology(), cfg);
    } else if (*c_inst) {
      r = run_instantiate(inst, need_ontology());
    } else if (*c_val) {
      r = run_validate({validate_files.begin(), validate_files.end()}, need_ontology());
    } else if (*c_cov) {
      cov.library = need_library();
      r = run_coverage(cov, need_ontology(), cfg);
    } else if (*c_rank) {
      rank.library = need_library();
      rank.mode = rank_mode == "documents" ? RankMode::Documents : RankMode::Schemas;
      r = run_rank(rank, need_ontology(), cfg);
    } else if (*c_inf) {
      inf.library = need_library();
      r = run_infer(inf, need_ontology(), cfg);
    } else if (*c_ig) {
      ig.library = need_library();
      ig.method = parse_intrusion_method(ig_method);
      if (ig.method == IntrusionMethod::Corpus && ig.corpus.empty() && ig.matches.empty())
        throw PreconditionError("corpus method needs --corpus or --matches");
      const Ontology* onto = ig.matches.empty() && ig.method == IntrusionMethod::Corpus ? &need_ontology() : nullptr;
      r = run_intrusion_gen(ig, onto, cfg);
    } else if (*c_is) {
      r = run_intrusion_score(is);
      if (!is_json.empty()) write_file_atomic(is_json, dump_canonical(r.summary));
    } else if (*c_serve) {
      need_library();
      need_ontology();
      Server server(ontology, cfg);
      const int port = server.bind(cfg.host, cfg.port);
      std::cerr << "listening on " << cfg.host << ":" << port << "\n";
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.run();
      g_server = nullptr;
      return 0;
    }
    std::cout << r.report;
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
