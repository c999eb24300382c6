#include "evschema/commands.hpp"

#include <fstream>
#include <sstream>

#include "evschema/error.hpp"
#include "evschema/store.hpp"

namespace evschema {

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  return in;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file_atomic(p, text);
}

std::vector<std::string> event_universe(const Ontology& ontology) {
  std::vector<std::string> out;
  for (const auto& e : ontology.event_types()) out.push_back(e.id);
  return out;
}

}  // namespace

CorpusStructures load_mapped_corpus(const fs::path& corpus, const Ontology& ontology,
                                    const std::string& mapping_path) {
  const auto raw = load_corpus(corpus);
  const auto mapping =
      mapping_path.empty() ? identity_mapping(ontology) : load_mapping_file(mapping_path, ontology);
  return prepare_corpus(raw, mapping);
}

CommandResult run_mine(const MineArgs& a, const Ontology& ontology, const Config& cfg) {
  cfg.mining.validate();
  const auto cs = load_mapped_corpus(a.corpus, ontology, cfg.mapping);
  std::ostringstream tx;
  write_transactions(tx, cs.transactions);
  write_text(a.transactions_out, tx.str());
  const auto itemsets = mine_frequent(FileSource(a.transactions_out), cfg.mining);
  std::ostringstream is;
  write_itemsets(is, itemsets);
  write_text(a.itemsets_out, is.str());

  CommandResult r;
  r.outputs = {a.transactions_out, a.itemsets_out};
  r.summary = {{"documents", cs.documents.size()},
               {"dropped_events", cs.dropped_events},
               {"transactions", cs.transactions.size()},
               {"itemsets", itemsets.size()}};
  r.report = "documents " + std::to_string(cs.documents.size()) + ", transactions " +
             std::to_string(cs.transactions.size()) + ", frequent itemsets " +
             std::to_string(itemsets.size()) + "\n";
  return r;
}

CommandResult run_build(const BuildArgs& a, const Ontology& ontology, const Config& cfg) {
  cfg.builder.validate();
  auto in = open_in(a.itemsets);
  const auto itemsets = read_itemsets(in);
  const auto universe = event_universe(ontology);
  const DenseScorer scorer = a.scorer_table.empty()
                                 ? default_scorer(FileSource(a.transactions), universe)
                                 : DenseScorer::load_file(a.scorer_table);
  const auto candidates = score_candidates(itemsets, scorer);
  const auto kept = rank_and_diversify(candidates, cfg.builder);
  const auto chains = extend_chains(kept, scorer, universe, cfg.builder);
  for (const auto& p : {a.queue_out, a.skeletons_out})
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  export_curation_queue(chains, &ontology, a.queue_out, a.skeletons_out);

  CommandResult r;
  r.outputs = {a.queue_out, a.skeletons_out};
  r.summary = {{"itemsets", itemsets.size()},
               {"candidates", candidates.size()},
               {"kept", kept.size()},
               {"chains", chains.size()}};
  r.report = "candidates " + std::to_string(candidates.size()) + ", kept " +
             std::to_string(kept.size()) + ", chains " + std::to_string(chains.size()) + "\n";
  return r;
}

CommandResult run_instantiate(const InstantiateArgs& a, const Ontology& ontology) {
  for (const auto& sk : read_skeletons(a.skeletons)) {
    if (sk.id != a.skeleton_id) continue;
    const Schema s = schema_from_skeleton(sk, ontology);
    write_text(a.out, serialize(s));
    CommandResult r;
    r.outputs = {a.out};
    r.summary = {{"schema", s.id}, {"steps", s.steps.size()}};
    r.report = "instantiated " + s.id + " with " + std::to_string(s.steps.size()) + " steps\n";
    return r;
  }
  throw PreconditionError("unknown skeleton '" + a.skeleton_id + "'");
}

CommandResult run_validate(const std::vector<fs::path>& schema_files, const Ontology& ontology) {
  CommandResult r;
  json reports = json::object();
  std::ostringstream out;
  for (const auto& f : schema_files) {
    const Schema s = load_schema_file(f);
    const ValidationReport rep = validate_schema(s, ontology);
    reports[f.string()] = rep.to_json();
    out << f.string() << ": " << (rep.ok ? "ok" : "INVALID") << " (" << rep.error_count()
        << " errors, " << rep.warning_count() << " warnings)\n";
    for (const auto& i : rep.issues)
      out << "  " << to_string(i.severity) << " [" << i.location << "] " << i.message << "\n";
    if (!rep.ok) r.exit_code = 1;
  }
  r.summary = std::move(reports);
  r.report = out.str();
  return r;
}

CommandResult run_coverage(const CoverageArgs& a, const Ontology& ontology, const Config& cfg) {
  const auto cs = load_mapped_corpus(a.corpus, ontology, cfg.mapping);
  const auto library = load_library(a.library);
  const auto thresholds = parse_thresholds(cfg.thresholds);
  const auto strata = parse_strata(cfg.strata);
  CoverageReport rep = coverage(cs.multisets, library, thresholds, strata);
  rep.library_id = a.library.filename().string();
  rep.corpus_id = a.corpus.filename().string();
  CommandResult r;
  r.summary = coverage_to_json(rep);
  r.report = format_coverage_table(rep);
  if (!a.json_out.empty()) {
    write_text(a.json_out, dump_canonical(r.summary));
    r.outputs.push_back(a.json_out);
  }
  return r;
}

CommandResult run_rank(const RankArgs& a, const Ontology& ontology, const Config& cfg) {
  const auto cs = load_mapped_corpus(a.corpus, ontology, cfg.mapping);
  const auto library = load_library(a.library);
  const auto gold = load_gold_labels(a.gold);
  const auto strata = parse_strata(cfg.strata);
  const auto rep = evaluate_ranking(cs.multisets, library, gold, a.mode, a.ks, strata);
  CommandResult r;
  r.summary = ranking_to_json(rep);
  r.report = format_ranking_table(rep);
  if (!a.json_out.empty()) {
    write_text(a.json_out, dump_canonical(r.summary));
    r.outputs.push_back(a.json_out);
  }
  return r;
}

CommandResult run_infer(const InferArgs& a, const Ontology& ontology, const Config& cfg) {
  const auto cs = load_mapped_corpus(a.corpus, ontology, cfg.mapping);
  const auto library = load_library(a.library);
  const auto results = infer_corpus(library, cs.documents, cfg.inference);
  std::ostringstream out;
  std::size_t matches = 0, truncated = 0;
  for (const auto& d : results) {
    out << document_matches_to_json(d).dump() << "\n";
    matches += d.matches.size();
    for (const auto& m : d.matches) truncated += m.truncated;
  }
  write_text(a.out, out.str());
  CommandResult r;
  r.outputs = {a.out};
  r.summary = {{"documents", results.size()}, {"matches", matches}, {"truncated", truncated}};
  r.report = "documents " + std::to_string(results.size()) + ", schema matches " +
             std::to_string(matches) + ", truncated groundings " + std::to_string(truncated) + "\n";
  return r;
}

std::vector<DocumentMatches> read_matches(const fs::path& path) {
  auto in = open_in(path);
  std::vector<DocumentMatches> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(document_matches_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno), e.what());
    }
  }
  return out;
}

CommandResult run_intrusion_gen(const IntrusionGenArgs& a, const Ontology* ontology,
                                const Config& cfg) {
  const auto library = load_library(a.library);
  std::vector<MatchedDocument> corpus;
  if (a.method == IntrusionMethod::Corpus) {
    std::vector<DocumentMatches> matches;
    if (!a.matches.empty()) {
      matches = read_matches(a.matches);
    } else {
      if (!ontology) throw PreconditionError("corpus method needs an ontology");
      const auto cs = load_mapped_corpus(a.corpus, *ontology, cfg.mapping);
      matches = infer_corpus(library, cs.documents, cfg.inference);
    }
    for (auto& d : matches) corpus.push_back({d.doc_id, d.n_events, std::move(d.matches)});
  }
  GenerationOptions opt;
  opt.method = a.method;
  opt.seed = cfg.seed;
  opt.tasks_per_schema = a.tasks_per_schema;
  const auto gen = generate_tasks(library, corpus, opt);

  std::ostringstream tasks, answers, review;
  write_tasks(tasks, gen.tasks);
  write_answer_key(answers, gen.tasks);
  write_review(review, gen.tasks);
  const fs::path tp = a.out_dir / "tasks.jsonl", ap = a.out_dir / "answers.jsonl",
                 rp = a.out_dir / "review.tsv";
  write_text(tp, tasks.str());
  write_text(ap, answers.str());
  write_text(rp, review.str());

  CommandResult r;
  r.outputs = {tp, ap, rp};
  json skipped = json::array();
  std::ostringstream rep;
  rep << "tasks " << gen.tasks.size() << ", skipped " << gen.skipped.size() << "\n";
  for (const auto& s : gen.skipped) {
    skipped.push_back({{"schema", s.host_schema}, {"reason", s.reason}});
    rep << "  skipped " << s.host_schema << ": " << s.reason << "\n";
  }
  r.summary = {{"tasks", gen.tasks.size()}, {"skipped", std::move(skipped)}};
  r.report = rep.str();
  return r;
}

CommandResult run_intrusion_score(const IntrusionScoreArgs& a) {
  auto ka = open_in(a.answers);
  auto kr = open_in(a.responses);
  const auto key = read_answer_key(ka);
  const auto responses = read_responses(kr);
  const auto rep = score_responses(key, responses);
  CommandResult r;
  r.summary = accuracy_to_json(rep);
  r.report = format_accuracy(rep);
  return r;
}

}  // namespace evschema
