#include "evschema/server.hpp"

#include <httplib.h>

#include "evschema/error.hpp"

namespace evschema {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

struct NotFound : Error {
  using Error::Error;
};

/// Maps library exceptions onto status codes.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFound& e) {
      send_error(res, 404, e.what());
    } catch (const VersionConflict& e) {
      send_json(res, 409, {{"error", e.what()}, {"version", e.actual()}});
    } catch (const ValidationError& e) {
      send_json(res, 422, {{"error", "validation failed"}, {"problems", e.problems()}});
    } catch (const ParseError& e) {
      send_error(res, 400, e.what());
    } catch (const PreconditionError& e) {
      send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return parse_json_lenient(req.body, "body");
}

std::optional<std::uint64_t> requested_version(const httplib::Request& req) {
  std::string v;
  if (req.has_param("version")) v = req.get_param_value("version");
  else if (req.has_header("If-Match")) v = req.get_header_value("If-Match");
  if (v.empty()) return std::nullopt;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ParseError("version", "bad version '" + v + "'");
  return n;
}

std::string arg_string(const json& args, const char* key, const std::string& fallback = {}) {
  if (!args.contains(key)) {
    if (fallback.empty()) throw PreconditionError(std::string("missing argument '") + key + "'");
    return fallback;
  }
  return args.at(key).get<std::string>();
}

}  // namespace

Server::Server(std::shared_ptr<const Ontology> ontology, const Config& config)
    : ontology_(std::move(ontology)), config_(config), http_(std::make_unique<httplib::Server>()) {
  if (!ontology_) throw PreconditionError("server needs an ontology");
  if (config_.library.empty()) throw PreconditionError("server needs a library directory");
  store_ = std::make_unique<LibraryStore>(config_.library);
  jobs_ = std::make_unique<JobManager>(
      config_.jobs_dir, config_.workers,
      [this](const std::string& kind, const json& snap, const std::filesystem::path& dir) {
        return run_job(kind, snap, dir);
      });
  jobs_->on_done([this](const JobRecord& r) {
    if (r.kind == "build") load_skeletons(jobs_->job_dir(r.id) / "skeletons.jsonl");
  });
  if (!config_.skeletons.empty()) load_skeletons(config_.skeletons);
  routes();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  if (!http_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

void Server::load_skeletons(const std::filesystem::path& path) {
  auto loaded = read_skeletons(path);
  std::lock_guard lock(skeleton_mu_);
  for (auto& s : loaded) skeletons_[s.id] = std::move(s);
}

CommandResult Server::run_job(const std::string& kind, const json& snap,
                              const std::filesystem::path& dir) {
  Config cfg;
  cfg.apply_json(snap.at("config"));
  const json& args = snap.at("args");
  const Ontology& onto = *ontology_;
  const std::string library = arg_string(args, "library", cfg.library);
  if (kind == "mine")
    return run_mine({arg_string(args, "corpus"), dir / "transactions.tsv", dir / "itemsets.tsv"}, onto, cfg);
  if (kind == "build")
    return run_build({arg_string(args, "itemsets"), args.value("transactions", ""),
                      args.value("scorer_table", ""), dir / "queue.tsv", dir / "skeletons.jsonl"},
                     onto, cfg);
  if (kind == "coverage")
    return run_coverage({arg_string(args, "corpus"), library, dir / "coverage.json"}, onto, cfg);
  if (kind == "rank") {
    RankArgs a{arg_string(args, "corpus"), library, arg_string(args, "gold"), RankMode::Schemas,
               {10, 30}, dir / "ranking.json"};
    if (args.value("mode", "schemas") == "documents") a.mode = RankMode::Documents;
    if (args.contains("ks")) a.ks = args["ks"].get<std::vector<std::size_t>>();
    return run_rank(a, onto, cfg);
  }
  if (kind == "infer") return run_infer({arg_string(args, "corpus"), library, dir / "matches.jsonl"}, onto, cfg);
  if (kind == "intrusion") {
    IntrusionGenArgs a;
    a.library = library;
    a.method = parse_intrusion_method(args.value("method", "library"));
    a.corpus = args.value("corpus", "");
    a.matches = args.value("matches", "");
    a.tasks_per_schema = args.value("tasks_per_schema", std::size_t{1});
    a.out_dir = dir;
    return run_intrusion_gen(a, &onto, cfg);
  }
  throw PreconditionError("unknown job kind '" + kind + "'");
}

void Server::routes() {
  auto& s = *http_;

  s.Get("/ontology", guarded([this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, ontology_->to_json());
  }));

  s.Get("/schemas", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& e : store_->list())
      out.push_back({{"id", e.id},
                     {"version", e.version},
                     {"provenance", to_string(e.provenance)},
                     {"draft", e.draft}});
    send_json(res, 200, out);
  }));

  s.Get(R"(/schemas/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto got = store_->get(req.matches[1]);
    if (!got) throw NotFound("unknown schema '" + std::string(req.matches[1]) + "'");
    res.set_header("ETag", "\"" + std::to_string(got->second) + "\"");
    res.set_header("X-Schema-Version", std::to_string(got->second));
    send_json(res, 200, schema_to_json(got->first));
  }));

  s.Put(R"(/schemas/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Schema schema = schema_from_json(parse_body(req));
    if (schema.id != id) throw ParseError("id", "body id '" + schema.id + "' does not match path");
    const bool draft = req.has_param("draft") && req.get_param_value("draft") == "true";
    const ValidationReport rep = validate_schema(schema, *ontology_);
    if (!rep.ok && !draft) {
      send_json(res, 422, {{"error", "schema has validation errors"}, {"report", rep.to_json()}});
      return;
    }
    const auto version = store_->put(schema, requested_version(req).value_or(0), !rep.ok);
    res.set_header("ETag", "\"" + std::to_string(version) + "\"");
    send_json(res, version == 1 ? 201 : 200,
              {{"id", id}, {"version", version}, {"draft", !rep.ok}, {"report", rep.to_json()}});
  }));

  s.Delete(R"(/schemas/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!store_->remove(req.matches[1], requested_version(req)))
      throw NotFound("unknown schema '" + std::string(req.matches[1]) + "'");
    res.status = 204;
  }));

  s.Post("/validate", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Schema schema = schema_from_json(parse_body(req));
    send_json(res, 200, validate_schema(schema, *ontology_).to_json());
  }));

  s.Post(R"(/skeletons/([^/]+)/instantiate)",
         guarded([this](const httplib::Request& req, httplib::Response& res) {
           SkeletonSchema sk;
           {
             std::lock_guard lock(skeleton_mu_);
             auto it = skeletons_.find(req.matches[1]);
             if (it == skeletons_.end())
               throw NotFound("unknown skeleton '" + std::string(req.matches[1]) + "'");
             sk = it->second;
           }
           send_json(res, 200, schema_to_json(schema_from_skeleton(sk, *ontology_)));
         }));

  s.Get("/jobs", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& r : jobs_->list()) out.push_back(r.to_json());
    send_json(res, 200, out);
  }));

  s.Post(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string kind = req.matches[1];
    const auto& kinds = job_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw NotFound("unknown job kind '" + kind + "'");
    json body = parse_body(req);
    if (!body.is_object()) throw ParseError("body", "expected an object");
    Config cfg = config_;
    if (body.contains("config")) cfg.apply_json(body["config"]);
    json args = body;
    args.erase("config");
    for (const auto& [k, v] : args.items())
      if (!v.is_string() && !v.is_number() && !v.is_array())
        throw ParseError(k, "job arguments are strings, numbers or lists");
    send_json(res, 202, jobs_->submit(kind, {{"config", cfg.to_json()}, {"args", args}}).to_json());
  }));

  s.Get(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto r = jobs_->get(req.matches[1]);
    if (!r) throw NotFound("unknown job '" + std::string(req.matches[1]) + "'");
    send_json(res, 200, r->to_json());
  }));

  s.Get(R"(/jobs/([^/]+)/output)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto r = jobs_->get(req.matches[1]);
    if (!r) throw NotFound("unknown job '" + std::string(req.matches[1]) + "'");
    if (r->status != JobStatus::done) {
      send_json(res, 404, {{"error", "job has no output yet"}, {"status", to_string(r->status)}});
      return;
    }
    if (r->outputs.empty()) {
      res.status = 200;
      res.set_content(r->report, "text/plain");
      return;
    }
    std::string path = r->outputs.front();
    if (req.has_param("name")) {
      const std::string name = req.get_param_value("name");
      auto it = std::find_if(r->outputs.begin(), r->outputs.end(), [&](const std::string& p) {
        return std::filesystem::path(p).filename() == name;
      });
      if (it == r->outputs.end()) throw NotFound("job has no output '" + name + "'");
      path = *it;
    }
    res.status = 200;
    res.set_content(read_file(path), path.ends_with(".json") ? "application/json" : "text/plain");
  }));
}

}  // namespace evschema
