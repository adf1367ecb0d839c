#include "csx/service.hpp"

#include <httplib.h>
#include <json.hpp>

namespace csx::service {
using json = nlohmann::ordered_json;

struct Service::Workspace {
  std::string id;
  std::uint64_t revision = 0;
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();
  std::shared_ptr<const WorkspaceReport> report;
  std::mutex mu; // guards `last`
  std::map<std::string, ModelValue> last; // last configuration per device
};

namespace {

Response reply(int status, const json& body) { return {status, body.dump(2)}; }

Response error(int status, const std::string& message) {
  return reply(status, json{{"error", message}});
}

json diagnostic_json(const SourceSet& sources, const Diagnostic& d) {
  json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["message"] = d.message;
  if (d.span.file < sources.size()) {
    auto pos = sources.position(d.span.file, d.span.begin);
    j["file"] = sources.name(d.span.file);
    j["line"] = pos.line;
    j["column"] = pos.column;
  }
  return j;
}

json value_json(const Value& v) {
  if (v.is_bool())
    return v.as_bool();
  if (v.is_int())
    return v.as_int();
  json out = json::object();
  const ModelValue& m = v.as_model();
  for (std::size_t i = 0; i < m.size(); ++i)
    out[m.names()[i]] = value_json(m.values()[i]);
  return out;
}

json model_json(const ModelValue& m) { return value_json(Value(m)); }

/// Partial configurations are allowed; missing names surface as
/// MissingBinding when an expression needs them.
ModelValue model_from_json(const json& j) {
  if (!j.is_object())
    throw std::invalid_argument("configuration must be a JSON object");
  ModelValue m;
  for (const auto& [name, v] : j.items()) {
    if (v.is_boolean())
      m.bind(name, v.get<bool>());
    else if (v.is_number_integer())
      m.bind(name, v.get<std::int64_t>());
    else if (v.is_object())
      m.bind(name, model_from_json(v));
    else
      throw std::invalid_argument("value of '" + name + "' must be an integer, boolean or object");
  }
  return m;
}

json leaves_json(const std::vector<Leaf>& leaves) {
  json out = json::array();
  for (const auto& l : leaves)
    out.push_back(json{{"path", l.dotted()}, {"name", qualified_name(l.path)},
                       {"sort", std::string(to_string(l.sort))}});
  return out;
}

json scenario_json(const ScenarioReport& r) {
  json j;
  j["name"] = r.name;
  j["device"] = r.device;
  j["passed"] = r.passed();
  j["status"] = std::string(to_string(r.outcome.kind));
  if (r.outcome.objective)
    j["objective"] = *r.outcome.objective;
  if (r.outcome.configuration)
    j["configuration"] = model_json(*r.outcome.configuration);
  json exps = json::array();
  for (const auto& e : r.expectations) {
    json w = json::object();
    for (const auto& [path, value] : e.witness)
      w[path] = value;
    exps.push_back(json{{"expect", e.text},
                        {"verdict", std::string(to_string(e.verdict))},
                        {"determinacy", std::string(to_string(e.determinacy))},
                        {"witness", w}});
  }
  j["expectations"] = exps;
  return j;
}

/// Options from an optional `bounds` / `budget` object in a request.
SolveOptions request_options(const SolveOptions& defaults, const json& body) {
  SolveOptions opts = defaults;
  if (body.contains("bounds")) {
    const json& b = body["bounds"];
    const auto d = opts.box.default_domain();
    const std::int64_t lo = b.value("min", d.lo);
    const std::int64_t hi = b.value("max", d.hi);
    if (lo > hi)
      throw std::invalid_argument("bounds.min exceeds bounds.max");
    opts.box.set_default(lo, hi);
  }
  if (body.contains("budget")) {
    const json& b = body["budget"];
    opts.budget.max_nodes = b.value("nodes", opts.budget.max_nodes);
    opts.budget.max_time =
        std::chrono::milliseconds(b.value("ms", static_cast<std::int64_t>(opts.budget.max_time.count())));
  }
  return opts;
}

std::optional<Expr> parse_expression(const std::string& text, std::string& error) {
  ExprParseResult pr = parse_expr(text);
  if (!pr.expr) {
    error = pr.errors.empty() ? "parse error" : pr.errors.front().message;
    return std::nullopt;
  }
  return pr.expr;
}

} // namespace

Service::Service(SolveOptions defaults) : defaults_(std::move(defaults)) {}

std::shared_ptr<Service::Workspace> Service::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = workspaces_.find(id);
  return it == workspaces_.end() ? nullptr : it->second;
}

Response Service::put_workspace(const std::string& body) {
  std::vector<SourceFile> files;
  std::optional<std::string> requested_id;
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '{') {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("files") || !j["files"].is_array())
      return error(400, "expected CSX source or {\"files\": [{\"name\", \"source\"}]}");
    if (j.contains("id")) {
      if (!j["id"].is_string())
        return error(400, "id must be a string");
      requested_id = j["id"].get<std::string>();
    }
    for (const auto& f : j["files"]) {
      if (!f.is_object() || !f.contains("source") || !f["source"].is_string())
        return error(400, "each file needs a string 'source'");
      files.push_back({f.value("name", "file" + std::to_string(files.size() + 1) + ".csx"),
                       f["source"].get<std::string>()});
    }
  } else {
    files.push_back({"workspace.csx", body});
  }

  std::shared_ptr<Workspace> prior;
  if (requested_id)
    prior = find(*requested_id);
  auto cache = prior ? prior->cache : std::make_shared<Cache>();
  auto report = std::make_shared<const WorkspaceReport>(analyze_workspace(files, *cache, defaults_));

  json diags = json::array();
  for (const auto& d : report->diagnostics)
    diags.push_back(diagnostic_json(report->sources, d));
  bool parse_failed = false;
  for (const auto& f : files)
    parse_failed = parse_failed || !parse(f.text).ok();
  if (parse_failed)
    return reply(400, json{{"error", "parse failure"}, {"diagnostics", diags}});

  auto ws = std::make_shared<Workspace>();
  ws->cache = cache;
  ws->report = report;
  {
    std::lock_guard lock(mu_);
    ws->id = requested_id ? *requested_id : "w" + std::to_string(next_id_++);
    auto it = workspaces_.find(ws->id);
    ws->revision = it == workspaces_.end() ? 1 : it->second->revision + 1;
    workspaces_[ws->id] = ws;
  }

  json inhabitance = json::array();
  for (const auto& i : report->inhabitance)
    inhabitance.push_back(json{{"kind", std::string(to_string(i.kind))},
                               {"name", i.name},
                               {"status", std::string(to_string(i.result.status))}});
  json scenarios = json::array();
  for (const auto& s : report->scenarios)
    scenarios.push_back(scenario_json(s));
  return reply(200, json{{"workspace", ws->id},
                         {"revision", ws->revision},
                         {"diagnostics", diags},
                         {"inhabitance", inhabitance},
                         {"scenarios", scenarios}});
}

Response Service::get_workspace(const std::string& id) {
  auto ws = find(id);
  if (!ws)
    return error(404, "unknown workspace '" + id + "'");
  json files = json::array();
  for (std::uint32_t i = 0; i < ws->report->sources.size(); ++i)
    files.push_back(ws->report->sources.name(i));
  return reply(200, json{{"workspace", ws->id}, {"revision", ws->revision}, {"files", files},
                         {"errors", ws->report->has_errors()}});
}

Response Service::devices(const std::string& id) {
  auto ws = find(id);
  if (!ws)
    return error(404, "unknown workspace '" + id + "'");
  json out = json::array();
  if (!ws->report->typed)
    return reply(200, out);
  const TypedSpec& typed = *ws->report->typed;
  for (const auto& d : typed.spec().devices) {
    json locations = json::array();
    for (const auto& l : d.locations) {
      json leaves = json::array();
      if (!l.type.is_primitive()) {
        for (auto leaf : type_leaves(typed, typed.type(l.type.name))) {
          leaf.path.insert(leaf.path.begin(), l.name.text);
          leaves.push_back(json{{"path", leaf.dotted()}, {"sort", std::string(to_string(leaf.sort))}});
        }
      }
      locations.push_back(json{{"name", l.name.text}, {"type", l.type.name}, {"leaves", leaves}});
    }
    json components = json::array();
    for (const auto& c : d.components) {
      json params = json::array();
      for (const auto& p : typed.action(c.action.text).params)
        params.push_back(json{{"name", p.name.text},
                              {"path", c.name.text + "." + p.name.text},
                              {"sort", p.type.name}});
      json args = json::array();
      for (const auto& a : c.loc_args)
        args.push_back(a.text);
      components.push_back(json{{"name", c.name.text}, {"action", c.action.text},
                                {"locations", args}, {"parameters", params}});
    }
    out.push_back(json{{"name", d.name.text},
                       {"locations", locations},
                       {"components", components},
                       {"leaves", leaves_json(device_leaves(typed, d))}});
  }
  return reply(200, out);
}

Response Service::solve(const std::string& id, const std::string& body) {
  auto ws = find(id);
  if (!ws)
    return error(404, "unknown workspace '" + id + "'");
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error(400, "request body must be a JSON object");
  if (req.contains("revision") && req["revision"] != ws->revision)
    return reply(409, json{{"error", "stale revision"}, {"revision", ws->revision}});
  if (!ws->report->typed)
    return error(422, "workspace has errors");
  const TypedSpec& typed = *ws->report->typed;
  const std::string device = req.value("device", "");
  if (!typed.spec().find_device(device))
    return error(404, "unknown device '" + device + "'");

  Job job;
  job.device = device;
  try {
    if (req.contains("fixed")) {
      const json& fixed = req["fixed"];
      if (!fixed.is_object())
        return error(400, "'fixed' must map paths to values");
      for (const auto& [path, v] : fixed.items()) {
        std::string text = path + "=";
        if (v.is_boolean())
          text += v.get<bool>() ? "true" : "false";
        else if (v.is_number_integer())
          text += std::to_string(v.get<std::int64_t>());
        else
          return error(400, "value of '" + path + "' must be an integer or boolean");
        auto b = parse_binding(text);
        if (!b)
          return error(422, "malformed path '" + path + "'");
        job.fixed.push_back(std::move(*b));
      }
    }
    std::string perr;
    for (const auto& c : req.value("constraints", json::array())) {
      if (!c.is_string())
        return error(400, "constraints must be strings");
      auto e = parse_expression(c.get<std::string>(), perr);
      if (!e)
        return error(422, "constraint: " + perr);
      job.constraints.push_back(*e);
    }
    if (req.contains("objective") && !req["objective"].is_null()) {
      const json& o = req["objective"];
      const std::string sense = o.value("sense", "");
      if (sense != "minimize" && sense != "maximize")
        return error(400, "objective.sense must be 'minimize' or 'maximize'");
      auto e = parse_expression(o.value("expr", ""), perr);
      if (!e)
        return error(422, "objective: " + perr);
      job.objective = Objective{sense == "minimize" ? Sense::Minimize : Sense::Maximize, *e};
    }
    const SolveOptions opts = request_options(defaults_, req);
    ExplorationOutcome out = find_configuration(typed, job, opts);

    json res;
    res["status"] = std::string(to_string(out.kind));
    res["revision"] = ws->revision;
    if (out.kind == OutcomeKind::Found) {
      res["configuration"] = model_json(*out.configuration);
      json flat = json::object();
      for (const auto& [name, v] : out.assignment->entries())
        flat[name] = std::holds_alternative<bool>(v) ? json(std::get<bool>(v))
                                                     : json(std::get<std::int64_t>(v));
      res["flat"] = flat;
      res["text"] = format_configuration(*out.configuration, ConfigFormat::Flat);
      std::lock_guard lock(ws->mu);
      ws->last.insert_or_assign(device, *out.configuration);
    }
    if (out.objective)
      res["objective"] = *out.objective;
    res["nodes"] = out.stats.nodes;
    return reply(200, res);
  } catch (const JobError& e) {
    json diags = json::array();
    for (const auto& d : e.diagnostics())
      diags.push_back(d.message);
    return reply(422, json{{"error", e.what()}, {"diagnostics", diags}});
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
}

Response Service::eval(const std::string& id, const std::string& body) {
  auto ws = find(id);
  if (!ws)
    return error(404, "unknown workspace '" + id + "'");
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object() || !req.contains("expr") || !req["expr"].is_string())
    return error(400, "request needs a string 'expr'");
  if (req.contains("revision") && req["revision"] != ws->revision)
    return reply(409, json{{"error", "stale revision"}, {"revision", ws->revision}});
  if (!ws->report->typed)
    return error(422, "workspace has errors");
  const TypedSpec& typed = *ws->report->typed;

  std::string perr;
  auto e = parse_expression(req["expr"].get<std::string>(), perr);
  if (!e)
    return error(422, perr);

  std::string device = req.value("device", "");
  if (device.empty() && typed.spec().devices.size() == 1)
    device = typed.spec().devices.front().name.text;
  ModelValue config;
  AnalysisResult ar;
  if (device.empty()) {
    // Closed expressions need no device.
    Spec spec = typed.spec();
    spec.devices.push_back(DeviceDef{{"Eval", {}}, {}, {}, {}, {}, {}});
    device = "Eval";
    AnalysisResult base = analyze(std::move(spec));
    if (!base.ok())
      return error(422, "cannot evaluate outside a device");
    ar = analyze_in_device(*base.typed, device, {*e});
  } else {
    if (!typed.spec().find_device(device))
      return error(404, "unknown device '" + device + "'");
    ar = analyze_in_device(typed, device, {*e});
    try {
      if (req.contains("configuration")) {
        config = model_from_json(req["configuration"]);
      } else {
        std::lock_guard lock(ws->mu);
        auto it = ws->last.find(device);
        if (it != ws->last.end())
          config = it->second;
      }
    } catch (const std::exception& ex) {
      return error(400, ex.what());
    }
  }
  if (!ar.ok()) {
    std::string msg;
    for (const auto& d : ar.diagnostics)
      msg += (msg.empty() ? "" : "; ") + d.message;
    return error(422, msg);
  }
  try {
    Value v = eval_in_device(*ar.typed, config, *e);
    return reply(200, json{{"value", value_json(v)}, {"text", to_string(v)}});
  } catch (const MissingBinding& ex) {
    return error(422, std::string("not determined: ") + ex.what());
  } catch (const std::overflow_error& ex) {
    return error(422, ex.what());
  }
}

Response Service::scenarios(const std::string& id, const std::string& body) {
  auto ws = find(id);
  if (!ws)
    return error(404, "unknown workspace '" + id + "'");
  json req = body.empty() ? json::object() : json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error(400, "request body must be a JSON object");
  if (!ws->report->typed)
    return error(422, "workspace has errors");
  const TypedSpec& typed = *ws->report->typed;
  std::vector<const ScenarioDef*> selected;
  for (const auto& n : req.value("names", json::array())) {
    const ScenarioDef* s = n.is_string() ? typed.spec().find_scenario(n.get<std::string>()) : nullptr;
    if (!s)
      return error(404, "unknown scenario " + n.dump());
    selected.push_back(s);
  }
  if (selected.empty())
    for (const auto& s : typed.spec().scenarios)
      selected.push_back(&s);
  json out = json::array();
  for (const ScenarioDef* s : selected) {
    try {
      out.push_back(scenario_json(run_scenario_cached(typed, *s, *ws->cache, defaults_)));
    } catch (const JobError& e) {
      return error(422, e.what());
    }
  }
  return reply(200, out);
}

void Service::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Put("/workspace", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, put_workspace(req.body));
  });
  server.Get(R"(/workspace/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_workspace(req.matches[1]));
  });
  server.Get(R"(/workspace/([^/]+)/devices)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, devices(req.matches[1]));
             });
  server.Post(R"(/workspace/([^/]+)/solve)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, solve(req.matches[1], req.body));
              });
  server.Post(R"(/workspace/([^/]+)/eval)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, eval(req.matches[1], req.body));
              });
  server.Post(R"(/workspace/([^/]+)/scenarios)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, scenarios(req.matches[1], req.body));
              });
  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res,
                                      std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    send(res, Response{500, json{{"error", msg}}.dump(2)});
  });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  return server.listen(host, port);
}

} // namespace csx::service
