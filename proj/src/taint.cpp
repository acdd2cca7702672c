// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/taint.hpp"

#include "nlflow/common.hpp"
#include "nlflow/js_parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace nlflow::taint {

using js::Kind;
using js::Node;

// ===========================================================================
// Sink catalog
// ===========================================================================

namespace {

std::vector<SinkSpec> build_default_catalog() {
  std::vector<SinkSpec> c;
  auto add = [&](SinkType t, std::initializer_list<const char *> callees,
                 std::vector<int> positions) {
    for (const char *callee : callees)
      c.push_back({t, callee, positions});
  };
  add(SinkType::CmdInj,
      {"child_process.exec", "child_process.execSync", "child_process.execFile",
       "child_process.execFileSync", "child_process.spawn", "child_process.spawnSync",
       "cross-spawn", "cross-spawn.sync"},
      {0, 1});
  add(SinkType::CmdInj,
      {"execa", "execa.sync", "execa.command", "execa.commandSync", "execa.execa",
       "execa.execaSync", "execa.execaCommand", "execa.execaCommandSync", "shelljs.exec"},
      {0});
  add(SinkType::CodeInj,
      {"eval", "vm.runInThisContext", "vm.runInNewContext", "vm.runInContext",
       "vm.compileFunction", "vm.Script"},
      {0});
  add(SinkType::CodeInj, {"Function"}, {});
  add(SinkType::XSS,
      {"res.send", "res.write", "res.end", "res.status.send", "res.status.end",
       "response.send", "response.write", "response.end"},
      {0});
  add(SinkType::PathTrav,
      {"fs.readFile",       "fs.readFileSync",   "fs.writeFile",    "fs.writeFileSync",
       "fs.appendFile",     "fs.appendFileSync", "fs.createReadStream", "fs.createWriteStream",
       "fs.unlink",         "fs.unlinkSync",     "fs.readdir",      "fs.readdirSync",
       "fs.mkdir",          "fs.mkdirSync",      "fs.rmdir",        "fs.rmdirSync",
       "fs.rm",             "fs.rmSync",         "fs.stat",         "fs.statSync",
       "fs.lstat",          "fs.lstatSync",      "fs.access",       "fs.accessSync",
       "fs.exists",         "fs.existsSync",     "fs.open",         "fs.openSync",
       "fs.promises.readFile", "fs.promises.writeFile", "fs.promises.readdir",
       "fs.promises.unlink", "fs.promises.mkdir", "fs.promises.rm", "fs.promises.open",
       "fs/promises.readFile", "fs/promises.writeFile", "fs/promises.readdir",
       "fs/promises.unlink", "fs/promises.mkdir", "fs/promises.rm", "fs/promises.open",
       "fs-extra.readFile", "fs-extra.writeFile", "fs-extra.outputFile", "fs-extra.remove",
       "fs-extra.readJson", "fs-extra.readJsonSync", "fs-extra.ensureDir",
       "res.sendFile",      "res.download"},
      {0});
  add(SinkType::PathTrav,
      {"fs.rename", "fs.renameSync", "fs.copyFile", "fs.copyFileSync", "fs-extra.copy",
       "fs-extra.move"},
      {0, 1});
  add(SinkType::Logging,
      {"console.log", "console.info", "console.warn", "console.error", "console.debug",
       "console.trace", "logger.log", "logger.info", "logger.warn", "logger.error",
       "logger.debug", "logger.trace", "log.info", "log.warn", "log.error", "log.debug",
       "log.trace", "winston.log", "winston.info", "winston.warn", "winston.error",
       "winston.debug"},
      {});
  return c;
}

} // namespace

const std::vector<SinkSpec> &default_sink_catalog() {
  static const std::vector<SinkSpec> catalog = build_default_catalog();
  return catalog;
}

std::vector<SinkSpec> parse_sink_catalog(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("sink catalog: ") + e.what());
  }
  if (!doc.is_array())
    throw ConfigError("sink catalog must be a JSON array");
  std::vector<SinkSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto &e = doc[i];
    std::string where = "sink catalog entry " + std::to_string(i);
    if (!e.is_object() || !e.contains("sink_type") || !e.contains("callee_pattern"))
      throw ConfigError(where + ": needs sink_type and callee_pattern");
    SinkSpec s;
    try {
      s.sink_type = parse_sink_type(e.at("sink_type").get<std::string>());
    } catch (const std::exception &ex) {
      throw ConfigError(where + ": " + ex.what());
    }
    if (s.sink_type == SinkType::None)
      throw ConfigError(where + ": sink_type None is not a sink");
    if (!e.at("callee_pattern").is_string() || e.at("callee_pattern").get<std::string>().empty())
      throw ConfigError(where + ": callee_pattern must be a non-empty string");
    s.callee_pattern = e.at("callee_pattern").get<std::string>();
    if (e.contains("tainted_arg_positions")) {
      const auto &pos = e.at("tainted_arg_positions");
      if (!pos.is_array())
        throw ConfigError(where + ": tainted_arg_positions must be an array");
      for (const auto &p : pos) {
        if (!p.is_number_integer() || p.get<int>() < 0)
          throw ConfigError(where + ": positions must be non-negative integers");
        s.tainted_arg_positions.push_back(p.get<int>());
      }
      std::sort(s.tainted_arg_positions.begin(), s.tainted_arg_positions.end());
      s.tainted_arg_positions.erase(
          std::unique(s.tainted_arg_positions.begin(), s.tainted_arg_positions.end()),
          s.tainted_arg_positions.end());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SinkSpec> load_sink_catalog(const std::string &path) {
  return parse_sink_catalog(read_file(path));
}

std::string serialize_sink_catalog(const std::vector<SinkSpec> &catalog) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto &s : catalog) {
    nlohmann::ordered_json e;
    e["sink_type"] = to_string(s.sink_type);
    e["callee_pattern"] = s.callee_pattern;
    e["tainted_arg_positions"] = s.tainted_arg_positions;
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

namespace {

std::vector<std::string_view> split_dots(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = s.find('.', start);
    parts.push_back(s.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos)
      return parts;
    start = dot + 1;
  }
}

} // namespace

bool callee_matches(std::string_view pattern, std::string_view path) {
  auto ps = split_dots(pattern);
  auto xs = split_dots(path);
  if (ps.size() != xs.size())
    return false;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i] != "*" && ps[i] != xs[i])
      return false;
  return true;
}

// ===========================================================================
// Abstract values
// ===========================================================================

namespace {

using Labels = std::vector<int>; // sorted, unique

bool merge_labels(Labels &into, const Labels &from) {
  if (from.empty())
    return false;
  Labels merged;
  merged.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
  if (merged.size() == into.size())
    return false;
  into = std::move(merged);
  return true;
}

struct Frame;
struct Cell;

struct Closure {
  const Node *fn = nullptr;
  std::shared_ptr<Frame> env;
  std::shared_ptr<Cell> bound_this; // class methods share one instance cell
};

constexpr std::size_t kMaxPaths = 8;

// Property slot holding the taint of an object-rest parameter's remainder.
const std::string kRestKey = "\x01rest";

struct Slot {
  Labels labels;
  std::vector<Closure> fns;               // keyed by fn node
  std::vector<const Node *> classes;      // class nodes this value may be
  std::vector<std::string> paths;         // static callee paths (module aliases)

  bool merge(const Slot &o) {
    bool changed = merge_labels(labels, o.labels);
    for (const auto &c : o.fns) {
      if (std::none_of(fns.begin(), fns.end(), [&](const Closure &x) { return x.fn == c.fn; })) {
        fns.push_back(c);
        changed = true;
      }
    }
    for (const Node *k : o.classes) {
      if (std::find(classes.begin(), classes.end(), k) == classes.end()) {
        classes.push_back(k);
        changed = true;
      }
    }
    for (const auto &p : o.paths) {
      if (paths.size() < kMaxPaths && std::find(paths.begin(), paths.end(), p) == paths.end()) {
        paths.push_back(p);
        changed = true;
      }
    }
    return changed;
  }
};

struct AbsVal {
  Slot self;
  std::map<std::string, Slot> props;

  bool merge(const AbsVal &o) {
    bool changed = self.merge(o.self);
    for (const auto &[k, v] : o.props)
      changed |= props[k].merge(v);
    return changed;
  }

  /// The whole value as one slot: containers carry their elements' taint.
  Slot flat() const {
    Slot s = self;
    for (const auto &[k, v] : props) {
      merge_labels(s.labels, v.labels);
      for (const auto &c : v.fns)
        if (std::none_of(s.fns.begin(), s.fns.end(), [&](const Closure &x) { return x.fn == c.fn; }))
          s.fns.push_back(c);
    }
    return s;
  }

  Labels all_labels() const { return flat().labels; }

  static AbsVal of(Slot s) {
    AbsVal v;
    v.self = std::move(s);
    return v;
  }
};

struct Cell {
  AbsVal value;
  std::uint64_t owner = 0; // id of the owning frame; 0 = global state
};

struct Frame {
  std::uint64_t id = 0;
  std::shared_ptr<Frame> parent;
  std::map<std::string, std::shared_ptr<Cell>> vars;
  bool is_function = false;
  AbsVal ret;
};

// ===========================================================================
// Export discovery and integrity sources
// ===========================================================================

struct ExportEntry {
  std::string function_name;
  const Node *fn = nullptr;
  const Node *class_node = nullptr;
};

bool is_member_of(const Node *n, std::string_view object, std::string_view prop) {
  return n && n->kind == Kind::Member && !n->has(js::kComputed) && n->text == prop &&
         n->kid(0)->kind == Kind::Identifier && n->kid(0)->text == object;
}

bool is_module_exports(const Node *n) { return is_member_of(n, "module", "exports"); }

// `exports.NAME`, `module.exports.NAME`, `module.exports['NAME']`.
std::optional<std::string> named_export_target(const Node *n) {
  if (!n || n->kind != Kind::Member || n->text.empty())
    return std::nullopt;
  if (n->has(js::kComputed) && n->kid(1)->kind != Kind::String)
    return std::nullopt;
  const Node *obj = n->kid(0);
  if ((obj->kind == Kind::Identifier && obj->text == "exports") || is_module_exports(obj))
    return n->text;
  return std::nullopt;
}

class ExportCollector {
public:
  ExportCollector(const Node &program, std::string stem) : stem_(std::move(stem)) {
    for (const auto &s : program.kids)
      record_definition(s.get());
    for (const auto &s : program.kids)
      visit(s.get());
  }

  std::vector<ExportEntry> take() { return std::move(entries_); }

private:
  void record_definition(const Node *s) {
    if (!s)
      return;
    switch (s->kind) {
    case Kind::Function:
    case Kind::Class:
      if (!s->text.empty())
        defs_.emplace(s->text, s);
      break;
    case Kind::VarDecl:
      for (const auto &d : s->kids) {
        const Node *target = d->kid(0);
        const Node *init = d->kid(1);
        if (target->kind == Kind::Identifier && init &&
            (init->kind == Kind::Function || init->kind == Kind::Class ||
             init->kind == Kind::Object || init->kind == Kind::Identifier))
          defs_.emplace(target->text, init);
      }
      break;
    case Kind::ExportNamed:
    case Kind::ExportDefault: record_definition(s->kid(0)); break;
    case Kind::ExprStmt: {
      // `obj.name = value` on a top-level object that may be exported later.
      const Node *e = s->kid(0);
      while (e && e->kind == Kind::Assign && e->text == "=") {
        const Node *t = e->kid(0);
        if (t->kind == Kind::Member && !t->has(js::kComputed) && !t->text.empty() &&
            t->kid(0)->kind == Kind::Identifier)
          member_defs_[t->kid(0)->text].emplace_back(t->text, e->kid(1));
        e = e->kid(1);
      }
      break;
    }
    default: break;
    }
  }

  void add(const std::string &name, const Node *fn, const Node *cls = nullptr) {
    if (std::any_of(entries_.begin(), entries_.end(), [&](const auto &e) { return e.fn == fn; }))
      return;
    entries_.push_back({name, fn, cls});
  }

  void add_class(const Node *cls, const std::string &export_name) {
    std::string class_name = !cls->text.empty() ? cls->text
                             : !export_name.empty() ? export_name
                                                   : stem_;
    for (std::size_t i = 1; i < cls->kids.size(); ++i) {
      const Node *m = cls->kid(i);
      if (!m || !m->has(js::kMethod) || m->text.empty())
        continue;
      const Node *fn = m->kid(0);
      add(m->text == "constructor" ? class_name : m->text, fn, cls);
    }
  }

  void export_value(const Node *v, const std::string &name, int depth = 0) {
    if (!v || depth > 8)
      return;
    switch (v->kind) {
    case Kind::Function:
      add(!name.empty() ? name : !v->text.empty() ? v->text : stem_, v);
      break;
    case Kind::Class: add_class(v, name); break;
    case Kind::Identifier:
      if (auto it = defs_.find(v->text); it != defs_.end())
        export_value(it->second, name.empty() ? v->text : name, depth + 1);
      if (auto it = member_defs_.find(v->text); it != member_defs_.end())
        for (const auto &[prop, value] : it->second)
          export_value(value, prop, depth + 1);
      break;
    case Kind::Object:
      for (const auto &p : v->kids) {
        if (p->kind != Kind::Property || p->text.empty() || p->has(js::kGetter) ||
            p->has(js::kSetter))
          continue;
        export_value(p->kid(0), p->text, depth + 1);
      }
      break;
    case Kind::Assign: export_value(v->kid(1), name, depth + 1); break;
    default: break;
    }
  }

  void visit_assign(const Node *a) {
    const Node *target = a->kid(0);
    const Node *value = a->kid(1);
    if (is_module_exports(target)) {
      export_value(value, "");
    } else if (auto name = named_export_target(target)) {
      export_value(value, *name);
    }
    if (value && value->kind == Kind::Assign)
      visit_assign(value);
  }

  void visit(const Node *s) {
    if (!s)
      return;
    switch (s->kind) {
    case Kind::ExprStmt: {
      const Node *e = s->kid(0);
      if (e->kind == Kind::Assign)
        visit_assign(e);
      else if (e->kind == Kind::Sequence)
        for (const auto &k : e->kids)
          if (k->kind == Kind::Assign)
            visit_assign(k.get());
      break;
    }
    case Kind::ExportNamed: {
      if (const Node *decl = s->kid(0); decl && decl->kind != Kind::ExportSpec) {
        if (decl->kind == Kind::Function)
          add(decl->text, decl);
        else if (decl->kind == Kind::Class)
          add_class(decl, decl->text);
        else if (decl->kind == Kind::VarDecl)
          for (const auto &d : decl->kids)
            if (d->kid(0)->kind == Kind::Identifier)
              export_value(d->kid(1), d->kid(0)->text);
        break;
      }
      if (!s->text.empty())
        break; // re-export from another module
      for (const auto &spec : s->kids)
        if (auto it = defs_.find(spec->text); it != defs_.end())
          export_value(it->second, spec->alias == "default" ? spec->text : spec->alias);
      break;
    }
    case Kind::ExportDefault: {
      const Node *d = s->kid(0);
      if (d->kind == Kind::Function)
        add(!d->text.empty() ? d->text : stem_, d);
      else
        export_value(d, d->kind == Kind::Identifier ? d->text : "");
      break;
    }
    default: break;
    }
  }

  std::string stem_;
  std::map<std::string, const Node *> defs_;
  std::map<std::string, std::vector<std::pair<std::string, const Node *>>> member_defs_;
  std::vector<ExportEntry> entries_;
};

// ---- doc comments ----

struct JsDoc {
  std::string description;
  std::map<std::string, std::string> params; // name (may be dotted) -> text
};

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

JsDoc parse_jsdoc(const std::string &doc) {
  JsDoc out;
  std::vector<std::string> desc_lines;
  std::string *current = nullptr;
  bool in_tags = false;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    std::size_t nl = doc.find('\n', pos);
    std::string line =
        doc.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? doc.size() + 1 : nl + 1;
    std::string t = trim(line);
    if (!t.empty() && t[0] == '@') {
      in_tags = true;
      current = nullptr;
      std::size_t sp = t.find_first_of(" \t");
      std::string tag = t.substr(0, sp);
      if (tag != "@param" && tag != "@arg" && tag != "@argument")
        continue;
      std::string rest = sp == std::string::npos ? "" : trim(t.substr(sp));
      if (!rest.empty() && rest[0] == '{') {
        int depth = 0;
        std::size_t i = 0;
        for (; i < rest.size(); ++i) {
          if (rest[i] == '{')
            ++depth;
          else if (rest[i] == '}' && --depth == 0)
            break;
        }
        rest = i < rest.size() ? trim(rest.substr(i + 1)) : "";
      }
      std::size_t name_end = rest.find_first_of(" \t");
      std::string name = rest.substr(0, name_end);
      std::string text = name_end == std::string::npos ? "" : trim(rest.substr(name_end));
      if (!name.empty() && name.front() == '[') {
        name = name.substr(1, name.find_first_of("=]") - 1);
      }
      if (!text.empty() && text[0] == '-')
        text = trim(text.substr(1));
      if (name.empty())
        continue;
      current = &out.params[name];
      *current = text;
    } else if (in_tags) {
      if (current && !t.empty())
        *current += (current->empty() ? "" : " ") + t;
    } else {
      desc_lines.push_back(t);
    }
  }
  std::string desc;
  for (const auto &l : desc_lines) {
    if (!desc.empty())
      desc += '\n';
    desc += l;
  }
  out.description = trim(desc);
  return out;
}

std::optional<std::string> combine_doc(const std::string &param_doc, const std::string &fn_doc) {
  if (!param_doc.empty() && !fn_doc.empty())
    return param_doc + "\n" + fn_doc;
  if (!param_doc.empty())
    return param_doc;
  if (!fn_doc.empty())
    return fn_doc;
  return std::nullopt;
}

// ---- parameter property reads ----

const std::set<std::string> kIgnoredProperties = {"length", "constructor", "prototype",
                                                  "__proto__"};

struct PropRead {
  std::string name;
  int line;
  int column;
};

bool declares_name(const Node *fn, const std::string &name);

void collect_pattern_names(const Node *p, std::vector<const Node *> &out) {
  if (!p)
    return;
  switch (p->kind) {
  case Kind::Identifier: out.push_back(p); break;
  case Kind::ObjectPattern:
    for (const auto &k : p->kids)
      collect_pattern_names(k->kind == Kind::Property ? k->kid(0) : k.get(), out);
    break;
  case Kind::ArrayPattern:
    for (const auto &k : p->kids)
      collect_pattern_names(k.get(), out);
    break;
  case Kind::AssignPattern: collect_pattern_names(p->kid(0), out); break;
  case Kind::Rest: collect_pattern_names(p->kid(0), out); break;
  default: break;
  }
}

bool declares_name(const Node *fn, const std::string &name) {
  std::vector<const Node *> ids;
  for (const auto &p : fn->params)
    collect_pattern_names(p.get(), ids);
  return std::any_of(ids.begin(), ids.end(), [&](const Node *n) { return n->text == name; });
}

void add_read(std::vector<PropRead> &out, const std::string &name, int line, int column) {
  if (name.empty() || kIgnoredProperties.contains(name))
    return;
  for (auto &r : out) {
    if (r.name == name) {
      if (std::tie(line, column) < std::tie(r.line, r.column)) {
        r.line = line;
        r.column = column;
      }
      return;
    }
  }
  out.push_back({name, line, column});
}

// Reads of `param.x` (not as a callee or assignment target) and
// `const {x} = param` destructurings.
void collect_property_reads(const Node *n, const std::string &param, std::vector<PropRead> &out,
                            bool callee = false, bool target = false) {
  if (!n)
    return;
  switch (n->kind) {
  case Kind::Function:
    if (declares_name(n, param))
      return;
    break;
  case Kind::Member:
    if (!callee && !target && n->kid(0)->kind == Kind::Identifier && n->kid(0)->text == param &&
        !n->text.empty())
      add_read(out, n->text, n->line, n->column);
    collect_property_reads(n->kid(0), param, out);
    collect_property_reads(n->kid(1), param, out);
    return;
  case Kind::Call:
  case Kind::New:
    collect_property_reads(n->kid(0), param, out, true);
    for (std::size_t i = 1; i < n->kids.size(); ++i)
      collect_property_reads(n->kid(i), param, out);
    return;
  case Kind::Assign:
    collect_property_reads(n->kid(0), param, out, false, true);
    collect_property_reads(n->kid(1), param, out);
    return;
  case Kind::Declarator:
    if (n->kid(0)->kind == Kind::ObjectPattern && n->kid(1) &&
        n->kid(1)->kind == Kind::Identifier && n->kid(1)->text == param) {
      for (const auto &p : n->kid(0)->kids)
        if (p->kind == Kind::Property && !p->text.empty())
          add_read(out, p->text, p->line, p->column);
    }
    break;
  default: break;
  }
  for (const auto &k : n->kids)
    collect_property_reads(k.get(), param, out);
  for (const auto &p : n->params)
    collect_property_reads(p.get(), param, out);
}

struct EntrySources {
  std::vector<SourceDescriptor> sources;
};

std::vector<SourceDescriptor> integrity_sources(const std::vector<ExportEntry> &entries) {
  std::vector<SourceDescriptor> out;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const ExportEntry &entry = entries[e];
    const Node *fn = entry.fn;
    JsDoc doc = parse_jsdoc(fn->doc);
    auto param_doc = [&](const std::string &key) {
      auto it = doc.params.find(key);
      return it == doc.params.end() ? std::string() : it->second;
    };
    auto push = [&](SourceKind kind, const std::string &name, int line, int column,
                    const std::string &pdoc) {
      SourceDescriptor d;
      d.kind = kind;
      d.name = name;
      d.function_name = entry.function_name;
      d.line = line;
      d.column = column;
      d.doc_comment = combine_doc(pdoc, doc.description);
      d.entry = static_cast<int>(e);
      out.push_back(std::move(d));
    };
    for (const auto &param : fn->params) {
      const Node *p = param.get();
      if (p->kind == Kind::AssignPattern)
        p = p->kid(0);
      if (p->kind == Kind::Rest)
        p = p->kid(0);
      if (p->kind == Kind::Identifier) {
        push(SourceKind::ApiParam, p->text, p->line, p->column, param_doc(p->text));
        std::vector<PropRead> reads;
        collect_property_reads(fn->kid(0), p->text, reads);
        std::sort(reads.begin(), reads.end(), [](const PropRead &a, const PropRead &b) {
          return std::tie(a.line, a.column, a.name) < std::tie(b.line, b.column, b.name);
        });
        for (const auto &r : reads) {
          std::string pd = param_doc(p->text + "." + r.name);
          push(SourceKind::ParamProperty, r.name, r.line, r.column, pd);
        }
      } else if (p->kind == Kind::ObjectPattern) {
        for (const auto &prop : p->kids) {
          if (prop->kind == Kind::Property && !prop->text.empty()) {
            std::string pd = param_doc(prop->text);
            for (const auto &[k, v] : doc.params) {
              auto dot = k.find('.');
              if (pd.empty() && dot != std::string::npos && k.substr(dot + 1) == prop->text)
                pd = v;
            }
            push(SourceKind::ParamProperty, prop->text, prop->line, prop->column, pd);
          } else if (prop->kind == Kind::Rest && prop->kid(0)->kind == Kind::Identifier) {
            const Node *id = prop->kid(0);
            push(SourceKind::ApiParam, id->text, id->line, id->column, param_doc(id->text));
          }
        }
      } else if (p->kind == Kind::ArrayPattern) {
        std::vector<const Node *> ids;
        collect_pattern_names(p, ids);
        for (const Node *id : ids)
          push(SourceKind::ApiParam, id->text, id->line, id->column, param_doc(id->text));
      }
    }
  }
  return out;
}

// ===========================================================================
// Abstract interpreter
// ===========================================================================

struct SinkHit {
  SinkType type;
  int line;
};

class Interpreter {
public:
  Interpreter(const Node &program, QueryFamily family, const TaintConfig &config,
              std::vector<ExportEntry> entries)
      : program_(program), family_(family), config_(config), entries_(std::move(entries)) {
    for (const auto &s : config_.sinks) {
      bool wanted = family_ == QueryFamily::Integrity ? is_integrity_sink(s.sink_type)
                                                      : s.sink_type == SinkType::Logging;
      if (wanted)
        sinks_.push_back(&s);
    }
  }

  /// Integrity: seed parameter values from `sources`.
  void run(const std::vector<SourceDescriptor> &sources) {
    module_ = new_frame(nullptr, false);
    hoist(program_.kids, module_);
    for (int round = 0; round < 8; ++round) {
      std::uint64_t saved = begin_changes();
      exec_list(program_.kids, module_);
      if (family_ == QueryFamily::Integrity)
        run_entries(sources);
      else
        run_all_functions();
      std::uint64_t changed = end_changes(saved);
      if (changed > module_->id)
        break;
    }
  }

  const std::map<int, std::map<SinkType, int>> &hits() const { return hits_; }
  const std::vector<SourceDescriptor> &dynamic_sources() const { return dynamic_sources_; }
  bool budget_exceeded() const { return budget_exceeded_; }

private:
  // ---- change tracking ----
  // Loops iterate until no cell owned by an enclosing (older) frame grows.
  std::uint64_t begin_changes() {
    std::uint64_t saved = min_changed_;
    min_changed_ = UINT64_MAX;
    return saved;
  }
  std::uint64_t end_changes(std::uint64_t saved) {
    std::uint64_t mine = min_changed_;
    min_changed_ = std::min(saved, mine);
    return mine;
  }
  void note_change(std::uint64_t owner) { min_changed_ = std::min(min_changed_, owner); }

  std::shared_ptr<Frame> new_frame(std::shared_ptr<Frame> parent, bool is_function) {
    auto f = std::make_shared<Frame>();
    f->id = ++frame_counter_;
    f->parent = std::move(parent);
    f->is_function = is_function;
    return f;
  }

  // Nonzero while evaluating code that may not run (branches, loop bodies,
  // right operands of short-circuit operators). Plain assignments outside
  // such code replace a local's value instead of merging into it.
  int branch_depth_ = 0;

  struct Branch {
    int &depth;
    bool active;
    explicit Branch(int &d, bool on = true) : depth(d), active(on) {
      if (active)
        ++depth;
    }
    ~Branch() {
      if (active)
        --depth;
    }
  };

  void store(Cell &cell, const AbsVal &v) {
    if (cell.value.merge(v))
      note_change(cell.owner);
  }

  std::shared_ptr<Cell> declare(Frame &frame, const std::string &name) {
    auto &slot = frame.vars[name];
    if (!slot) {
      slot = std::make_shared<Cell>();
      slot->owner = frame.id;
    }
    return slot;
  }

  std::shared_ptr<Cell> lookup(const std::shared_ptr<Frame> &frame, const std::string &name) {
    for (Frame *f = frame.get(); f; f = f->parent.get())
      if (auto it = f->vars.find(name); it != f->vars.end())
        return it->second;
    return nullptr;
  }

  Frame &function_frame(const std::shared_ptr<Frame> &frame) {
    Frame *f = frame.get();
    while (f->parent && !f->is_function)
      f = f->parent.get();
    return *f;
  }

  // ---- hoisting ----
  void hoist(const std::vector<js::NodePtr> &body, const std::shared_ptr<Frame> &frame) {
    for (const auto &s : body)
      hoist_stmt(s.get(), frame);
  }

  void hoist_stmt(const Node *s, const std::shared_ptr<Frame> &frame) {
    if (!s)
      return;
    switch (s->kind) {
    case Kind::Function:
      if (s->has(js::kDeclaration) && !s->text.empty()) {
        AbsVal v;
        v.self.fns.push_back({s, frame, nullptr});
        closure_env_[s] = frame;
        store(*declare(*frame, s->text), v);
      }
      return;
    case Kind::VarDecl:
      for (const auto &d : s->kids) {
        std::vector<const Node *> ids;
        collect_pattern_names(d->kid(0), ids);
        for (const Node *id : ids)
          declare(*frame, id->text);
      }
      return;
    case Kind::Class:
      if (!s->text.empty())
        declare(*frame, s->text);
      return;
    case Kind::ExportNamed:
    case Kind::ExportDefault: hoist_stmt(s->kid(0), frame); return;
    case Kind::Block:
    case Kind::Labeled:
    case Kind::Case:
      for (const auto &k : s->kids)
        hoist_stmt(k.get(), frame);
      return;
    case Kind::If:
      hoist_stmt(s->kid(1), frame);
      hoist_stmt(s->kid(2), frame);
      return;
    case Kind::For:
    case Kind::ForIn:
    case Kind::ForOf:
      hoist_stmt(s->kid(0), frame);
      hoist_stmt(s->kids.back().get(), frame);
      return;
    case Kind::While: hoist_stmt(s->kid(1), frame); return;
    case Kind::DoWhile: hoist_stmt(s->kid(0), frame); return;
    case Kind::Try:
      for (const auto &k : s->kids)
        hoist_stmt(k.get(), frame);
      return;
    case Kind::Switch:
      for (std::size_t i = 1; i < s->kids.size(); ++i)
        hoist_stmt(s->kid(i), frame);
      return;
    default: return;
    }
  }

  // ---- entries ----
  void run_entries(const std::vector<SourceDescriptor> &sources) {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const ExportEntry &entry = entries_[e];
      std::vector<const SourceDescriptor *> mine;
      std::vector<int> ids;
      for (std::size_t i = 0; i < sources.size(); ++i)
        if (sources[i].entry == static_cast<int>(e)) {
          mine.push_back(&sources[i]);
          ids.push_back(static_cast<int>(i));
        }
      std::vector<AbsVal> args;
      for (const auto &param : entry.fn->params)
        args.push_back(seed_param(param.get(), mine, ids));
      Closure c{entry.fn, module_, entry.class_node ? class_cell(entry.class_node) : nullptr};
      invoke(c, args, nullptr, /*entry=*/true);
    }
  }

  AbsVal seed_param(const Node *p, const std::vector<const SourceDescriptor *> &mine,
                    const std::vector<int> &ids) {
    if (p->kind == Kind::AssignPattern || p->kind == Kind::Rest)
      p = p->kid(0);
    AbsVal v;
    auto label_of = [&](SourceKind kind, const Node *at) -> int {
      for (std::size_t i = 0; i < mine.size(); ++i)
        if (mine[i]->kind == kind && mine[i]->line == at->line && mine[i]->column == at->column)
          return ids[i];
      return -1;
    };
    if (p->kind == Kind::Identifier) {
      for (std::size_t i = 0; i < mine.size(); ++i) {
        const SourceDescriptor &d = *mine[i];
        if (d.kind == SourceKind::ApiParam && d.line == p->line && d.column == p->column)
          v.self.labels = {ids[i]};
      }
      // Property sources belong to the identifier parameter that owns them;
      // they follow it in source order until the next ApiParam.
      bool inside = false;
      for (std::size_t i = 0; i < mine.size(); ++i) {
        const SourceDescriptor &d = *mine[i];
        if (d.kind == SourceKind::ApiParam)
          inside = d.line == p->line && d.column == p->column && d.name == p->text;
        else if (inside && d.kind == SourceKind::ParamProperty)
          v.props[d.name].labels = {ids[i]};
      }
    } else if (p->kind == Kind::ObjectPattern) {
      for (const auto &prop : p->kids) {
        if (prop->kind == Kind::Property && !prop->text.empty()) {
          int l = label_of(SourceKind::ParamProperty, prop.get());
          if (l >= 0)
            v.props[prop->text].labels = {l};
        } else if (prop->kind == Kind::Rest) {
          int l = label_of(SourceKind::ApiParam, prop->kid(0));
          if (l >= 0)
            v.props[kRestKey].labels = {l};
        }
      }
    } else if (p->kind == Kind::ArrayPattern) {
      std::vector<const Node *> idents;
      collect_pattern_names(p, idents);
      for (const Node *id : idents) {
        int l = label_of(SourceKind::ApiParam, id);
        if (l >= 0)
          merge_labels(v.self.labels, {l});
      }
    }
    return v;
  }

  void collect_functions(const Node *n, std::vector<const Node *> &out) {
    if (!n)
      return;
    if (n->kind == Kind::Function)
      out.push_back(n);
    for (const auto &k : n->kids)
      collect_functions(k.get(), out);
    for (const auto &p : n->params)
      collect_functions(p.get(), out);
  }

  // Confidentiality: every function body is an entry with opaque arguments.
  void run_all_functions() {
    if (all_functions_.empty())
      for (const auto &s : program_.kids)
        collect_functions(s.get(), all_functions_);
    for (const Node *fn : all_functions_) {
      std::vector<AbsVal> args(fn->params.size());
      Closure c{fn, module_, nullptr};
      if (auto it = closure_env_.find(fn); it != closure_env_.end())
        if (auto env = it->second.lock())
          c.env = env;
      invoke(c, args, nullptr, true);
    }
  }

  std::shared_ptr<Cell> class_cell(const Node *cls) {
    auto &cell = class_cells_[cls];
    if (!cell) {
      cell = std::make_shared<Cell>();
      cell->owner = 0;
    }
    return cell;
  }

  // ---- invocation ----
  AbsVal invoke(const Closure &c, const std::vector<AbsVal> &args,
                std::shared_ptr<Cell> this_cell, bool entry = false) {
    const Node *fn = c.fn;
    if (std::find(active_.begin(), active_.end(), fn) != active_.end() || active_.size() > 24 ||
        invocations_ >= config_.invocation_budget) {
      if (invocations_ >= config_.invocation_budget)
        budget_exceeded_ = true;
      return opaque_result(args, nullptr);
    }
    ++invocations_;
    active_.push_back(fn);
    int saved_depth = std::exchange(branch_depth_, 0);
    auto frame = new_frame(c.env, true);
    if (!fn->has(js::kArrow)) {
      std::shared_ptr<Cell> th = c.bound_this ? c.bound_this : this_cell;
      if (!th) {
        th = std::make_shared<Cell>();
        th->owner = frame->id;
      }
      frame->vars["this"] = th;
      AbsVal all;
      for (const auto &a : args)
        all.self.merge(a.flat());
      store(*declare(*frame, "arguments"), all);
    }
    for (std::size_t i = 0; i < fn->params.size(); ++i) {
      const Node *p = fn->params[i].get();
      if (p->kind == Kind::Rest) {
        AbsVal rest;
        for (std::size_t j = i; j < args.size(); ++j)
          rest.self.merge(args[j].flat());
        bind_pattern(p->kid(0), rest, frame, true);
      } else {
        AbsVal v = i < args.size() ? args[i] : AbsVal{};
        bind_pattern(p, v, frame, true);
      }
    }
    const Node *body = fn->kid(0);
    if (fn->has(js::kExpressionBody)) {
      frame->ret.merge(eval(body, frame));
    } else {
      hoist(body->kids, frame);
      exec_list(body->kids, frame);
    }
    active_.pop_back();
    branch_depth_ = saved_depth;
    (void)entry;
    return frame->ret;
  }

  // A call into code we cannot see: the result and any callbacks observe the
  // taint of every argument and the receiver.
  AbsVal opaque_result(const std::vector<AbsVal> &args, const AbsVal *receiver) {
    Slot s;
    for (const auto &a : args)
      merge_labels(s.labels, a.all_labels());
    if (receiver)
      merge_labels(s.labels, receiver->all_labels());
    return AbsVal::of(std::move(s));
  }

  // ---- patterns ----
  void bind_pattern(const Node *p, const AbsVal &v, const std::shared_ptr<Frame> &frame,
                    bool declaration) {
    if (!p)
      return;
    switch (p->kind) {
    case Kind::Identifier: {
      std::shared_ptr<Cell> cell;
      if (declaration) {
        cell = declare(function_frame(frame), p->text);
      } else {
        cell = lookup(frame, p->text);
        if (!cell)
          cell = declare(*module_, p->text);
      }
      if (!declaration && branch_depth_ == 0 && cell->owner == function_frame(frame).id) {
        AbsVal old = cell->value, next = v;
        if (old.merge(v) || next.merge(cell->value)) {
          cell->value = v;
          note_change(cell->owner);
        }
        return;
      }
      store(*cell, v);
      return;
    }
    case Kind::Member: assign_member(p, v, frame); return;
    case Kind::ObjectPattern: {
      for (const auto &k : p->kids) {
        if (k->kind == Kind::Rest) {
          AbsVal rest = v;
          for (const auto &named : p->kids)
            if (named->kind == Kind::Property && !named->has(js::kComputed))
              rest.props.erase(named->text);
          rest.self.paths.clear();
          if (auto it = rest.props.find(kRestKey); it != rest.props.end()) {
            merge_labels(rest.self.labels, it->second.labels);
            rest.props.erase(it);
          }
          bind_pattern(k->kid(0), rest, frame, declaration);
          continue;
        }
        AbsVal part;
        if (k->has(js::kComputed)) {
          part = AbsVal::of(v.flat());
          merge_labels(part.self.labels, eval(k->kid(1), frame).all_labels());
        } else {
          part = AbsVal::of(member_slot(v, k->text));
        }
        bind_pattern(k->kid(0), part, frame, declaration);
      }
      return;
    }
    case Kind::ArrayPattern: {
      AbsVal element = AbsVal::of(v.flat());
      for (const auto &k : p->kids)
        if (k->kind != Kind::Elision)
          bind_pattern(k->kind == Kind::Rest ? k->kid(0) : k.get(), element, frame, declaration);
      return;
    }
    case Kind::AssignPattern: {
      AbsVal merged = v;
      merged.merge(eval(p->kid(1), frame));
      bind_pattern(p->kid(0), merged, frame, declaration);
      return;
    }
    case Kind::VarDecl:
      for (const auto &d : p->kids)
        bind_pattern(d->kid(0), v, frame, true);
      return;
    default: return;
    }
  }

  Slot member_slot(const AbsVal &obj, const std::string &prop) {
    Slot s;
    s.labels = obj.self.labels;
    if (auto it = obj.props.find(prop); it != obj.props.end()) {
      merge_labels(s.labels, it->second.labels);
      s.fns = it->second.fns;
      s.classes = it->second.classes;
      s.paths = it->second.paths;
    }
    for (const auto &p : obj.self.paths)
      if (s.paths.size() < kMaxPaths)
        s.paths.push_back(p + "." + prop);
    return s;
  }

  // Storage written by `base.prop = v`: the cell of the root binding (or the
  // this-object); deeper paths collapse onto the first property.
  struct Target {
    std::shared_ptr<Cell> cell;
    std::string prop; // empty = the whole value (computed keys)
  };

  std::optional<Target> member_target(const Node *m, const std::shared_ptr<Frame> &frame) {
    const Node *obj = m->kid(0);
    std::string prop = m->has(js::kComputed) && m->kid(1)->kind != Kind::String ? "" : m->text;
    if (obj->kind == Kind::Identifier) {
      auto cell = lookup(frame, obj->text);
      if (!cell)
        cell = declare(*module_, obj->text);
      return Target{cell, prop};
    }
    if (obj->kind == Kind::This) {
      auto cell = lookup(frame, "this");
      if (!cell)
        return std::nullopt;
      return Target{cell, prop};
    }
    if (obj->kind == Kind::Member) {
      auto inner = member_target(obj, frame);
      if (!inner)
        return std::nullopt;
      return inner;
    }
    return std::nullopt;
  }

  void assign_member(const Node *m, const AbsVal &v, const std::shared_ptr<Frame> &frame) {
    eval_member_key(m, frame);
    auto t = member_target(m, frame);
    if (!t)
      return;
    AbsVal update;
    if (t->prop.empty())
      update.self = v.flat();
    else
      update.props[t->prop] = v.flat();
    store(*t->cell, update);
  }

  void eval_member_key(const Node *m, const std::shared_ptr<Frame> &frame) {
    if (m->has(js::kComputed))
      eval(m->kid(1), frame);
  }

  // ---- statements ----
  void exec_list(const std::vector<js::NodePtr> &stmts, const std::shared_ptr<Frame> &frame) {
    for (const auto &s : stmts)
      exec(s.get(), frame);
  }

  void loop(const std::shared_ptr<Frame> &frame, const std::function<void()> &body) {
    Frame &owner = function_frame(frame);
    std::uint64_t overall = UINT64_MAX;
    std::uint64_t saved = begin_changes();
    Branch guard(branch_depth_);
    for (int i = 0; i < 32; ++i) {
      min_changed_ = UINT64_MAX;
      body();
      std::uint64_t changed = min_changed_;
      overall = std::min(overall, changed);
      if (changed > owner.id)
        break;
    }
    min_changed_ = overall;
    end_changes(saved);
  }

  void exec(const Node *s, const std::shared_ptr<Frame> &frame) {
    if (!s)
      return;
    switch (s->kind) {
    case Kind::VarDecl:
      for (const auto &d : s->kids) {
        AbsVal v = d->kid(1) ? eval(d->kid(1), frame) : AbsVal{};
        bind_pattern(d->kid(0), v, frame, true);
      }
      return;
    case Kind::Function: {
      if (s->has(js::kDeclaration) && !s->text.empty()) {
        AbsVal v;
        v.self.fns.push_back({s, frame, nullptr});
        closure_env_[s] = frame;
        store(*declare(function_frame(frame), s->text), v);
      }
      return;
    }
    case Kind::Class: {
      AbsVal v = eval_class(s, frame);
      if (!s->text.empty())
        store(*declare(function_frame(frame), s->text), v);
      return;
    }
    case Kind::ExprStmt: eval(s->kid(0), frame); return;
    case Kind::Block:
    case Kind::Labeled: exec_list(s->kids, frame); return;
    case Kind::If: {
      eval(s->kid(0), frame);
      Branch guard(branch_depth_);
      exec(s->kid(1), frame);
      exec(s->kid(2), frame);
      return;
    }
    case Kind::For:
      if (s->kid(0)) {
        if (s->kid(0)->kind == Kind::VarDecl)
          exec(s->kid(0), frame);
        else
          eval(s->kid(0), frame);
      }
      loop(frame, [&] {
        eval(s->kid(1), frame);
        exec(s->kid(3), frame);
        eval(s->kid(2), frame);
      });
      return;
    case Kind::ForIn:
    case Kind::ForOf: {
      loop(frame, [&] {
        AbsVal coll = eval(s->kid(1), frame);
        AbsVal element = AbsVal::of(coll.flat());
        const Node *left = s->kid(0);
        if (left->kind == Kind::VarDecl)
          bind_pattern(left, element, frame, true);
        else
          bind_pattern(left, element, frame, false);
        exec(s->kid(2), frame);
      });
      return;
    }
    case Kind::While:
      loop(frame, [&] {
        eval(s->kid(0), frame);
        exec(s->kid(1), frame);
      });
      return;
    case Kind::DoWhile:
      loop(frame, [&] {
        exec(s->kid(0), frame);
        eval(s->kid(1), frame);
      });
      return;
    case Kind::Return:
      if (s->kid(0)) {
        AbsVal v = eval(s->kid(0), frame);
        function_frame(frame).ret.merge(v);
      }
      return;
    case Kind::Throw: eval(s->kid(0), frame); return;
    case Kind::Try: {
      Branch guard(branch_depth_);
      exec(s->kid(0), frame);
      if (s->kid(1))
        bind_pattern(s->kid(1), AbsVal{}, frame, true);
      exec(s->kid(2), frame);
      exec(s->kid(3), frame);
      return;
    }
    case Kind::Switch: {
      eval(s->kid(0), frame);
      Branch guard(branch_depth_);
      for (std::size_t i = 1; i < s->kids.size(); ++i) {
        const Node *c = s->kid(i);
        eval(c->kid(0), frame);
        for (std::size_t j = 1; j < c->kids.size(); ++j)
          exec(c->kid(j), frame);
      }
      return;
    }
    case Kind::Import: {
      std::string module = module_name(s->text);
      for (const auto &spec : s->kids) {
        AbsVal v;
        if (spec->text == "*" || spec->text == "default")
          v.self.paths.push_back(module);
        else
          v.self.paths.push_back(module + "." + spec->text);
        store(*declare(function_frame(frame), spec->alias), v);
      }
      return;
    }
    case Kind::ExportNamed:
      if (s->kid(0) && s->kid(0)->kind != Kind::ExportSpec)
        exec(s->kid(0), frame);
      return;
    case Kind::ExportDefault: {
      const Node *d = s->kid(0);
      if (d->kind == Kind::Function && d->has(js::kDeclaration)) {
        exec(d, frame);
      } else if (d->kind == Kind::Class && d->has(js::kDeclaration)) {
        exec(d, frame);
      } else {
        eval(d, frame);
      }
      return;
    }
    default: return;
    }
  }

  static std::string module_name(std::string name) {
    if (name.rfind("node:", 0) == 0)
      name = name.substr(5);
    return name;
  }

  AbsVal eval_class(const Node *cls, const std::shared_ptr<Frame> &frame) {
    auto instance = class_cell(cls);
    AbsVal cls_val;
    cls_val.self.classes.push_back(cls);
    if (cls->kid(0))
      eval(cls->kid(0), frame);
    AbsVal methods;
    for (std::size_t i = 1; i < cls->kids.size(); ++i) {
      const Node *m = cls->kid(i);
      if (!m)
        continue;
      if (m->has(js::kComputed))
        eval(m->kid(1), frame);
      if (m->has(js::kMethod)) {
        Closure c{m->kid(0), frame, instance};
        closure_env_[m->kid(0)] = frame;
        if (m->text == "constructor") {
          cls_val.self.fns.push_back(c);
        } else if (!m->text.empty()) {
          methods.props[m->text].fns.push_back(c);
        }
      } else if (m->has(js::kField) && m->kid(0)) {
        AbsVal v = eval(m->kid(0), frame);
        if (!m->text.empty()) {
          AbsVal update;
          update.props[m->text] = v.flat();
          store(*instance, update);
        }
      }
    }
    store(*instance, methods);
    cls_val.merge(methods);
    return cls_val;
  }

  // ---- expressions ----
  bool labeling() const { return family_ == QueryFamily::Confidentiality; }

  int occurrence_label(const std::string &name, int line, int column) {
    auto key = std::make_tuple(line, column, name);
    if (auto it = occurrence_ids_.find(key); it != occurrence_ids_.end())
      return it->second;
    int id = static_cast<int>(dynamic_sources_.size());
    SourceDescriptor d;
    d.kind = SourceKind::LoggedVar;
    d.name = name;
    d.line = line;
    d.column = column;
    dynamic_sources_.push_back(d);
    occurrence_ids_.emplace(key, id);
    return id;
  }

  static bool is_plain_data(const AbsVal &v) {
    return v.self.fns.empty() && v.self.classes.empty();
  }

  // `label_read` is false for callees and member bases.
  AbsVal eval(const Node *n, const std::shared_ptr<Frame> &frame, bool label_read = true) {
    if (!n)
      return {};
    switch (n->kind) {
    case Kind::Identifier: {
      if (n->text == "undefined")
        return {};
      auto cell = lookup(frame, n->text);
      if (!cell) {
        AbsVal g;
        g.self.paths.push_back(n->text);
        return g;
      }
      AbsVal v = cell->value;
      if (labeling() && label_read && is_plain_data(v))
        merge_labels(v.self.labels, {occurrence_label(n->text, n->line, n->column)});
      return v;
    }
    case Kind::This: {
      auto cell = lookup(frame, "this");
      return cell ? cell->value : AbsVal{};
    }
    case Kind::Literal:
    case Kind::String:
    case Kind::Regex:
    case Kind::Super:
    case Kind::Elision: return {};
    case Kind::Template: {
      Slot s;
      for (const auto &k : n->kids)
        merge_labels(s.labels, eval(k.get(), frame).all_labels());
      return AbsVal::of(std::move(s));
    }
    case Kind::TaggedTemplate: {
      AbsVal tag = eval(n->kid(0), frame, false);
      std::vector<AbsVal> args{eval(n->kid(1), frame)};
      return call_value(n, tag, nullptr, args, frame, {});
    }
    case Kind::Array: {
      AbsVal v;
      for (const auto &k : n->kids) {
        const Node *el = k->kind == Kind::Spread ? k->kid(0) : k.get();
        v.self.merge(eval(el, frame).flat());
      }
      v.self.paths.clear();
      return v;
    }
    case Kind::Object: return eval_object(n, frame);
    case Kind::Function: {
      AbsVal v;
      v.self.fns.push_back({n, frame, nullptr});
      closure_env_[n] = frame;
      return v;
    }
    case Kind::Class: return eval_class(n, frame);
    case Kind::Unary: {
      AbsVal operand = eval(n->kid(0), frame);
      if (n->text == "typeof" || n->text == "!" || n->text == "delete" || n->text == "void")
        return {};
      return AbsVal::of(Slot{operand.all_labels(), {}, {}, {}});
    }
    case Kind::Update: {
      AbsVal v = eval(n->kid(0), frame);
      return AbsVal::of(Slot{v.all_labels(), {}, {}, {}});
    }
    case Kind::Binary: {
      AbsVal l = eval(n->kid(0), frame);
      AbsVal r;
      {
        Branch guard(branch_depth_, n->text == "&&" || n->text == "||" || n->text == "??");
        r = eval(n->kid(1), frame);
      }
      static const std::set<std::string> kBoolean = {"==", "!=", "===", "!==", "<", ">",
                                                     "<=", ">=", "instanceof", "in"};
      if (kBoolean.contains(n->text))
        return {};
      if (n->text == "&&" || n->text == "||" || n->text == "??") {
        l.merge(r);
        return l;
      }
      Slot s;
      s.labels = l.all_labels();
      merge_labels(s.labels, r.all_labels());
      return AbsVal::of(std::move(s));
    }
    case Kind::Assign: {
      AbsVal v = eval(n->kid(1), frame);
      const Node *target = n->kid(0);
      if (n->text != "=") {
        AbsVal old = eval(target, frame, false);
        AbsVal combined;
        combined.self.labels = old.all_labels();
        merge_labels(combined.self.labels, v.all_labels());
        if (n->text == "&&=" || n->text == "||=" || n->text == "?\?=")
          combined.merge(v);
        v = combined;
      }
      bind_pattern(target, v, frame, false);
      return v;
    }
    case Kind::Conditional: {
      eval(n->kid(0), frame);
      Branch guard(branch_depth_);
      AbsVal a = eval(n->kid(1), frame);
      a.merge(eval(n->kid(2), frame));
      return a;
    }
    case Kind::Sequence: {
      AbsVal last;
      for (const auto &k : n->kids)
        last = eval(k.get(), frame);
      return last;
    }
    case Kind::Spread:
    case Kind::Await:
    case Kind::Yield: return n->kid(0) ? eval(n->kid(0), frame) : AbsVal{};
    case Kind::Member: return eval_member(n, frame, label_read);
    case Kind::Call:
    case Kind::New: return eval_call(n, frame);
    default: {
      // Out-of-subset expressions: tainted if any subexpression is.
      Slot s;
      for (const auto &k : n->kids)
        merge_labels(s.labels, eval(k.get(), frame).all_labels());
      return AbsVal::of(std::move(s));
    }
    }
  }

  AbsVal eval_object(const Node *n, const std::shared_ptr<Frame> &frame) {
    AbsVal v;
    for (const auto &k : n->kids) {
      if (k->kind == Kind::Spread) {
        AbsVal other = eval(k->kid(0), frame);
        other.self.paths.clear();
        v.merge(other);
        continue;
      }
      AbsVal value;
      if (k->has(js::kMethod) || k->has(js::kGetter) || k->has(js::kSetter)) {
        value.self.fns.push_back({k->kid(0), frame, nullptr});
        closure_env_[k->kid(0)] = frame;
      } else {
        value = eval(k->kid(0), frame);
      }
      if (k->has(js::kComputed)) {
        AbsVal key = eval(k->kid(1), frame);
        v.self.merge(value.flat());
        merge_labels(v.self.labels, key.all_labels());
      } else {
        v.props[k->text].merge(value.flat());
      }
    }
    v.self.paths.clear();
    return v;
  }

  AbsVal eval_member(const Node *n, const std::shared_ptr<Frame> &frame, bool label_read) {
    AbsVal obj = eval(n->kid(0), frame, false);
    // The base of a member read is itself a data read unless it is a module
    // alias or global; label it in confidentiality mode only for bare
    // identifiers via the outermost-property rule below.
    if (n->has(js::kComputed) && n->kid(1)->kind != Kind::String) {
      AbsVal key = eval(n->kid(1), frame);
      Slot s = obj.flat();
      s.paths.clear();
      merge_labels(s.labels, key.all_labels());
      return AbsVal::of(std::move(s));
    }
    Slot s = member_slot(obj, n->text);
    if (labeling() && label_read && s.fns.empty() && s.classes.empty())
      merge_labels(s.labels, {occurrence_label(n->text, n->line, n->column)});
    return AbsVal::of(std::move(s));
  }

  // Static callee paths from syntax: `a.b.c`, with call results transparent.
  static void syntactic_path(const Node *n, std::string &out, bool &ok) {
    switch (n->kind) {
    case Kind::Identifier: out = n->text; return;
    case Kind::This: out = "this"; return;
    case Kind::Call: syntactic_path(n->kid(0), out, ok); return;
    case Kind::Member:
      if (n->text.empty()) {
        ok = false;
        return;
      }
      syntactic_path(n->kid(0), out, ok);
      out += "." + n->text;
      return;
    default: ok = false; return;
    }
  }

  std::vector<std::string> callee_paths(const Node *callee, const AbsVal &value) {
    std::vector<std::string> paths = value.self.paths;
    std::string p;
    bool ok = true;
    syntactic_path(callee, p, ok);
    if (ok && std::find(paths.begin(), paths.end(), p) == paths.end())
      paths.push_back(p);
    return paths;
  }

  bool matches_any(const std::vector<std::string> &paths, const std::string &pattern) const {
    return std::any_of(paths.begin(), paths.end(),
                       [&](const std::string &p) { return callee_matches(pattern, p); });
  }

  AbsVal eval_call(const Node *n, const std::shared_ptr<Frame> &frame) {
    const Node *callee = n->kid(0);
    // require('m')
    if (n->kind == Kind::Call && callee->kind == Kind::Identifier && callee->text == "require" &&
        !lookup(frame, "require") && n->kids.size() >= 2 && n->kid(1)->kind == Kind::String) {
      AbsVal v;
      v.self.paths.push_back(module_name(n->kid(1)->text));
      return v;
    }
    AbsVal receiver;
    bool has_receiver = false;
    std::shared_ptr<Cell> receiver_cell;
    AbsVal fn_value;
    if (callee->kind == Kind::Member) {
      receiver = eval(callee->kid(0), frame);
      has_receiver = true;
      if (callee->has(js::kComputed) && callee->kid(1)->kind != Kind::String) {
        AbsVal key = eval(callee->kid(1), frame);
        fn_value = AbsVal::of(receiver.flat());
        fn_value.self.paths.clear();
        merge_labels(fn_value.self.labels, key.all_labels());
      } else {
        fn_value = AbsVal::of(member_slot(receiver, callee->text));
      }
      const Node *base = callee->kid(0);
      if (base->kind == Kind::Identifier)
        receiver_cell = lookup(frame, base->text);
      else if (base->kind == Kind::This)
        receiver_cell = lookup(frame, "this");
    } else {
      fn_value = eval(callee, frame, false);
    }
    std::vector<AbsVal> args;
    std::vector<bool> spread;
    for (std::size_t i = 1; i < n->kids.size(); ++i) {
      const Node *a = n->kid(i);
      spread.push_back(a->kind == Kind::Spread);
      args.push_back(eval(a->kind == Kind::Spread ? a->kid(0) : a, frame));
    }
    std::vector<std::string> paths = callee_paths(callee, fn_value);
    check_sinks(n, paths, args, spread);

    // Function.prototype.call / apply / bind on a known function.
    if (callee->kind == Kind::Member && !callee->has(js::kComputed) && has_receiver &&
        !receiver.self.fns.empty() &&
        (callee->text == "call" || callee->text == "apply" || callee->text == "bind")) {
      if (callee->text == "bind")
        return AbsVal::of(Slot{{}, receiver.self.fns, {}, {}});
      std::vector<AbsVal> shifted;
      if (callee->text == "call") {
        shifted.assign(args.begin() + std::min<std::size_t>(1, args.size()), args.end());
      } else if (args.size() > 1) {
        AbsVal all = AbsVal::of(args[1].flat());
        shifted.assign(8, all);
      }
      AbsVal result;
      for (const auto &c : receiver.self.fns)
        result.merge(invoke(c, shifted, nullptr));
      return result;
    }
    AbsVal result = call_value(n, fn_value, has_receiver ? &receiver : nullptr, args, frame,
                               receiver_cell);
    for (const auto &s : config_.sanitizers)
      if (matches_any(paths, s))
        return {};
    // util.promisify(f) keeps f's callee identity.
    if (matches_any(paths, "util.promisify") && !args.empty())
      result.self.merge(Slot{{}, args[0].self.fns, {}, args[0].self.paths});
    return result;
  }

  AbsVal call_value(const Node *n, const AbsVal &fn_value, const AbsVal *receiver,
                    const std::vector<AbsVal> &args, const std::shared_ptr<Frame> &frame,
                    std::shared_ptr<Cell> receiver_cell) {
    (void)frame;
    AbsVal result;
    bool known = false;
    if (n->kind == Kind::New) {
      for (const Node *cls : fn_value.self.classes) {
        known = true;
        auto instance = class_cell(cls);
        for (const auto &c : fn_value.self.fns)
          if (c.bound_this == instance)
            invoke(c, args, instance);
        result.merge(instance->value);
      }
      for (const auto &c : fn_value.self.fns) {
        if (c.bound_this)
          continue;
        known = true;
        auto fresh = std::make_shared<Cell>();
        fresh->owner = UINT64_MAX;
        invoke(c, args, fresh);
        result.merge(fresh->value);
      }
    } else {
      for (const auto &c : fn_value.self.fns) {
        known = true;
        result.merge(invoke(c, args, receiver_cell));
      }
    }
    if (known)
      return result;
    // Library call: conservative result; callbacks receive everything else.
    AbsVal opaque = opaque_result(args, receiver);
    AbsVal cb_arg = opaque;
    for (const auto &a : args)
      for (const auto &c : a.self.fns) {
        std::vector<AbsVal> cb_args(std::max<std::size_t>(c.fn->params.size(), 1), cb_arg);
        opaque.merge(AbsVal::of(Slot{invoke(c, cb_args, nullptr).all_labels(), {}, {}, {}}));
      }
    return opaque;
  }

  void check_sinks(const Node *call, const std::vector<std::string> &paths,
                   const std::vector<AbsVal> &args, const std::vector<bool> &spread) {
    if (paths.empty())
      return;
    for (const SinkSpec *s : sinks_) {
      if (!matches_any(paths, s->callee_pattern))
        continue;
      Labels reaching;
      for (std::size_t i = 0; i < args.size(); ++i) {
        bool position = s->tainted_arg_positions.empty();
        for (int p : s->tainted_arg_positions)
          if (static_cast<std::size_t>(p) == i || (spread[i] && static_cast<std::size_t>(p) >= i))
            position = true;
        if (position)
          merge_labels(reaching, args[i].all_labels());
      }
      for (int label : reaching) {
        auto &per_type = hits_[label];
        auto it = per_type.find(s->sink_type);
        if (it == per_type.end() || call->line < it->second)
          per_type[s->sink_type] = call->line;
      }
    }
  }

  const Node &program_;
  QueryFamily family_;
  const TaintConfig &config_;
  std::vector<ExportEntry> entries_;
  std::vector<const SinkSpec *> sinks_;
  std::shared_ptr<Frame> module_;
  std::uint64_t frame_counter_ = 0;
  std::uint64_t min_changed_ = UINT64_MAX;
  std::map<const Node *, std::shared_ptr<Cell>> class_cells_;
  std::map<const Node *, std::weak_ptr<Frame>> closure_env_;
  std::vector<const Node *> active_;
  std::vector<const Node *> all_functions_;
  std::size_t invocations_ = 0;
  bool budget_exceeded_ = false;
  std::map<int, std::map<SinkType, int>> hits_;
  std::map<std::tuple<int, int, std::string>, int> occurrence_ids_;
  std::vector<SourceDescriptor> dynamic_sources_;
};

std::string stem_of(std::string_view file) {
  std::string_view base = file.substr(file.find_last_of('/') + 1);
  auto dot = base.find('.');
  return std::string(dot == std::string_view::npos ? base : base.substr(0, dot));
}

int sink_order(SinkType t) { return static_cast<int>(t); }

} // namespace

// ===========================================================================
// Public operations
// ===========================================================================

std::vector<SourceDescriptor> find_sources(const Node &program, QueryFamily family,
                                           const TaintConfig &config,
                                           std::string_view file_stem) {
  if (family == QueryFamily::Integrity) {
    ExportCollector collector(program, std::string(file_stem));
    return integrity_sources(collector.take());
  }
  Interpreter interp(program, family, config, {});
  interp.run({});
  std::vector<SourceDescriptor> out;
  const auto &dyn = interp.dynamic_sources();
  for (const auto &[label, per_type] : interp.hits())
    if (per_type.contains(SinkType::Logging))
      out.push_back(dyn[static_cast<std::size_t>(label)]);
  std::sort(out.begin(), out.end(), [](const SourceDescriptor &a, const SourceDescriptor &b) {
    return std::tie(a.line, a.column, a.name) < std::tie(b.line, b.column, b.name);
  });
  return out;
}

PropagationResult propagate(const Node &program, const std::vector<SourceDescriptor> &sources,
                            QueryFamily family, const TaintConfig &config,
                            const FileContext &context) {
  PropagationResult result;
  std::vector<ExportEntry> entries;
  if (family == QueryFamily::Integrity) {
    ExportCollector collector(program, stem_of(context.file));
    entries = collector.take();
  }
  Interpreter interp(program, family, config, entries);
  interp.run(sources);
  if (interp.budget_exceeded())
    result.diagnostics.push_back(
        {context.file, 0, 0, "analysis budget exceeded; some calls were treated as opaque"});

  auto make_record = [&](const SourceDescriptor &src, SinkType type, std::optional<int> sink_line) {
    FlowRecord r;
    r.project = context.project;
    r.file = context.file;
    r.line = src.line;
    r.source_kind = src.kind;
    r.source_name = src.name;
    r.function_name = src.function_name;
    r.doc_comment = src.doc_comment;
    r.sink_type = type;
    if (sink_line)
      r.sink_line = *sink_line;
    r.id = compute_flow_id(r);
    return r;
  };

  const auto &hits = interp.hits();
  if (family == QueryFamily::Integrity) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      auto it = hits.find(static_cast<int>(i));
      if (it == hits.end() || it->second.empty()) {
        result.flows.push_back(make_record(sources[i], SinkType::None, std::nullopt));
        continue;
      }
      for (const auto &[type, line] : it->second)
        result.flows.push_back(make_record(sources[i], type, line));
    }
  } else {
    const auto &dyn = interp.dynamic_sources();
    for (const auto &[label, per_type] : hits) {
      const SourceDescriptor &src = dyn[static_cast<std::size_t>(label)];
      bool wanted = std::any_of(sources.begin(), sources.end(), [&](const SourceDescriptor &s) {
        return s.line == src.line && s.column == src.column && s.name == src.name;
      });
      if (!wanted)
        continue;
      if (auto it = per_type.find(SinkType::Logging); it != per_type.end())
        result.flows.push_back(make_record(src, SinkType::Logging, it->second));
    }
  }
  std::stable_sort(result.flows.begin(), result.flows.end(),
                   [](const FlowRecord &a, const FlowRecord &b) {
                     return std::make_tuple(a.line, a.source_name, sink_order(a.sink_type)) <
                            std::make_tuple(b.line, b.source_name, sink_order(b.sink_type));
                   });
  // Identical ids mean identical (source, sink) pairs; keep the first.
  std::set<std::string> seen;
  std::erase_if(result.flows, [&](const FlowRecord &r) { return !seen.insert(r.id).second; });
  return result;
}

PropagationResult analyze_source(std::string_view source, QueryFamily family,
                                 const TaintConfig &config, const FileContext &context) {
  js::NodePtr program = js::parse_module(source);
  auto sources = find_sources(*program, family, config, stem_of(context.file));
  return propagate(*program, sources, family, config, context);
}

bool glob_matches(std::string_view pattern, std::string_view path) {
  if (pattern.empty())
    return path.empty();
  if (pattern.substr(0, 2) == "**") {
    std::string_view rest = pattern.substr(2);
    if (!rest.empty() && rest[0] == '/')
      rest.remove_prefix(1);
    if (glob_matches(rest, path))
      return true;
    for (std::size_t i = 0; i < path.size(); ++i)
      if (path[i] == '/' && glob_matches(rest, path.substr(i + 1)))
        return true;
    return rest.empty();
  }
  if (pattern[0] == '*') {
    for (std::size_t i = 0; i <= path.size(); ++i) {
      if (glob_matches(pattern.substr(1), path.substr(i)))
        return true;
      if (i < path.size() && path[i] == '/')
        break;
    }
    return false;
  }
  if (path.empty())
    return false;
  if (pattern[0] == '?' ? path[0] != '/' : pattern[0] == path[0])
    return glob_matches(pattern.substr(1), path.substr(1));
  return false;
}

ScanResult scan_project(const std::string &root, QueryFamily family, const TaintConfig &config,
                        const ScanOptions &options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw Error("not a readable directory: " + root);
  fs::path root_path = fs::canonical(root, ec);
  if (ec)
    throw Error("cannot resolve " + root + ": " + ec.message());

  ScanResult result;
  std::vector<std::string> files;
  fs::recursive_directory_iterator it(root_path, fs::directory_options::skip_permission_denied, ec),
      end;
  if (ec)
    throw Error("cannot read directory " + root + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) {
      result.diagnostics.push_back({"", 0, 0, "directory walk error: " + ec.message()});
      ec.clear();
      continue;
    }
    std::string rel = fs::relative(it->path(), root_path).generic_string();
    bool ignored = std::any_of(options.ignore_globs.begin(), options.ignore_globs.end(),
                               [&](const std::string &g) { return glob_matches(g, rel); });
    if (it->is_directory(ec)) {
      if (ignored || glob_matches("**/node_modules", rel) || rel == "node_modules")
        it.disable_recursion_pending();
      continue;
    }
    if (ignored || !it->is_regular_file(ec))
      continue;
    auto ext = it->path().extension().string();
    if (ext == ".js" || ext == ".mjs" || ext == ".cjs")
      files.push_back(rel);
  }
  std::sort(files.begin(), files.end());

  std::string project = options.project.empty() ? root_path.filename().string() : options.project;
  std::vector<PropagationResult> per_file(files.size());
  std::vector<std::optional<Diagnostic>> failures(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const std::string &rel = files[i];
      std::string text;
      try {
        text = read_file((root_path / rel).string());
      } catch (const Error &e) {
        failures[i] = Diagnostic{rel, 0, 0, std::string("unreadable file: ") + e.what()};
        continue;
      }
      try {
        per_file[i] = analyze_source(text, family, config, {project, rel});
      } catch (const ParseError &e) {
        failures[i] = Diagnostic{rel, static_cast<int>(e.line()), static_cast<int>(e.column()),
                                 std::string("skipped, parse error: ") + e.what()};
      }
    }
  };
  unsigned n = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(files.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  for (std::size_t i = 0; i < files.size(); ++i) {
    if (failures[i]) {
      result.diagnostics.push_back(*failures[i]);
      continue;
    }
    ++result.files_scanned;
    for (auto &d : per_file[i].diagnostics)
      result.diagnostics.push_back(std::move(d));
    for (auto &f : per_file[i].flows)
      result.flows.push_back(std::move(f));
  }
  result.flows = filter_short_names(result.flows);
  std::stable_sort(result.flows.begin(), result.flows.end(),
                   [](const FlowRecord &a, const FlowRecord &b) {
                     return std::tie(a.file, a.line) < std::tie(b.file, b.line);
                   });
  return result;
}

} // namespace nlflow::taint
