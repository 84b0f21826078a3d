#include "varcert/problem_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace varcert {

namespace {

// one parsed right-hand side
struct Value {
  enum class Kind { Number, String, Bool, List };
  Kind kind = Kind::Number;
  double num = 0.0;
  bool flag = false;
  std::string str;
  std::vector<Value> list;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Section {
  std::vector<Entry> entries;
  int line = 0;  // where the header appeared
  bool present = false;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

// recursive value parser over one line's right-hand side
Value parse_value(const std::string& text, std::size_t& pos, int line);

Value parse_list(const std::string& text, std::size_t& pos, int line) {
  Value v;
  v.kind = Value::Kind::List;
  ++pos;  // '['
  while (true) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) fail_line(line, "unterminated list");
    if (text[pos] == ']') {
      ++pos;
      return v;
    }
    if (!v.list.empty()) {
      if (text[pos] != ',') fail_line(line, "expected ',' or ']' in list");
      ++pos;
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    v.list.push_back(parse_value(text, pos, line));
  }
}

Value parse_value(const std::string& text, std::size_t& pos, int line) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos >= text.size()) fail_line(line, "missing value");
  char c = text[pos];
  if (c == '[') return parse_list(text, pos, line);
  if (c == '"') {
    std::size_t close = text.find('"', pos + 1);
    if (close == std::string::npos) fail_line(line, "unterminated string");
    Value v;
    v.kind = Value::Kind::String;
    v.str = text.substr(pos + 1, close - pos - 1);
    pos = close + 1;
    return v;
  }
  if (text.compare(pos, 4, "true") == 0) {
    pos += 4;
    Value v;
    v.kind = Value::Kind::Bool;
    v.flag = true;
    return v;
  }
  if (text.compare(pos, 5, "false") == 0) {
    pos += 5;
    Value v;
    v.kind = Value::Kind::Bool;
    v.flag = false;
    return v;
  }
  double num = 0.0;
  const char* begin = text.data() + pos;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, num);
  if (ec != std::errc() || ptr == begin) fail_line(line, "expected a number, string, list, or boolean");
  pos = static_cast<std::size_t>(ptr - text.data());
  Value v;
  v.kind = Value::Kind::Number;
  v.num = num;
  return v;
}

// everything after '#' is comment, except inside a quoted string
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

const char* kSectionNames[] = {"problem", "domain", "candidate", "family", "grid",
                               "tolerances", "sampling", "deltas", "run"};

struct ParsedFile {
  std::vector<std::pair<std::string, Section>> sections;

  Section* find(const std::string& name) {
    for (auto& [n, s] : sections)
      if (n == name) return &s;
    return nullptr;
  }
};

ParsedFile parse_file(const std::string& text) {
  ParsedFile file;
  for (const char* name : kSectionNames) file.sections.emplace_back(name, Section{});

  std::istringstream in(text);
  std::string raw;
  Section* current = nullptr;
  std::string current_name;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_line(line_no, "expected a section header like [problem]");
      std::string name = trim(line.substr(1, line.size() - 2));
      Section* sec = file.find(name);
      if (!sec) fail_line(line_no, "unknown section [" + name + "]");
      sec->present = true;
      sec->line = line_no;
      current = sec;
      current_name = name;
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
    if (!current) fail_line(line_no, "key outside of any section");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail_line(line_no, "empty key");
    std::string rhs = trim(line.substr(eq + 1));
    std::size_t pos = 0;
    Value value = parse_value(rhs, pos, line_no);
    while (pos < rhs.size() && (rhs[pos] == ' ' || rhs[pos] == '\t')) ++pos;
    if (pos != rhs.size()) fail_line(line_no, "trailing input after value");
    current->entries.push_back({key, value, line_no});
  }
  return file;
}

// ---- typed accessors with section.key error messages ----------------

[[noreturn]] void fail_key(const std::string& section, const std::string& key, int line, const std::string& msg) {
  std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
  throw ValidationError(section + "." + key + ": " + msg + where);
}

const Entry* find_one(const Section& sec, const std::string& section, const std::string& key) {
  const Entry* found = nullptr;
  for (const Entry& e : sec.entries)
    if (e.key == key) {
      if (found) fail_key(section, key, e.line, "given more than once");
      found = &e;
    }
  return found;
}

const Entry& require_one(const Section& sec, const std::string& section, const std::string& key) {
  const Entry* e = find_one(sec, section, key);
  if (!e) throw ValidationError(section + "." + key + ": required");
  return *e;
}

double as_number(const Entry& e, const std::string& section) {
  if (e.value.kind != Value::Kind::Number) fail_key(section, e.key, e.line, "expected a number");
  return e.value.num;
}

int as_int(const Entry& e, const std::string& section) {
  double v = as_number(e, section);
  if (std::nearbyint(v) != v || std::fabs(v) > 1e9) fail_key(section, e.key, e.line, "expected an integer");
  return static_cast<int>(v);
}

std::string as_string(const Entry& e, const std::string& section) {
  if (e.value.kind != Value::Kind::String) fail_key(section, e.key, e.line, "expected a quoted string");
  return e.value.str;
}

bool as_bool(const Entry& e, const std::string& section) {
  if (e.value.kind != Value::Kind::Bool) fail_key(section, e.key, e.line, "expected true or false");
  return e.value.flag;
}

std::vector<double> as_number_list(const Entry& e, const std::string& section) {
  if (e.value.kind != Value::Kind::List) fail_key(section, e.key, e.line, "expected a list");
  std::vector<double> out;
  for (const Value& v : e.value.list) {
    if (v.kind != Value::Kind::Number) fail_key(section, e.key, e.line, "expected a flat list of numbers");
    out.push_back(v.num);
  }
  return out;
}

// per-axis [lo, hi] pairs
std::vector<Interval> as_intervals(const Entry& e, const std::string& section, int n) {
  if (e.value.kind != Value::Kind::List) fail_key(section, e.key, e.line, "expected a list of [lo, hi] pairs");
  if (static_cast<int>(e.value.list.size()) != n)
    fail_key(section, e.key, e.line, "expected one [lo, hi] pair per axis (" + std::to_string(n) + ")");
  std::vector<Interval> out;
  for (const Value& v : e.value.list) {
    if (v.kind != Value::Kind::List || v.list.size() != 2 || v.list[0].kind != Value::Kind::Number ||
        v.list[1].kind != Value::Kind::Number)
      fail_key(section, e.key, e.line, "each axis needs a [lo, hi] pair");
    out.push_back({v.list[0].num, v.list[1].num});
  }
  return out;
}

void reject_unknown_keys(const Section& sec, const std::string& section, std::initializer_list<const char*> known) {
  for (const Entry& e : sec.entries) {
    bool ok = false;
    for (const char* k : known)
      if (e.key == k) ok = true;
    if (!ok) fail_key(section, e.key, e.line, "unknown key");
  }
}

Expr parse_named_expr(const std::string& text, const Dims& dims, const VarClassSet& allowed,
                      const std::string& section, const Entry& e) {
  try {
    return parse_expr(text, dims, allowed);
  } catch (const ParseError& err) {
    fail_key(section, e.key, e.line, err.what());
  } catch (const ValidationError& err) {
    fail_key(section, e.key, e.line, err.what());
  }
}

}  // namespace

LoadedProblem load_problem_text(const std::string& text, const std::string& origin) {
  ParsedFile file = parse_file(text);

  for (const char* required : {"problem", "domain", "candidate", "family"})
    if (!file.find(required)->present) throw ValidationError(std::string(required) + ": required");

  // [problem]
  Section& problem = *file.find("problem");
  reject_unknown_keys(problem, "problem", {"n", "N", "f"});
  int n = as_int(require_one(problem, "problem", "n"), "problem");
  int N = as_int(require_one(problem, "problem", "N"), "problem");
  if (n < 1 || n > 9) fail_key("problem", "n", problem.line, "n must be between 1 and 9");
  if (N < 1 || N > 9) fail_key("problem", "N", problem.line, "N must be between 1 and 9");
  Dims dims{n, N};
  const Entry& f_entry = require_one(problem, "problem", "f");
  Expr f = parse_named_expr(as_string(f_entry, "problem"), dims, VarClassSet::lagrangian(), "problem", f_entry);
  LagrangianSpec lagrangian = LagrangianSpec::build(dims, f);

  // [domain]
  Section& domain = *file.find("domain");
  reject_unknown_keys(domain, "domain", {"b0", "omega"});
  std::vector<Interval> b0 = as_intervals(require_one(domain, "domain", "b0"), "domain", n);
  std::vector<Interval> omega = as_intervals(require_one(domain, "domain", "omega"), "domain", n);
  BoxDomain box(b0, omega);

  // [candidate] -- y0 repeated once per component
  Section& candidate = *file.find("candidate");
  reject_unknown_keys(candidate, "candidate", {"y0"});
  std::vector<Expr> y0;
  for (const Entry& e : candidate.entries)
    y0.push_back(parse_named_expr(as_string(e, "candidate"), dims, VarClassSet::spatial(), "candidate", e));
  if (static_cast<int>(y0.size()) != N)
    throw ValidationError("candidate.y0: expected " + std::to_string(N) + " component(s), got " +
                          std::to_string(y0.size()));

  // [family]
  Section& family_sec = *file.find("family");
  std::string kind = as_string(require_one(family_sec, "family", "kind"), "family");
  double radius = as_number(require_one(family_sec, "family", "r"), "family");
  ExtremalFamily family = [&]() {
    if (kind == "expression") {
      reject_unknown_keys(family_sec, "family", {"kind", "r", "phi"});
      std::vector<Expr> phi;
      for (const Entry& e : family_sec.entries)
        if (e.key == "phi")
          phi.push_back(parse_named_expr(as_string(e, "family"), dims, VarClassSet::family(), "family", e));
      if (static_cast<int>(phi.size()) != N)
        throw ValidationError("family.phi: expected " + std::to_string(N) + " component(s), got " +
                              std::to_string(phi.size()));
      return ExtremalFamily::closed_form(dims, std::move(phi), radius);
    }
    if (kind == "shooting") {
      reject_unknown_keys(family_sec, "family", {"kind", "r", "base_t", "y_base", "slope_base", "step"});
      ExtremalFamily::Shooting sh;
      sh.base_t = as_number(require_one(family_sec, "family", "base_t"), "family");
      sh.y_base = as_number_list(require_one(family_sec, "family", "y_base"), "family");
      sh.slope_base = as_number_list(require_one(family_sec, "family", "slope_base"), "family");
      if (const Entry* step = find_one(family_sec, "family", "step")) sh.step = as_number(*step, "family");
      return ExtremalFamily::shooting_1d(dims, std::move(sh), radius);
    }
    fail_key("family", "kind", family_sec.line, "must be \"expression\" or \"shooting\"");
  }();

  LoadedProblem loaded{ProblemSpec(std::move(lagrangian), std::move(box), std::move(y0), std::move(family)), {}};
  ProblemSpec& spec = loaded.spec;

  // [grid]
  Section& grid = *file.find("grid");
  reject_unknown_keys(grid, "grid", {"resolution"});
  if (const Entry* res = find_one(grid, "grid", "resolution")) {
    if (res->value.kind == Value::Kind::List) {
      std::vector<double> vals = as_number_list(*res, "grid");
      spec.resolution.clear();
      for (double v : vals) {
        if (std::nearbyint(v) != v) fail_key("grid", "resolution", res->line, "expected integers");
        spec.resolution.push_back(static_cast<int>(v));
      }
      if (static_cast<int>(spec.resolution.size()) != n)
        fail_key("grid", "resolution", res->line, "expected one entry per axis");
    } else {
      spec.resolution.assign(static_cast<std::size_t>(n), as_int(*res, "grid"));
    }
  }

  // [tolerances]
  Section& tol = *file.find("tolerances");
  reject_unknown_keys(tol, "tolerances", {"tol_el", "tol_inv", "tol_exact", "tol_invariance", "tol_excess"});
  if (const Entry* e = find_one(tol, "tolerances", "tol_el")) spec.tolerances.tol_el = as_number(*e, "tolerances");
  if (const Entry* e = find_one(tol, "tolerances", "tol_inv")) spec.tolerances.tol_inv = as_number(*e, "tolerances");
  if (const Entry* e = find_one(tol, "tolerances", "tol_exact"))
    spec.tolerances.tol_exact = as_number(*e, "tolerances");
  if (const Entry* e = find_one(tol, "tolerances", "tol_invariance"))
    spec.tolerances.tol_invariance = as_number(*e, "tolerances");
  if (const Entry* e = find_one(tol, "tolerances", "tol_excess"))
    spec.tolerances.tol_excess = as_number(*e, "tolerances");

  // [sampling]
  Section& sampling = *file.find("sampling");
  reject_unknown_keys(sampling, "sampling", {"num_samples", "mode_cap", "seed"});
  if (const Entry* e = find_one(sampling, "sampling", "num_samples"))
    spec.sampling.num_samples = as_int(*e, "sampling");
  if (const Entry* e = find_one(sampling, "sampling", "mode_cap")) spec.sampling.mode_cap = as_int(*e, "sampling");
  if (const Entry* e = find_one(sampling, "sampling", "seed")) {
    double v = as_number(*e, "sampling");
    if (std::nearbyint(v) != v || v < 0) fail_key("sampling", "seed", e->line, "expected a nonnegative integer");
    spec.sampling.seed = static_cast<std::uint64_t>(v);
  }

  // [deltas]
  Section& deltas = *file.find("deltas");
  reject_unknown_keys(deltas, "deltas", {"deltas"});
  if (const Entry* e = find_one(deltas, "deltas", "deltas")) spec.deltas = as_number_list(*e, "deltas");

  // [run]
  Section& run = *file.find("run");
  reject_unknown_keys(run, "run", {"report", "continue_on_failure"});
  if (const Entry* e = find_one(run, "run", "report")) loaded.run.report_path = as_string(*e, "run");
  if (const Entry* e = find_one(run, "run", "continue_on_failure"))
    loaded.run.continue_on_failure = as_bool(*e, "run");

  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return loaded;
}

LoadedProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem_text(buf.str(), path);
}

void apply_overrides(LoadedProblem& problem, const CliOverrides& overrides) {
  ProblemSpec& spec = problem.spec;
  int n = spec.lagrangian.dims().n;
  if (!overrides.resolution.empty()) {
    if (overrides.resolution.size() == 1)
      spec.resolution.assign(static_cast<std::size_t>(n), overrides.resolution.front());
    else
      spec.resolution = overrides.resolution;
  }
  if (overrides.seed) spec.sampling.seed = *overrides.seed;
  if (overrides.num_samples) spec.sampling.num_samples = *overrides.num_samples;
  if (overrides.tol_el) spec.tolerances.tol_el = *overrides.tol_el;
  if (overrides.tol_inv) spec.tolerances.tol_inv = *overrides.tol_inv;
  if (overrides.tol_exact) spec.tolerances.tol_exact = *overrides.tol_exact;
  if (overrides.tol_invariance) spec.tolerances.tol_invariance = *overrides.tol_invariance;
  if (!overrides.deltas.empty()) spec.deltas = overrides.deltas;
  if (!overrides.report_path.empty()) problem.run.report_path = overrides.report_path;
  if (overrides.continue_on_failure) problem.run.continue_on_failure = true;
  spec.validate();
}

}  // namespace varcert
