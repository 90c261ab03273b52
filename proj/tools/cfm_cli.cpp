// Command-line front end. Every subcommand prints a stream of records: first
// a config echo (the full effective configuration after defaults and config
// files are applied), then one or more result records. All records carry a
// 64-bit hash of that effective configuration, so records from different
// runs can be mixed and still attributed. Floating-point values are printed
// as decimal strings with 17 significant digits, which round-trips doubles
// exactly; exact rationals are printed as "p/q".

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfm/cf.hpp"
#include "cfm/errors.hpp"
#include "cfm/experiment.hpp"
#include "cfm/ffuncs.hpp"
#include "cfm/growth.hpp"
#include "cfm/pressure.hpp"
#include "cfm/rational.hpp"
#include "cfm/sampler.hpp"
#include "cfm/tails.hpp"
#include "cfm/weights.hpp"

using Json = nlohmann::ordered_json;

namespace {

// Command-line misuse (bad flag value, missing mode, malformed config file).
// Everything the library itself rejects keeps its own error class.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json bracket_json(const cfm::Bracket& b) {
  return Json::array({fmt17(b.lo), fmt17(b.hi)});
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// Accepts "p/q", plain decimals, and decimals with a power-of-ten exponent
// ("2.5e3"); all three forms are exact.
cfm::BigRat parse_rat_arg(const std::string& raw, const std::string& flag) {
  std::string s = trim(raw);
  if (s.empty()) throw UsageError(flag + ": empty value");
  try {
    std::size_t slash = s.find('/');
    if (slash != std::string::npos) {
      std::string num = trim(s.substr(0, slash));
      std::string den = trim(s.substr(slash + 1));
      if (!integer_token(num) || !integer_token(den))
        throw UsageError(flag + ": expected integer/integer, got '" + raw + "'");
      cfm::BigInt n(num), d(den);
      if (d == 0) throw UsageError(flag + ": zero denominator");
      return cfm::BigRat(n, d);
    }
    std::size_t e = s.find_first_of("eE");
    if (e == std::string::npos || e == 0) return cfm::parse_decimal(s);
    std::string mant = s.substr(0, e);
    std::string expo = s.substr(e + 1);
    if (!integer_token(expo))
      throw UsageError(flag + ": bad exponent in '" + raw + "'");
    long long k = std::stoll(expo);
    if (k > 100000 || k < -100000)
      throw UsageError(flag + ": exponent out of range in '" + raw + "'");
    cfm::BigRat v = cfm::parse_decimal(mant);
    cfm::BigInt p10 = 1;
    for (long long i = 0; i < std::llabs(k); ++i) p10 *= 10;
    return k >= 0 ? v * cfm::BigRat(p10) : v / cfm::BigRat(p10);
  } catch (const cfm::Error& err) {
    throw UsageError(flag + ": " + err.what());
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

cfm::Word parse_word_arg(const std::string& raw, const std::string& flag) {
  cfm::Word w;
  for (const std::string& tok : split_commas(raw)) {
    if (!integer_token(tok))
      throw UsageError(flag + ": expected comma-separated integers, got '" + raw + "'");
    try {
      w.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw UsageError(flag + ": digit out of range: '" + tok + "'");
    }
  }
  return w;
}

Json word_json(const cfm::Word& w) {
  Json a = Json::array();
  for (auto d : w) a.push_back(d);
  return a;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

enum class OutFormat { JsonLines, Csv };

using KvList = std::vector<std::pair<std::string, std::string>>;

// Serializes records to stdout. In CSV mode a header row is printed whenever
// the record schema changes; the config echo becomes a leading '#' comment so
// the body stays machine-readable.
struct Emitter {
  OutFormat format = OutFormat::JsonLines;
  std::string hash = "0000000000000000";
  std::vector<std::string> last_header;

  static std::string csv_quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  }

  static std::string csv_cell(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    if (v.is_array()) {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(v[i]);
      }
      out += ']';
      return out;
    }
    return v.dump();
  }

  void write(Json rec) {
    rec["config"] = hash;
    if (format == OutFormat::JsonLines) {
      std::cout << rec.dump() << '\n';
      return;
    }
    std::vector<std::string> header;
    for (const auto& el : rec.items()) header.push_back(el.key());
    if (header != last_header) {
      for (std::size_t i = 0; i < header.size(); ++i)
        std::cout << (i ? "," : "") << csv_quote(header[i]);
      std::cout << '\n';
      last_header = header;
    }
    bool first = true;
    for (const auto& el : rec.items()) {
      std::cout << (first ? "" : ",") << csv_quote(csv_cell(el.value()));
      first = false;
    }
    std::cout << '\n';
  }

  void write_config(const std::string& sub, const KvList& kv) {
    if (format == OutFormat::JsonLines) {
      Json rec;
      rec["record"] = "config";
      rec["subcommand"] = sub;
      for (const auto& [k, v] : kv) rec[k] = v;
      rec["config"] = hash;
      std::cout << rec.dump() << '\n';
    } else {
      std::cout << "# config subcommand=" << sub;
      for (const auto& [k, v] : kv) std::cout << ' ' << k << '=' << v;
      std::cout << " config=" << hash << '\n';
    }
  }
};

Emitter g_emit;

// Computes the config hash from the sorted effective key=value pairs (the
// thread count and the config-file path are execution details and excluded,
// so runs differing only in those produce byte-identical output), then
// prints the echo record.
Emitter& start_output(const std::string& sub, KvList kv, const std::string& format_str) {
  if (format_str == "json-lines") {
    g_emit.format = OutFormat::JsonLines;
  } else if (format_str == "csv") {
    g_emit.format = OutFormat::Csv;
  } else {
    throw UsageError("--format: expected json-lines or csv, got '" + format_str + "'");
  }
  kv.emplace_back("format", format_str);
  KvList sorted = kv;
  std::sort(sorted.begin(), sorted.end());
  std::string canon = sub + '\n';
  for (const auto& [k, v] : sorted) canon += k + '=' + v + '\n';
  g_emit.hash = fnv1a_hex(canon);
  g_emit.write_config(sub, kv);
  return g_emit;
}

int emit_error(const std::string& kind, const std::string& message, int code) {
  Json rec;
  rec["record"] = "error";
  rec["error"] = kind;
  rec["message"] = message;
  g_emit.write(std::move(rec));
  std::cout.flush();
  std::cerr << "error (" << kind << "): " << message << '\n';
  return code;
}

template <class K, class V>
V map_enum(const std::map<K, V>& m, const K& key, const std::string& flag) {
  auto it = m.find(key);
  if (it != m.end()) return it->second;
  std::string valid;
  for (const auto& [k, v] : m) {
    if (!valid.empty()) valid += ", ";
    valid += k;
  }
  throw UsageError(flag + ": expected one of {" + valid + "}, got '" + key + "'");
}

cfm::FKind parse_fkind(const std::string& s, const cfm::Weights& t) {
  if (s == "auto")
    return t.size() == 1   ? cfm::FKind::Single
           : t.size() == 2 ? cfm::FKind::Pair
                           : cfm::FKind::GeneralIter;
  static const std::map<std::string, cfm::FKind> kinds{
      {"single", cfm::FKind::Single},
      {"pair", cfm::FKind::Pair},
      {"unit", cfm::FKind::UnitIter},
      {"general", cfm::FKind::GeneralIter}};
  return map_enum(kinds, s, "--kind");
}

cfm::BaseMeasure parse_base(const std::string& s) {
  static const std::map<std::string, cfm::BaseMeasure> bases{
      {"gauss", cfm::BaseMeasure::Gauss}, {"lebesgue", cfm::BaseMeasure::Lebesgue}};
  return map_enum(bases, s, "--base");
}

// Plain key=value lines; blank lines and '#' comments are skipped. Values
// from the file fill in only flags absent from the command line.
KvList read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  KvList kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("--config: line " + std::to_string(lineno) + " is not key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError("--config: line " + std::to_string(lineno) + " has an empty key");
    if (key == "config")
      throw UsageError("--config: a config file cannot set 'config'");
    kv.emplace_back(key, value);
  }
  return kv;
}

// Flags on the command line win over config-file entries: an entry is
// appended as --key=value only when --key was not typed.
void inject_config_args(std::vector<std::string>& args) {
  std::size_t sub_at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub_at = i;
      break;
    }
  }
  if (sub_at == args.size()) return;
  std::string path;
  for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  auto present = [&](const std::string& key) {
    std::string flag = "--" + key;
    for (std::size_t i = sub_at + 1; i < args.size(); ++i)
      if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [k, v] : read_config_file(path)) {
    if (!present(k)) args.push_back("--" + k + "=" + v);
  }
}

std::string closed_str(cfm::ClosedEnd c) {
  return c == cfm::ClosedEnd::Left ? "left" : "right";
}

// Canonical comma-separated form, reusable as a --t argument.
std::string weights_str(const cfm::Weights& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += t.exact(i).str();
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  int threads_default = 0;
  if (const char* env = std::getenv("CFM_THREADS")) threads_default = std::atoi(env);

  CLI::App app{"metrical quantities of continued-fraction limsup sets"};
  app.require_subcommand(0, 1);

  std::string fmt_default = "json-lines";
  auto add_common = [&](CLI::App* sub, std::string& format, std::string& config_path) {
    format = fmt_default;
    sub->add_option("--format", format, "output format: json-lines or csv");
    sub->add_option("--config", config_path,
                    "key=value file supplying defaults for absent flags");
  };

  // ---- expand ----------------------------------------------------------
  struct {
    std::string x, format, config;
    std::uint64_t max_depth = 0;
  } ex;
  {
    auto* sub = app.add_subcommand("expand", "continued-fraction digits of x in [0,1)");
    sub->add_option("--x", ex.x, "value to expand: p/q or decimal")->required();
    sub->add_option("--max-depth", ex.max_depth, "stop after this many digits (0 = all)");
    add_common(sub, ex.format, ex.config);
    sub->callback([&] {
      cfm::BigRat x = parse_rat_arg(ex.x, "--x");
      Emitter& em = start_output(
          "expand", {{"x", x.str()}, {"max-depth", std::to_string(ex.max_depth)}}, ex.format);
      cfm::Word w = cfm::expand_rational(
          x, ex.max_depth == 0 ? static_cast<std::size_t>(-1) : ex.max_depth);
      Json rec;
      rec["record"] = "result";
      rec["word"] = word_json(w);
      em.write(std::move(rec));
    });
  }

  // ---- cylinder --------------------------------------------------------
  struct {
    std::string word, format, config;
  } cy;
  {
    auto* sub = app.add_subcommand("cylinder", "interval of expansions starting with a word");
    sub->add_option("--word", cy.word, "comma-separated digits, e.g. 2,3")->required();
    add_common(sub, cy.format, cy.config);
    sub->callback([&] {
      cfm::Word w = parse_word_arg(cy.word, "--word");
      std::string canon;
      for (std::size_t i = 0; i < w.size(); ++i)
        canon += (i ? "," : "") + std::to_string(w[i]);
      Emitter& em = start_output("cylinder", {{"word", canon}}, cy.format);
      cfm::Cylinder c = cfm::cylinder(w);
      Json rec;
      rec["record"] = "result";
      rec["word"] = word_json(c.word);
      rec["left"] = c.left.str();
      rec["right"] = c.right.str();
      rec["closed"] = closed_str(c.closed);
      rec["length"] = c.length().str();
      em.write(std::move(rec));
    });
  }

  // ---- gauss-measure ---------------------------------------------------
  struct {
    std::string word, lo, hi, format, config;
  } gm;
  {
    auto* sub = app.add_subcommand("gauss-measure",
                                   "Gauss measure of a cylinder or an interval");
    sub->add_option("--word", gm.word, "cylinder digits, e.g. 2,3");
    sub->add_option("--lo", gm.lo, "interval left endpoint (rational or decimal)");
    sub->add_option("--hi", gm.hi, "interval right endpoint");
    add_common(sub, gm.format, gm.config);
    sub->callback([&] {
      bool word_mode = !gm.word.empty();
      bool interval_mode = !gm.lo.empty() || !gm.hi.empty();
      if (word_mode == interval_mode)
        throw UsageError("gauss-measure: give either --word or both --lo and --hi");
      cfm::MeasureValue mv;
      KvList kv;
      if (word_mode) {
        cfm::Word w = parse_word_arg(gm.word, "--word");
        std::string canon;
        for (std::size_t i = 0; i < w.size(); ++i)
          canon += (i ? "," : "") + std::to_string(w[i]);
        kv = {{"word", canon}};
        Emitter& em = start_output("gauss-measure", kv, gm.format);
        mv = cfm::gauss_measure(cfm::cylinder(w));
        Json rec;
        rec["record"] = "result";
        rec["value"] = fmt17(mv.value);
        rec["abs_error_bound"] = fmt17(mv.abs_error_bound);
        em.write(std::move(rec));
      } else {
        if (gm.lo.empty() || gm.hi.empty())
          throw UsageError("gauss-measure: --lo and --hi must be given together");
        cfm::BigRat a = parse_rat_arg(gm.lo, "--lo");
        cfm::BigRat b = parse_rat_arg(gm.hi, "--hi");
        kv = {{"lo", a.str()}, {"hi", b.str()}};
        Emitter& em = start_output("gauss-measure", kv, gm.format);
        mv = cfm::gauss_measure(a, b);
        Json rec;
        rec["record"] = "result";
        rec["value"] = fmt17(mv.value);
        rec["abs_error_bound"] = fmt17(mv.abs_error_bound);
        em.write(std::move(rec));
      }
    });
  }

  // ---- tail-sum --------------------------------------------------------
  struct {
    std::string t, g, format, config;
    std::int64_t cutoff = 10000;
    bool exact = false;
  } ts;
  {
    auto* sub = app.add_subcommand(
        "tail-sum", "bracket of the weighted digit tail sum over prod a_i^{t_i} >= g");
    sub->add_option("--t", ts.t, "weights, comma-separated decimals")->required();
    sub->add_option("--g", ts.g, "threshold (rational or decimal)")->required();
    sub->add_option("--cutoff", ts.cutoff, "per-coordinate enumeration cutoff");
    sub->add_flag("--exact", ts.exact, "also report exact rational endpoints (m <= 2)");
    add_common(sub, ts.format, ts.config);
    sub->callback([&] {
      cfm::Weights t = cfm::Weights::parse(ts.t);
      cfm::BigRat g = parse_rat_arg(ts.g, "--g");
      Emitter& em = start_output("tail-sum",
                                 {{"t", weights_str(t)},
                                  {"g", g.str()},
                                  {"cutoff", std::to_string(ts.cutoff)},
                                  {"exact", ts.exact ? "true" : "false"}},
                                 ts.format);
      cfm::Bracket b = cfm::weighted_tail_sum(t, g, ts.cutoff);
      Json rec;
      rec["record"] = "result";
      rec["bracket"] = bracket_json(b);
      if (ts.exact) {
        cfm::RatBracket rb = cfm::weighted_tail_sum_exact(t, g, ts.cutoff);
        rec["exact"] = Json::array({rb.lo.str(), rb.hi.str()});
      }
      em.write(std::move(rec));
    });
  }

  // ---- event-measure ---------------------------------------------------
  struct {
    std::string t, g, base = "gauss", format, config;
    std::optional<double> log_g;
    std::int64_t cutoff = 10000;
    bool exact = false;
  } ev;
  {
    auto* sub = app.add_subcommand(
        "event-measure", "measure of {x : prod a_{i+1}(x)^{t_i} >= g}");
    sub->add_option("--t", ev.t, "weights, comma-separated decimals")->required();
    sub->add_option("--g", ev.g, "threshold (rational or decimal)");
    sub->add_option("--log-g", ev.log_g, "ln of the threshold (fast engine)");
    sub->add_option("--base", ev.base, "gauss or lebesgue");
    sub->add_option("--cutoff", ev.cutoff, "per-coordinate enumeration cutoff");
    sub->add_flag("--exact", ev.exact,
                  "also report exact rational endpoints (lebesgue, m <= 2)");
    add_common(sub, ev.format, ev.config);
    sub->callback([&] {
      cfm::Weights t = cfm::Weights::parse(ev.t);
      cfm::BaseMeasure base = parse_base(ev.base);
      bool g_mode = !ev.g.empty();
      if (g_mode == ev.log_g.has_value())
        throw UsageError("event-measure: give exactly one of --g or --log-g");
      KvList kv{{"t", weights_str(t)}};
      cfm::BigRat g;
      if (g_mode) {
        g = parse_rat_arg(ev.g, "--g");
        kv.emplace_back("g", g.str());
      } else {
        kv.emplace_back("log-g", fmt17(*ev.log_g));
      }
      kv.emplace_back("base", ev.base);
      kv.emplace_back("cutoff", std::to_string(ev.cutoff));
      kv.emplace_back("exact", ev.exact ? "true" : "false");
      Emitter& em = start_output("event-measure", kv, ev.format);
      cfm::Bracket b = g_mode ? cfm::measure_of_event(t, g, base, ev.cutoff)
                              : cfm::measure_of_event_fast(t, *ev.log_g, base, ev.cutoff);
      Json rec;
      rec["record"] = "result";
      rec["bracket"] = bracket_json(b);
      if (ev.exact) {
        if (!g_mode || base != cfm::BaseMeasure::Lebesgue)
          throw cfm::DomainError(
              "exact event measure needs --g and --base lebesgue");
        cfm::RatBracket rb = cfm::measure_of_event_exact(t, g, ev.cutoff);
        rec["exact"] = Json::array({rb.lo.str(), rb.hi.str()});
      }
      em.write(std::move(rec));
    });
  }

  // ---- f-eval ----------------------------------------------------------
  struct {
    std::string kind, t, format, config;
    double s = 0.0;
  } fe;
  {
    auto* sub = app.add_subcommand("f-eval", "penalty exponent f(s) for given weights");
    sub->add_option("--kind", fe.kind, "single, pair, unit, or general")->required();
    sub->add_option("--t", fe.t, "weights, comma-separated decimals")->required();
    sub->add_option("--s", fe.s, "argument in [0,1]")->required();
    add_common(sub, fe.format, fe.config);
    sub->callback([&] {
      cfm::Weights t = cfm::Weights::parse(fe.t);
      cfm::FKind kind = parse_fkind(fe.kind, t);
      Emitter& em = start_output(
          "f-eval", {{"kind", fe.kind}, {"t", weights_str(t)}, {"s", fmt17(fe.s)}}, fe.format);
      double f = cfm::f_eval(kind, t, fe.s);
      Json rec;
      rec["record"] = "result";
      rec["f"] = fmt17(f);
      em.write(std::move(rec));
    });
  }

  // ---- pressure --------------------------------------------------------
  struct {
    std::string engine = "spectral", format, config;
    double M = 0.0, s = 0.0, c = 0.0, budget = 1e8;
    int grid = 32, n = 0;
  } pr;
  {
    auto* sub = app.add_subcommand(
        "pressure", "pressure of -s ln|T'| - c on the digit alphabet {1..M}");
    sub->add_option("--M", pr.M, "alphabet size (may be huge for the spectral engine)")
        ->required();
    sub->add_option("--s", pr.s, "exponent in [0,1]")->required();
    sub->add_option("--engine", pr.engine, "spectral or wordsum");
    sub->add_option("--c", pr.c, "constant penalty");
    sub->add_option("--grid", pr.grid, "Chebyshev grid size (spectral)");
    sub->add_option("--n", pr.n, "word length (wordsum)");
    sub->add_option("--budget", pr.budget, "leaf budget for the wordsum engine");
    add_common(sub, pr.format, pr.config);
    sub->callback([&] {
      KvList kv{{"M", fmt17(pr.M)},     {"s", fmt17(pr.s)},
                {"engine", pr.engine},  {"c", fmt17(pr.c)},
                {"grid", std::to_string(pr.grid)}, {"n", std::to_string(pr.n)},
                {"budget", fmt17(pr.budget)}};
      Emitter& em = start_output("pressure", kv, pr.format);
      Json rec;
      rec["record"] = "result";
      if (pr.engine == "spectral") {
        cfm::PressureResult r = cfm::pressure_spectral(pr.M, pr.s, pr.c, pr.grid);
        rec["value"] = fmt17(r.value);
        rec["residual"] = fmt17(r.residual);
        rec["iterations"] = r.iterations;
        rec["grid"] = r.grid_size;
      } else if (pr.engine == "wordsum") {
        if (pr.n < 1) throw UsageError("pressure: the wordsum engine needs --n >= 1");
        if (!(pr.M >= 1) || pr.M != std::floor(pr.M) || pr.M > 2147483647.0)
          throw cfm::DomainError("wordsum needs an integer alphabet size that fits in int");
        double w = cfm::wordsum(static_cast<int>(pr.M), pr.n, pr.s, pr.c, pr.budget);
        rec["value"] = fmt17(w);
        rec["n"] = pr.n;
      } else {
        throw UsageError("--engine: expected spectral or wordsum, got '" + pr.engine + "'");
      }
      em.write(std::move(rec));
    });
  }

  // ---- solve-s ---------------------------------------------------------
  struct {
    std::string t, kind = "auto", format, config;
    double M = 0.0, B = 0.0, tol = 1e-8;
    int grid = 32;
  } so;
  {
    auto* sub = app.add_subcommand(
        "solve-s", "root of pressure(s) = f(s) ln B on the alphabet {1..M}");
    sub->add_option("--M", so.M, "alphabet size")->required();
    sub->add_option("--B", so.B, "growth base, > 1")->required();
    sub->add_option("--t", so.t, "weights, comma-separated decimals")->required();
    sub->add_option("--kind", so.kind, "single, pair, unit, general, or auto");
    sub->add_option("--tol", so.tol, "bisection tolerance");
    sub->add_option("--grid", so.grid, "Chebyshev grid size");
    add_common(sub, so.format, so.config);
    sub->callback([&] {
      cfm::Weights t = cfm::Weights::parse(so.t);
      cfm::FKind kind = parse_fkind(so.kind, t);
      Emitter& em = start_output("solve-s",
                                 {{"M", fmt17(so.M)},
                                  {"B", fmt17(so.B)},
                                  {"t", weights_str(t)},
                                  {"kind", so.kind},
                                  {"tol", fmt17(so.tol)},
                                  {"grid", std::to_string(so.grid)}},
                                 so.format);
      double s = cfm::solve_s(so.M, so.B, t, kind, so.tol, so.grid);
      Json rec;
      rec["record"] = "result";
      rec["s"] = fmt17(s);
      em.write(std::move(rec));
    });
  }

  // ---- dim -------------------------------------------------------------
  struct {
    std::string psi, t, branch = "auto", format, config;
    double tol = 1e-8;
    long long nmax = 2000;
    int grid = 32;
  } dm;
  {
    auto* sub = app.add_subcommand(
        "dim", "Hausdorff dimension of the weighted limsup set for growth psi");
    sub->add_option("--psi", dm.psi, "growth expression, e.g. pow(4) or n^3")->required();
    sub->add_option("--t", dm.t, "weights, comma-separated decimals")->required();
    sub->add_option("--tol", dm.tol, "target half-width of the answer");
    sub->add_option("--branch", dm.branch,
                    "auto, base-one, base-infinite, or finite (overrides the estimates)");
    sub->add_option("--nmax", dm.nmax, "horizon for the growth-exponent estimates");
    sub->add_option("--grid", dm.grid, "Chebyshev grid size");
    add_common(sub, dm.format, dm.config);
    sub->callback([&] {
      cfm::GrowthExpr e = cfm::parse_growth(dm.psi);
      cfm::Weights t = cfm::Weights::parse(dm.t);
      std::optional<cfm::BranchKind> ov;
      if (dm.branch != "auto") {
        static const std::map<std::string, cfm::BranchKind> branches{
            {"base-one", cfm::BranchKind::BEqualsOne},
            {"base-infinite", cfm::BranchKind::BInfinite},
            {"finite", cfm::BranchKind::BFinite}};
        ov = map_enum(branches, dm.branch, "--branch");
      }
      Emitter& em = start_output("dim",
                                 {{"psi", e.text},
                                  {"t", weights_str(t)},
                                  {"tol", fmt17(dm.tol)},
                                  {"branch", dm.branch},
                                  {"nmax", std::to_string(dm.nmax)},
                                  {"grid", std::to_string(dm.grid)}},
                                 dm.format);
      cfm::DimensionResult r = cfm::hdim_dispatch(e, t, ov, dm.tol, dm.nmax, dm.grid);
      Json rec;
      rec["record"] = "result";
      rec["lower"] = fmt17(r.lower);
      rec["upper"] = fmt17(r.upper);
      rec["branch"] = cfm::to_string(r.branch);
      rec["B_hat"] = fmt17(r.B_hat);
      rec["b_hat"] = fmt17(r.b_hat);
      rec["final_M"] = fmt17(r.final_M);
      rec["lower_bound_only"] = r.lower_bound_only;
      rec["note"] = r.note;
      em.write(std::move(rec));
    });
  }

  // ---- series ----------------------------------------------------------
  struct {
    std::string psi, t, format, config;
    long long horizon = 4000;
  } se;
  {
    auto* sub = app.add_subcommand(
        "series", "convergence test of sum (ln psi)^(ell-1) psi^(-1/t_max)");
    sub->add_option("--psi", se.psi, "growth expression")->required();
    sub->add_option("--t", se.t, "weights, comma-separated decimals")->required();
    sub->add_option("--horizon", se.horizon, "number of terms examined");
    add_common(sub, se.format, se.config);
    sub->callback([&] {
      cfm::GrowthExpr e = cfm::parse_growth(se.psi);
      cfm::Weights t = cfm::Weights::parse(se.t);
      Emitter& em = start_output(
          "series",
          {{"psi", e.text}, {"t", weights_str(t)}, {"horizon", std::to_string(se.horizon)}},
          se.format);
      cfm::SeriesVerdict v = cfm::series_test(e, t, se.horizon);
      Json rec;
      rec["record"] = "result";
      rec["verdict"] = v.verdict == cfm::SeriesVerdictKind::Convergent   ? "convergent"
                       : v.verdict == cfm::SeriesVerdictKind::Divergent ? "divergent"
                                                                        : "undecided";
      rec["partial_sum"] = fmt17(v.partial_sum);
      rec["tail_bound"] = v.tail_bound ? Json(fmt17(*v.tail_bound)) : Json(nullptr);
      rec["certificate"] = v.certificate;
      rec["t_max"] = fmt17(v.t_max);
      rec["ell"] = v.ell;
      rec["horizon"] = v.horizon;
      em.write(std::move(rec));
    });
  }

  // ---- simulate --------------------------------------------------------
  struct {
    std::string psi, t, base = "gauss", format, config;
    long long samples = 1000, n0 = 1, n1 = 100, digits = 0;
    std::uint64_t seed = 0;
    std::int64_t cutoff = 100000;
    int threads = 0;
    bool dump_hits = false;
  } si;
  si.threads = threads_default;
  {
    auto* sub = app.add_subcommand(
        "simulate", "Monte Carlo hit statistics for the window [n0, n1]");
    sub->add_option("--psi", si.psi, "growth expression")->required();
    sub->add_option("--t", si.t, "weights, comma-separated decimals")->required();
    sub->add_option("--samples", si.samples, "number of sampled expansions");
    sub->add_option("--n0", si.n0, "window start (>= 1)");
    sub->add_option("--n1", si.n1, "window end");
    sub->add_option("--digits", si.digits, "digits per sample (0 derives n1 + m - 1)");
    sub->add_option("--base", si.base, "sampling measure: gauss or lebesgue");
    sub->add_option("--seed", si.seed, "RNG seed");
    sub->add_option("--cutoff", si.cutoff, "cutoff for the analytic bracket");
    sub->add_option("--threads", si.threads,
                    "worker threads (0 = hardware; default from CFM_THREADS)");
    sub->add_flag("--dump-hits", si.dump_hits, "emit one record per hit");
    add_common(sub, si.format, si.config);
    sub->callback([&] {
      cfm::GrowthExpr e = cfm::parse_growth(si.psi);
      cfm::Weights t = cfm::Weights::parse(si.t);
      cfm::BaseMeasure base = parse_base(si.base);
      Emitter& em = start_output("simulate",
                                 {{"psi", e.text},
                                  {"t", weights_str(t)},
                                  {"samples", std::to_string(si.samples)},
                                  {"n0", std::to_string(si.n0)},
                                  {"n1", std::to_string(si.n1)},
                                  {"digits", std::to_string(si.digits)},
                                  {"base", si.base},
                                  {"seed", std::to_string(si.seed)},
                                  {"cutoff", std::to_string(si.cutoff)},
                                  {"dump-hits", si.dump_hits ? "true" : "false"}},
                                 si.format);
      cfm::McConfig cfg;
      cfg.samples = si.samples;
      cfg.digits = si.digits;
      cfg.t = t;
      cfg.psi = e;
      cfg.base = base;
      cfg.seed = si.seed;
      cfg.n0 = si.n0;
      cfg.n1 = si.n1;
      cfg.threads = si.threads;
      cfg.bracket_cutoff = si.cutoff;
      cfm::McSummary sm = cfm::mc_experiment(cfg);
      Json rec;
      rec["record"] = "summary";
      rec["samples"] = sm.samples;
      rec["hitSamples"] = sm.hit_samples;
      rec["totalHits"] = sm.total_hits;
      rec["empiricalHitProb"] = fmt17(sm.empirical_hit_prob);
      rec["meanHitCount"] = fmt17(sm.mean_hit_count);
      rec["analyticBracket"] = bracket_json(sm.analytic_bracket);
      em.write(std::move(rec));
      if (si.dump_hits) {
        std::size_t len = static_cast<std::size_t>(
            si.digits > 0 ? si.digits : si.n1 + static_cast<long long>(t.size()) - 1);
        cfm::DigitSampler sampler{base, si.seed};
        for (const cfm::HitReport& rep : sm.reports) {
          if (rep.hits.empty()) continue;
          cfm::Word w = cfm::sample_digits(sampler, rep.sample_id, len);
          for (long long n : rep.hits) {
            double lp = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i)
              lp += t.approx(i) * std::log(static_cast<double>(w[n - 1 + i]));
            Json hit;
            hit["record"] = "hit";
            hit["sampleId"] = rep.sample_id;
            hit["n"] = n;
            hit["logProduct"] = fmt17(lp);
            hit["logPsi"] = fmt17(cfm::eval_log_growth(e, n));
            em.write(std::move(hit));
          }
        }
      }
    });
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    inject_config_args(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", e.what(), 2);
  } catch (const cfm::ExprParseError& e) {
    return emit_error("expr-parse", e.what(), 3);
  } catch (const cfm::BudgetError& e) {
    return emit_error("budget", e.what(), 5);
  } catch (const cfm::BranchError& e) {
    return emit_error("branch", e.what(), 6);
  } catch (const cfm::DomainError& e) {
    return emit_error("domain", e.what(), 4);
  } catch (const UsageError& e) {
    return emit_error("usage", e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error("internal", e.what(), 1);
  }
  std::cout.flush();
  return 0;
}
