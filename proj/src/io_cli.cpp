#include "streampred/io_cli.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "streampred/errors.hpp"
#include "streampred/seeding.hpp"

namespace streampred {

void DatasetSpec::validate() const {
  if (column.empty()) throw InvalidConfig("column name is empty");
  if (max_rows && *max_rows < 10) throw InvalidConfig("max-rows must be >= 10");
  if (precision && (*precision < 0 || *precision > 12)) {
    throw InvalidConfig("precision must be in 0..12");
  }
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw IngestionError("unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

int decimals_of(const std::string& cell) {
  const auto dot = cell.find('.');
  if (dot == std::string::npos) return 0;
  std::size_t end = cell.find_first_of("eE", dot);
  if (end == std::string::npos) end = cell.size();
  return static_cast<int>(end - dot - 1);
}

}  // namespace

ColumnData read_column(std::istream& in, const DatasetSpec& spec) {
  spec.validate();
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields)) throw SchemaError("missing header line");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    fields[0].erase(0, 3);
  }
  std::size_t col = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (trim(fields[i]) == spec.column) {
      col = i;
      break;
    }
  }
  if (col == fields.size()) {
    throw SchemaError("column '" + spec.column + "' not in header");
  }

  ColumnData data;
  std::size_t line = 1;
  while (read_csv_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (spec.max_rows && data.values.size() >= *spec.max_rows) break;
    const std::string cell = col < fields.size() ? trim(fields[col]) : "";
    const auto v = parse_number(cell);
    if (!v) {
      if (!spec.drop_missing) {
        throw IngestionError("row " + std::to_string(line) +
                             ": missing or non-numeric value '" + cell + "'");
      }
      ++data.dropped;
      continue;
    }
    data.values.push_back(*v);
    data.decimals = std::max(data.decimals, decimals_of(cell));
  }
  if (data.values.empty()) throw IngestionError("no usable rows");
  data.decimals = std::min(data.decimals, 12);
  return data;
}

ColumnData read_column(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + spec.path);
  return read_column(in, spec);
}

std::vector<double> load_column(const DatasetSpec& spec) {
  return read_column(spec).values;
}

// ---- manifest ---------------------------------------------------------------

namespace {

std::string_view to_string(HyperPolicy h) {
  return h == HyperPolicy::refit ? "refit" : "freeze";
}
std::string_view to_string(DeltaPolicy d) {
  return d == DeltaPolicy::fixed ? "fixed" : "grid";
}
std::string_view to_string(CenterOrder c) {
  return c == CenterOrder::slot ? "slot" : "sorted";
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["burnin_frac"] = c.burnin_frac;
  j["burnin_count"] = c.burnin_count ? nlohmann::json(*c.burnin_count)
                                     : nlohmann::json(nullptr);
  j["bins"] = c.bins;
  j["depth"] = c.depth;
  j["width"] = c.width;
  j["rho"] = c.rho;
  j["delta"] = c.delta;
  j["delta_policy"] = to_string(c.delta_policy);
  j["kmeans_k"] = c.kmeans_k;
  j["dpp_mass"] = c.dpp_mass;
  j["seed"] = c.seed;
  j["precision"] = c.precision;
  j["range"] = {{"fixed", c.range.fixed},
                {"lo", c.range.lo},
                {"hi", c.range.hi},
                {"expand", c.range.expand}};
  j["hyper"] = to_string(c.hyper);
  j["center_order"] = to_string(c.center_order);
  j["literal_alpha"] = c.literal_alpha;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.burnin_frac = j.value("burnin_frac", c.burnin_frac);
  if (j.contains("burnin_count") && !j["burnin_count"].is_null()) {
    c.burnin_count = j["burnin_count"].get<std::size_t>();
  }
  c.bins = j.value("bins", c.bins);
  c.depth = j.value("depth", c.depth);
  c.width = j.value("width", c.width);
  c.rho = j.value("rho", c.rho);
  c.delta = j.value("delta", c.delta);
  c.delta_policy = j.value("delta_policy", std::string("fixed")) == "grid"
                       ? DeltaPolicy::grid
                       : DeltaPolicy::fixed;
  c.kmeans_k = j.value("kmeans_k", c.kmeans_k);
  c.dpp_mass = j.value("dpp_mass", c.dpp_mass);
  c.seed = j.value("seed", c.seed);
  c.precision = j.value("precision", c.precision);
  if (j.contains("range")) {
    const auto& r = j["range"];
    c.range.fixed = r.value("fixed", false);
    c.range.lo = r.value("lo", c.range.lo);
    c.range.hi = r.value("hi", c.range.hi);
    c.range.expand = r.value("expand", c.range.expand);
  }
  c.hyper = j.value("hyper", std::string("refit")) == "freeze"
                ? HyperPolicy::freeze
                : HyperPolicy::refit;
  c.center_order = j.value("center_order", std::string("slot")) == "sorted"
                       ? CenterOrder::sorted
                       : CenterOrder::slot;
  c.literal_alpha = j.value("literal_alpha", false);
  return c;
}

nlohmann::json semantic_json(const RunManifest& m) {
  nlohmann::json d;
  d["path"] = m.dataset.path;
  d["column"] = m.dataset.column;
  d["max_rows"] = m.dataset.max_rows ? nlohmann::json(*m.dataset.max_rows)
                                     : nlohmann::json(nullptr);
  d["drop_missing"] = m.dataset.drop_missing;
  d["quarters"] = m.dataset.quarters;
  d["precision"] = m.dataset.precision ? nlohmann::json(*m.dataset.precision)
                                       : nlohmann::json(nullptr);
  nlohmann::json methods = nlohmann::json::array();
  for (const Method x : m.methods) methods.push_back(to_string(x));
  nlohmann::json j;
  j["dataset"] = d;
  j["config"] = config_json(m.config);
  j["methods"] = methods;
  j["one_pass"] = m.one_pass;
  j["representative"] = m.representative;
  return j;
}

}  // namespace

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j = semantic_json(m);
  j["output"] = m.output;
  j["trace"] = m.trace;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    const auto& d = j.at("dataset");
    m.dataset.path = d.value("path", std::string());
    m.dataset.column = d.value("column", m.dataset.column);
    if (d.contains("max_rows") && !d["max_rows"].is_null()) {
      m.dataset.max_rows = d["max_rows"].get<std::size_t>();
    }
    m.dataset.drop_missing = d.value("drop_missing", true);
    m.dataset.quarters = d.value("quarters", false);
    if (d.contains("precision") && !d["precision"].is_null()) {
      m.dataset.precision = d["precision"].get<int>();
    }
    m.config = config_from_json(j.value("config", nlohmann::json::object()));
    for (const auto& name : j.value("methods", nlohmann::json::array())) {
      const auto meth = parse_method(name.get<std::string>());
      if (!meth) throw InvalidConfig("unknown method " + name.dump());
      m.methods.push_back(*meth);
    }
    m.one_pass = j.value("one_pass", true);
    m.representative = j.value("representative", false);
    m.output = j.value("output", std::string());
    m.trace = j.value("trace", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("bad manifest: ") + e.what());
  }
  return m;
}

std::string config_hash(const RunManifest& m) {
  // nlohmann::json keeps object keys sorted, so the dump is canonical.
  const std::uint64_t h = fnv1a64(semantic_json(m).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- report -----------------------------------------------------------------

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "dataset,segment,method,mode,n_total,n_scored,cpe_mean,cpe_sum,seed,"
         "config_hash\n";
  for (const ReportRow& r : rows) {
    out << r.dataset << ',' << r.segment << ',' << to_string(r.result.method)
        << ',' << to_string(r.result.mode) << ',' << r.result.n_total << ','
        << r.result.n_scored << ',' << fmt_num(r.result.ledger.cpe_mean) << ','
        << fmt_num(r.result.ledger.cpe_sum) << ',' << r.seed << ','
        << r.config_hash << '\n';
  }
}

void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows) {
  using Key = std::pair<std::string, std::string>;  // segment, mode
  std::vector<Key> order;
  std::map<Key, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rows) {
    Key key{r.segment, std::string(to_string(r.result.mode))};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const char* which : {"cpe_mean", "cpe_sum"}) {
    const bool use_mean = std::string(which) == "cpe_mean";
    out << which << '\n';
    for (const Key& key : order) {
      const auto& g = groups[key];
      std::vector<double> vals;
      for (const ReportRow* r : g) {
        vals.push_back(use_mean ? r->result.ledger.cpe_mean
                                : r->result.ledger.cpe_sum);
      }
      std::vector<double> sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      out << "  " << key.first << ' ' << key.second << ':';
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::string cell = fmt_num(vals[i]);
        if (vals[i] == sorted[0]) {
          cell = "**" + cell + "**";
        } else if (sorted.size() > 1 && vals[i] == sorted[1]) {
          cell += "*";
        }
        out << "  " << to_string(g[i]->result.method) << '=' << cell;
      }
      out << '\n';
    }
  }
}

namespace {

std::vector<Method> resolve_methods(const std::vector<Method>& requested,
                                   Mode mode) {
  std::vector<Method> out;
  if (requested.empty()) {
    if (mode == Mode::one_pass) {
      out.assign(kOnePassMethods.begin(), kOnePassMethods.end());
    } else {
      out.assign(kAllMethods.begin(), kAllMethods.end());
    }
    return out;
  }
  for (const Method m : requested) {
    if (supports(m, mode)) out.push_back(m);
  }
  return out;
}

std::string dataset_name(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = base.rfind('.');
  if (dot != std::string::npos && dot > 0) base.erase(dot);
  return base.empty() ? "stream" : base;
}

}  // namespace

std::vector<ReportRow> execute(const RunManifest& m, RunOptions options) {
  const ColumnData data = read_column(m.dataset);
  ExperimentConfig cfg = m.config;
  cfg.precision = m.dataset.precision.value_or(data.decimals);
  cfg.validate();

  std::vector<std::pair<std::string, std::vector<double>>> segments;
  if (m.dataset.quarters) {
    auto parts = quarter_split(data.values);
    for (std::size_t q = 0; q < parts.size(); ++q) {
      segments.emplace_back("q" + std::to_string(q + 1), std::move(parts[q]));
    }
  } else {
    segments.emplace_back("all", data.values);
  }

  const std::string name = dataset_name(m.dataset.path);
  const std::string hash = config_hash(m);
  std::vector<ReportRow> rows;
  for (const auto& [segment, values] : segments) {
    for (const Mode mode : {Mode::one_pass, Mode::representative}) {
      if (mode == Mode::one_pass && !m.one_pass) continue;
      if (mode == Mode::representative && !m.representative) continue;
      const auto methods = resolve_methods(m.methods, mode);
      if (methods.empty()) continue;
      const auto results = mode == Mode::one_pass
                               ? run_one_pass(values, methods, cfg, options)
                               : run_representative(values, methods, cfg, options);
      for (const MethodResult& r : results) {
        rows.push_back(ReportRow{name, segment, r, cfg.seed, hash});
      }
    }
  }
  return rows;
}

// ---- command line -----------------------------------------------------------

namespace {

void write_trace(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write " + path);
  out << "segment,method,mode,index,y,prediction,abs_error\n";
  for (const ReportRow& r : rows) {
    for (const StepRecord& s : r.result.trace) {
      out << r.segment << ',' << to_string(r.result.method) << ','
          << to_string(r.result.mode) << ',' << s.index << ',' << fmt_num(s.y)
          << ',' << fmt_num(s.prediction) << ','
          << fmt_num(std::abs(s.y - s.prediction)) << '\n';
    }
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string valid_method_list() {
  std::string s = "all";
  for (const Method m : kAllMethods) s += ", " + std::string(to_string(m));
  return s;
}

std::vector<Method> parse_method_list(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") return {};
    const auto m = parse_method(item);
    if (!m) {
      throw UsageError("unknown method '" + item +
                       "'; valid methods: " + valid_method_list());
    }
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw UsageError("empty method list");
  return out;
}

int finish(const RunManifest& m, std::ostream& out, const std::string& save_to) {
  if (!save_to.empty()) {
    std::ofstream mf(save_to, std::ios::binary);
    if (!mf) throw IngestionError("cannot write " + save_to);
    mf << to_json(m).dump(2) << '\n';
  }
  RunOptions options;
  options.keep_trace = !m.trace.empty();
  const auto rows = execute(m, options);
  if (m.output.empty()) {
    write_report_csv(out, rows);
  } else {
    std::ofstream csv(m.output, std::ios::binary);
    if (!csv) throw IngestionError("cannot write " + m.output);
    write_report_csv(csv, rows);
  }
  if (!m.trace.empty()) write_trace(m.trace, rows);
  write_report_table(out, rows);
  for (const ReportRow& r : rows) {
    if (r.result.fallbacks > 0) {
      out << "note: " << to_string(r.result.method) << ' ' << r.segment
          << " used the snapshot mean on " << r.result.fallbacks << " steps\n";
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Streaming point prediction benchmark"};
  app.require_subcommand(1);

  RunManifest m;
  std::string methods_text = "all";
  std::string mode_text = "onepass";
  std::string hyper_text = "refit";
  std::string order_text = "slot";
  std::string delta_policy_text = "fixed";
  std::optional<double> delta2;
  std::optional<double> range_lo;
  std::optional<double> range_hi;
  std::size_t max_rows = 0;
  int precision = -1;
  std::string save_manifest;

  auto* run = app.add_subcommand("run", "run an experiment on one CSV column");
  run->add_option("--data", m.dataset.path, "CSV file")->required();
  run->add_option("--column", m.dataset.column, "column name")->capture_default_str();
  run->add_option("--max-rows", max_rows, "keep the first N usable rows");
  run->add_flag("--drop-missing,!--keep-missing", m.dataset.drop_missing,
                "skip blank or non-numeric cells (default on)");
  run->add_flag("--quarters", m.dataset.quarters, "also split into four segments");
  run->add_option("--methods", methods_text, "comma list or 'all'")->capture_default_str();
  run->add_option("--mode", mode_text, "onepass|representative|both")
      ->check(CLI::IsMember({"onepass", "representative", "both"}))
      ->capture_default_str();
  run->add_option("--burnin-frac", m.config.burnin_frac)->capture_default_str();
  run->add_option("--k-intervals", m.config.bins)->capture_default_str();
  run->add_option("--depth", m.config.depth)->capture_default_str();
  run->add_option("--width", m.config.width)->capture_default_str();
  run->add_option("--rho", m.config.rho)->capture_default_str();
  run->add_option("--delta", m.config.delta, "bias scale delta")->capture_default_str();
  run->add_option("--delta2", delta2, "bias variance ratio delta^2 (overrides --delta)");
  run->add_option("--delta-policy", delta_policy_text, "fixed|grid")
      ->check(CLI::IsMember({"fixed", "grid"}))
      ->capture_default_str();
  run->add_option("--kmeans-k", m.config.kmeans_k)->capture_default_str();
  run->add_option("--dpp-mass", m.config.dpp_mass)->capture_default_str();
  run->add_option("--hyper", hyper_text, "refit|freeze")
      ->check(CLI::IsMember({"refit", "freeze"}))
      ->capture_default_str();
  run->add_option("--center-order", order_text, "slot|sorted")
      ->check(CLI::IsMember({"slot", "sorted"}))
      ->capture_default_str();
  run->add_option("--precision", precision, "decimal places for DP ties");
  run->add_option("--range-lo", range_lo, "fixed sketch lower bound");
  run->add_option("--range-hi", range_hi, "fixed sketch upper bound");
  run->add_flag("--literal-alpha", m.config.literal_alpha,
                "use S2 instead of S2^2 in the alpha numerator");
  run->add_option("--seed", m.config.seed)->capture_default_str();
  run->add_option("--output", m.output, "report CSV path");
  run->add_option("--trace", m.trace, "per-step prediction dump");
  run->add_option("--save-manifest", save_manifest, "write the run manifest as JSON");

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run a saved manifest");
  replay->add_option("manifest", manifest_path)->required();
  replay->add_option("--output", m.output, "override the report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return 2;
  }

  try {
    if (replay->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) {
        err << "error: cannot open " << manifest_path << '\n';
        return 1;
      }
      const std::string override_output = m.output;
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        err << "error: bad manifest: " << e.what() << '\n';
        return 1;
      }
      m = manifest_from_json(j);
      if (!override_output.empty()) m.output = override_output;
      return finish(m, out, "");
    }

    try {
      m.methods = parse_method_list(methods_text);
      m.one_pass = mode_text != "representative";
      m.representative = mode_text != "onepass";
      if (mode_text == "onepass") {
        for (const Method x : m.methods) {
          if (!supports(x, Mode::one_pass)) {
            throw UsageError(std::string(to_string(x)) +
                             " needs --mode representative or both");
          }
        }
      }
      if (max_rows > 0) m.dataset.max_rows = max_rows;
      if (precision >= 0) m.dataset.precision = precision;
      if (delta2) {
        if (!(*delta2 > 0.0)) throw UsageError("--delta2 must be positive");
        m.config.delta = std::sqrt(*delta2);
      }
      m.config.delta_policy =
          delta_policy_text == "grid" ? DeltaPolicy::grid : DeltaPolicy::fixed;
      m.config.hyper = hyper_text == "freeze" ? HyperPolicy::freeze
                                              : HyperPolicy::refit;
      m.config.center_order = order_text == "sorted" ? CenterOrder::sorted
                                                     : CenterOrder::slot;
      if (range_lo || range_hi) {
        if (!range_lo || !range_hi) {
          throw UsageError("--range-lo and --range-hi go together");
        }
        m.config.range.fixed = true;
        m.config.range.lo = *range_lo;
        m.config.range.hi = *range_hi;
      }
      m.dataset.validate();
      m.config.validate();
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    } catch (const InvalidConfig& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    return finish(m, out, save_manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace streampred
