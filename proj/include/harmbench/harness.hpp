#pragma once

// Manifest-driven batch evaluation: one row per (triplet, channel), per-row failure capture,
// per-group mean/std summaries and csv/json/markdown reports.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "harmbench/anatomy.hpp"
#include "harmbench/csv.hpp"
#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"
#include "harmbench/nifti.hpp"
#include "harmbench/reference_metrics.hpp"
#include "harmbench/stats.hpp"
#include "harmbench/wasserstein.hpp"

namespace harmbench {

inline constexpr const char* kVersion = "0.1.0";

struct TripletRecord {
  std::string id;
  std::filesystem::path input_path;
  std::filesystem::path target_path;
  std::filesystem::path pred_path;
  std::optional<std::filesystem::path> gt_path;
  std::optional<std::filesystem::path> seg_input_path;
  std::optional<std::filesystem::path> seg_pred_path;
  std::string site_in = "-";
  std::string site_out = "-";
  std::optional<std::size_t> channel;
};

namespace detail {

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::UnreadableFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<std::size_t> parse_channel(const std::string& s, const std::string& id) {
  const auto t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (*end != '\0' || v < 0) throw Error(Errc::InvalidArgument, "record '" + id + "': bad channel '" + t + "'");
  return static_cast<std::size_t>(v);
}

inline TripletRecord make_record(const std::map<std::string, std::string>& f, const std::filesystem::path& base,
                                 std::size_t index) {
  auto get = [&](const char* k) -> std::string {
    auto it = f.find(k);
    return it == f.end() ? std::string{} : trim(it->second);
  };
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  TripletRecord r;
  r.id = get("id");
  if (r.id.empty()) throw Error(Errc::MissingColumn, "record " + std::to_string(index) + " has an empty id");
  for (const char* k : {"input_path", "target_path", "pred_path"})
    if (get(k).empty()) throw Error(Errc::MissingColumn, "record '" + r.id + "' has an empty " + k);
  r.input_path = resolve(get("input_path"));
  r.target_path = resolve(get("target_path"));
  r.pred_path = resolve(get("pred_path"));
  if (auto v = get("gt_path"); !v.empty()) r.gt_path = resolve(v);
  if (auto v = get("seg_input_path"); !v.empty()) r.seg_input_path = resolve(v);
  if (auto v = get("seg_pred_path"); !v.empty()) r.seg_pred_path = resolve(v);
  if (r.seg_input_path.has_value() != r.seg_pred_path.has_value())
    throw Error(Errc::MissingColumn, "record '" + r.id + "' needs both seg_input_path and seg_pred_path");
  if (auto v = get("site_in"); !v.empty()) r.site_in = v;
  if (auto v = get("site_out"); !v.empty()) r.site_out = v;
  r.channel = parse_channel(get("channel"), r.id);
  return r;
}

inline const std::vector<std::string>& required_manifest_columns() {
  static const std::vector<std::string> cols{"id", "input_path", "target_path", "pred_path"};
  return cols;
}

}  // namespace detail

/// Reads a CSV (with header) or JSON-array manifest. Relative paths resolve against the
/// manifest's directory.
inline std::vector<TripletRecord> load_manifest(const std::filesystem::path& path) {
  const std::string text = detail::read_text(path);
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::vector<std::map<std::string, std::string>> entries;

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::UnreadableFile, path.string() + ": " + e.what());
    }
    for (const auto& obj : doc) {
      if (!obj.is_object()) throw Error(Errc::UnreadableFile, "manifest entries must be objects");
      std::map<std::string, std::string> f;
      for (const auto& [k, v] : obj.items()) {
        if (v.is_string()) f[k] = v.get<std::string>();
        else if (v.is_number_integer()) f[k] = std::to_string(v.get<long long>());
        else if (!v.is_null()) throw Error(Errc::UnreadableFile, "manifest field '" + k + "' must be a string");
      }
      for (const auto& col : detail::required_manifest_columns())
        if (!f.contains(col)) throw Error(Errc::MissingColumn, "manifest entry lacks '" + col + "'");
      entries.push_back(std::move(f));
    }
  } else {
    const auto table = csv::parse(text);
    for (const auto& col : detail::required_manifest_columns())
      if (table.column(col) < 0) throw Error(Errc::MissingColumn, "manifest lacks column '" + col + "'");
    for (const auto& row : table.rows) {
      std::map<std::string, std::string> f;
      for (std::size_t c = 0; c < table.header.size(); ++c) f[table.header[c]] = row[c];
      entries.push_back(std::move(f));
    }
  }

  std::vector<TripletRecord> records;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto r = detail::make_record(entries[i], base, i);
    if (!seen.insert(r.id).second) throw Error(Errc::DuplicateId, "duplicate record id '" + r.id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

struct EvaluationConfig {
  ForegroundPolicy policy;
  WdOptions wd;
  double tol = 0.05;
  SsimParams ssim;
  ApOptions ap;
  Legend labels;
  std::size_t workers = 1;
};

struct EvaluationRow {
  std::string id;
  std::string site_in;
  std::string site_out;
  std::optional<std::size_t> channel;
  bool ok = false;
  std::string error;
  std::optional<WdPair> wd;
  std::optional<Verdict> verdict;
  std::optional<ApReport> ap;
  std::optional<PairedMetricRow> reference;
};

namespace detail {

inline EvaluationRow blank_row(const TripletRecord& rec, std::optional<std::size_t> channel) {
  EvaluationRow row;
  row.id = rec.id;
  row.site_in = rec.site_in;
  row.site_out = rec.site_out;
  row.channel = channel;
  return row;
}

inline EvaluationRow evaluate_channel(const TripletRecord& rec, std::optional<std::size_t> channel,
                                      const VoxelGrid& input, const VoxelGrid& target, const VoxelGrid& pred,
                                      const std::optional<VoxelGrid>& gt, const std::optional<ApReport>& ap,
                                      const EvaluationConfig& cfg) {
  EvaluationRow row = blank_row(rec, channel);
  try {
    const std::size_t c = channel.value_or(0);
    auto pick = [&](const VoxelGrid& g) { return g.channels() == 1 ? g : g.channel(c); };
    const auto i = extract_foreground(pick(input), cfg.policy);
    const auto t = extract_foreground(pick(target), cfg.policy);
    const auto p = extract_foreground(pick(pred), cfg.policy);
    row.wd = nwd(i, t, p, cfg.wd);
    row.verdict = classify(*row.wd, cfg.tol).kind;
    if (gt) row.reference = paired_metrics(pick(pred), pick(*gt), cfg.policy, cfg.ssim);
    row.ap = ap;
    row.ok = true;
  } catch (const std::exception& e) {
    row = blank_row(rec, channel);
    row.error = e.what();
  }
  return row;
}

/// One record; several rows when an unpinned record has multichannel volumes.
inline std::vector<EvaluationRow> evaluate_record(const TripletRecord& rec, const EvaluationConfig& cfg) {
  try {
    const auto input = load_volume(rec.input_path);
    const auto target = load_volume(rec.target_path);
    const auto pred = load_volume(rec.pred_path);
    std::optional<VoxelGrid> gt;
    if (rec.gt_path) gt = load_volume(*rec.gt_path);
    const std::size_t channels = input.channels();
    if (target.channels() != channels || pred.channels() != channels || (gt && gt->channels() != channels))
      throw Error(Errc::DimsMismatch, "input, target, prediction and ground truth differ in channel count");
    if (rec.channel && *rec.channel >= channels)
      throw Error(Errc::InvalidArgument, "channel " + std::to_string(*rec.channel) + " out of range");

    std::optional<ApReport> ap;
    if (rec.seg_input_path && rec.seg_pred_path) {
      ap = anatomy_preservation(load_label_volume(*rec.seg_input_path, cfg.labels),
                                load_label_volume(*rec.seg_pred_path, cfg.labels), cfg.ap);
      for (const auto& w : ap->warnings) warn("record '" + rec.id + "': " + w);
    }

    std::vector<EvaluationRow> rows;
    if (rec.channel) {
      rows.push_back(evaluate_channel(rec, rec.channel, input, target, pred, gt, ap, cfg));
    } else if (channels == 1) {
      rows.push_back(evaluate_channel(rec, std::nullopt, input, target, pred, gt, ap, cfg));
    } else {
      for (std::size_t c = 0; c < channels; ++c)
        rows.push_back(evaluate_channel(rec, c, input, target, pred, gt, ap, cfg));
    }
    return rows;
  } catch (const std::exception& e) {
    EvaluationRow row = blank_row(rec, rec.channel);
    row.error = e.what();
    return {row};
  }
}

}  // namespace detail

/// Evaluates every record independently, up to `cfg.workers` at a time. Failures are
/// recorded in the row; rows come back in manifest order.
inline std::vector<EvaluationRow> evaluate_all(const std::vector<TripletRecord>& records,
                                               const EvaluationConfig& cfg) {
  std::vector<std::vector<EvaluationRow>> slots(records.size());
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(records.size(), 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < records.size(); ++k) slots[k] = detail::evaluate_record(records[k], cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < records.size(); k = next++)
          slots[k] = detail::evaluate_record(records[k], cfg);
      });
  }
  std::vector<EvaluationRow> rows;
  for (auto& s : slots)
    for (auto& r : s) rows.push_back(std::move(r));
  return rows;
}

inline std::size_t count_ok(const std::vector<EvaluationRow>& rows) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.ok; }));
}

// ---------------------------------------------------------------------------------------
// Per-row results file

/// Shortest text that parses back to the same double; "inf"/"-inf"/"nan" for non-finite.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double parse_double(const std::string& s) {
  const auto t = detail::trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw Error(Errc::UnreadableFile, "not a number: '" + s + "'");
  return v;
}

inline const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols{"id",     "site_in", "site_out", "channel",       "status",
                                             "error",  "wd_ip",   "wd_tp",    "wd_it",         "nwd_ip",
                                             "nwd_tp", "verdict", "ap",       "ap_structures", "ssim",
                                             "psnr",   "mae",     "mse"};
  return cols;
}

inline void write_results(std::ostream& os, const std::vector<EvaluationRow>& rows) {
  csv::write_row(os, results_columns());
  for (const auto& r : rows) {
    std::vector<std::string> f{r.id, r.site_in, r.site_out, r.channel ? std::to_string(*r.channel) : "",
                               r.ok ? "ok" : "error", r.error};
    if (r.wd) {
      for (double v : {r.wd->wd_ip, r.wd->wd_tp, r.wd->wd_it, r.wd->nwd_ip, r.wd->nwd_tp})
        f.push_back(format_double(v));
    } else {
      f.insert(f.end(), 5, "");
    }
    f.push_back(r.verdict ? std::string(verdict_name(*r.verdict)) : "");
    if (r.ap) {
      f.push_back(format_double(r.ap->mean_ap));
      std::string detail;
      for (const auto& s : r.ap->per_structure) {
        if (!detail.empty()) detail += ';';
        detail += s.name + "=" + format_double(s.ap);
      }
      f.push_back(detail);
    } else {
      f.insert(f.end(), 2, "");
    }
    if (r.reference) {
      for (double v : {r.reference->ssim, r.reference->psnr_db, r.reference->mae, r.reference->mse})
        f.push_back(format_double(v));
    } else {
      f.insert(f.end(), 4, "");
    }
    csv::write_row(os, f);
  }
}

inline void write_results(const std::filesystem::path& path, const std::vector<EvaluationRow>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::IoFailure, "cannot write " + path.string());
  write_results(os, rows);
  if (!os) throw Error(Errc::IoFailure, "write error on " + path.string());
}

/// Inverse of write_results; per-structure volumes are not stored and read back as zero.
inline std::vector<EvaluationRow> parse_results(const std::string& text) {
  const auto table = csv::parse(text);
  for (const auto& col : results_columns())
    if (table.column(col) < 0) throw Error(Errc::MissingColumn, "results lack column '" + col + "'");
  std::vector<EvaluationRow> rows;
  for (const auto& rec : table.rows) {
    auto get = [&](const char* k) { return rec[static_cast<std::size_t>(table.column(k))]; };
    EvaluationRow r;
    r.id = get("id");
    r.site_in = get("site_in");
    r.site_out = get("site_out");
    r.channel = detail::parse_channel(get("channel"), r.id);
    r.ok = get("status") == "ok";
    r.error = get("error");
    if (!get("nwd_ip").empty()) {
      WdPair w;
      w.wd_ip = parse_double(get("wd_ip"));
      w.wd_tp = parse_double(get("wd_tp"));
      w.wd_it = parse_double(get("wd_it"));
      w.nwd_ip = parse_double(get("nwd_ip"));
      w.nwd_tp = parse_double(get("nwd_tp"));
      r.wd = w;
    }
    if (!get("verdict").empty()) r.verdict = parse_verdict(get("verdict"));
    if (!get("ap").empty()) {
      ApReport ap;
      ap.mean_ap = parse_double(get("ap"));
      std::stringstream ss(get("ap_structures"));
      std::string item;
      while (std::getline(ss, item, ';')) {
        const auto eq = item.rfind('=');
        if (eq == std::string::npos) continue;
        StructureAp s;
        s.name = item.substr(0, eq);
        s.ap = parse_double(item.substr(eq + 1));
        ap.per_structure.push_back(s);
      }
      r.ap = ap;
    }
    if (!get("ssim").empty()) {
      PairedMetricRow m;
      m.ssim = parse_double(get("ssim"));
      m.psnr_db = parse_double(get("psnr"));
      m.mae = parse_double(get("mae"));
      m.mse = parse_double(get("mse"));
      r.reference = m;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<EvaluationRow> read_results(const std::filesystem::path& path) {
  return parse_results(detail::read_text(path));
}

// ---------------------------------------------------------------------------------------
// Summaries

enum class GroupBy { Direction, SiteOut, SiteIn, All };

inline GroupBy parse_group_by(const std::string& s) {
  if (s == "direction") return GroupBy::Direction;
  if (s == "site_out") return GroupBy::SiteOut;
  if (s == "site_in") return GroupBy::SiteIn;
  if (s == "all") return GroupBy::All;
  throw Error(Errc::InvalidArgument, "unknown group key '" + s + "'");
}

struct MetricSummary {
  std::string name;
  double mean = std::nan("");  // NaN when n == 0
  double std = std::nan("");
  std::size_t n = 0;
  std::size_t sentinels = 0;
};

struct SummaryTable {
  std::string group;
  std::vector<MetricSummary> metrics;  // canonical order, only metrics with data

  const MetricSummary* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
};

/// Canonical metric order and the column titles used in markdown reports.
inline const std::vector<std::pair<std::string, std::string>>& metric_columns() {
  static const std::vector<std::pair<std::string, std::string>> cols{
      {"ssim", "SSIM"},         {"psnr", "PSNR"},         {"mae", "MAE"},     {"mse", "MSE"},
      {"nwd_ip", "nWD(i,p)"}, {"nwd_tp", "nWD(t,p)"}, {"ap", "AP(i,p)"},
  };
  return cols;
}

inline std::optional<double> metric_value(const EvaluationRow& r, const std::string& name) {
  if (name == "nwd_ip" && r.wd) return r.wd->nwd_ip;
  if (name == "nwd_tp" && r.wd) return r.wd->nwd_tp;
  if (name == "ap" && r.ap) return r.ap->mean_ap;
  if (r.reference) {
    if (name == "ssim") return r.reference->ssim;
    if (name == "psnr") return r.reference->psnr_db;
    if (name == "mae") return r.reference->mae;
    if (name == "mse") return r.reference->mse;
  }
  return std::nullopt;
}

inline std::string group_key(const EvaluationRow& r, GroupBy by) {
  std::string key;
  switch (by) {
    case GroupBy::Direction: key = r.site_in + "→" + r.site_out; break;
    case GroupBy::SiteOut: key = r.site_out; break;
    case GroupBy::SiteIn: key = r.site_in; break;
    case GroupBy::All: key = "all"; break;
  }
  if (r.channel) key += " [ch" + std::to_string(*r.channel) + "]";
  return key;
}

/// Mean/std per metric per group over successful rows; groups in lexicographic order.
inline std::vector<SummaryTable> summarize(const std::vector<EvaluationRow>& rows, GroupBy by = GroupBy::Direction) {
  std::map<std::string, std::vector<const EvaluationRow*>> groups;
  for (const auto& r : rows)
    if (r.ok) groups[group_key(r, by)].push_back(&r);
  if (groups.empty()) throw Error(Errc::NoSuccessfulRows, "no successful rows to summarize");
  std::vector<SummaryTable> tables;
  for (const auto& [key, members] : groups) {
    SummaryTable t{key, {}};
    for (const auto& [name, _] : metric_columns()) {
      std::vector<double> values;
      for (const auto* r : members)
        if (auto v = metric_value(*r, name)) values.push_back(*v);
      if (values.empty()) continue;
      MetricSummary m{name};
      try {
        const auto ms = mean_std(values);
        m.mean = ms.mean;
        m.std = ms.std;
        m.n = ms.n;
        m.sentinels = ms.sentinels;
      } catch (const Error& e) {
        if (e.code() != Errc::AllSentinels) throw;
        m.sentinels = values.size();
      }
      t.metrics.push_back(m);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

/// "0.906 ± 0.038"
inline std::string format_cell(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", mean, std);
  return buf;
}

// ---------------------------------------------------------------------------------------
// Reports

enum class ReportFormat { Csv, Json, Markdown };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw Error(Errc::UnsupportedFormat, "unsupported report format '" + s + "'");
}

struct ReportMeta {
  std::string version = kVersion;
  nlohmann::json config = nlohmann::json::object();
};

namespace detail {

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline std::string markdown_cell(const MetricSummary* m) {
  if (!m) return "n/a";
  if (m->n == 0) return "+inf (" + std::to_string(m->sentinels) + ")";
  std::string cell = format_cell(m->mean, m->std);
  if (m->sentinels) cell += " (+inf: " + std::to_string(m->sentinels) + ")";
  return cell;
}

}  // namespace detail

inline std::string emit_report(const std::vector<SummaryTable>& tables, ReportFormat fmt, const ReportMeta& meta = {}) {
  if (tables.empty()) throw Error(Errc::NoSuccessfulRows, "nothing to report");
  std::ostringstream os;
  switch (fmt) {
    case ReportFormat::Json: {
      nlohmann::ordered_json doc;
      doc["tool"] = "harmbench";
      doc["version"] = meta.version;
      doc["config"] = meta.config;
      doc["tables"] = nlohmann::ordered_json::array();
      for (const auto& t : tables) {
        nlohmann::ordered_json jt;
        jt["group"] = t.group;
        jt["metrics"] = nlohmann::ordered_json::array();
        for (const auto& m : t.metrics) {
          nlohmann::ordered_json jm;
          jm["name"] = m.name;
          jm["mean"] = detail::number_or_null(m.mean);
          jm["std"] = detail::number_or_null(m.std);
          jm["n"] = m.n;
          jm["sentinels"] = m.sentinels;
          jt["metrics"].push_back(jm);
        }
        doc["tables"].push_back(jt);
      }
      os << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::Csv: {
      os << "# harmbench " << meta.version << " config=" << meta.config.dump() << '\n';
      csv::write_row(os, {"group", "metric", "mean", "std", "n", "sentinels"});
      for (const auto& t : tables)
        for (const auto& m : t.metrics)
          csv::write_row(os, {t.group, m.name, format_double(m.mean), format_double(m.std), std::to_string(m.n),
                              std::to_string(m.sentinels)});
      break;
    }
    case ReportFormat::Markdown: {
      std::vector<std::pair<std::string, std::string>> cols;
      for (const auto& c : metric_columns())
        if (std::any_of(tables.begin(), tables.end(), [&](const auto& t) { return t.find(c.first) != nullptr; }))
          cols.push_back(c);
      os << "<!-- harmbench " << meta.version << " config: " << meta.config.dump() << " -->\n\n";
      os << "| |";
      for (const auto& c : cols) os << ' ' << c.second << " |";
      os << "\n|---|";
      for (std::size_t k = 0; k < cols.size(); ++k) os << "---|";
      os << '\n';
      for (const auto& t : tables) {
        os << "| " << t.group << " |";
        for (const auto& c : cols) os << ' ' << detail::markdown_cell(t.find(c.first)) << " |";
        os << '\n';
      }
      break;
    }
  }
  return os.str();
}

inline std::vector<SummaryTable> parse_report_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  std::vector<SummaryTable> tables;
  for (const auto& jt : doc.at("tables")) {
    SummaryTable t{jt.at("group").get<std::string>(), {}};
    for (const auto& jm : jt.at("metrics")) {
      MetricSummary m{jm.at("name").get<std::string>()};
      if (!jm.at("mean").is_null()) m.mean = jm.at("mean").get<double>();
      if (!jm.at("std").is_null()) m.std = jm.at("std").get<double>();
      m.n = jm.at("n").get<std::size_t>();
      m.sentinels = jm.at("sentinels").get<std::size_t>();
      t.metrics.push_back(m);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

/// Equality treating NaN == NaN, for report round-trips.
inline bool same_tables(const std::vector<SummaryTable>& a, const std::vector<SummaryTable>& b) {
  auto eq = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].group != b[i].group || a[i].metrics.size() != b[i].metrics.size()) return false;
    for (std::size_t k = 0; k < a[i].metrics.size(); ++k) {
      const auto &x = a[i].metrics[k], &y = b[i].metrics[k];
      if (x.name != y.name || !eq(x.mean, y.mean) || !eq(x.std, y.std) || x.n != y.n || x.sentinels != y.sentinels)
        return false;
    }
  }
  return true;
}

}  // namespace harmbench
