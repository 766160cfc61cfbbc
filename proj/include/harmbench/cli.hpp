#pragma once

// `harmbench` command line: wd, ap, refmetrics, corr, evaluate, synth, report.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmbench/anatomy.hpp"
#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"
#include "harmbench/harness.hpp"
#include "harmbench/nifti.hpp"
#include "harmbench/reference_metrics.hpp"
#include "harmbench/stats.hpp"
#include "harmbench/synth.hpp"
#include "harmbench/wasserstein.hpp"

namespace harmbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct GlobalConfig {
  double bg_threshold = 0.0;
  std::string fg_mask;
  std::size_t bins = 4096;
  bool bins_given = false;
  bool exact = false;
  std::size_t exact_cap = std::size_t{1} << 24;
  double tol = 0.05;
  std::size_t window = 7;
  double k1 = 0.01;
  double k2 = 0.03;
  std::size_t workers = 1;
  std::string format = "md";
  std::string group_by = "direction";
  bool json = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["bg_threshold"] = bg_threshold;
    j["fg_mask"] = fg_mask;
    j["wd_mode"] = exact ? "exact" : bins_given ? "binned" : "auto";
    j["bins"] = bins;
    j["exact_cap"] = exact_cap;
    j["tol"] = tol;
    j["ssim_window"] = window;
    j["k1"] = k1;
    j["k2"] = k2;
    j["workers"] = workers;
    j["group_by"] = group_by;
    return j;
  }

  WdOptions wd_options() const {
    WdOptions o;
    o.mode = exact ? WdMode::Exact : bins_given ? WdMode::Binned : WdMode::Auto;
    o.bins = bins;
    o.exact_cap = exact_cap;
    return o;
  }

  SsimParams ssim() const { return {window, k1, k2, 1.0}; }

  ForegroundPolicy policy() const {
    if (fg_mask.empty()) return ForegroundPolicy::above(bg_threshold);
    return ForegroundPolicy::masked(std::make_shared<const LabelVolume>(load_label_volume(fg_mask)));
  }
};

/// "1=GM,2=WM" -> legend.
inline Legend parse_labels(const std::string& spec) {
  Legend legend;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw CLI::ValidationError("--labels", "expected <label>=<name>, got '" + item + "'");
    char* end = nullptr;
    const long label = std::strtol(item.substr(0, eq).c_str(), &end, 10);
    if (*end != '\0' || label <= 0) throw CLI::ValidationError("--labels", "bad label in '" + item + "'");
    legend[static_cast<std::uint32_t>(label)] = item.substr(eq + 1);
  }
  return legend;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

namespace detail {

template <typename T>
bool env_override(const char* name, T& target, std::ostream& err) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return true;
  std::istringstream in(raw);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) {
    err << "error: environment variable " << name << "='" << raw << "' is not a valid value\n";
    return false;
  }
  target = value;
  return true;
}

inline void print_kv(std::ostream& out, const nlohmann::ordered_json& doc) {
  for (const auto& [k, v] : doc.items()) {
    out << k << '\t';
    if (v.is_string()) out << v.get<std::string>();
    else if (v.is_number_float()) out << format_double(v.get<double>());
    else out << v.dump();
    out << '\n';
  }
}

inline nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? nlohmann::ordered_json("nan") : nlohmann::ordered_json(v > 0 ? "inf" : "-inf");
}

inline nlohmann::ordered_json ap_json(const ApReport& r) {
  nlohmann::ordered_json j;
  j["per_structure"] = nlohmann::ordered_json::array();
  for (const auto& s : r.per_structure)
    j["per_structure"].push_back({{"label", s.label},
                                  {"name", s.name},
                                  {"vol_input_mm3", s.vol_input},
                                  {"vol_pred_mm3", s.vol_pred},
                                  {"ap", s.ap}});
  j["mean_ap"] = r.mean_ap;
  j["weighted"] = r.weighted;
  j["negative"] = r.negative;
  return j;
}

inline VoxelGrid single_channel(const VoxelGrid& g, const std::string& what) {
  if (g.channels() != 1)
    throw Error(Errc::InvalidArgument, what + " has " + std::to_string(g.channels()) +
                                           " channels; use `evaluate` for per-channel metrics");
  return g;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  GlobalConfig cfg;
  if (!detail::env_override("HARMBENCH_BG_THRESHOLD", cfg.bg_threshold, err) ||
      !detail::env_override("HARMBENCH_BINS", cfg.bins, err) ||
      !detail::env_override("HARMBENCH_WORKERS", cfg.workers, err))
    return kExitUsage;

  CLI::App app{"Ground-truth-free harmonization metrics for 3-D medical volumes", "harmbench"};
  app.set_version_flag("--version", std::string("harmbench ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--bg-threshold", cfg.bg_threshold, "Foreground is intensity strictly above this value")
      ->check(CLI::Number);
  app.add_option("--fg-mask", cfg.fg_mask, "Label volume whose nonzero voxels define the foreground")
      ->check(CLI::ExistingFile);
  app.add_flag("--json", cfg.json, "Emit a single JSON document on stdout");

  auto add_wd_flags = [&](CLI::App* sub) {
    auto* bins = sub->add_option("--bins", cfg.bins, "Force the binned W1 path with this many bins")
                     ->check(CLI::PositiveNumber);
    sub->add_flag("--exact", cfg.exact, "Force the exact W1 path")->excludes(bins);
    sub->add_option("--exact-cap", cfg.exact_cap, "Sample count above which auto mode bins")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "Verdict band tolerance")->check(CLI::Range(1e-12, 0.5 - 1e-12));
  };
  auto add_ssim_flags = [&](CLI::App* sub) {
    sub->add_option("--window", cfg.window, "SSIM cubic window edge (odd, >= 3)")
        ->check(CLI::Range(3, 1 << 15) & CLI::Validator([](std::string& s) {
                  return std::stoul(s) % 2 == 1 ? std::string{} : std::string("window must be odd");
                }, "ODD"));
    sub->add_option("--k1", cfg.k1, "SSIM K1")->check(CLI::PositiveNumber);
    sub->add_option("--k2", cfg.k2, "SSIM K2")->check(CLI::PositiveNumber);
  };

  // wd
  std::string input, target, pred;
  auto* wd = app.add_subcommand("wd", "Normalized Wasserstein metrics for one triplet");
  wd->add_option("--input", input, "Input image i")->required()->check(CLI::ExistingFile);
  wd->add_option("--target", target, "Target-protocol image t")->required()->check(CLI::ExistingFile);
  wd->add_option("--pred", pred, "Harmonized prediction p")->required()->check(CLI::ExistingFile);
  add_wd_flags(wd);

  // ap
  std::string seg_input, seg_pred, labels;
  bool weighted = false;
  auto* ap = app.add_subcommand("ap", "Anatomy preservation from two label volumes");
  ap->add_option("--seg-input", seg_input, "Segmentation of the input")->required()->check(CLI::ExistingFile);
  ap->add_option("--seg-pred", seg_pred, "Segmentation of the prediction")->required()->check(CLI::ExistingFile);
  ap->add_option("--labels", labels, "Legend, e.g. 1=GM,2=WM");
  ap->add_flag("--weighted", weighted, "Volume-weighted mean over structures");

  // refmetrics
  std::string gt;
  auto* ref = app.add_subcommand("refmetrics", "SSIM/PSNR/MAE/MSE against a ground truth");
  ref->add_option("--pred", pred, "Prediction")->required()->check(CLI::ExistingFile);
  ref->add_option("--gt", gt, "Ground truth")->required()->check(CLI::ExistingFile);
  add_ssim_flags(ref);

  // corr
  std::string in_path, rows_arg = "nwd_ip,nwd_tp,ap", cols_arg = "ssim,psnr,mae,mse";
  auto* corr = app.add_subcommand("corr", "Spearman correlation between metric columns of a results CSV");
  corr->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  corr->add_option("--rows", rows_arg, "Row metrics (comma separated)");
  corr->add_option("--cols", cols_arg, "Column metrics (comma separated)");

  // evaluate
  std::string manifest, out_path;
  std::string report_fmt;
  auto* ev = app.add_subcommand("evaluate", "Batch evaluation over a manifest");
  ev->add_option("--manifest", manifest, "Manifest CSV or JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", out_path, "Per-row results CSV")->required();
  ev->add_option("--report", report_fmt, "Summary format on stdout")
      ->check(CLI::IsMember({"md", "markdown", "csv", "json"}));
  ev->add_option("--workers", cfg.workers, "Concurrent records")->check(CLI::PositiveNumber);
  ev->add_option("--labels", labels, "Legend for segmentations, e.g. 1=GM,2=WM");
  ev->add_flag("--weighted", weighted, "Volume-weighted AP mean");
  ev->add_option("--group-by", cfg.group_by, "Summary grouping")
      ->check(CLI::IsMember({"direction", "site_out", "site_in", "all"}));
  add_wd_flags(ev);
  add_ssim_flags(ev);

  // report
  auto* rep = app.add_subcommand("report", "Summary tables from a results CSV");
  rep->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--format", cfg.format, "md, csv or json")->check(CLI::IsMember({"md", "markdown", "csv", "json"}));
  rep->add_option("--group-by", cfg.group_by, "Summary grouping")
      ->check(CLI::IsMember({"direction", "site_out", "site_in", "all"}));

  // synth
  std::string synth_out;
  synth::DatasetConfig dcfg;
  auto* syn = app.add_subcommand("synth", "Write a synthetic multi-site phantom dataset and manifest");
  syn->add_option("--out", synth_out, "Output directory")->required();
  syn->add_option("--sites", dcfg.sites, "Number of sites")->check(CLI::Range(2, 26 * 27));
  syn->add_option("--n", dcfg.triplets, "Number of triplets")->check(CLI::PositiveNumber);
  syn->add_option("--seed", dcfg.seed, "Generator seed");
  syn->add_option("--size", dcfg.size, "Cubic volume edge in voxels")->check(CLI::Range(8, 512));

  std::vector<std::string> argv_store{"harmbench"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (labels.size()) (void)parse_labels(labels);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  cfg.bins_given = wd->count("--bins") > 0 || ev->count("--bins") > 0;
  const auto meta = ReportMeta{kVersion, cfg.to_json()};

  try {
    if (*wd) {
      const auto policy = cfg.policy();
      const auto i = extract_foreground(detail::single_channel(load_volume(input), "input"), policy);
      const auto t = extract_foreground(detail::single_channel(load_volume(target), "target"), policy);
      const auto p = extract_foreground(detail::single_channel(load_volume(pred), "prediction"), policy);
      const auto pair = nwd(i, t, p, cfg.wd_options());
      nlohmann::ordered_json doc;
      doc["wd_ip"] = pair.wd_ip;
      doc["wd_tp"] = pair.wd_tp;
      doc["wd_it"] = pair.wd_it;
      doc["nwd_ip"] = pair.nwd_ip;
      doc["nwd_tp"] = pair.nwd_tp;
      doc["verdict"] = verdict_name(classify(pair, cfg.tol).kind);
      doc["mode"] = pair.binned ? "binned" : "exact";
      if (cfg.json) out << doc.dump(2) << '\n';
      else detail::print_kv(out, doc);
      return kExitOk;
    }

    if (*ap) {
      const Legend legend = labels.empty() ? Legend{} : parse_labels(labels);
      const auto report =
          anatomy_preservation(load_label_volume(seg_input, legend), load_label_volume(seg_pred, legend), {weighted});
      for (const auto& w : report.warnings) warn(w);
      for (const auto& n : report.negative) warn("structure '" + n + "' more than doubled in volume (AP < 0)");
      if (cfg.json) {
        out << detail::ap_json(report).dump(2) << '\n';
      } else {
        out << "structure\tvol_input_mm3\tvol_pred_mm3\tap\n";
        for (const auto& s : report.per_structure)
          out << s.name << '\t' << format_double(s.vol_input) << '\t' << format_double(s.vol_pred) << '\t'
              << format_double(s.ap) << '\n';
        out << (weighted ? "weighted_mean" : "mean") << "\t\t\t" << format_double(report.mean_ap) << '\n';
      }
      return kExitOk;
    }

    if (*ref) {
      const auto row = paired_metrics(detail::single_channel(load_volume(pred), "prediction"),
                                      detail::single_channel(load_volume(gt), "ground truth"), cfg.policy(),
                                      cfg.ssim());
      nlohmann::ordered_json doc;
      doc["ssim"] = row.ssim;
      doc["psnr"] = detail::number(row.psnr_db);
      doc["mae"] = row.mae;
      doc["mse"] = row.mse;
      doc["foreground_voxels"] = row.foreground_voxels;
      doc["ssim_windows"] = row.ssim_windows;
      if (cfg.json) out << doc.dump(2) << '\n';
      else detail::print_kv(out, doc);
      return kExitOk;
    }

    if (*corr) {
      const auto table = csv::parse(harmbench::detail::read_text(in_path));
      const int status_col = table.column("status");
      auto series_for = [&](const std::string& name) {
        const int c = table.column(name);
        if (c < 0) throw Error(Errc::MissingColumn, "results lack column '" + name + "'");
        MetricSeries s{name, {}};
        for (const auto& row : table.rows) {
          if (status_col >= 0 && row[static_cast<std::size_t>(status_col)] != "ok") continue;
          const auto& cell = row[static_cast<std::size_t>(c)];
          s.values.push_back(cell.empty() ? std::nan("") : parse_double(cell));
        }
        return s;
      };
      std::vector<MetricSeries> rs, cs;
      for (const auto& n : split_list(rows_arg)) rs.push_back(series_for(n));
      for (const auto& n : split_list(cols_arg)) cs.push_back(series_for(n));
      const auto m = correlation_matrix(rs, cs);
      if (cfg.json) {
        nlohmann::ordered_json doc;
        doc["rows"] = m.row_names;
        doc["cols"] = m.col_names;
        doc["rho"] = nlohmann::ordered_json::array();
        for (const auto& line : m.rho) {
          auto jl = nlohmann::ordered_json::array();
          for (double v : line) jl.push_back(std::isnan(v) ? nlohmann::ordered_json() : nlohmann::ordered_json(v));
          doc["rho"].push_back(jl);
        }
        out << doc.dump(2) << '\n';
      } else {
        out << "metric";
        for (const auto& c : m.col_names) out << '\t' << c;
        out << '\n';
        for (std::size_t r = 0; r < m.row_names.size(); ++r) {
          out << m.row_names[r];
          char buf[32];
          for (double v : m.rho[r]) {
            std::snprintf(buf, sizeof buf, "%.3f", v);
            out << '\t' << (std::isnan(v) ? "nan" : buf);
          }
          out << '\n';
        }
      }
      return kExitOk;
    }

    if (*ev) {
      EvaluationConfig ecfg;
      ecfg.policy = cfg.policy();
      ecfg.wd = cfg.wd_options();
      ecfg.tol = cfg.tol;
      ecfg.ssim = cfg.ssim();
      ecfg.ap.weighted = weighted;
      if (!labels.empty()) ecfg.labels = parse_labels(labels);
      ecfg.workers = cfg.workers;
      const auto records = load_manifest(manifest);
      const auto rows = evaluate_all(records, ecfg);
      write_results(out_path, rows);
      for (const auto& r : rows)
        if (!r.ok) err << "record '" << r.id << "' failed: " << r.error << '\n';
      if (count_ok(rows) == 0) {
        err << "error: every record failed\n";
        return kExitData;
      }
      const std::string fmt = cfg.json ? "json" : report_fmt.empty() ? "md" : report_fmt;
      out << emit_report(summarize(rows, parse_group_by(cfg.group_by)), parse_report_format(fmt), meta);
      return kExitOk;
    }

    if (*rep) {
      const auto rows = read_results(in_path);
      const std::string fmt = cfg.json ? "json" : cfg.format;
      out << emit_report(summarize(rows, parse_group_by(cfg.group_by)), parse_report_format(fmt), meta);
      return kExitOk;
    }

    if (*syn) {
      const auto path = synth::write_dataset(synth_out, dcfg);
      if (cfg.json) {
        nlohmann::ordered_json doc;
        doc["manifest"] = path.string();
        doc["sites"] = dcfg.sites;
        doc["triplets"] = dcfg.triplets;
        doc["seed"] = dcfg.seed;
        doc["size"] = dcfg.size;
        out << doc.dump(2) << '\n';
      } else {
        out << path.string() << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace harmbench::cli
