#include "refocus/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "refocus/error.hpp"

namespace refocus {

namespace {

using Json = nlohmann::ordered_json;

std::string fixed6(double v) {
  if (std::abs(v) < 5e-7) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// nlohmann prints doubles with round-trip precision; reports use 6 decimals.
void emit(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        emit(value, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(value, out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fixed6(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json histogram_json(const std::vector<HistogramBin>& bins) {
  Json arr = Json::array();
  for (const auto& b : bins) arr.push_back({{"left", b.left}, {"right", b.right}, {"count", b.count}});
  return arr;
}

Json success_json(const std::vector<SuccessBin>& bins) {
  Json arr = Json::array();
  for (const auto& b : bins) {
    arr.push_back({{"left", b.left},
                   {"right", b.right},
                   {"count", b.count},
                   {"correct", b.correct},
                   {"success_rate", b.success_rate},
                   {"empty", b.empty}});
  }
  return arr;
}

Json config_json(const ExperimentConfig& c) {
  const auto& d = c.defense;
  Json refocus = {{"k_min", d.refocus.k_min}, {"fixed_k", nullptr}};
  if (d.refocus.fixed_k) refocus["fixed_k"] = *d.refocus.fixed_k;
  const auto& s = c.schedule;
  return {{"defense", std::string(defense_name(d.defense))},
          {"refocus", refocus},
          {"srs_drop", d.srs_drop},
          {"sor_k", d.sor_k},
          {"sor_sigma", d.sor_sigma},
          {"defense_seed", d.seed},
          {"corruption_seed", c.corruption_seed},
          {"severity_schedule",
           {{"jitter_sigma_per_level", s.jitter_sigma_per_level},
            {"scale_per_level", s.scale_per_level},
            {"rotate_pi_fraction_per_level", s.rotate_pi_fraction_per_level},
            {"added_points_per_level", s.added_points_per_level},
            {"local_cluster_size", s.local_cluster_size},
            {"local_sigma", s.local_sigma},
            {"drop_fraction_per_level", s.drop_fraction_per_level}}},
          {"ce_aggregation", std::string(ce_aggregation_name(c.ce_aggregation))},
          {"bins", c.bins},
          {"model", c.model_path},
          {"pivot", c.pivot_path.empty() ? Json(nullptr) : Json(c.pivot_path)},
          {"data", c.data_path}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string report_json(const EvalReport& report) {
  Json j;
  j["config"] = config_json(report.config);
  j["clean_oa"] = report.clean_accuracy;
  Json corruptions = Json::array();
  for (const auto& c : report.corruptions) {
    corruptions.push_back({{"family", std::string(family_name(c.family))},
                           {"severity", c.severity},
                           {"accuracy", c.accuracy},
                           {"pivot_accuracy", c.pivot_accuracy}});
  }
  j["corruptions"] = corruptions;
  Json ce = Json::object();
  for (auto family : kAllFamilies) {
    const auto it = report.ce.find(family);
    ce[std::string(family_name(family))] = it == report.ce.end() ? Json(nullptr) : Json(it->second);
  }
  j["ce"] = ce;
  j["mce"] = report.mce ? Json(*report.mce) : Json(nullptr);
  if (!report.undefined_ce.empty()) j["undefined_ce"] = report.undefined_ce;
  Json hist = Json::object();
  hist["clean"] = histogram_json(report.focus_histograms.at("clean"));
  for (auto family : kAllFamilies) {
    const std::string name(family_name(family));
    hist[name] = histogram_json(report.focus_histograms.at(name));
  }
  j["focus_histograms"] = hist;
  j["focus_success"] = {{"clean", success_json(report.focus_success.at("clean"))},
                        {"corrupted", success_json(report.focus_success.at("corrupted"))}};
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_json(report));

  std::ostringstream corr;
  corr << "family,severity,accuracy,pivot_accuracy\n";
  for (const auto& c : report.corruptions) {
    corr << family_name(c.family) << ',' << c.severity << ',' << fixed6(c.accuracy) << ','
         << fixed6(c.pivot_accuracy) << '\n';
  }
  write_text(dir / "corruptions.csv", corr.str());

  std::ostringstream ce;
  ce << "family,ce\n";
  for (auto family : kAllFamilies) {
    const auto it = report.ce.find(family);
    ce << family_name(family) << ',' << (it == report.ce.end() ? "" : fixed6(it->second)) << '\n';
  }
  ce << "mce," << (report.mce ? fixed6(*report.mce) : "") << '\n';
  write_text(dir / "ce.csv", ce.str());

  std::ostringstream hist;
  hist << "set,left,right,count\n";
  for (const auto& [name, bins] : report.focus_histograms) {
    for (const auto& b : bins) hist << name << ',' << fixed6(b.left) << ',' << fixed6(b.right) << ',' << b.count << '\n';
  }
  write_text(dir / "focus_histograms.csv", hist.str());

  std::ostringstream succ;
  succ << "set,left,right,count,correct,success_rate,empty\n";
  for (const auto& [name, bins] : report.focus_success) {
    for (const auto& b : bins) {
      succ << name << ',' << fixed6(b.left) << ',' << fixed6(b.right) << ',' << b.count << ',' << b.correct << ','
           << fixed6(b.success_rate) << ',' << (b.empty ? 1 : 0) << '\n';
    }
  }
  write_text(dir / "focus_success.csv", succ.str());

  std::ostringstream diag;
  diag << "set,severity,file,label,predicted,correct,num_points,focus,focus_after,k\n";
  auto rows = [&](std::string_view set, int severity, const std::vector<SampleOutcome>& outcomes) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      diag << set << ',' << severity << ',' << report.sample_ids.at(i) << ',' << o.label << ',' << o.predicted << ','
           << (o.correct ? 1 : 0) << ',' << o.num_points << ',' << fixed6(o.focus) << ',' << fixed6(o.focus_after)
           << ',' << o.k << '\n';
    }
  };
  rows("clean", 0, report.clean_outcomes);
  for (const auto& c : report.corruptions) rows(family_name(c.family), c.severity, c.outcomes);
  write_text(dir / "diagnostics.csv", diag.str());
}

std::string render_report(std::string_view json_text, const std::string& origin) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    std::ostringstream out;
    const auto& cfg = j.at("config");
    out << "# Evaluation report\n\n";
    out << "- defense: " << cfg.at("defense").get<std::string>() << "\n";
    out << "- model: " << cfg.at("model").get<std::string>() << "\n";
    out << "- pivot: " << (cfg.at("pivot").is_null() ? "model itself, undefended" : cfg.at("pivot").get<std::string>())
        << "\n";
    out << "- clean OA: " << fixed6(j.at("clean_oa").get<double>()) << "\n";
    out << "- mCE: " << (j.at("mce").is_null() ? "undefined" : fixed6(j.at("mce").get<double>())) << "\n\n";
    out << "| family | s1 | s2 | s3 | s4 | s5 | CE |\n|---|---|---|---|---|---|---|\n";
    for (const auto& [family, ce] : j.at("ce").items()) {
      out << "| " << family;
      for (const auto& c : j.at("corruptions")) {
        if (c.at("family").get<std::string>() == family) out << " | " << fixed6(c.at("accuracy").get<double>());
      }
      out << " | " << (ce.is_null() ? "undefined" : fixed6(ce.get<double>())) << " |\n";
    }
    return out.str();
  } catch (const Json::exception& e) {
    throw ParseError(origin + ": not a report document (" + e.what() + ")");
  }
}

}  // namespace refocus
