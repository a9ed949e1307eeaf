#include "vsheet/run_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vsheet/amplitude.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/linear_kh.hpp"

namespace vsheet {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string order_label(double o) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", o);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".meta.json"); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_table(const fs::path& path, const Table& table) {
  {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c].name;
    out << "\n";
    for (const auto& row : table.rows) {
      if (row.size() != table.columns.size()) throw std::logic_error("write_table: ragged row in " + table.name);
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
      out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  json meta;
  meta["table"] = table.name;
  meta["description"] = table.description;
  meta["file"] = path.filename().string();
  meta["delimiter"] = ",";
  meta["header_rows"] = 1;
  meta["float_format"] = "%.17g";
  meta["coefficient_convention"] = kCoefficientConvention;
  meta["rows"] = table.rows.size();
  json cols = json::array();
  for (const Column& c : table.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}, {"description", c.description}});
  meta["columns"] = cols;
  std::ofstream out = open_out(sidecar(path));
  out << meta.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + sidecar(path).string());
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Table t;
  t.name = path.stem().string();
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty table");
  for (const std::string& name : split_csv(line)) t.columns.push_back({name, "", ""});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.columns.size()) throw std::runtime_error(path.string() + ": ragged row");
    std::vector<double> row;
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) throw std::runtime_error(path.string() + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (std::ifstream meta_in(sidecar(path)); meta_in) {
    const json meta = json::parse(meta_in);
    t.name = meta.value("table", t.name);
    t.description = meta.value("description", "");
    const json& cols = meta.at("columns");
    for (std::size_t c = 0; c < std::min(cols.size(), t.columns.size()); ++c) {
      t.columns[c].unit = cols[c].value("unit", "");
      t.columns[c].description = cols[c].value("description", "");
    }
  }
  return t;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

fs::path output_root() {
  if (const char* env = std::getenv("VSHEET_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

// ---------------------------------------------------------------- run tables

std::vector<std::string> write_run_tables(const fs::path& dir, const RunRecord& rec) {
  const std::vector<double>& orders = rec.config.sobolev_orders;

  Table diag{"diagnostics", "Per-snapshot diagnostics of the evolving state", {}, {}};
  diag.columns = {{"time", "1", "simulation time"},
                  {"arc_chord", "1", "min |z(a)-z(a-b)|^2/b^2 over node pairs; nan without a curve"},
                  {"strip_width", "1", "smallest fitted analyticity-strip half-width over components; inf when band-limited"},
                  {"mean_deviation", "1", "mean(w) - background"},
                  {"bernoulli_residual", "1", "max |d/dt potential jump - w H(w)|; nan where not computed"}};
  for (const std::string& c : rec.components) {
    diag.columns.push_back({c + "_max_abs", "1", "max |" + c + "| over nodes"});
    diag.columns.push_back({c + "_strip_width", "1", "fitted strip half-width of " + c});
    diag.columns.push_back({c + "_fit_residual", "1", "rms residual of the log-spectrum fit of " + c});
    for (double o : orders) {
      diag.columns.push_back({c + "_H" + order_label(o), "1", "Sobolev norm of order " + order_label(o) + " of " + c});
    }
  }
  for (const Snapshot& s : rec.snapshots) {
    std::vector<double> row{s.time, s.arc_chord, s.strip_width, s.mean_deviation, s.bernoulli_residual};
    for (const ComponentDiagnostics& cd : s.components) {
      row.push_back(cd.max_abs);
      row.push_back(cd.strip_width);
      row.push_back(cd.fit_residual);
      row.insert(row.end(), cd.sobolev.begin(), cd.sobolev.end());
    }
    diag.rows.push_back(std::move(row));
  }

  Table snaps{"snapshots", "Nodal values of every component at every recorded time", {}, {}};
  snaps.columns = {{"time", "1", "simulation time"},
                   {"j", "1", "node index"},
                   {"alpha", "rad", "node parameter 2 pi j / N"}};
  for (const std::string& c : rec.components) snaps.columns.push_back({c, "1", "value of " + c + " at the node"});
  Table spectra{"spectra", "Fourier coefficient magnitudes |fhat(k)| for k = 0..N/2 (k = N/2 is the Nyquist slot)", {}, {}};
  spectra.columns = {{"time", "1", "simulation time"}, {"k", "1", "mode number"}};
  for (const std::string& c : rec.components) spectra.columns.push_back({c + "_abs", "1", "|fhat(k)| of " + c});

  for (const Snapshot& s : rec.snapshots) {
    const PeriodicGrid& g = s.fields.at(0).grid();
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::vector<double> row{s.time, static_cast<double>(j), g.node(j)};
      for (const RealField& f : s.fields) row.push_back(f[j]);
      snaps.rows.push_back(std::move(row));
    }
    for (std::size_t k = 0; k <= g.size() / 2; ++k) {
      std::vector<double> row{s.time, static_cast<double>(k)};
      for (const RealField& f : s.fields) row.push_back(std::abs(f.spectrum()[k]));
      spectra.rows.push_back(std::move(row));
    }
  }

  write_table(dir / "diagnostics.csv", diag);
  write_table(dir / "snapshots.csv", snaps);
  write_table(dir / "spectra.csv", spectra);
  return {"diagnostics.csv", "snapshots.csv", "spectra.csv"};
}

// ---------------------------------------------------------------- manifest

namespace {

json manifest_json(const RunManifest& m) {
  json files = json::array();
  for (const ManifestFile& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"format_version", 1},
          {"code_version", m.code_version},
          {"scenario", json::parse(write_scenario(m.scenario))},
          {"started_utc", m.started_utc},
          {"finished_utc", m.finished_utc},
          {"status", m.status},
          {"stop_reason", std::string(to_string(m.stop_reason))},
          {"stop_detail", m.stop_detail},
          {"error", m.error},
          {"steps", m.steps},
          {"files", files}};
}

void add_file(RunManifest& m, const std::string& rel) {
  const fs::path p = m.directory / rel;
  m.files.push_back({rel, sha256_file(p), fs::file_size(p)});
}

void add_table(RunManifest& m, const std::string& rel) {
  add_file(m, rel);
  add_file(m, rel + ".meta.json");
}

std::vector<std::string> analysis_growth_rate(const fs::path& dir, const RunRecord& rec, const GrowthRateAnalysis& a) {
  const std::size_t c = rec.component_index(a.field);
  const std::vector<double> times = rec.times();
  const std::vector<RealField> traj = rec.series(c);
  Table t{"growth_rates", "Least-squares exponential rate of |fhat(k)| of " + a.field + " over the run", {}, {}};
  t.columns = {{"k", "1", "mode number"},
               {"rate", "1/time", "fitted slope of log|fhat(k)| against time"},
               {"linear_rate", "1/time", "|k|/2, the linearized Kelvin-Helmholtz rate"}};
  for (int k : a.modes) {
    t.rows.push_back({static_cast<double>(k), growth_rate_fit(times, traj, k, a.noise_floor), 0.5 * std::abs(k)});
  }
  write_table(dir / "growth_rates.csv", t);
  return {"growth_rates.csv"};
}

std::vector<std::string> analysis_characteristics(const fs::path& dir, const RunRecord& rec,
                                                  const CharacteristicsAnalysis& a) {
  const std::vector<double> times = rec.times();
  const std::vector<RealField> traj = rec.series(0);
  const std::vector<DiskPoint> seeds = circle_seeds(a.radius, a.seeds);
  Table t{"characteristics", "Conservation of the extended complex trace along characteristics", {}, {}};
  t.columns = {{"time", "1", "simulation time"},
               {"error", "1", "max over seeds inside the disk of |Z(X(u,t),t) - Z0(u)|"},
               {"seeds_inside", "1", "seeds whose characteristic is still inside the unit disk"}};
  const VortexAmplitude w0(traj[0]);
  for (std::size_t m = 0; m < times.size(); ++m) {
    const double pair_t[2] = {times[0], times[m]};
    const RealField pair_f[2] = {traj[0], traj[m]};
    std::size_t inside = 0;
    for (const DiskPoint& u : seeds) {
      if (!characteristic_flow(w0, u, std::span<const double>(pair_t, 2)).exited) ++inside;
    }
    const double err = inside == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : characteristic_conservation_error(pair_t, pair_f, seeds);
    t.rows.push_back({times[m], err, static_cast<double>(inside)});
  }
  write_table(dir / "characteristics.csv", t);
  return {"characteristics.csv"};
}

std::vector<std::string> analysis_blowup(const fs::path& dir, const RunRecord& rec) {
  const BlowupEstimate b = blowup_estimate(VortexAmplitude(rec.snapshots.front().fields[0], rec.background));
  Table t{"blowup", "Characteristic-crossing estimate of the first singular time from the initial data", {}, {}};
  t.columns = {{"t_star", "1", "estimated blow-up time; inf when no crossing exists"},
               {"sigma_star", "rad", "location of the first crossing"}};
  t.rows.push_back({b.time, b.location});
  write_table(dir / "blowup.csv", t);
  return {"blowup.csv"};
}

std::vector<std::string> analysis_illposedness(const fs::path& dir, const Scenario& sc, const IllposednessAnalysis& a) {
  auto family = [&sc](const PeriodicGrid& g) { return VortexAmplitude(initial_state(sc, g).at(0), sc.background); };
  const RefinementReport rep = illposedness_experiment(family, a.resolutions, a.s, a.t_probe, sc.integrator);

  Table norms{"refinement", "Sobolev norms at the probe time for each resolution", {}, {}};
  norms.columns = {{"resolution", "1", "grid size N"},
                   {"probe_time", "1", "time reached (below t_probe when a stop criterion fired)"},
                   {"completed", "1", "1 when t_probe was reached"}};
  for (double o : rep.orders) norms.columns.push_back({"H" + order_label(o), "1", "Sobolev norm of order " + order_label(o)});
  for (const RefinementRow& r : rep.rows) {
    std::vector<double> row{static_cast<double>(r.resolution), r.probe_time, r.completed ? 1.0 : 0.0};
    row.insert(row.end(), r.sobolev.begin(), r.sobolev.end());
    norms.rows.push_back(std::move(row));
  }

  Table growth{"refinement_growth", "Ratio of consecutive rows of the refinement table", {}, {}};
  growth.columns = {{"from_resolution", "1", "coarser N"}, {"to_resolution", "1", "finer N"}};
  for (double o : rep.orders) growth.columns.push_back({"H" + order_label(o), "1", "norm ratio finer/coarser"});
  for (std::size_t i = 0; i < rep.growth.size(); ++i) {
    std::vector<double> row{static_cast<double>(rep.rows[i].resolution), static_cast<double>(rep.rows[i + 1].resolution)};
    row.insert(row.end(), rep.growth[i].begin(), rep.growth[i].end());
    growth.rows.push_back(std::move(row));
  }

  Table strip{"refinement_strip", "Strip width over time for each resolution", {}, {}};
  strip.columns = {{"resolution", "1", "grid size N"}, {"time", "1", "simulation time"},
                   {"strip_width", "1", "fitted strip half-width"}};
  for (const RefinementRow& r : rep.rows) {
    for (std::size_t m = 0; m < r.strip_times.size(); ++m) {
      strip.rows.push_back({static_cast<double>(r.resolution), r.strip_times[m], r.strip_widths[m]});
    }
  }

  write_table(dir / "refinement.csv", norms);
  write_table(dir / "refinement_growth.csv", growth);
  write_table(dir / "refinement_strip.csv", strip);
  return {"refinement.csv", "refinement_growth.csv", "refinement_strip.csv"};
}

}  // namespace

void write_manifest(const RunManifest& m) {
  std::ofstream out = open_out(m.directory / "manifest.json");
  out << manifest_json(m).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for manifest.json");
}

RunManifest execute(const Scenario& sc, const fs::path& root) {
  RunManifest m;
  m.scenario = sc;
  m.code_version = VSHEET_VERSION;
  m.directory = root / (sc.name + "_N" + std::to_string(sc.resolution));
  m.started_utc = utc_now();
  fs::create_directories(m.directory);

  try {
    BrOptions opts;
    opts.threads = sc.integrator.threads;
    const auto system = make_system(sc.mode, sc.background, opts);
    const RunRecord rec = run_simulation(sc.integrator, *system, initial_state(sc));
    m.stop_reason = rec.stop_reason;
    m.stop_detail = rec.stop_detail;
    m.steps = rec.steps;
    for (const std::string& f : write_run_tables(m.directory, rec)) add_table(m, f);

    const Analyses& a = sc.analyses;
    if (a.growth_rate) {
      for (const std::string& f : analysis_growth_rate(m.directory, rec, *a.growth_rate)) add_table(m, f);
    }
    if (a.characteristics) {
      for (const std::string& f : analysis_characteristics(m.directory, rec, *a.characteristics)) add_table(m, f);
    }
    if (a.blowup) {
      for (const std::string& f : analysis_blowup(m.directory, rec)) add_table(m, f);
    }
    if (a.illposedness) {
      for (const std::string& f : analysis_illposedness(m.directory, sc, *a.illposedness)) add_table(m, f);
    }
    m.status = rec.stop_reason == StopReason::t_end ? "complete" : "halted";
  } catch (const std::exception& e) {
    m.status = "failed";
    m.error = e.what();
    m.finished_utc = utc_now();
    write_manifest(m);
    throw;
  }
  m.finished_utc = utc_now();
  write_manifest(m);
  return m;
}

RunManifest read_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read manifest " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
  RunManifest m;
  m.directory = file.parent_path();
  m.scenario = parse_scenario(j.at("scenario").dump());
  m.code_version = j.at("code_version").get<std::string>();
  m.started_utc = j.at("started_utc").get<std::string>();
  m.finished_utc = j.at("finished_utc").get<std::string>();
  m.status = j.at("status").get<std::string>();
  m.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
  m.stop_detail = j.at("stop_detail").get<std::string>();
  m.error = j.at("error").get<std::string>();
  m.steps = j.at("steps").get<std::size_t>();
  for (const json& f : j.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                       f.at("bytes").get<std::uintmax_t>()});
  }
  return m;
}

std::vector<std::string> verify_manifest(const RunManifest& m) {
  std::vector<std::string> problems;
  for (const ManifestFile& f : m.files) {
    const fs::path p = m.directory / f.path;
    if (!fs::exists(p)) {
      problems.push_back(f.path + ": missing");
    } else if (sha256_file(p) != f.sha256) {
      problems.push_back(f.path + ": checksum mismatch");
    }
  }
  return problems;
}

// ---------------------------------------------------------------- comparison

ComparisonReport compare_runs(std::span<const RunManifest> manifests) {
  if (manifests.empty()) throw std::invalid_argument("compare_runs: no manifests");
  std::vector<const RunManifest*> sorted;
  for (const RunManifest& m : manifests) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const RunManifest* a, const RunManifest* b) { return a->scenario.resolution < b->scenario.resolution; });

  Scenario family = sorted.front()->scenario;
  for (const RunManifest* m : sorted) {
    Scenario s = m->scenario;
    s.resolution = family.resolution;
    if (!(s == family)) {
      throw std::invalid_argument("compare_runs: " + m->directory.string() + " differs from " +
                                  sorted.front()->directory.string() + " in more than the resolution");
    }
  }
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->scenario.resolution == sorted[i - 1]->scenario.resolution) {
      throw std::invalid_argument("compare_runs: two runs share resolution " +
                                  std::to_string(sorted[i]->scenario.resolution));
    }
  }

  const std::vector<std::string> comps = mode_components(family.mode);
  std::vector<std::string> picked;
  for (const std::string& c : comps) {
    picked.push_back(c + "_strip_width");
    for (double o : family.integrator.sobolev_orders) picked.push_back(c + "_H" + order_label(o));
  }

  ComparisonReport rep;
  rep.table = {"comparison", "Final-snapshot diagnostics per resolution for " + family.name, {}, {}};
  rep.table.columns = {{"resolution", "1", "grid size N"},
                       {"final_time", "1", "time of the last snapshot"},
                       {"completed", "1", "1 when the run reached t_end"}};
  for (const std::string& p : picked) rep.table.columns.push_back({p, "1", "final " + p});

  for (const RunManifest* m : sorted) {
    const Table diag = read_table(m->directory / "diagnostics.csv");
    if (diag.rows.empty()) throw std::runtime_error(m->directory.string() + ": empty diagnostics table");
    const std::vector<double>& last = diag.rows.back();
    std::vector<double> row{static_cast<double>(m->scenario.resolution), last[0],
                            m->stop_reason == StopReason::t_end ? 1.0 : 0.0};
    for (const std::string& p : picked) {
      auto it = std::find_if(diag.columns.begin(), diag.columns.end(), [&](const Column& c) { return c.name == p; });
      if (it == diag.columns.end()) throw std::runtime_error(m->directory.string() + ": diagnostics lacks " + p);
      row.push_back(last[static_cast<std::size_t>(it - diag.columns.begin())]);
    }
    rep.table.rows.push_back(std::move(row));
  }

  rep.growth = {"comparison_growth", "Ratio finer/coarser of consecutive comparison rows", {}, {}};
  rep.growth.columns = {{"from_resolution", "1", "coarser N"}, {"to_resolution", "1", "finer N"}};
  for (const std::string& p : picked) rep.growth.columns.push_back({p, "1", "ratio of " + p});
  for (std::size_t i = 0; i + 1 < rep.table.rows.size(); ++i) {
    const auto& a = rep.table.rows[i];
    const auto& b = rep.table.rows[i + 1];
    std::vector<double> row{a[0], b[0]};
    for (std::size_t c = 3; c < a.size(); ++c) {
      row.push_back(a[c] == 0.0 ? (b[c] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : b[c] / a[c]);
    }
    rep.growth.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace vsheet
