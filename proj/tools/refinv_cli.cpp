// refinv command-line tool.
//
// A thin client of the public C API (refinv.h): every computation goes
// through the shared library; this file only handles argument parsing,
// file I/O, run manifests and the result cache.
//
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <refinv.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using ojson = nlohmann::ordered_json;

// Thrown for failures reported by the library; caught in main -> exit 1.
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for bad command lines discovered after CLI11 parsing -> exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_ok(rc_status st, const char* what) {
  if (st != RC_OK) {
    std::ostringstream os;
    os << what << ": " << rc_status_name(st) << ": " << rc_last_error();
    throw RunError(os.str());
  }
}

// Owns a string allocated by the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { rc_string_free(p); }
  CStr() = default;
  CStr(const CStr&) = delete;
  CStr& operator=(const CStr&) = delete;
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct DegreeHandle {
  rc_degree* p = nullptr;
  ~DegreeHandle() { rc_degree_free(p); }
};

struct CurvesHandle {
  rc_curves* p = nullptr;
  ~CurvesHandle() { rc_curves_free(p); }
};

struct TableHandle {
  rc_table* p = nullptr;
  ~TableHandle() { rc_table_free(p); }
};

struct TraceHandle {
  rc_trace* p = nullptr;
  ~TraceHandle() { rc_trace_free(p); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Arguments holding structured data accept either inline JSON or a file path.
ojson load_doc(const std::string& arg, const char* what) {
  std::string text = (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) ? arg : slurp(arg);
  ojson j = ojson::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw UsageError(std::string(what) + " is not valid JSON: " + arg);
  return j;
}

void emit(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty()) {
    std::cout << bytes;
    if (bytes.empty() || bytes.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw RunError("cannot write " + out_path);
  out << bytes;
  if (!out) throw RunError("short write to " + out_path);
}

std::string fnv_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Mirrors the library's run-manifest layout: no clocks, no machine state, so
// reruns with identical inputs produce identical artifacts.
ojson make_manifest(const std::string& command, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const ojson& options) {
  ojson m;
  m["tool"] = "refinv";
  m["version"] = rc_version();
  m["command"] = command;
  m["seed"] = seed;
  ojson in = ojson::object();
  for (const auto& [name, digest] : inputs) in[name] = digest;
  m["inputs"] = std::move(in);
  m["options"] = options;
  return m;
}

std::string digest_doc(const ojson& j) { return fnv_hex(j.dump()); }

struct Cache {
  std::string dir;  // empty -> disabled

  std::optional<std::string> get(const std::string& key) const {
    if (dir.empty()) return std::nullopt;
    std::ifstream in(dir + "/" + key + ".json", std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  void put(const std::string& key, const std::string& payload) const {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir + "/" + key + ".json", std::ios::binary);
    if (out) out << payload;
  }
};

// Inserts the manifest right after the schema tag and renders the artifact.
std::string artifact(const std::string& payload_json, const ojson& manifest) {
  ojson j = ojson::parse(payload_json);
  ojson out = ojson::object();
  if (j.is_object() && j.contains("schema")) out["schema"] = j["schema"];
  out["manifest"] = manifest;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "schema") out[it.key()] = it.value();
  } else {
    out["data"] = j;
  }
  return out.dump(2) + "\n";
}

DegreeHandle open_degree(const std::string& arg) {
  ojson doc = load_doc(arg, "--degree");
  DegreeHandle d;
  require_ok(rc_degree_parse(doc.dump().c_str(), &d.p), "degree");
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refined real enumerative invariants of toric surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("refinv ") + rc_version());

  std::string degree_arg, constraint_arg, curves_arg, from_arg, to_arg;
  std::string out_path, csv_path, cache_dir;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::size_t curve_index = 0;
  std::string half = "upper";
  double rho = 0.15;
  long budget = 600000;
  double tol = 2e-3;
  int starts = 0;
  bool do_verify = false;

  if (const char* env = std::getenv("REFINV_CACHE")) cache_dir = env;

  auto add_degree = [&](CLI::App* sub) {
    sub->add_option("--degree", degree_arg, "degree JSON (inline or file path)")->required();
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--cache", cache_dir, "result cache directory (or env REFINV_CACHE)");
  };

  CLI::App* validate = app.add_subcommand("validate", "validate a degree and print its layout");
  add_degree(validate);
  add_out(validate);

  CLI::App* polygon = app.add_subcommand("polygon", "dual polygon with lattice metrics");
  add_degree(polygon);
  add_out(polygon);

  CLI::App* complete_cmd =
      app.add_subcommand("complete", "fill the missing boundary value from the product relation");
  add_degree(complete_cmd);
  complete_cmd->add_option("--constraint", constraint_arg, "constraint JSON (inline or file path)")
      ->required();
  add_out(complete_cmd);

  CLI::App* sample = app.add_subcommand("sample", "sample an admissible boundary constraint");
  add_degree(sample);
  sample->add_option("--seed", seed, "sampler seed")->required();
  sample->add_option("--rho", rho, "admissibility margin in the moment chart");
  add_out(sample);

  CLI::App* enumerate_cmd =
      app.add_subcommand("enumerate", "solve for all curves matching a constraint");
  add_degree(enumerate_cmd);
  enumerate_cmd->add_option("--constraint", constraint_arg, "constraint JSON (inline or file path)")
      ->required();
  enumerate_cmd->add_option("--seed", seed, "multistart seed")->required();
  enumerate_cmd->add_option("--starts", starts, "number of multistarts (0 = automatic)");
  enumerate_cmd->add_flag("--verify", do_verify, "attach a verification report per curve");
  add_out(enumerate_cmd);

  CLI::App* qi = app.add_subcommand("qi", "quantum index of one solved curve");
  add_degree(qi);
  qi->add_option("--curves", curves_arg, "curves JSON (inline or file path)")->required();
  qi->add_option("--curve", curve_index, "index into the curve list");
  qi->add_option("--half", half, "upper or lower half")
      ->check(CLI::IsMember({"upper", "lower"}));
  qi->add_option("--budget", budget, "max integrand evaluations for the planar check");
  qi->add_option("--tol", tol, "tolerance for the planar check");
  add_out(qi);

  CLI::App* invariants_cmd =
      app.add_subcommand("invariants", "assemble the refined invariant table for one chamber");
  add_degree(invariants_cmd);
  invariants_cmd->add_option("--constraint", constraint_arg,
                             "constraint JSON (default: sample one from the seed)");
  invariants_cmd->add_option("--seed", seed, "sampling/multistart seed")->required();
  invariants_cmd->add_option("--csv", csv_path, "also write the table as CSV");
  add_out(invariants_cmd);

  CLI::App* walk = app.add_subcommand("walk", "track solutions along a constraint path");
  add_degree(walk);
  walk->add_option("--from", from_arg, "start constraint JSON (inline or file path)")->required();
  walk->add_option("--to", to_arg, "end constraint JSON (inline or file path)")->required();
  walk->add_option("--seed", seed, "tracking seed")->required();
  add_out(walk);

  CLI::App* report = app.add_subcommand("report", "invariance report across sampled chambers");
  add_degree(report);
  report->add_option("--seeds", seeds, "chamber seeds (comma separated)")
      ->required()
      ->delimiter(',');
  add_out(report);

  CLI::App* plot = app.add_subcommand("plot", "moment-map plot data for solved curves");
  add_degree(plot);
  plot->add_option("--curves", curves_arg, "curves JSON (inline or file path)")->required();
  add_out(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    Cache cache{cache_dir};

    // Runs the expensive body only on a cache miss, then emits the artifact.
    auto cached = [&](const ojson& manifest, auto&& body) {
      std::string key = fnv_hex(manifest.dump());
      if (auto hit = cache.get(key)) {
        emit(out_path, *hit);
        return;
      }
      std::string bytes = body();
      cache.put(key, bytes);
      emit(out_path, bytes);
    };

    if (*validate) {
      ojson doc = load_doc(degree_arg, "--degree");
      DegreeHandle d = open_degree(degree_arg);
      CStr info;
      require_ok(rc_degree_info(d.p, &info.p), "degree info");
      ojson manifest = make_manifest("validate", 0, {{"degree", digest_doc(doc)}}, ojson::object());
      emit(out_path, artifact(info.str(), manifest));
    } else if (*polygon) {
      ojson doc = load_doc(degree_arg, "--degree");
      DegreeHandle d = open_degree(degree_arg);
      CStr info;
      require_ok(rc_degree_info(d.p, &info.p), "degree info");
      ojson poly = ojson::parse(info.str())["polygon"];
      ojson manifest = make_manifest("polygon", 0, {{"degree", digest_doc(doc)}}, ojson::object());
      emit(out_path, artifact(poly.dump(), manifest));
    } else if (*complete_cmd) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      ojson wdoc = load_doc(constraint_arg, "--constraint");
      DegreeHandle d = open_degree(degree_arg);
      CStr done;
      require_ok(rc_constraint_complete(d.p, wdoc.dump().c_str(), &done.p), "complete");
      ojson manifest = make_manifest(
          "complete", 0, {{"degree", digest_doc(ddoc)}, {"constraint", digest_doc(wdoc)}},
          ojson::object());
      emit(out_path, artifact(done.str(), manifest));
    } else if (*sample) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      DegreeHandle d = open_degree(degree_arg);
      ojson opts;
      opts["rho"] = rho;
      CStr w;
      require_ok(rc_sample_chamber(d.p, seed, opts.dump().c_str(), &w.p), "sample");
      ojson manifest = make_manifest("sample", seed, {{"degree", digest_doc(ddoc)}}, opts);
      emit(out_path, artifact(w.str(), manifest));
    } else if (*enumerate_cmd) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      ojson wdoc = load_doc(constraint_arg, "--constraint");
      DegreeHandle d = open_degree(degree_arg);
      ojson opts = ojson::object();
      if (starts > 0) opts["starts"] = starts;
      ojson manifest = make_manifest(
          "enumerate", seed, {{"degree", digest_doc(ddoc)}, {"constraint", digest_doc(wdoc)}},
          opts);
      cached(manifest, [&] {
        CurvesHandle c;
        require_ok(rc_enumerate(d.p, wdoc.dump().c_str(), seed, opts.dump().c_str(), &c.p),
                   "enumerate");
        CStr body;
        require_ok(rc_curves_to_json(c.p, &body.p), "curves");
        ojson payload = ojson::parse(body.str());
        if (do_verify) {
          std::size_t n = 0;
          require_ok(rc_curves_count(c.p, &n), "curves");
          ojson checks = ojson::array();
          for (std::size_t i = 0; i < n; ++i) {
            CStr v;
            require_ok(rc_curve_verify(d.p, c.p, i, wdoc.dump().c_str(), &v.p), "verify");
            checks.push_back(ojson::parse(v.str()));
          }
          payload["verification"] = std::move(checks);
        }
        return artifact(payload.dump(), manifest);
      });
    } else if (*qi) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      ojson cdoc = load_doc(curves_arg, "--curves");
      DegreeHandle d = open_degree(degree_arg);
      CurvesHandle c;
      require_ok(rc_curves_parse(d.p, cdoc.dump().c_str(), &c.p), "curves");
      ojson opts;
      opts["fallback_budget"] = budget;
      opts["fallback_tol"] = tol;
      CStr body;
      require_ok(rc_curve_qi(d.p, c.p, curve_index, half == "lower" ? 1 : 0, opts.dump().c_str(),
                             &body.p),
                 "qi");
      ojson rec;
      rec["curve"] = curve_index;
      rec["half"] = half;
      rec["qi"] = ojson::parse(body.str());
      ojson oj = opts;
      oj["curve"] = curve_index;
      oj["half"] = half;
      ojson manifest = make_manifest(
          "qi", 0, {{"degree", digest_doc(ddoc)}, {"curves", digest_doc(cdoc)}}, oj);
      emit(out_path, artifact(rec.dump(), manifest));
    } else if (*invariants_cmd) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      DegreeHandle d = open_degree(degree_arg);
      ojson opts = ojson::object();
      std::vector<std::pair<std::string, std::string>> inputs{{"degree", digest_doc(ddoc)}};
      std::string wtext;
      if (!constraint_arg.empty()) {
        ojson wdoc = load_doc(constraint_arg, "--constraint");
        wtext = wdoc.dump();
        inputs.emplace_back("constraint", digest_doc(wdoc));
      } else {
        CStr w;
        require_ok(rc_sample_chamber(d.p, seed, "{}", &w.p), "sample");
        wtext = w.str();
        opts["sampled_constraint"] = true;
      }
      ojson manifest = make_manifest("invariants", seed, inputs, opts);
      cached(manifest, [&] {
        CurvesHandle c;
        require_ok(rc_enumerate(d.p, wtext.c_str(), seed, "{}", &c.p), "enumerate");
        TableHandle t;
        require_ok(rc_assemble_table(d.p, c.p, "{}", &t.p), "invariants");
        CStr tj;
        require_ok(rc_table_to_json(t.p, &tj.p), "table");
        ojson payload = ojson::parse(tj.str());
        payload["constraint"] = ojson::parse(wtext);
        std::size_t n = 0;
        require_ok(rc_curves_count(c.p, &n), "curves");
        payload["n_curves"] = n;
        if (!csv_path.empty()) {
          CStr csv;
          require_ok(rc_table_to_csv(t.p, &csv.p), "csv");
          emit(csv_path, csv.str());
        }
        return artifact(payload.dump(), manifest);
      });
    } else if (*walk) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      ojson fdoc = load_doc(from_arg, "--from");
      ojson tdoc = load_doc(to_arg, "--to");
      DegreeHandle d = open_degree(degree_arg);
      ojson manifest = make_manifest("walk", seed,
                                     {{"degree", digest_doc(ddoc)},
                                      {"from", digest_doc(fdoc)},
                                      {"to", digest_doc(tdoc)}},
                                     ojson::object());
      cached(manifest, [&] {
        TraceHandle tr;
        require_ok(rc_track(d.p, fdoc.dump().c_str(), tdoc.dump().c_str(), seed, "{}", &tr.p),
                   "walk");
        CStr body;
        require_ok(rc_trace_to_json(tr.p, &body.p), "trace");
        return artifact(body.str(), manifest);
      });
    } else if (*report) {
      ojson ddoc = load_doc(degree_arg, "--degree");
      DegreeHandle d = open_degree(degree_arg);
      ojson opts;
      opts["seeds"] = seeds;
      ojson manifest = make_manifest("report", seeds.empty() ? 0 : seeds.front(),
                                     {{"degree", digest_doc(ddoc)}}, opts);
      cached(manifest, [&] {
        CStr body;
        require_ok(rc_invariance_report(d.p, seeds.data(), seeds.size(), "{}", &body.p),
                   "report");
        return artifact(body.str(), manifest);
      });
    } else if (*plot) {
      ojson cdoc = load_doc(curves_arg, "--curves");
      DegreeHandle d = open_degree(degree_arg);
      CurvesHandle c;
      require_ok(rc_curves_parse(d.p, cdoc.dump().c_str(), &c.p), "curves");
      CStr csv;
      require_ok(rc_plot_data(d.p, c.p, &csv.p), "plot");
      emit(out_path, csv.str());
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const RunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
