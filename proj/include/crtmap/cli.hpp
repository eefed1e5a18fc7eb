#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crtmap/brownian_map.hpp"
#include "crtmap/circle_tree.hpp"
#include "crtmap/estimators.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/io.hpp"
#include "crtmap/lamination.hpp"
#include "crtmap/planar_map.hpp"
#include "crtmap/snake.hpp"

namespace crtmap::cli {

// Inclusive integer range written "a..b" or a single value.
struct Range {
  std::int64_t lo = 0, hi = 0;

  std::vector<std::int64_t> values() const {
    std::vector<std::int64_t> out;
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::string str() const { return lo == hi ? std::to_string(lo) : std::to_string(lo) + ".." + std::to_string(hi); }
};

inline Range parse_range(const std::string& text) {
  const auto dots = text.find("..");
  Range r;
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      r.lo = std::stoll(text.substr(0, dots), &used);
      if (used != dots) throw std::invalid_argument(text);
      const std::string tail = text.substr(dots + 2);
      r.hi = std::stoll(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("range", "expected a..b, got '" + text + "'");
  }
  if (r.hi < r.lo) throw CLI::ValidationError("range", "empty range '" + text + "'");
  return r;
}

// Failure of a checked property; printed with its witness and mapped to exit code 1.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t n = 0;
  int k = 2;
  std::uint64_t seed = 0;
  std::string seeds = "0..9";
  std::string scales = "3..9";
  std::string target = "lamination";
  std::string law = "u3";
  std::string rule = "consecutive";
  std::string relation = "e";
  std::string model = "klein";
  std::string in;
  std::string out;
  std::string labels_out;
  std::string growth_out;
  int width = 800;
  std::size_t samples = 256;
  std::size_t source = 0;
  double delta = 0.3;
  int lmax = 4;
};

inline std::vector<int> levels_of(const std::string& scales) {
  std::vector<int> out;
  for (auto v : parse_range(scales).values()) out.push_back(static_cast<int>(v));
  return out;
}

inline DiscreteExcursion load_or_sample(const Options& o) {
  if (!o.in.empty()) return io::excursion_from_json(io::read_json(o.in));
  return sample_dyck_excursion(o.n, o.seed);
}

inline ChordRule parse_rule(const std::string& s) {
  if (s == "consecutive") return ChordRule::consecutive;
  if (s == "all-pairs") return ChordRule::all_pairs;
  throw CLI::ValidationError("--rule", "expected consecutive or all-pairs");
}

// Labels use a stream derived from the run seed so that e and Z are independent.
inline std::uint64_t label_seed(std::uint64_t seed) { return std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ull)(); }

inline Lamination make_lamination(const Options& o, const DiscreteExcursion& e) {
  const auto tree = build_circle_tree(e);
  if (o.relation == "e") return build_lamination(tree, parse_rule(o.rule));
  if (o.relation == "z") {
    const auto z = sample_labels(tree, parse_law(o.law), label_seed(o.seed));
    return lamination_from_classes(label_classes(z.values), e.period(), "labels", parse_rule(o.rule));
  }
  throw CLI::ValidationError("--relation", "expected e or z");
}

inline int run_sample_excursion(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto e = sample_dyck_excursion(o.n, o.seed);
  io::write_json(o.out, io::excursion_to_json(e, h));
  if (!o.labels_out.empty()) {
    const auto z = sample_labels(build_circle_tree(e), parse_law(o.law), label_seed(o.seed));
    io::write_json(o.labels_out, io::labels_to_json(z, h));
  }
  out << "wrote " << o.out << "\n";
  return 0;
}

inline int run_tree(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto tree = build_circle_tree(load_or_sample(o));
  io::write_json(o.out, io::tree_to_json(tree, h));
  out << "vertices " << tree.n_vertices() << "\n";
  return 0;
}

inline int run_lamination(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto e = load_or_sample(o);
  const auto lam = make_lamination(o, e);
  if (auto bad = check_noncrossing(lam)) {
    std::ostringstream msg;
    msg << "crossing chords (" << bad->first.a << "," << bad->first.b << ") and (" << bad->second.a << ","
        << bad->second.b << ")";
    throw ValidationFailure(msg.str());
  }
  io::write_text(o.out, io::chords_csv(lam, h));
  out << "chords " << lam.chords.size() << "\n";
  return 0;
}

inline int run_render(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto lam = make_lamination(o, load_or_sample(o));
  DiskModel model;
  if (o.model == "klein") {
    model = DiskModel::klein;
  } else if (o.model == "poincare") {
    model = DiskModel::poincare;
  } else {
    throw CLI::ValidationError("--model", "expected klein or poincare");
  }
  render_svg(lam, model, o.out, o.width, h.to_json().dump());
  out << "wrote " << o.out << "\n";
  return 0;
}

inline int run_dim(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto e = load_or_sample(o);
  const auto levels = levels_of(o.scales);
  DimensionEstimate est;
  if (o.target == "lamination") {
    const auto segments = klein_segments(build_lamination(build_circle_tree(e)));
    est = box_count_segments(segments, levels);
  } else if (o.target == "endpoints") {
    est = endpoint_dimension(e, levels);
  } else {
    throw CLI::ValidationError("--target", "expected lamination or endpoints");
  }
  io::write_text(o.out, io::dimension_csv(est, h));
  out << "slope " << est.slope << "\n";
  return 0;
}

inline int run_brownian_map(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto e = load_or_sample(o);
  const auto tree = build_circle_tree(e);
  const auto z = sample_labels(tree, parse_law(o.law), label_seed(o.seed));
  const auto r = reroot(e, z.values);
  const std::size_t count = std::min(o.samples, e.period());
  const auto sample = MapMetricSample::stratified(r.z_bar, count, o.seed);
  if (o.source >= sample.size()) throw CLI::ValidationError("--source", "outside the sample");
  const auto zero = zero_class_check(sample);
  if (!zero.pass) {
    throw ValidationFailure(std::string("zero classes: ") + zero.reason + " at (" +
                            std::to_string(zero.witness->first) + "," + std::to_string(zero.witness->second) + ")");
  }
  const std::vector<std::vector<std::int64_t>> rows{sample.d_star_from(o.source)};
  io::Json sidecar = h.to_json();
  sidecar["source"] = o.source;
  sidecar["N"] = sample.size();
  sidecar["n"] = e.n;
  sidecar["times"] = sample.times();
  sidecar["dtype"] = "int64-le";
  io::write_distance_rows(o.out, rows, sidecar);
  out << "wrote " << o.out << "\n";
  return 0;
}

inline PlanarMap sample_map(std::size_t n, int k, std::uint64_t seed) {
  return k == 2 ? sample_quadrangulation(n, seed) : sample_2k_angulation(n, k, seed);
}

inline int run_sample_map(const Options& o, const io::RunHeader& h, std::ostream& out) {
  const auto map = sample_map(o.n, o.k, o.seed);
  const auto audit = audit_map(map);
  if (!audit.ok) throw ValidationFailure("map audit: " + audit.failure);
  io::write_json(o.out, io::map_to_json(map, h));
  if (!o.growth_out.empty()) {
    const auto growth = ball_growth_profile(map, map.root_vertex(), growth_window(o.n));
    char cell[32];
    std::snprintf(cell, sizeof cell, "%.6f", growth.exponent);
    io::write_text(o.growth_out,
                   io::stats_csv(h, {"n", "seed", "exponent"}, {{std::to_string(o.n), std::to_string(o.seed), cell}}));
  }
  out << "vertices " << map.n_vertices << "\n";
  return 0;
}

inline int run_bottleneck(const Options& o, const io::RunHeader& h, std::ostream& out) {
  std::vector<std::vector<std::string>> rows;
  for (auto s : parse_range(o.seeds).values()) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto found = bottleneck_scan(sample_map(o.n, o.k, seed), o.delta, o.lmax);
    rows.push_back({std::to_string(o.n), std::to_string(seed), std::to_string(found.size())});
    out << "seed " << seed << " cycles " << found.size() << "\n";
  }
  io::write_text(o.out, io::stats_csv(h, {"n", "seed", "cycles_found"}, rows));
  return 0;
}

/*
 * Invariant suite on a few seeds: contour, index, tree, labels, lamination,
 * metric and map checks. Prints one row per check.
 */
inline int run_verify(const Options& o, std::ostream& out) {
  const auto seeds = parse_range(o.seeds).values();
  struct Row {
    std::string name;
    std::string witness;
  };
  std::vector<Row> rows;
  auto record = [&](const std::string& name, auto&& check) {
    std::string witness;
    for (auto s : seeds) {
      witness = check(static_cast<std::uint64_t>(s));
      if (!witness.empty()) {
        witness = "seed " + std::to_string(s) + ": " + witness;
        break;
      }
    }
    rows.push_back({name, witness});
  };
  const std::size_t n = o.n;
  record("excursion", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    for (std::size_t t = 0; t < e.period(); ++t) {
      if (e.heights[t] < 0 || std::abs(e.heights[t + 1] - e.heights[t]) != 1) return "bad step at " + std::to_string(t);
    }
    return e.heights.front() == 0 && e.heights.back() == 0 ? "" : "endpoints not at 0";
  });
  record("arc minima", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    const auto idx = make_index(e);
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<std::size_t> pick(0, e.period());
    for (int i = 0; i < 1000; ++i) {
      auto a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      if (idx.linear_min(a, b) != *std::min_element(e.heights.begin() + a, e.heights.begin() + b + 1)) {
        return "range [" + std::to_string(a) + "," + std::to_string(b) + "]";
      }
    }
    return "";
  });
  record("pseudometric", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    auto w = verify_pseudometric(e, make_index(e), 10000, s);
    return w ? std::string(w->axiom) + " at (" + std::to_string(w->a) + "," + std::to_string(w->b) + "," +
                   std::to_string(w->c) + ")"
             : "";
  });
  record("tree", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    const auto tree = build_circle_tree(e);
    if (tree.n_vertices() != n + 1) return "vertex count";
    if (!isomorphic(plane_tree_oracle(e.steps), tree)) return "differs from parser";
    const auto idx = make_index(e);
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<std::size_t> pick(0, e.period());
    for (int i = 0; i < 1000; ++i) {
      const auto a = pick(rng), b = pick(rng);
      if (tree.tree_distance(tree.class_id[a], tree.class_id[b]) != idx.pseudo_distance(a, b)) {
        return "distance at (" + std::to_string(a) + "," + std::to_string(b) + ")";
      }
    }
    return "";
  });
  record("labels", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    const auto tree = build_circle_tree(e);
    const auto z = sample_labels(tree, IncrementLaw::uniform3, label_seed(s));
    for (std::size_t t = 0; t <= e.period(); ++t) {
      if (z.values[t] != z.values[tree.visits[tree.class_id[t]].front()]) return "class label at " + std::to_string(t);
    }
    const auto r = reroot(e, z.values);
    if (*std::min_element(r.z_bar.begin(), r.z_bar.end()) != 0) return "rerooted minimum";
    auto w = reroot_isometry_check(e, z.values, r, 10000, s);
    return w ? std::string(w->identity) + " at (" + std::to_string(w->a) + "," + std::to_string(w->b) + ")" : "";
  });
  record("lamination", [&](std::uint64_t s) -> std::string {
    const auto lam = build_lamination(build_circle_tree(sample_dyck_excursion(n, s)));
    if (auto bad = check_noncrossing(lam)) {
      return "crossing (" + std::to_string(bad->first.a) + "," + std::to_string(bad->first.b) + ")";
    }
    return face_census(lam) == lam.chords.size() + 1 ? "" : "face census";
  });
  record("zero classes", [&](std::uint64_t s) -> std::string {
    const auto e = sample_dyck_excursion(n, s);
    const auto z = sample_labels(build_circle_tree(e), IncrementLaw::uniform3, label_seed(s));
    const auto sample = MapMetricSample::stratified(reroot(e, z.values).z_bar, std::min<std::size_t>(128, e.period()), s);
    const auto res = zero_class_check(sample);
    return res.pass ? "" : std::string(res.reason);
  });
  record("quadrangulation", [&](std::uint64_t s) -> std::string {
    const auto m = sample_quadrangulation_labeled(n, s);
    const auto audit = audit_map(m.map);
    if (!audit.ok) return audit.failure;
    auto bad = cvs_distance_audit(m);
    return bad ? "distance label at vertex " + std::to_string(*bad) : "";
  });
  record("hexangulation", [&](std::uint64_t s) -> std::string {
    const auto m = sample_2k_angulation_labeled(n, 3, s);
    const auto audit = audit_map(m.map);
    if (!audit.ok) return audit.failure;
    auto bad = cvs_distance_audit(m);
    return bad ? "distance label at vertex " + std::to_string(*bad) : "";
  });
  bool all = true;
  for (const auto& row : rows) {
    char line[64];
    std::snprintf(line, sizeof line, "%-16s %s", row.name.c_str(), row.witness.empty() ? "pass" : "FAIL");
    out << line;
    if (!row.witness.empty()) out << "  " << row.witness;
    out << "\n";
    all = all && row.witness.empty();
  }
  return all ? 0 : 1;
}

// Flags from a JSON object, placed before the real ones so the command line wins.
inline std::vector<std::string> config_args(const std::string& path) {
  const auto j = io::read_json(path);
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") continue;
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return args;
}

inline io::Json config_json(const std::string& command, const Options& o, const CLI::App& sub) {
  io::Json c;
  c["command"] = command;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const auto results = opt->results();
    c[name] = results.empty() ? opt->get_default_str() : results.back();
  }
  (void)o;
  return c;
}

inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Contour trees, laminations, labels and random planar maps", "crtmap"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--n", o.n, "contour half-length or number of faces")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    sub->add_option("--config", "JSON file with flag values");
    if (needs_out) sub->add_option("--out", o.out, "output path")->required();
  };
  auto add_input = [&](CLI::App* sub) { sub->add_option("--in", o.in, "excursion JSON instead of sampling"); };
  auto add_lam = [&](CLI::App* sub) {
    sub->add_option("--rule", o.rule, "consecutive or all-pairs")->capture_default_str();
    sub->add_option("--relation", o.relation, "e (contour classes) or z (label classes)")->capture_default_str();
    sub->add_option("--law", o.law, "label increments: u3 or pm1")->capture_default_str();
  };

  auto* s_exc = app.add_subcommand("sample-excursion", "uniform Dyck excursion");
  add_common(s_exc, true);
  s_exc->add_option("--law", o.law, "label increments: u3 or pm1")->capture_default_str();
  s_exc->add_option("--labels-out", o.labels_out, "also write labels");

  auto* s_map = app.add_subcommand("sample-map", "uniform rooted 2k-angulation");
  add_common(s_map, true);
  s_map->add_option("--k", o.k, "half face degree")->capture_default_str()->check(CLI::Range(2, 64));
  s_map->add_option("--growth-out", o.growth_out, "ball growth CSV");

  auto* s_tree = app.add_subcommand("tree", "contour tree");
  add_common(s_tree, true);
  add_input(s_tree);

  auto* s_lam = app.add_subcommand("lamination", "chord list CSV");
  add_common(s_lam, true);
  add_input(s_lam);
  add_lam(s_lam);

  auto* s_render = app.add_subcommand("render", "SVG of a lamination");
  add_common(s_render, true);
  add_input(s_render);
  add_lam(s_render);
  s_render->add_option("--model", o.model, "klein or poincare")->capture_default_str();
  s_render->add_option("--width", o.width, "width in px")->capture_default_str()->check(CLI::Range(16, 16384));

  auto* s_dim = app.add_subcommand("dim", "box-counting dimension");
  add_common(s_dim, true);
  add_input(s_dim);
  s_dim->add_option("--target", o.target, "lamination or endpoints")->capture_default_str();
  s_dim->add_option("--scales", o.scales, "dyadic levels a..b")->capture_default_str();

  auto* s_bm = app.add_subcommand("brownian-map", "D* rows on a stratified sample");
  add_common(s_bm, true);
  add_input(s_bm);
  s_bm->add_option("--law", o.law, "label increments: u3 or pm1")->capture_default_str();
  s_bm->add_option("--samples", o.samples, "sample size N")->capture_default_str()->check(CLI::PositiveNumber);
  s_bm->add_option("--source", o.source, "source sample index")->capture_default_str();

  auto* s_bn = app.add_subcommand("bottleneck", "short separating cycles");
  add_common(s_bn, true);
  s_bn->add_option("--k", o.k, "half face degree")->capture_default_str()->check(CLI::Range(2, 64));
  s_bn->add_option("--seeds", o.seeds, "seed range a..b")->capture_default_str();
  s_bn->add_option("--delta", o.delta, "diameter factor")->capture_default_str()->check(CLI::PositiveNumber);
  s_bn->add_option("--lmax", o.lmax, "maximal cycle length")->capture_default_str()->check(CLI::Range(2, 8));

  auto* s_verify = app.add_subcommand("verify", "invariant suite");
  add_common(s_verify, false);
  s_verify->add_option("--seeds", o.seeds, "seed range a..b")->capture_default_str();

  // splice --config contents in front of the command's own flags
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    try {
      auto extra = config_args(args[i + 1]);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    } catch (const std::exception& ex) {
      err << "error: " << ex.what() << "\n";
      return 2;
    }
    break;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (auto* sub : app.get_subcommands()) {
      if (sub != s_verify && sub != s_bn && o.in.empty() && o.n == 0) throw CLI::RequiredError("--n or --in");
      if ((sub == s_verify || sub == s_bn) && o.n == 0) throw CLI::RequiredError("--n");
      if (o.in.empty() && sub != s_map && sub != s_bn && sub != s_verify && o.n > (std::size_t{1} << 26)) {
        throw CLI::ValidationError("--n", "too large");
      }
      parse_range(o.seeds);
      levels_of(o.scales);
      parse_law(o.law);
    }
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  io::RunHeader header;
  header.config = config_json(command, o, *sub);
  header.seed = o.seed;
  try {
    if (sub == s_exc) return run_sample_excursion(o, header, out);
    if (sub == s_map) return run_sample_map(o, header, out);
    if (sub == s_tree) return run_tree(o, header, out);
    if (sub == s_lam) return run_lamination(o, header, out);
    if (sub == s_render) return run_render(o, header, out);
    if (sub == s_dim) return run_dim(o, header, out);
    if (sub == s_bm) return run_brownian_map(o, header, out);
    if (sub == s_bn) return run_bottleneck(o, header, out);
    return run_verify(o, out);
  } catch (const ValidationFailure& e) {
    err << "validation failed: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return dispatch(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace crtmap::cli
