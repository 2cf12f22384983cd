// Headless driver: replay, match, solve, validate and serve.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "squidget/error.hpp"
#include "squidget/matching.hpp"
#include "squidget/persistence.hpp"
#include "squidget/protocol.hpp"
#include "squidget/session.hpp"
#include "squidget/solver.hpp"

namespace {

using namespace squidget;

struct Common {
  std::vector<std::string> overrides;
};

Document load_with_overrides(const std::string& path, const Common& common, bool strict = true) {
  Document doc = load_document(path, strict);
  apply_overrides(doc.config, common.overrides);
  return doc;
}

void emit_document(const Document& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << serialize_document(doc);
  } else {
    save_document(out, doc);
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << std::scientific << v;
  return s.str();
}

int run_replay(const std::string& scene, const std::string& log_path, const std::string& out, bool no_verify,
               const Common& common) {
  const Document doc = load_with_overrides(scene, common);
  const EventLog log = load_event_log(log_path);
  if (!no_verify) verify_log(log, doc);
  const ReplayResult result = replay(doc, log.events);
  emit_document(result.document, out);
  std::ostream& summary = (out.empty() || out == "-") ? std::cerr : std::cout;
  summary << "events " << log.events.size() << "\n"
          << "strokes " << result.stats.strokes << "\n"
          << "selections " << result.stats.selections << "\n"
          << "attributes-changed " << result.stats.attribute_changes << "\n"
          << "squidgets-created " << result.stats.created << "\n"
          << "squidgets-deleted " << result.stats.deleted << "\n"
          << "undo " << result.stats.undos << "\n"
          << "redo " << result.stats.redos << "\n";
  return 0;
}

int run_match(const std::string& scene, const std::string& stroke_path, bool shape_only, const std::string& fit,
              const Common& common) {
  const Document doc = load_with_overrides(scene, common);
  const Polyline stroke = stroke_from_log(load_event_log(stroke_path));
  MatchOptions options;
  options.shape_only = shape_only;
  options.fit = fit == "similarity" ? FitMode::kSimilarity : FitMode::kRigid;
  const auto ranked = rank_candidates(stroke, doc, options);
  std::cout << std::left << std::setw(5) << "rank" << std::setw(16) << "id" << std::setw(12) << "kind" << std::setw(15)
            << "distance" << std::setw(15) << "dev" << "score\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    std::cout << std::left << std::setw(5) << i + 1 << std::setw(16) << r.id << std::setw(12) << to_string(r.kind)
              << std::setw(15) << fmt(r.distance) << std::setw(15) << fmt(r.dev) << fmt(r.score) << "\n";
  }
  const auto chosen = select(stroke, doc, options);
  std::cout << "threshold " << fmt(selection_threshold(sanitize_stroke(stroke), doc.config)) << "\n";
  std::cout << "selected " << (chosen ? chosen->id : std::string("none")) << "\n";
  return 0;
}

int run_solve(const std::string& scene, const std::string& stroke_path, const std::string& attr,
              const std::string& out, const Common& common) {
  Document doc = load_with_overrides(scene, common);
  const Polyline stroke = stroke_from_log(load_event_log(stroke_path));
  const AttributePath path = AttributePath::parse(attr);
  if (!doc.scene.resolves(path)) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + attr + "'");
  const auto target = closest_segment(doc, stroke, path.front());
  if (!target) throw Error(ErrorKind::kUnknownObject, "'" + path.front() + "' has no contour");
  const ScalarSolution solution = solve_scalar(doc, stroke, *target, path);
  std::cout << std::setprecision(17) << "squidget " << target->id << "\n"
            << "attribute " << attr << "\n"
            << "start " << solution.start << "\n"
            << "value " << solution.value << "\n"
            << "start-residual " << solution.start_residual << "\n"
            << "residual " << solution.residual << "\n";
  for (const auto& w : solution.update.warnings) std::cerr << "warning: " << w << "\n";
  if (!out.empty()) save_document(out, doc);
  return 0;
}

// Randomized self-checks on the loaded document: serialization round trip,
// then reversal and density invariance of selection for noisy retracings of
// every squidget curve.
std::vector<std::string> randomized_checks(const Document& doc, unsigned seed, int trials) {
  std::vector<std::string> failures;
  if (parse_document(serialize_document(doc), false) != doc) failures.push_back("serialization round trip differs");

  std::vector<Polyline> curves;
  for (const auto& [id, d] : doc.registry.discrete()) curves.push_back(doc.to_screen(d.curve));
  for (const auto& imp : implicit_squidgets(doc)) curves.push_back(doc.to_screen(imp.segment));
  if (curves.empty()) return failures;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, curves.size() - 1);
  for (int t = 0; t < trials; ++t) {
    const Polyline& base = curves[pick(rng)];
    std::normal_distribution<double> noise(0.0, 0.01 * bbox_diagonal(base));
    Polyline stroke;
    for (const auto& p : base) stroke.push_back(p + Point2(noise(rng), noise(rng)));
    Polyline dense;
    for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
      for (int k = 0; k < 10; ++k) dense.push_back(stroke[i] + (k / 10.0) * (stroke[i + 1] - stroke[i]));
    }
    dense.push_back(stroke.back());
    const auto id = [&](const Polyline& s) {
      const auto m = select(s, doc);
      return m ? m->id : std::string("none");
    };
    const std::string a = id(stroke);
    if (id(reversed(stroke)) != a) failures.push_back("trial " + std::to_string(t) + ": reversal changed selection");
    if (id(dense) != a) failures.push_back("trial " + std::to_string(t) + ": point density changed selection");
  }
  return failures;
}

int run_validate(const std::string& scene, std::optional<unsigned> seed, int trials, const Common& common) {
  const Document doc = load_with_overrides(scene, common, false);
  auto problems = doc.validate();
  if (problems.empty() && seed) {
    for (auto& f : randomized_checks(doc, *seed, trials)) problems.push_back(std::move(f));
  }
  if (problems.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& p : problems) std::cout << "violation: " << p << "\n";
  return 1;
}

int run_serve(const std::string& scene, const std::string& record, const std::string& out, const Common& common) {
  Endpoint endpoint(load_with_overrides(scene, common));
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    for (const auto& reply : endpoint.handle_line(line)) std::cout << reply << "\n";
    std::cout.flush();
  }
  if (!record.empty()) save_event_log(record, endpoint.recording());
  if (!out.empty()) save_document(out, endpoint.session().document());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squidget: sketch-based scene manipulation engine"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.overrides, "Config override key=value (repeatable)");

  std::string scene, second, out, attr, record, fit = "rigid";
  bool no_verify = false;
  bool shape_only = false;
  std::optional<unsigned> seed;
  int trials = 20;

  auto* replay_cmd = app.add_subcommand("replay", "Replay an event log against a scene document");
  replay_cmd->add_option("scene", scene, "Scene document")->required();
  replay_cmd->add_option("log", second, "Event log")->required();
  replay_cmd->add_option("-o,--output", out, "Output document (default: stdout)");
  replay_cmd->add_flag("--no-verify", no_verify, "Skip the log header hash check");

  auto* match_cmd = app.add_subcommand("match", "Rank every candidate squidget for a stroke");
  match_cmd->add_option("scene", scene, "Scene document")->required();
  match_cmd->add_option("stroke", second, "Stroke file")->required();
  match_cmd->add_flag("--shape-only", shape_only, "Center stroke and curves before comparing");
  match_cmd->add_option("--fit", fit, "Implicit fit: rigid or similarity")
      ->check(CLI::IsMember({"rigid", "similarity"}));

  auto* solve_cmd = app.add_subcommand("solve", "Search a shape parameter to fit a stroke");
  solve_cmd->add_option("scene", scene, "Scene document")->required();
  solve_cmd->add_option("stroke", second, "Stroke file")->required();
  solve_cmd->add_option("--attr", attr, "Attribute path, e.g. lamp/shape/cone-angle")->required();
  solve_cmd->add_option("-o,--output", out, "Write the updated document here");

  auto* validate_cmd = app.add_subcommand("validate", "Check scene and squidget invariants");
  validate_cmd->add_option("scene", scene, "Scene document")->required();
  validate_cmd->add_option("--seed", seed, "Also run randomized selection checks with this seed");
  validate_cmd->add_option("--trials", trials, "Randomized trials")->check(CLI::NonNegativeNumber);

  auto* serve_cmd = app.add_subcommand("serve", "Speak the UI message protocol on stdin/stdout");
  serve_cmd->add_option("scene", scene, "Scene document")->required();
  serve_cmd->add_option("--record", record, "Save accepted events as a log on exit");
  serve_cmd->add_option("-o,--output", out, "Save the final document on exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    Config probe;
    apply_overrides(probe, common.overrides);
  } catch (const squidget::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*replay_cmd) return run_replay(scene, second, out, no_verify, common);
    if (*match_cmd) return run_match(scene, second, shape_only, fit, common);
    if (*solve_cmd) return run_solve(scene, second, attr, out, common);
    if (*validate_cmd) return run_validate(scene, seed, trials, common);
    if (*serve_cmd) return run_serve(scene, record, out, common);
  } catch (const squidget::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
