#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "sketchdist/edt.hpp"
#include "sketchdist/flowfield.hpp"
#include "sketchdist/io.hpp"
#include "sketchdist/losses.hpp"
#include "sketchdist/metrics.hpp"
#include "sketchdist/sparsity.hpp"
#include "sketchdist/supervision.hpp"

#ifndef SKETCHDIST_VERSION
#define SKETCHDIST_VERSION "0.0.0"
#endif

namespace sketchdist::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kTargetsFormatVersion = 1;

json header(const std::string& command, json params) {
  return json{{"tool", "sketchdist"},
              {"version", SKETCHDIST_VERSION},
              {"command", command},
              {"params", std::move(params)}};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOverlappingStrokes:
    case ErrorCode::kEmptyAnnotation:
      return kValidationFailure;
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kDimensionOverflow:
    case ErrorCode::kFormat:
    case ErrorCode::kMultiChannel:
    case ErrorCode::kSiteOutOfDomain:
    case ErrorCode::kOutOfBounds:
      return kShapeOrFormatMismatch;
    default:
      return kIoOrParseError;
  }
}

int report_error(std::ostream& err, std::string_view code, const std::string& message, int exit_code) {
  err << json{{"error", {{"code", code}, {"message", message}}}, {"exit_code", exit_code}}.dump()
      << "\n";
  return exit_code;
}

void require_file(const std::string& path, const char* flag) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIo, std::string(flag) + ": no such file '" + path + "'");
  }
}

void require_dir(const std::string& path, const char* flag) {
  if (!fs::is_directory(path)) {
    throw Error(ErrorCode::kIo, std::string(flag) + ": no such directory '" + path + "'");
  }
}

void ensure_output_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (!fs::is_directory(path)) throw Error(ErrorCode::kIo, "cannot create output directory '" + path + "'");
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorCode::kIo, "output directory '" + parent.string() + "' does not exist");
  }
}

void emit(std::ostream& out, const json& report, const std::string& report_path) {
  const auto text = report.dump(2) + "\n";
  out << text;
  if (!report_path.empty()) io::write_text_atomic(report_path, text);
}

int default_jobs() {
  if (const char* env = std::getenv("SKETCHDIST_JOBS")) {
    try {
      const int j = std::stoi(env);
      if (j > 0) return j;
    } catch (...) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

json pixels_json(const std::vector<Pixel>& pixels) {
  json a = json::array();
  for (const auto& p : pixels) a.push_back({p.x, p.y});
  return a;
}

json edges_json(const std::vector<Edge>& edges) {
  json a = json::array();
  for (const auto& e : edges) a.push_back({e.a.x, e.a.y, e.b.x, e.b.y});
  return a;
}

json check_json(const CheckResult& c) {
  return {{"passed", c.passed}, {"pixels", pixels_json(c.pixels)}, {"edges", edges_json(c.edges)}};
}

AnnotationSet load_annotation(const std::string& strokes, const std::string& edges) {
  auto ann = io::read_stroke_png(strokes);
  if (!edges.empty()) {
    ann.manual_edges = io::read_edges(edges);
    for (const auto& e : ann.manual_edges) {
      if (!edge_in_domain(e, ann.width(), ann.height())) {
        throw Error(ErrorCode::kOutOfBounds, "boundary edge outside the stroke raster");
      }
    }
  }
  return ann;
}

std::vector<double> parse_taus(const std::string& text) {
  std::vector<double> taus;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || !(parts[2] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "--taus expects start:stop:step with step > 0");
    }
    for (int k = 0;; ++k) {
      const double t = std::round((parts[0] + k * parts[2]) * 1e9) / 1e9;
      if (t > parts[1] + 1e-9) break;
      taus.push_back(t);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) taus.push_back(std::stod(item));
  }
  if (taus.empty()) throw Error(ErrorCode::kInvalidArgument, "--taus yields no thresholds");
  return taus;
}

LossWeights load_weights(const std::string& path) {
  LossWeights w;
  if (path.empty()) return w;
  require_file(path, "--weights");
  json j;
  try {
    std::ifstream in(path);
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("cannot parse weights: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kIo, "weights file must hold a JSON object");
  const std::pair<const char*, double*> fields[] = {
      {"lambda_B", &w.lambda_b},   {"lambda_D", &w.lambda_d},   {"lambda_V1", &w.lambda_v1},
      {"lambda_V2", &w.lambda_v2}, {"lambda_V3", &w.lambda_v3}, {"lambda_D_ineq", &w.lambda_d_ineq}};
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto f = std::find_if(std::begin(fields), std::end(fields),
                          [&](const auto& p) { return it.key() == p.first; });
    if (f == std::end(fields)) throw Error(ErrorCode::kIo, "unknown weight '" + it.key() + "'");
    if (!it.value().is_number()) throw Error(ErrorCode::kIo, "weight '" + it.key() + "' must be a number");
    *f->second = it.value().get<double>();
  }
  w.validate();
  return w;
}

json weights_json(const LossWeights& w) {
  return {{"lambda_B", w.lambda_b},   {"lambda_D", w.lambda_d},   {"lambda_V1", w.lambda_v1},
          {"lambda_V2", w.lambda_v2}, {"lambda_V3", w.lambda_v3}, {"lambda_D_ineq", w.lambda_d_ineq}};
}

SupervisionTargets load_targets(const std::string& dir) {
  require_dir(dir, "--targets");
  const fs::path d(dir);
  for (const char* name : {"d_star.skf", "v_star.skf", "lower_bound.skf", "valid.png",
                           "flow_valid.png", "s0.png", "s1.png", "targets.json"}) {
    require_file((d / name).string(), "--targets");
  }
  SupervisionTargets t;
  t.d_star = io::read_scalar_field(d / "d_star.skf");
  t.v_star = io::read_vector_field(d / "v_star.skf");
  t.lower_bound = io::read_scalar_field(d / "lower_bound.skf");
  t.valid = io::read_mask_png(d / "valid.png");
  t.flow_valid = io::read_mask_png(d / "flow_valid.png");
  t.s0 = io::read_mask_png(d / "s0.png");
  t.s1 = io::read_mask_png(d / "s1.png");
  std::ifstream in(d / "targets.json");
  try {
    t.bg_value = json::parse(in).at("bg_value").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("cannot parse targets.json: ") + e.what());
  }
  require_same_shape(t.d_star, t.v_star.vx, "targets v_star");
  require_same_shape(t.d_star, t.lower_bound, "targets lower_bound");
  require_same_shape(t.d_star, t.valid, "targets valid");
  require_same_shape(t.d_star, t.flow_valid, "targets flow_valid");
  require_same_shape(t.d_star, t.s0, "targets s0");
  require_same_shape(t.d_star, t.s1, "targets s1");
  return t;
}

std::vector<std::string> png_names(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

json match_json(const MatchResult& m) {
  json pairs = json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"gt", p.gt_id}, {"pred", p.pred_id}, {"iou", p.iou}});
  }
  return {{"tau", m.tau},
          {"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"pairs", pairs},
          {"unmatched_gt", m.unmatched_gt},
          {"unmatched_pred", m.unmatched_pred}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-annotation supervision targets, losses, reconstruction and metrics",
               "sketchdist"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SKETCHDIST_VERSION);

  int jobs = default_jobs();
  std::string report_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--jobs", jobs, "Worker threads (default: $SKETCHDIST_JOBS or CPU count)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--report", report_path, "Also write the JSON report to this path");
  };

  // validate
  std::string v_strokes, v_labels, v_edges;
  auto* validate = app.add_subcommand("validate", "Check strokes against a full labeling");
  validate->add_option("--strokes", v_strokes, "Stroke PNG (0 none, 1 bg, 2 fg, 3 boundary)")->required();
  validate->add_option("--labels", v_labels, "Ground-truth label PNG")->required();
  validate->add_option("--edges", v_edges, "Manual boundary edges (SKF i32 [n,4])");
  add_common(validate);

  // targets
  std::string t_strokes, t_edges, t_out;
  double t_bg = kDefaultBackgroundValue;
  bool t_border = false;
  auto* targets = app.add_subcommand("targets", "Build supervision targets from strokes");
  targets->add_option("--strokes", t_strokes, "Stroke PNG")->required();
  targets->add_option("--edges", t_edges, "Manual boundary edges (SKF i32 [n,4])");
  targets->add_option("--out", t_out, "Output directory")->required();
  targets->add_option("--bg-value", t_bg, "Background target value");
  targets->add_flag("--border-boundary", t_border, "Treat the image border as a stroke boundary");
  add_common(targets);

  // reconstruct
  std::string r_dist, r_flow, r_out;
  ReconstructionParams r_params;
  auto* reconstruct = app.add_subcommand("reconstruct", "Instance masks from distance and flow");
  reconstruct->add_option("--dist", r_dist, "Distance map (SKF [H,W])")->required();
  reconstruct->add_option("--flow", r_flow, "Flow field (SKF [2,H,W])")->required();
  reconstruct->add_option("--out", r_out, "Output label PNG")->required();
  reconstruct->add_option("--dt", r_params.dt, "Euler step");
  reconstruct->add_option("--steps", r_params.steps, "Euler steps");
  reconstruct->add_option("--fg-thresh", r_params.fg_threshold, "Foreground threshold on distance");
  reconstruct->add_option("--cluster-radius", r_params.cluster_radius, "Chessboard dilation radius");
  reconstruct->add_option("--min-size", r_params.min_size, "Smallest kept instance in pixels");
  add_common(reconstruct);

  // sparsify
  std::string s_labels, s_out;
  SparsityConfig s_config;
  auto* sparsify = app.add_subcommand("sparsify", "Simulate a partial annotation from labels");
  sparsify->add_option("--labels", s_labels, "Ground-truth label PNG")->required();
  sparsify->add_option("--fraction", s_config.fraction, "Annotated pixel fraction")->required();
  sparsify->add_option("--sigma", s_config.sigma, "Noise smoothing std-dev in pixels");
  sparsify->add_option("--seed", s_config.seed, "Random seed");
  sparsify->add_option("--out", s_out, "Output directory")->required();
  add_common(sparsify);

  // loss
  std::string l_dist, l_flow, l_targets, l_weights, l_mode = "theorem", l_grad;
  auto* loss = app.add_subcommand("loss", "Evaluate the partial-annotation loss");
  loss->add_option("--pred-dist", l_dist, "Predicted distance (SKF [H,W])")->required();
  loss->add_option("--pred-flow", l_flow, "Predicted flow (SKF [2,H,W])")->required();
  loss->add_option("--targets", l_targets, "Targets directory")->required();
  loss->add_option("--weights", l_weights, "Weights JSON");
  loss->add_option("--ineq-mode", l_mode, "theorem | paper")
      ->check(CLI::IsMember({"theorem", "paper", "theorem_consistent", "paper_literal"}));
  loss->add_option("--grad-out", l_grad, "Directory for grad_d.skf / grad_v.skf");
  add_common(loss);

  // eval
  std::string e_pred, e_gt;
  double e_tau = 0.5;
  auto* eval = app.add_subcommand("eval", "Score a predicted labeling");
  eval->add_option("--pred", e_pred, "Predicted label PNG")->required();
  eval->add_option("--gt", e_gt, "Ground-truth label PNG")->required();
  eval->add_option("--tau", e_tau, "IoU threshold");
  add_common(eval);

  // curve
  std::string c_pred, c_gt, c_taus = "0.5:0.95:0.05", c_format = "csv";
  auto* curve = app.add_subcommand("curve", "Dataset F1 against IoU threshold");
  curve->add_option("--pred-dir", c_pred, "Directory of predicted label PNGs")->required();
  curve->add_option("--gt-dir", c_gt, "Directory of ground-truth label PNGs")->required();
  curve->add_option("--taus", c_taus, "start:stop:step or comma list");
  curve->add_option("--format", c_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  add_common(curve);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SKETCHDIST_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", e.what(), kIoOrParseError);
  }

  try {
    if (*validate) {
      require_file(v_strokes, "--strokes");
      require_file(v_labels, "--labels");
      if (!v_edges.empty()) require_file(v_edges, "--edges");
      const auto ann = load_annotation(v_strokes, v_edges);
      const auto gt = io::read_label_png(v_labels);
      const auto rep = validate_annotation(ann, gt);
      auto j = header("validate", {{"strokes", v_strokes}, {"labels", v_labels}, {"edges", v_edges}});
      j["admissible"] = rep.admissible;
      j["checks"] = {{"strokes_in_class", check_json(rep.strokes_in_class)},
                     {"strokes_disjoint", check_json(rep.strokes_disjoint)},
                     {"boundaries_on_edges", check_json(rep.boundaries_on_edges)},
                     {"boundaries_complete", check_json(rep.boundaries_complete)}};
      emit(out, j, report_path);
      return rep.admissible ? kOk : kValidationFailure;
    }

    if (*targets) {
      require_file(t_strokes, "--strokes");
      if (!t_edges.empty()) require_file(t_edges, "--edges");
      const auto ann = load_annotation(t_strokes, t_edges);
      const auto t = make_targets(ann, t_bg, t_border);
      ensure_output_dir(t_out);
      const fs::path d(t_out);
      io::write_array(t.d_star, d / "d_star.skf");
      io::write_array(t.v_star, d / "v_star.skf");
      io::write_array(t.lower_bound, d / "lower_bound.skf");
      io::write_mask_png(t.valid, d / "valid.png");
      io::write_mask_png(t.flow_valid, d / "flow_valid.png");
      io::write_mask_png(t.s0, d / "s0.png");
      io::write_mask_png(t.s1, d / "s1.png");
      auto j = header("targets", {{"strokes", t_strokes},
                                  {"edges", t_edges},
                                  {"bg_value", t_bg},
                                  {"border_is_boundary", t_border}});
      j["format_version"] = kTargetsFormatVersion;
      j["bg_value"] = t_bg;
      j["width"] = t.width();
      j["height"] = t.height();
      j["counts"] = {{"s0", count(t.s0)},
                     {"s1", count(t.s1)},
                     {"valid", count(t.valid)},
                     {"flow_valid", count(t.flow_valid)}};
      io::write_text_atomic(d / "targets.json", j.dump(2) + "\n");
      emit(out, j, report_path);
      return kOk;
    }

    if (*reconstruct) {
      require_file(r_dist, "--dist");
      require_file(r_flow, "--flow");
      ensure_parent_dir(r_out);
      r_params.validate();
      const auto d = io::read_scalar_field(r_dist);
      const auto v = io::read_vector_field(r_flow);
      const auto labels = reconstruct_masks(d, v, r_params);
      io::write_label_png(labels, r_out);
      auto j = header("reconstruct", {{"dist", r_dist},
                                      {"flow", r_flow},
                                      {"out", r_out},
                                      {"dt", r_params.dt},
                                      {"steps", r_params.steps},
                                      {"fg_threshold", r_params.fg_threshold},
                                      {"cluster_radius", r_params.cluster_radius},
                                      {"min_size", r_params.min_size}});
      j["instances"] = instance_count(labels);
      emit(out, j, report_path);
      return kOk;
    }

    if (*sparsify) {
      require_file(s_labels, "--labels");
      s_config.validate();
      const auto gt = io::read_label_png(s_labels);
      const auto mask = gaussian_mask(gt.width(), gt.height(), s_config, jobs);
      const auto ann = derive_annotation(gt, mask);
      ensure_output_dir(s_out);
      const fs::path d(s_out);
      io::write_mask_png(mask, d / "mask.png");
      io::write_stroke_png(ann, d / "strokes.png");
      io::write_edges(ann.manual_edges, d / "boundary_edges.skf");
      auto j = header("sparsify", {{"labels", s_labels},
                                   {"fraction", s_config.fraction},
                                   {"sigma", s_config.sigma},
                                   {"seed", s_config.seed},
                                   {"generator", "philox4x32-10"},
                                   {"kernel_truncation_sigmas", 4},
                                   {"padding", "reflect"}});
      j["annotated_pixels"] = count(mask);
      j["boundary_edges"] = ann.manual_edges.size();
      io::write_text_atomic(d / "sparsify.json", j.dump(2) + "\n");
      emit(out, j, report_path);
      return kOk;
    }

    if (*loss) {
      require_file(l_dist, "--pred-dist");
      require_file(l_flow, "--pred-flow");
      const auto weights = load_weights(l_weights);
      const auto mode = parse_ineq_mode(l_mode);
      if (!l_grad.empty()) ensure_output_dir(l_grad);
      const auto t = load_targets(l_targets);
      const auto d = io::read_scalar_field(l_dist);
      const auto v = io::read_vector_field(l_flow);
      require_same_shape(d, t.d_star, "predicted distance vs targets");
      require_same_shape(v.vx, t.d_star, "predicted flow vs targets");
      const auto l = sketchpose_total(d, v, t, weights, mode);
      if (!l_grad.empty()) {
        io::write_array(*l.total.grad_d, fs::path(l_grad) / "grad_d.skf");
        io::write_array(*l.total.grad_v, fs::path(l_grad) / "grad_v.skf");
      }
      auto j = header("loss", {{"pred_dist", l_dist},
                               {"pred_flow", l_flow},
                               {"targets", l_targets},
                               {"weights", weights_json(weights)},
                               {"ineq_mode", to_string(mode)}});
      j["terms"] = {{"distance_partial", l.distance_partial.value},
                    {"flow_partial", l.flow_partial.value},
                    {"distance_ineq", l.distance_ineq.value}};
      j["total"] = l.total.value;
      emit(out, j, report_path);
      return kOk;
    }

    if (*eval) {
      require_file(e_pred, "--pred");
      require_file(e_gt, "--gt");
      const auto pred = io::read_label_png(e_pred);
      const auto gt = io::read_label_png(e_gt);
      const auto r = evaluate(pred, gt, e_tau);
      auto j = header("eval", {{"pred", e_pred}, {"gt", e_gt}, {"tau", e_tau}});
      j["metrics"] = {{"object_accuracy", r.object_accuracy},
                      {"precision", r.prf.precision},
                      {"recall", r.prf.recall},
                      {"f1", r.prf.f1},
                      {"dice", r.dice_jaccard.dice},
                      {"jaccard", r.dice_jaccard.jaccard},
                      {"dq", r.panoptic.dq},
                      {"sq", r.panoptic.sq}};
      j["match"] = match_json(r.match);
      emit(out, j, report_path);
      return kOk;
    }

    if (*curve) {
      require_dir(c_pred, "--pred-dir");
      require_dir(c_gt, "--gt-dir");
      const auto taus = parse_taus(c_taus);
      const auto names = png_names(c_pred);
      if (names != png_names(c_gt)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "prediction and ground-truth directories hold different file names");
      }
      std::vector<LabelField> preds, gts;
      for (const auto& n : names) {
        preds.push_back(io::read_label_png(fs::path(c_pred) / n));
        gts.push_back(io::read_label_png(fs::path(c_gt) / n));
      }
      const auto points = f1_curve(preds, gts, taus, jobs);
      if (c_format == "csv") {
        std::ostringstream csv;
        csv << "tau,f1\n";
        for (const auto& p : points) {
          json row = {p.tau, p.f1};  // shortest round-trip formatting
          csv << row[0].dump() << "," << row[1].dump() << "\n";
        }
        out << csv.str();
        if (!report_path.empty()) io::write_text_atomic(report_path, csv.str());
      } else {
        auto j = header("curve", {{"pred_dir", c_pred}, {"gt_dir", c_gt}, {"taus", taus}});
        j["images"] = names;
        json rows = json::array();
        for (const auto& p : points) {
          rows.push_back({{"tau", p.tau}, {"tp", p.tp}, {"fp", p.fp}, {"fn", p.fn}, {"f1", p.f1}});
        }
        j["curve"] = rows;
        emit(out, j, report_path);
      }
      return kOk;
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    return report_error(err, to_string(e.code()), e.what(), code);
  } catch (const std::invalid_argument& e) {
    return report_error(err, "parse", e.what(), kIoOrParseError);
  } catch (const std::out_of_range& e) {
    return report_error(err, "parse", e.what(), kIoOrParseError);
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "io", e.what(), kIoOrParseError);
  }
  return kIoOrParseError;
}

}  // namespace sketchdist::cli
