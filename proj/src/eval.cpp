#include "trailgate/eval.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "trailgate/engine.hpp"
#include "trailgate/episode_log.hpp"
#include "yaml_util.hpp"

namespace trailgate {

using detail::as_double;
using detail::as_string;
using detail::config_error;

std::string_view to_string(ClassRole role) noexcept {
  switch (role) {
    case ClassRole::kTraversable: return "traversable";
    case ClassRole::kNonTraversable: return "non_traversable";
    case ClassRole::kIgnore: return "ignore";
  }
  return "unknown";
}

std::optional<ClassRole> LabelMapping::role_of(std::uint32_t code) const {
  for (const auto& c : classes) {
    if (c.code == code) return c.role;
  }
  return std::nullopt;
}

namespace {

std::uint32_t parse_color(const YAML::Node& node, const std::string& at) {
  if (node.IsSequence()) {
    if (node.size() != 3) config_error(at, "expected [r, g, b]");
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double c = as_double(node[i], at);
      if (!(c >= 0 && c <= 255) || c != static_cast<int>(c)) config_error(at, "channel outside 0..255");
      code = (code << 8) | static_cast<std::uint32_t>(c);
    }
    return code;
  }
  const auto text = as_string(node, at);
  std::uint32_t code = 0;
  if (text.size() != 7 || text[0] != '#' ||
      std::from_chars(text.data() + 1, text.data() + 7, code, 16).ptr != text.data() + 7) {
    config_error(at, "expected #rrggbb or [r, g, b], got '" + text + "'");
  }
  return code;
}

ClassRole parse_role(const YAML::Node& node, const std::string& at) {
  const auto text = as_string(node, at);
  if (text == "traversable") return ClassRole::kTraversable;
  if (text == "non_traversable") return ClassRole::kNonTraversable;
  if (text == "ignore") return ClassRole::kIgnore;
  config_error(at, "unknown role '" + text + "'");
}

}  // namespace

LabelMapping parse_label_mapping(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& ex) {
    config_error("mapping", ex.what());
  }
  if (!root.IsMap()) config_error("mapping", "expected a map with dataset, encoding and classes");
  LabelMapping mapping;
  mapping.dataset = root["dataset"] ? as_string(root["dataset"], "dataset") : "";
  const std::string encoding = root["encoding"] ? as_string(root["encoding"], "encoding") : "id";
  if (encoding == "id") {
    mapping.encoding = LabelMapping::Encoding::kId;
  } else if (encoding == "rgb") {
    mapping.encoding = LabelMapping::Encoding::kRgb;
  } else {
    config_error("encoding", "expected id or rgb, got '" + encoding + "'");
  }
  const auto classes = root["classes"];
  if (!classes || !classes.IsSequence() || classes.size() == 0) config_error("classes", "expected a nonempty list");
  std::set<std::uint32_t> seen;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto c = classes[i];
    const std::string at = fmt::format("classes[{}]", i);
    if (!c.IsMap()) config_error(at, "expected a map");
    LabelMapping::Class cls;
    if (mapping.encoding == LabelMapping::Encoding::kId) {
      if (!c["id"]) config_error(at + ".id", "missing");
      const double id = as_double(c["id"], at + ".id");
      if (!(id >= 0 && id <= 65535) || id != static_cast<int>(id)) config_error(at + ".id", "not an id in 0..65535");
      cls.code = static_cast<std::uint32_t>(id);
    } else {
      if (!c["color"]) config_error(at + ".color", "missing");
      cls.code = parse_color(c["color"], at + ".color");
    }
    cls.name = c["name"] ? as_string(c["name"], at + ".name") : fmt::format("class{}", cls.code);
    if (!c["role"]) config_error(at + ".role", "missing");
    cls.role = parse_role(c["role"], at + ".role");
    if (!seen.insert(cls.code).second) config_error(at, "duplicate class '" + cls.name + "'");
    mapping.classes.push_back(std::move(cls));
  }
  return mapping;
}

LabelMapping load_label_mapping(const std::filesystem::path& path) {
  try {
    return parse_label_mapping(read_text_file(path));
  } catch (const Error& err) {
    if (err.code() == Errc::kIoError) throw;
    throw Error(err.code(), path.string() + ": " + err.message());
  }
}

Annotation map_annotation(const LabelRaster& raster, const LabelMapping& mapping, int width, int height) {
  if (raster.width < 1 || raster.height < 1 || width < 1 || height < 1) {
    throw Error(Errc::kDimensionMismatch, "annotation and target dimensions must be positive");
  }
  const bool want_rgb = mapping.encoding == LabelMapping::Encoding::kRgb;
  if (raster.rgb != want_rgb) {
    throw Error(Errc::kDecodeError, std::string("annotation is ") + (raster.rgb ? "color" : "grayscale") +
                                        " but the mapping expects " + (want_rgb ? "rgb" : "id") + " codes");
  }
  Annotation out{BinaryMask(width, height, std::uint8_t{0}), IgnoreMask(width, height, std::uint8_t{0})};
  std::set<std::uint32_t> unmapped;
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(raster.height - 1, static_cast<int>((y + 0.5) * raster.height / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(raster.width - 1, static_cast<int>((x + 0.5) * raster.width / width));
      const auto code = raster.codes[static_cast<std::size_t>(sy) * raster.width + sx];
      const auto role = mapping.role_of(code);
      if (!role) {
        unmapped.insert(code);
        continue;
      }
      out.traversable.at(x, y) = *role == ClassRole::kTraversable ? 1 : 0;
      out.ignore.at(x, y) = *role == ClassRole::kIgnore ? 1 : 0;
    }
  }
  if (!unmapped.empty()) {
    std::string list;
    for (const auto code : unmapped) {
      if (!list.empty()) list += ", ";
      list += want_rgb ? fmt::format("#{:06x}", code) : std::to_string(code);
    }
    throw Error(Errc::kUnmappedClass, "annotation classes not in mapping '" + mapping.dataset + "': " + list);
  }
  return out;
}

Annotation load_annotation(const std::filesystem::path& path, const LabelMapping& mapping, int width, int height) {
  try {
    return map_annotation(decode_label_png(read_binary_file(path)), mapping, width, height);
  } catch (const Error& err) {
    if (err.code() == Errc::kIoError) throw;
    throw Error(err.code(), path.string() + ": " + err.message());
  }
}

void Confusion::add(const BinaryMask& pred, const BinaryMask& gt, const IgnoreMask& ignore) {
  if (!pred.same_shape(gt) || !pred.same_shape(ignore)) {
    throw Error(Errc::kDimensionMismatch, "prediction, ground truth and ignore mask differ in size");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (ignore[i] != 0) {
      ++ignored;
    } else if (pred[i] != 0) {
      ++(gt[i] != 0 ? tp : fp);
    } else {
      ++(gt[i] != 0 ? fn : tn);
    }
  }
}

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  ignored += other.ignored;
  return *this;
}

namespace {

double iou(std::uint64_t inter, std::uint64_t uni) {
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double Confusion::iou_traversable() const noexcept { return iou(tp, tp + fp + fn); }
double Confusion::iou_non_traversable() const noexcept { return iou(tn, tn + fp + fn); }
double Confusion::miou() const noexcept { return (iou_traversable() + iou_non_traversable()) / 2.0; }

MiouResult miou(const BinaryMask& pred, const BinaryMask& gt, const IgnoreMask& ignore) {
  Confusion c;
  c.add(pred, gt, ignore);
  return {c.iou_traversable(), c.iou_non_traversable(), c.miou()};
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json frames_json = nlohmann::json::array();
  for (const auto& [id, m] : per_frame_miou) frames_json.push_back({{"frame_id", id}, {"miou", m}});
  return {{"dataset", dataset},
          {"episode", episode},
          {"frames", frames},
          {"frames_scored", frames_scored},
          {"miou", miou},
          {"iou_traversable", iou_traversable},
          {"iou_non_traversable", iou_non_traversable},
          {"confusion",
           {{"tp", confusion.tp},
            {"fp", confusion.fp},
            {"fn", confusion.fn},
            {"tn", confusion.tn},
            {"ignored", confusion.ignored}}},
          {"per_frame", std::move(frames_json)},
          {"config", config_yaml}};
}

EvalReport run_episode_eval(const EpisodeSource& source, const AppConfig& config, const LabelMapping& mapping,
                            Operator& op, const ProviderPair& providers) {
  Engine engine(config.engine, *providers.masks, *providers.embeddings, op);
  EvalReport report;
  report.dataset = mapping.dataset;
  report.episode = source.name();
  report.config_yaml = emit_app_config(config);
  report.frames = run_episode(source, engine, [&](std::size_t index, const FrameOutcome& outcome) {
    const auto path = source.annotation(index);
    if (!path) return;
    const auto gt = load_annotation(*path, mapping, outcome.binary.width(), outcome.binary.height());
    Confusion frame;
    frame.add(outcome.binary, gt.traversable, gt.ignore);
    report.confusion += frame;
    report.per_frame_miou.emplace_back(outcome.frame_id, frame.miou());
    ++report.frames_scored;
  });
  engine.shutdown();
  if (report.frames_scored == 0) {
    throw Error(Errc::kEmptyInput, "episode '" + source.name() + "' has no annotated frames");
  }
  report.miou = report.confusion.miou();
  report.iou_traversable = report.confusion.iou_traversable();
  report.iou_non_traversable = report.confusion.iou_non_traversable();
  return report;
}

EvalReport run_episode_eval(const EpisodeSource& source, const AppConfig& config, const LabelMapping& mapping,
                            Operator& op) {
  return run_episode_eval(source, config, mapping, op, make_providers(config.masks, config.embeddings, source));
}

namespace {

HocSweepResult sweep_one(const EpisodeSource& source, AppConfig config, double threshold,
                         const OperatorFactory& make_operator) {
  config.engine.theta_scene = threshold;
  // Sweeps compare thresholds on equal footing, so no history carries over.
  config.engine.history = {};
  const auto providers = make_providers(config.masks, config.embeddings, source);
  const auto op = make_operator();
  Engine engine(config.engine, *providers.masks, *providers.embeddings, *op);
  HocSweepResult result{threshold, {}};
  SweepRow acc;
  run_episode(source, engine, [&](std::size_t, const FrameOutcome& outcome) {
    acc.frame_id = outcome.frame_id;
    for (const auto& ev : outcome.events) {
      if (ev.kind == EventKind::kHocSceneChange) ++acc.scene_calls_cum;
      if (ev.kind == EventKind::kHocUnknownObject) ++acc.roi_calls_cum;
      if (ev.kind == EventKind::kHistoryUpdate) ++acc.history_updates_cum;
    }
    result.rows.push_back(acc);
  });
  return result;
}

}  // namespace

std::vector<HocSweepResult> run_hoc_sweep(const EpisodeSource& source, const AppConfig& config,
                                          const std::vector<double>& thresholds, const OperatorFactory& make_operator,
                                          unsigned jobs) {
  std::vector<HocSweepResult> results(thresholds.size());
  jobs = std::max(1u, jobs);
  for (std::size_t start = 0; start < thresholds.size(); start += jobs) {
    std::vector<std::future<HocSweepResult>> batch;
    const std::size_t end = std::min(thresholds.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, sweep_one,
                                 std::cref(source), config, thresholds[i], std::cref(make_operator)));
    }
    for (std::size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
  }
  return results;
}

void write_sweep_csv(std::ostream& out, const std::vector<HocSweepResult>& results) {
  out << "threshold,frame_id,scene_calls_cum,roi_calls_cum,history_updates_cum\n";
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      out << fmt::format("{},{},{},{},{}\n", r.threshold, row.frame_id, row.scene_calls_cum, row.roi_calls_cum,
                         row.history_updates_cum);
    }
  }
}

std::string sweep_csv(const std::vector<HocSweepResult>& results) {
  std::ostringstream out;
  write_sweep_csv(out, results);
  return out.str();
}

std::vector<double> parse_threshold_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    auto item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw Error(Errc::kInvalidArgument, "bad threshold '" + std::string(item) + "' in list '" +
                                              std::string(text) + "'");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

}  // namespace trailgate
