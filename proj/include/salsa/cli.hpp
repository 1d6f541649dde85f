#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "salsa/augment.hpp"
#include "salsa/baseline.hpp"
#include "salsa/io/config.hpp"
#include "salsa/io/ftb.hpp"
#include "salsa/io/labels_csv.hpp"
#include "salsa/io/ppm.hpp"
#include "salsa/io/scene_file.hpp"
#include "salsa/io/wav.hpp"
#include "salsa/metrics.hpp"
#include "salsa/normalize.hpp"
#include "salsa/synth.hpp"

namespace salsa::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

// Expands directories (non-recursively, sorted) to files with one of the
// given extensions. Explicit file arguments are taken as they are.
inline std::vector<fs::path> collect_inputs(const std::vector<std::string>& args,
                                            const std::vector<std::string>& exts) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (std::find(exts.begin(), exts.end(), ext) != exts.end()) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw InputError("no such file or directory: " + a);
    }
  }
  if (out.empty()) throw InputError("no inputs");
  return out;
}

inline io::Settings load_settings(const std::string& config_path, const std::vector<std::string>& overrides) {
  io::Settings s;
  if (!config_path.empty()) {
    if (!fs::exists(config_path)) throw InputError("config file not found: " + config_path);
    s = io::load_settings(config_path);
  }
  for (const auto& o : overrides) io::apply_override(s, o);
  s.validate();
  return s;
}

// Sidecar for a rendered scene STFT.
inline io::KeyValues stft_manifest(const ComplexSpectrogram& spec, const SceneDescription& scene,
                                   const std::string& hash) {
  io::KeyValues kv;
  kv.set("content", std::string("stft"));
  kv.set("array", std::string(to_string(scene.format.kind)));
  if (scene.format.kind == ArrayKind::mic) kv.set("mic_radius", io::tetrahedral_radius(scene.format));
  kv.set("sample_rate", spec.sample_rate);
  kv.set("fft_size", spec.fft_size);
  kv.set("hop_length", spec.hop_length);
  kv.set("config_hash", hash);
  return kv;
}

inline ComplexSpectrogram read_stft(const fs::path& path, ArrayFormat* fmt = nullptr) {
  const auto mpath = io::manifest_path(path);
  if (!fs::exists(mpath)) throw InputError("missing manifest " + mpath.string());
  const auto kv = io::KeyValues::parse(io::read_text(mpath), mpath.string());
  if (kv.get_or("content", "") != "stft") throw ValidationError(path.string() + " is not an STFT tensor");
  ComplexSpectrogram spec;
  spec.data = io::complex_tensor3(io::read_ftb(path));
  spec.sample_rate = io::parse_double(kv.get("sample_rate"), "sample_rate");
  spec.fft_size = io::parse_int<std::size_t>(kv.get("fft_size"), "fft_size");
  spec.hop_length = io::parse_int<std::size_t>(kv.get("hop_length"), "hop_length");
  if (fmt) {
    *fmt = parse_array_kind(kv.get("array")) == ArrayKind::foa
               ? ArrayFormat::foa()
               : ArrayFormat::tetrahedral(io::parse_double(kv.get_or("mic_radius", "0.042"), "mic_radius"));
  }
  return spec;
}

inline ArrayFormat format_for(ArrayKind kind, std::size_t channels) {
  if (kind == ArrayKind::foa) return ArrayFormat::foa();
  require(channels == 4, "mic format expects the 4-channel tetrahedral array, got " +
                             std::to_string(channels) + " channels");
  return ArrayFormat::tetrahedral();
}

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string format;
  std::string feature = "salsa";
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  bool allow_any_rate = false;
};

inline int cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const auto kind = parse_feature_kind(a.feature);
  const auto array = parse_array_kind(a.format);
  check_kind_format(kind, array);
  const auto settings = load_settings(a.config, a.overrides);
  const auto inputs = collect_inputs(a.inputs, {".wav", ".WAV"});
  const auto fcfg = settings.feature_for(array);

  for (const auto& path : inputs) {
    ComplexSpectrogram spec;
    ArrayFormat fmt;
    StftConfig stft_cfg = settings.stft;
    if (path.extension() == ".ftb") {
      spec = read_stft(path, &fmt);
      require(fmt.kind == array, path.string() + ": tensor array format differs from --format");
      stft_cfg.sample_rate = spec.sample_rate;
      stft_cfg.fft_size = spec.fft_size;
      stft_cfg.hop_length = spec.hop_length;
    } else {
      const auto clip = io::read_wav(path);
      if (clip.sample_rate != stft_cfg.sample_rate) {
        require(a.allow_any_rate, path.string() + ": sample rate " + io::format_double(clip.sample_rate) +
                                      " Hz differs from " + io::format_double(stft_cfg.sample_rate) +
                                      " Hz (use --allow-any-rate)");
        stft_cfg.sample_rate = clip.sample_rate;
      }
      if (array == ArrayKind::foa) {
        require(clip.channel_count() == 4, path.string() + ": FOA input needs 4 channels, got " +
                                                std::to_string(clip.channel_count()));
      }
      fmt = format_for(array, clip.channel_count());
      spec = stft(clip, stft_cfg);
    }

    std::optional<std::size_t> selected;
    FeatureTensor feat;
    if (kind == FeatureKind::salsa) {
      auto res = salsa_detailed(spec, fmt, fcfg.selection, fcfg.compression, fcfg.log_floor);
      selected = res.selected.count();
      feat = std::move(res.features);
      feat.meta.kind = kind;
    } else {
      feat = assemble(kind, spec, fmt, fcfg);
    }
    for (double v : feat.data.values()) {
      if (!std::isfinite(v)) throw NumericalError(path.string() + ": non-finite feature value");
    }

    auto canon = io::canonical_settings(settings, array, io::kSectionStft | io::kSectionFeature | io::kSectionOutput);
    canon.set("stft.sample_rate", stft_cfg.sample_rate);
    const auto hash = io::config_hash(canon, std::string(a.format) + "/" + a.feature);
    const fs::path target = fs::path(a.out) / (path.stem().string() + ".ftb");
    auto manifest = io::feature_manifest(feat, hash);
    if (selected) manifest.set("selected_bins", *selected);
    io::write_ftb(target, io::to_ftb(feat.data, settings.dtype));
    io::write_text_atomic(io::manifest_path(target), manifest.dump());
    out << target.string() << " shape=" << feat.channels() << "x" << feat.frames() << "x" << feat.bins();
    if (selected) out << " selected_bins=" << *selected;
    out << "\n";
  }
  return kExitOk;
}

struct SynthArgs {
  std::string scene;
  std::string out;
  std::string name;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (!fs::exists(a.scene)) throw InputError("scene file not found: " + a.scene);
  const auto text = io::read_text(a.scene);
  const auto scene = io::parse_scene(text, a.scene);
  const auto [spec, labels] = render_scene(scene);
  const auto stem = a.name.empty() ? fs::path(a.scene).stem().string() : a.name;
  const auto hash = io::hex64(io::fnv1a(io::format_scene(scene)));
  const fs::path tensor = fs::path(a.out) / (stem + ".ftb");
  const fs::path csv = fs::path(a.out) / (stem + ".csv");
  io::write_ftb(tensor, io::to_ftb(spec.data));
  io::write_text_atomic(io::manifest_path(tensor), stft_manifest(spec, scene, hash).dump());
  io::write_labels_csv(csv, labels);
  out << tensor.string() << " shape=" << spec.channels() << "x" << spec.frames() << "x" << spec.bins() << "\n";
  out << csv.string() << " rows=" << labels.event_count() << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string ref;
  std::string metrics = "2021";
  double threshold = 20.0;
  std::size_t n_classes = 12;
  bool aggregate_only = false;
  std::optional<double> er, f, le, lr;
  std::string json_out;
};

inline nlohmann::ordered_json report_json(const std::string& file, const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["file"] = file;
  j["er20"] = r.er20;
  j["f20"] = r.f20;
  j["le_cd"] = r.le_cd;
  j["lr_cd"] = r.lr_cd;
  j["e_seld"] = r.e_seld;
  return j;
}

inline void report_row(std::ostream& os, const std::string& name, const MetricsReport& r) {
  os << std::left << std::setw(28) << name << std::right << std::fixed << std::setprecision(4)
     << std::setw(9) << r.er20 << std::setw(9) << r.f20 << std::setw(9) << std::setprecision(2) << r.le_cd
     << std::setw(9) << std::setprecision(4) << r.lr_cd << std::setw(9) << r.e_seld << "\n";
  os.unsetf(std::ios::floatfield);
}

inline int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.aggregate_only) {
    require(a.er && a.f && a.le && a.lr, "--aggregate-only needs --er, --f, --le and --lr");
    MetricsReport r{*a.er, *a.f, *a.le, *a.lr, seld_error(*a.er, *a.f, *a.le, *a.lr)};
    require(r.er20 >= 0 && r.f20 >= 0 && r.f20 <= 1 && r.lr_cd >= 0 && r.lr_cd <= 1 && r.le_cd >= 0 &&
                r.le_cd <= 180,
            "metric components out of range");
    out << report_json("aggregate", r).dump() << "\n";
    return kExitOk;
  }
  require(!a.pred.empty() && !a.ref.empty(), "--pred and --ref are required");
  MetricsConfig cfg;
  cfg.version = parse_metrics_version(a.metrics);
  cfg.threshold_deg = a.threshold;
  require(cfg.threshold_deg > 0, "--threshold must be positive");
  if (!fs::is_directory(a.ref)) throw InputError("reference directory not found: " + a.ref);
  const auto preds = collect_inputs({a.pred}, {".csv"});

  MetricsCounts total;
  std::vector<std::pair<std::string, MetricsReport>> rows;
  for (const auto& p : preds) {
    const auto rpath = fs::path(a.ref) / p.filename();
    if (!fs::exists(rpath)) throw InputError("missing reference file " + rpath.string());
    const auto pred = io::read_labels_csv(p, a.n_classes);
    const auto ref = io::read_labels_csv(rpath, a.n_classes);
    const auto counts = evaluate_counts(pred, ref, cfg);
    total += counts;
    rows.emplace_back(p.filename().string(), report_from_counts(counts, cfg));
  }
  const auto overall = report_from_counts(total, cfg);

  std::string jsonl;
  for (const auto& [name, r] : rows) jsonl += report_json(name, r).dump() + "\n";
  jsonl += report_json("ALL", overall).dump() + "\n";
  if (!a.json_out.empty()) io::write_text_atomic(a.json_out, jsonl);
  out << jsonl << "\n";
  out << std::left << std::setw(28) << "file" << std::right << std::setw(9) << "ER20" << std::setw(9) << "F20"
      << std::setw(9) << "LE_CD" << std::setw(9) << "LR_CD" << std::setw(9) << "E_SELD" << "\n";
  for (const auto& [name, r] : rows) report_row(out, name, r);
  report_row(out, "ALL", overall);
  return kExitOk;
}

struct RenderArgs {
  std::string tensor;
  long channel = 0;
  std::string out;
};

inline int cmd_render_image(const RenderArgs& a, std::ostream& out) {
  if (!fs::exists(a.tensor)) throw InputError("tensor file not found: " + a.tensor);
  const auto t = io::read_ftb(a.tensor);
  require(t.dims.size() == 3, "render-image needs a 3-D tensor");
  Tensor3<double> x;
  if (t.dtype == io::Dtype::c64) {
    // Complex spectrograms are drawn as log power.
    const auto c = io::complex_tensor3(t);
    x = Tensor3<double>(c.channels(), c.frames(), c.bins());
    for (std::size_t i = 0; i < c.size(); ++i) {
      x.values()[i] = std::log(std::norm(c.values()[i]) + kDefaultLogFloor);
    }
  } else {
    x = io::real_tensor3(t);
  }
  require(a.channel >= 0 && static_cast<std::size_t>(a.channel) < x.channels(),
          "channel index " + std::to_string(a.channel) + " out of range (tensor has " +
              std::to_string(x.channels()) + " channels)");
  const auto img = io::render_heatmap(x, static_cast<std::size_t>(a.channel));
  io::write_ppm(a.out, img, a.tensor + "#" + std::to_string(a.channel));
  out << a.out << " " << img.width << "x" << img.height << " min=" << io::format_double(img.min)
      << " max=" << io::format_double(img.max) << "\n";
  return kExitOk;
}

// Stats file: FTB1 [2, C] f64 holding mean and floored std, plus manifest.
inline void write_stats(const fs::path& path, const ChannelStats& s, const std::optional<FeatureKind>& kind,
                        std::size_t n_files) {
  io::FtbTensor t{io::Dtype::f64, {2, s.channels()}, {}, {}};
  t.real = s.mean;
  for (double v : s.std) t.real.push_back(std::max(v, kStdFloor));
  io::write_ftb(path, t);
  io::KeyValues kv;
  kv.set("content", std::string("stats"));
  kv.set("kind", kind ? std::string(to_string(*kind)) : std::string("none"));
  std::string roles, dead;
  for (std::size_t c = 0; c < s.channels(); ++c) {
    roles += (c ? "," : "") + std::string(to_string(s.roles[c]));
    if (s.dead(c)) dead += (dead.empty() ? "" : ",") + std::to_string(c);
  }
  kv.set("roles", roles);
  kv.set("dead_channels", dead.empty() ? std::string("none") : dead);
  kv.set("files", n_files);
  io::write_text_atomic(io::manifest_path(path), kv.dump());
}

inline ChannelStats read_stats(const fs::path& path) {
  const auto mpath = io::manifest_path(path);
  if (!fs::exists(path)) throw InputError("stats file not found: " + path.string());
  if (!fs::exists(mpath)) throw InputError("missing manifest " + mpath.string());
  const auto kv = io::KeyValues::parse(io::read_text(mpath), mpath.string());
  require(kv.get_or("content", "") == "stats", path.string() + " is not a stats file");
  const auto t = io::read_ftb(path);
  require(t.dtype == io::Dtype::f64 && t.dims.size() == 2 && t.dims[0] == 2, "malformed stats tensor");
  ChannelStats s;
  const auto c = t.dims[1];
  s.mean.assign(t.real.begin(), t.real.begin() + static_cast<long>(c));
  s.std.assign(t.real.begin() + static_cast<long>(c), t.real.end());
  for (const auto& r : io::split(kv.get("roles"), ',')) s.roles.push_back(parse_channel_role(r));
  require(s.roles.size() == c, "stats manifest roles do not match the tensor");
  return s;
}

struct StatsArgs {
  std::vector<std::string> inputs;
  std::string out;
};

inline int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const auto inputs = collect_inputs(a.inputs, {".ftb"});
  StatsAccumulator acc;
  std::optional<FeatureKind> kind;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto f = io::read_feature(inputs[i]);
    if (i == 0) kind = f.meta.kind;
    require(f.meta.kind == kind, "all inputs must share one feature kind");
    acc.add(f);
  }
  const auto stats = acc.finish();
  write_stats(a.out, stats, kind, inputs.size());
  for (std::size_t c = 0; c < stats.channels(); ++c) {
    out << "channel " << c << " " << to_string(stats.roles[c]) << " mean=" << io::format_double(stats.mean[c])
        << " std=" << io::format_double(std::max(stats.std[c], kStdFloor)) << (stats.dead(c) ? " (floored)" : "")
        << "\n";
  }
  return kExitOk;
}

struct NormalizeArgs {
  std::vector<std::string> inputs;
  std::string stats;
  std::string out;
};

inline int cmd_normalize(const NormalizeArgs& a, std::ostream& out) {
  const auto stats = read_stats(a.stats);
  const auto inputs = collect_inputs(a.inputs, {".ftb"});
  for (const auto& p : inputs) {
    const auto f = io::read_feature(p);
    require(f.meta.kind.has_value(), p.string() + ": feature kind unknown");
    const auto mkv = io::KeyValues::parse(io::read_text(io::manifest_path(p)));
    const auto dtype = io::read_ftb(p).dtype;
    const auto g = apply_stats(f, stats, *f.meta.kind);
    const fs::path target = fs::path(a.out) / p.filename();
    io::write_ftb(target, io::to_ftb(g.data, dtype));
    auto kv = mkv;
    kv.set("normalized_with", fs::path(a.stats).filename().string());
    io::write_text_atomic(io::manifest_path(target), kv.dump());
    out << target.string() << "\n";
  }
  return kExitOk;
}

struct AugmentArgs {
  std::vector<std::string> inputs;
  std::string labels;
  std::string out;
  std::string config;
  std::vector<std::string> overrides;
  std::optional<double> probability;
};

inline int cmd_augment(const AugmentArgs& a, std::ostream& out) {
  auto settings = load_settings(a.config, a.overrides);
  if (a.probability) {
    settings.augment.set_probability(*a.probability);
    settings.augment.validate();
  }
  const auto inputs = collect_inputs(a.inputs, {".ftb"});
  for (const auto& p : inputs) {
    const auto raw = io::read_ftb(p);
    const auto mkv = io::KeyValues::parse(io::read_text(io::manifest_path(p)));
    const auto feat = io::feature_from_files(raw, mkv);
    SeldLabels labels;
    labels.n_classes = settings.n_classes;
    fs::path label_in;
    if (!a.labels.empty()) {
      label_in = fs::path(a.labels) / (p.stem().string() + ".csv");
      if (!fs::exists(label_in)) throw InputError("missing label file " + label_in.string());
      labels = io::read_labels_csv(label_in, settings.n_classes);
    }
    // Per-file stream so results do not depend on input order.
    Rng rng(mix_seed(settings.augment.seed, io::fnv1a(p.filename().string())));
    AugmentRecord rec;
    const auto fmt = feat.meta.format == ArrayKind::foa ? ArrayFormat::foa() : ArrayFormat::tetrahedral();
    const auto [g, l] = augment_pipeline(feat, labels, settings.augment, rng, fmt, &rec);
    const fs::path target = fs::path(a.out) / p.filename();
    io::write_ftb(target, io::to_ftb(g.data, raw.dtype));
    auto kv = mkv;
    kv.set("augment.transform", rec.transform ? std::to_string(*rec.transform) : "none");
    kv.set("augment.shift", rec.shift ? std::to_string(*rec.shift) : "none");
    kv.set("augment.cutout", std::string(rec.cutout ? "1" : "0"));
    io::write_text_atomic(io::manifest_path(target), kv.dump());
    if (!label_in.empty()) io::write_labels_csv(fs::path(a.out) / label_in.filename(), l);
    out << target.string() << " transform=" << (rec.transform ? std::to_string(*rec.transform) : "none")
        << " shift=" << (rec.shift ? std::to_string(*rec.shift) : "none") << " cutout=" << rec.cutout << "\n";
  }
  return kExitOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"SALSA spatial feature toolkit"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "compute features from WAV files or rendered STFT tensors");
  extract->add_option("inputs", ex.inputs, "files or directories")->required();
  extract->add_option("--format", ex.format, "foa or mic")->required();
  extract->add_option("--feature", ex.feature, "salsa, melspeciv, linspeciv, melspecgcc or linspecgcc");
  extract->add_option("--config", ex.config, "key = value config file");
  extract->add_option("--set", ex.overrides, "key=value override")->take_all();
  extract->add_option("--out", ex.out, "output directory")->required();
  extract->add_flag("--allow-any-rate", ex.allow_any_rate, "accept sample rates other than the configured one");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "render a scene file to an STFT tensor and label CSV");
  synth->add_option("scene", sy.scene, "scene file")->required();
  synth->add_option("--out", sy.out, "output directory")->required();
  synth->add_option("--name", sy.name, "output file stem");

  EvalArgs ev;
  double er = 0, f = 0, le = 0, lr = 0;
  auto* eval = app.add_subcommand("eval", "score prediction CSVs against references");
  eval->add_option("--pred", ev.pred, "prediction directory");
  eval->add_option("--ref", ev.ref, "reference directory");
  eval->add_option("--metrics", ev.metrics, "2020 or 2021");
  eval->add_option("--threshold", ev.threshold, "DOA threshold in degrees");
  eval->add_option("--n-classes", ev.n_classes, "class vocabulary size");
  eval->add_option("--json", ev.json_out, "also write JSON lines here");
  eval->add_flag("--aggregate-only", ev.aggregate_only, "only combine --er --f --le --lr");
  auto* er_opt = eval->add_option("--er", er);
  auto* f_opt = eval->add_option("--f", f);
  auto* le_opt = eval->add_option("--le", le);
  auto* lr_opt = eval->add_option("--lr", lr);

  RenderArgs re;
  auto* render = app.add_subcommand("render-image", "draw one tensor channel as a PPM heatmap");
  render->add_option("tensor", re.tensor, "FTB1 file")->required();
  render->add_option("--channel", re.channel, "channel index");
  render->add_option("--out", re.out, "output .ppm")->required();

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "per-channel mean and std over a feature corpus");
  stats->add_option("inputs", st.inputs, "feature files or directories")->required();
  stats->add_option("--out", st.out, "stats file")->required();

  NormalizeArgs no;
  auto* normalize = app.add_subcommand("normalize", "apply a stats file to features");
  normalize->add_option("inputs", no.inputs, "feature files or directories")->required();
  normalize->add_option("--stats", no.stats, "stats file")->required();
  normalize->add_option("--out", no.out, "output directory")->required();

  AugmentArgs au;
  double prob = 0.0;
  auto* augment = app.add_subcommand("augment", "channel swap, frequency shift and cutout");
  augment->add_option("inputs", au.inputs, "feature files or directories")->required();
  augment->add_option("--labels", au.labels, "directory of label CSVs named after the inputs");
  augment->add_option("--out", au.out, "output directory")->required();
  augment->add_option("--config", au.config, "key = value config file");
  augment->add_option("--set", au.overrides, "key=value override")->take_all();
  auto* p_opt = augment->add_option("-p,--probability", prob, "set all three probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*extract) return cmd_extract(ex, out);
    if (*synth) return cmd_synth(sy, out);
    if (*eval) {
      if (*er_opt) ev.er = er;
      if (*f_opt) ev.f = f;
      if (*le_opt) ev.le = le;
      if (*lr_opt) ev.lr = lr;
      return cmd_eval(ev, out);
    }
    if (*render) return cmd_render_image(re, out);
    if (*stats) return cmd_stats(st, out);
    if (*normalize) return cmd_normalize(no, out);
    if (*augment) {
      if (*p_opt) au.probability = prob;
      return cmd_augment(au, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace salsa::cli
