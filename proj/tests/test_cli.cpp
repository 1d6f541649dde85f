#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "salsa/cli.hpp"

using namespace salsa;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "salsa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::path(::testing::TempDir()) / "salsa_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string demo_scene() { return std::string(SALSA_DATA_DIR) + "/demo_scene.txt"; }

std::string bytes(const fs::path& p) { return io::read_text(p); }

nlohmann::json json_line(const std::string& out, const std::string& file) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    auto j = nlohmann::json::parse(line);
    if (j["file"] == file) return j;
  }
  return {};
}

void write_noise_wav(const fs::path& p, double rate, std::size_t channels = 4, double seconds = 1.0) {
  Rng rng(5);
  AudioClip c;
  c.sample_rate = rate;
  c.channels.assign(channels, std::vector<double>(static_cast<std::size_t>(rate * seconds)));
  for (auto& ch : c.channels)
    for (auto& x : ch) x = 0.1 * rng.normal();
  io::write_wav(p, c, io::WavEncoding::pcm16);
}

}  // namespace

TEST(CliSynth, DemoSceneAndDeterminism) {
  const auto out = fresh_dir("synth");
  const auto r = run({"synth", demo_scene(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("shape=4x799x257"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("rows=105"), std::string::npos) << r.out;
  const auto tensor = bytes(out / "demo_scene.ftb"), csv = bytes(out / "demo_scene.csv");
  ASSERT_EQ(run({"synth", demo_scene(), "--out", out.string()}).code, 0);
  EXPECT_EQ(bytes(out / "demo_scene.ftb"), tensor);
  EXPECT_EQ(bytes(out / "demo_scene.csv"), csv);
  EXPECT_TRUE(fs::exists(out / "demo_scene.ftb.manifest"));
}

TEST(CliSynth, Errors) {
  const auto dir = fresh_dir("synth_err");
  io::write_text_atomic(dir / "zero.txt", "version = 1\nformat = foa\nduration_s = 0\n");
  EXPECT_EQ(run({"synth", (dir / "zero.txt").string(), "--out", dir.string()}).code, cli::kExitValidation);
  EXPECT_EQ(run({"synth", (dir / "absent.txt").string(), "--out", dir.string()}).code, cli::kExitInput);
}

TEST(CliExtract, FromSynthTensorAndWav) {
  const auto work = fresh_dir("extract");
  ASSERT_EQ(run({"synth", demo_scene(), "--out", (work / "stft").string()}).code, 0);
  const auto r = run({"extract", (work / "stft" / "demo_scene.ftb").string(), "--format", "foa", "--out",
                      (work / "feat").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("shape=7x799x200 selected_bins="), std::string::npos) << r.out;
  const auto first = bytes(work / "feat" / "demo_scene.ftb");
  const auto manifest = bytes(work / "feat" / "demo_scene.ftb.manifest");
  ASSERT_EQ(run({"extract", (work / "stft" / "demo_scene.ftb").string(), "--format", "foa", "--out",
                 (work / "feat").string()}).code, 0);
  EXPECT_EQ(bytes(work / "feat" / "demo_scene.ftb"), first);
  EXPECT_EQ(bytes(work / "feat" / "demo_scene.ftb.manifest"), manifest);
  const auto f = io::read_feature(work / "feat" / "demo_scene.ftb");
  EXPECT_EQ(f.meta.kind, FeatureKind::salsa);
  EXPECT_EQ(f.channels(), 7u);

  fs::create_directories(work / "wav");
  write_noise_wav(work / "wav" / "clip.wav", 24000);
  for (const char* kind : {"salsa", "melspeciv", "linspeciv"}) {
    const auto w = run({"extract", (work / "wav").string(), "--format", "foa", "--feature", kind, "--out",
                        (work / kind).string()});
    ASSERT_EQ(w.code, 0) << w.err;
    const std::string bins = std::string(kind) == "melspeciv" ? "128" : "200";
    EXPECT_NE(w.out.find("shape=7x79x" + bins), std::string::npos) << w.out;
  }
  const auto g = run({"extract", (work / "wav").string(), "--format", "mic", "--feature", "melspecgcc", "--out",
                      (work / "gcc").string()});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(g.out.find("shape=10x79x128"), std::string::npos) << g.out;
}

TEST(CliExtract, Errors) {
  const auto work = fresh_dir("extract_err");
  fs::create_directories(work / "empty");
  auto r = run({"extract", (work / "empty").string(), "--format", "foa", "--out", (work / "o").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("no inputs"), std::string::npos) << r.err;
  r = run({"extract", (work / "empty").string(), "--format", "mic", "--feature", "linspeciv", "--out",
           (work / "o").string()});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_EQ(run({"extract", (work / "missing").string(), "--format", "foa", "--out", (work / "o").string()}).code,
            cli::kExitInput);

  write_noise_wav(work / "fast.wav", 48000, 4, 0.5);
  EXPECT_EQ(run({"extract", (work / "fast.wav").string(), "--format", "foa", "--out", (work / "o").string()}).code,
            cli::kExitValidation);
  EXPECT_EQ(run({"extract", (work / "fast.wav").string(), "--format", "foa", "--allow-any-rate", "--out",
                 (work / "o").string()}).code,
            cli::kExitOk);
  write_noise_wav(work / "stereo.wav", 24000, 2, 0.5);
  EXPECT_EQ(run({"extract", (work / "stereo.wav").string(), "--format", "foa", "--out", (work / "o").string()}).code,
            cli::kExitValidation);
  EXPECT_EQ(run({"extract", (work / "fast.wav").string(), "--format", "foa", "--set", "stft.bogus=1", "--out",
                 (work / "o").string()}).code,
            cli::kExitValidation);
  EXPECT_EQ(run({"extract", "--bogus"}).code, cli::kExitValidation);
}

TEST(CliEval, PerfectAggregateAndMissing) {
  const auto work = fresh_dir("eval");
  ASSERT_EQ(run({"synth", demo_scene(), "--out", (work / "ref").string()}).code, 0);
  fs::create_directories(work / "pred");
  fs::copy_file(work / "ref" / "demo_scene.csv", work / "pred" / "demo_scene.csv");
  auto r = run({"eval", "--pred", (work / "pred").string(), "--ref", (work / "ref").string(), "--json",
                (work / "scores.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto all = json_line(r.out, "ALL");
  ASSERT_FALSE(all.is_null()) << r.out;
  EXPECT_NEAR(all["e_seld"].get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(all["f20"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(fs::exists(work / "scores.jsonl"));

  r = run({"eval", "--aggregate-only", "--er", "0.404", "--f", "0.724", "--le", "12.5", "--lr", "0.727"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json_line(r.out, "aggregate")["e_seld"].get<double>(), 0.25561, 1e-5);
  EXPECT_EQ(run({"eval", "--aggregate-only", "--er", "0.4"}).code, cli::kExitValidation);

  fs::copy_file(work / "ref" / "demo_scene.csv", work / "pred" / "other.csv");
  EXPECT_EQ(run({"eval", "--pred", (work / "pred").string(), "--ref", (work / "ref").string()}).code,
            cli::kExitInput);
  EXPECT_EQ(run({"eval", "--pred", (work / "pred").string(), "--ref", (work / "ref").string(), "--metrics", "2019"})
                .code,
            cli::kExitValidation);
}

TEST(CliRender, ConstantZeroedAndInvalidChannel) {
  const auto work = fresh_dir("render");
  Tensor3<double> c(1, 6, 5, 2.5);
  io::write_ftb(work / "const.ftb", io::to_ftb(c));
  ASSERT_EQ(run({"render-image", (work / "const.ftb").string(), "--out", (work / "c.ppm").string()}).code, 0);
  const auto img = io::decode_ppm(io::read_file(work / "c.ppm"));
  for (const auto& p : img.pixels) EXPECT_EQ(p, img.pixels[0]);
  EXPECT_TRUE(fs::exists(work / "c.ppm.txt"));

  ASSERT_EQ(run({"synth", demo_scene(), "--out", (work / "stft").string()}).code, 0);
  ASSERT_EQ(run({"extract", (work / "stft" / "demo_scene.ftb").string(), "--format", "foa", "--out",
                 (work / "feat").string()}).code, 0);
  ASSERT_EQ(run({"render-image", (work / "feat" / "demo_scene.ftb").string(), "--channel", "4", "--out",
                 (work / "eiv.ppm").string()}).code, 0);
  const auto feat = io::read_feature(work / "feat" / "demo_scene.ftb");
  const auto ref = io::render_heatmap(feat.data, 4);
  const auto eiv = io::decode_ppm(io::read_file(work / "eiv.ppm"));
  ASSERT_EQ(eiv.width, feat.frames());
  ASSERT_EQ(eiv.height, feat.bins());
  std::size_t zeros = 0;
  for (std::size_t t = 0; t < eiv.width; ++t)
    for (std::size_t f = 0; f < eiv.height; ++f)
      if (feat.data(4, t, f) == 0.0) {
        EXPECT_EQ(eiv.pixels[(eiv.height - 1 - f) * eiv.width + t], ref.color_of(0.0));
        ++zeros;
      }
  EXPECT_GT(zeros, 0u);
  EXPECT_EQ(run({"render-image", (work / "feat" / "demo_scene.ftb").string(), "--channel", "7", "--out",
                 (work / "x.ppm").string()}).code,
            cli::kExitValidation);
  EXPECT_EQ(run({"render-image", (work / "stft" / "demo_scene.ftb").string(), "--out", (work / "s.ppm").string()})
                .code,
            cli::kExitOk);
}

TEST(CliStats, FloorAndNormalize) {
  const auto work = fresh_dir("stats");
  for (int i = 0; i < 2; ++i) {
    FeatureTensor f;
    f.data = Tensor3<double>(2, 4, 3, 1.0);
    f.roles = {ChannelRole::spectrogram, ChannelRole::spectrogram};
    f.meta.kind = FeatureKind::lin_spec_iv;
    for (std::size_t k = 0; k < 12; ++k) f.data.channel(1)[k] = double(k + i);
    io::write_feature(work / "in" / ("f" + std::to_string(i) + ".ftb"), f, "h");
  }
  auto r = run({"stats", (work / "in").string(), "--out", (work / "stats.ftb").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("(floored)"), std::string::npos);
  const auto kv = io::KeyValues::parse(io::read_text(work / "stats.ftb.manifest"));
  EXPECT_EQ(kv.get("dead_channels"), "0");
  const auto s = cli::read_stats(work / "stats.ftb");
  EXPECT_EQ(s.std[0], kStdFloor);
  r = run({"normalize", (work / "in").string(), "--stats", (work / "stats.ftb").string(), "--out",
           (work / "norm").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto n = io::read_feature(work / "norm" / "f0.ftb");
  for (double v : n.data.channel(0)) EXPECT_EQ(v, 0.0);
  fs::create_directories(work / "none");
  EXPECT_EQ(run({"stats", (work / "none").string(), "--out", (work / "s2.ftb").string()}).code, cli::kExitInput);
  EXPECT_EQ(run({"normalize", (work / "in").string(), "--stats", (work / "absent.ftb").string(), "--out",
                 (work / "norm").string()}).code,
            cli::kExitInput);
}

TEST(CliAugment, ReproducibleAndIdentityAtZero) {
  const auto work = fresh_dir("augment");
  ASSERT_EQ(run({"synth", demo_scene(), "--out", (work / "stft").string()}).code, 0);
  ASSERT_EQ(run({"extract", (work / "stft" / "demo_scene.ftb").string(), "--format", "foa", "--out",
                 (work / "feat").string()}).code, 0);
  const auto feat = (work / "feat").string(), labels = (work / "stft").string();
  ASSERT_EQ(run({"augment", feat, "--labels", labels, "--out", (work / "a").string(), "-p", "1", "--set",
                 "augment.seed=3"}).code, 0);
  ASSERT_EQ(run({"augment", feat, "--labels", labels, "--out", (work / "b").string(), "-p", "1", "--set",
                 "augment.seed=3"}).code, 0);
  EXPECT_EQ(bytes(work / "a" / "demo_scene.ftb"), bytes(work / "b" / "demo_scene.ftb"));
  EXPECT_EQ(bytes(work / "a" / "demo_scene.csv"), bytes(work / "b" / "demo_scene.csv"));
  EXPECT_NE(bytes(work / "a" / "demo_scene.ftb"), bytes(work / "feat" / "demo_scene.ftb"));

  ASSERT_EQ(run({"augment", feat, "--out", (work / "zero").string(), "-p", "0"}).code, 0);
  EXPECT_EQ(bytes(work / "zero" / "demo_scene.ftb"), bytes(work / "feat" / "demo_scene.ftb"));
  EXPECT_EQ(run({"augment", feat, "--out", (work / "bad").string(), "-p", "1.5"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"augment", feat, "--labels", (work / "nowhere").string(), "--out", (work / "c").string()}).code,
            cli::kExitInput);
}

TEST(CliBinary, ExitCodes) {
  const std::string bin = SALSA_CLI_PATH;
  ASSERT_TRUE(fs::exists(bin));
  const auto work = fresh_dir("binary");
  fs::create_directories(work / "empty");
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(bin + " --help"), 0);
  EXPECT_EQ(status(bin + " extract " + (work / "empty").string() + " --format foa --out " + (work / "o").string()), 2);
  EXPECT_EQ(status(bin + " extract " + (work / "empty").string() + " --format mic --feature linspeciv --out " +
                   (work / "o").string()),
            3);
  EXPECT_EQ(status(bin + " eval --aggregate-only --er 0.404 --f 0.724 --le 12.5 --lr 0.727"), 0);
}
