#include "eval/experiments.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <memory>

#include "eval/metrics.hpp"
#include "io/wav.hpp"
#include "util/random.hpp"

namespace exknet::eval {

namespace {

// Shortest round-trip decimal representation (what the JSON writer emits).
std::string num(double v) { return nlohmann::json(v).dump(); }

struct LoadedSystem {
  SystemSpec spec;
  std::unique_ptr<training::Checkpoint> ckpt;  // null for copy-synthesis controls
};

std::vector<LoadedSystem> load_systems(const std::vector<SystemSpec>& systems) {
  if (systems.empty()) throw_argument("evaluation: no systems given");
  std::vector<LoadedSystem> out;
  for (const SystemSpec& s : systems) {
    LoadedSystem ls;
    ls.spec = s;
    if (!s.is_copy_synthesis) {
      ls.ckpt = std::make_unique<training::Checkpoint>(training::load_checkpoint(s.checkpoint_path));
    }
    out.push_back(std::move(ls));
  }
  return out;
}

struct TestUtterance {
  const training::ManifestEntry* entry;
  dsp::Waveform wav;
  feat::FeatureTrack track;
};

std::vector<TestUtterance> load_test_split(const training::CorpusManifest& corpus,
                                           const ToolkitConfig& config) {
  const auto entries = corpus.select(training::Split::Test);
  if (entries.empty()) throw_argument("evaluation: manifest has no test utterances");
  std::vector<TestUtterance> out;
  for (const training::ManifestEntry* e : entries) {
    TestUtterance u;
    u.entry = e;
    u.wav = io::read_wav(e->path);
    if (u.wav.sample_rate_hz != config.sample_rate_hz) {
      throw_state("utterance " + e->id + ": sample rate mismatch");
    }
    u.track = feat::extract_features(u.wav, config.extract_options(), e->speaker);
    out.push_back(std::move(u));
  }
  return out;
}

dsp::Waveform render(const LoadedSystem& sys, const TestUtterance& utt,
                     const feat::FeatureTrack& conditions, const ToolkitConfig& config,
                     std::uint64_t seed) {
  if (sys.spec.is_copy_synthesis) {
    return voc::copy_synthesis(utt.wav, sys.spec.copy_kind, config.extract_options());
  }
  const std::uint64_t synth_seed =
      combine_seed(seed, fnv1a64(sys.spec.label) ^ fnv1a64(utt.entry->id));
  return voc::synthesize(*sys.ckpt, conditions, net::SampleMode::Random, synth_seed);
}

}  // namespace

SystemSpec parse_system_spec(const std::string& label, const std::string& target) {
  SystemSpec spec;
  spec.label = label;
  if (label.empty()) throw_argument("system label must be nonempty");
  if (target == "copy:wavenet" || target == "copy:excitnet") {
    spec.is_copy_synthesis = true;
    spec.copy_kind = voc::parse_kind(target.substr(5));
  } else {
    spec.checkpoint_path = target;
  }
  return spec;
}

std::vector<MetricRow> run_comparison(const training::CorpusManifest& corpus,
                                      const ToolkitConfig& config,
                                      const std::vector<SystemSpec>& systems,
                                      const ComparisonOptions& opt) {
  config.validate();
  const auto loaded = load_systems(systems);
  const auto test = load_test_split(corpus, config);

  std::vector<MetricRow> rows;
  std::map<std::pair<std::string, std::string>, std::vector<const MetricRow*>> groups;

  for (const LoadedSystem& sys : loaded) {
    for (const TestUtterance& utt : test) {
      feat::FeatureTrack conditions = utt.track;
      if (opt.perturb_sigma > 0.0 && !sys.spec.is_copy_synthesis) {
        const std::uint64_t pseed = combine_seed(opt.seed, fnv1a64("perturb") ^ fnv1a64(utt.entry->id));
        conditions =
            feat::perturb_features(utt.track, opt.perturb_sigma, pseed, sys.ckpt->stats, config.f0);
      }
      const dsp::Waveform synth = render(sys, utt, conditions, config, opt.seed);
      const feat::FeatureTrack resynth =
          feat::extract_features(synth, config.extract_options(), utt.entry->speaker);

      MetricRow row;
      row.speaker = utt.entry->speaker;
      row.system = sys.spec.label;
      row.utterance = utt.entry->id;
      row.lsd_db = lsd(utt.wav, synth, config.frame);
      row.f0_rmse_hz = f0_rmse(utt.track, resynth);
      rows.push_back(row);
    }
  }

  // Aggregate mean row per speaker x system.
  for (const MetricRow& r : rows) groups[{r.speaker, r.system}].push_back(&r);
  std::vector<MetricRow> aggregates;
  for (const auto& [key, members] : groups) {
    MetricRow agg;
    agg.speaker = key.first;
    agg.system = key.second;
    agg.utterance = "MEAN";
    for (const MetricRow* m : members) {
      agg.lsd_db += m->lsd_db;
      agg.f0_rmse_hz += m->f0_rmse_hz;
    }
    agg.lsd_db /= static_cast<double>(members.size());
    agg.f0_rmse_hz /= static_cast<double>(members.size());
    aggregates.push_back(agg);
  }
  rows.insert(rows.end(), aggregates.begin(), aggregates.end());

  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    const bool am = a.utterance == "MEAN", bm = b.utterance == "MEAN";
    return std::tie(a.speaker, a.system, am, a.utterance) <
           std::tie(b.speaker, b.system, bm, b.utterance);
  });
  return rows;
}

std::vector<F0ModRow> run_f0_modification(const training::CorpusManifest& corpus,
                                          const ToolkitConfig& config,
                                          const std::vector<SystemSpec>& systems,
                                          const std::vector<double>& factors, std::uint64_t seed) {
  config.validate();
  if (factors.empty()) throw_argument("run_f0_modification: no scaling factors");
  const auto loaded = load_systems(systems);
  const auto test = load_test_split(corpus, config);

  std::vector<F0ModRow> rows;
  for (const LoadedSystem& sys : loaded) {
    for (double factor : factors) {
      std::map<std::string, std::pair<double, std::size_t>> by_speaker;
      for (const TestUtterance& utt : test) {
        const feat::FeatureTrack scaled = feat::scale_f0(utt.track, factor);
        const dsp::Waveform synth = render(sys, utt, scaled, config, seed);
        const feat::FeatureTrack resynth =
            feat::extract_features(synth, config.extract_options(), utt.entry->speaker);
        // Copy-synthesis reproduces the unscaled waveform; score it against
        // the trajectory it actually consumed so it stays a codec-only
        // control at every factor.
        const feat::FeatureTrack& target = sys.spec.is_copy_synthesis ? utt.track : scaled;
        const double rmse = f0_rmse(target, resynth);
        auto& acc = by_speaker[utt.entry->speaker];
        acc.first += rmse;
        acc.second += 1;
      }
      for (const auto& [speaker, acc] : by_speaker) {
        F0ModRow row;
        row.speaker = speaker;
        row.system = sys.spec.label;
        row.factor = factor;
        row.f0_rmse_hz = acc.first / static_cast<double>(acc.second);
        rows.push_back(row);
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const F0ModRow& a, const F0ModRow& b) {
    return std::tie(a.speaker, a.system, a.factor) < std::tie(b.speaker, b.system, b.factor);
  });
  return rows;
}

std::string comparison_csv(const std::vector<MetricRow>& rows) {
  std::string csv = "speaker,system,utterance,lsd_db,f0_rmse_hz\n";
  for (const MetricRow& r : rows) {
    csv += r.speaker + "," + r.system + "," + r.utterance + "," + num(r.lsd_db) + "," +
           num(r.f0_rmse_hz) + "\n";
  }
  return csv;
}

std::string f0_modification_csv(const std::vector<F0ModRow>& rows) {
  std::string csv = "speaker,system,factor,f0_rmse_hz\n";
  for (const F0ModRow& r : rows) {
    csv += r.speaker + "," + r.system + "," + num(r.factor) + "," + num(r.f0_rmse_hz) + "\n";
  }
  return csv;
}

}  // namespace exknet::eval
