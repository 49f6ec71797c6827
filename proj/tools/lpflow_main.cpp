// lpflow command line: train the three models, generate samples, inpaint,
// interpolate latents, run step sweeps, and export datasets.
//
// Exit codes: 0 success, 1 internal error, 2 missing prerequisite checkpoint,
// 3 invalid input (config/arguments/files), 4 checkpoint kind mismatch.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "lpflow/checkpoint.hpp"
#include "lpflow/config.hpp"
#include "lpflow/data.hpp"
#include "lpflow/eval.hpp"
#include "lpflow/io.hpp"
#include "lpflow/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lpflow;

namespace {

struct missing_prereq : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::set<std::string> kSchema = {
    "model.width", "model.blocks", "model.time_freqs", "model.latent_dim",
    "data.kind", "data.n", "data.noise", "data.side", "data.seed",
    "train.steps", "train.batch", "train.lr", "train.beta1", "train.beta2",
    "train.weight_decay", "train.eps", "train.kl_weight", "train.record_every",
    "sample.count", "sample.latent_steps", "sample.latent_method",
    "sample.fm_steps", "sample.fm_method", "sample.invert_steps", "sample.perturb_alpha",
    "eval.projections", "eval.metric", "eval.mmd_bandwidth",
    "sweep.steps_list",
};

Settings load_settings(const std::string& config_path, const std::string& preset,
                       uint64_t seed, bool seed_given) {
    ConfigFile file;
    if (!config_path.empty()) {
        file = ConfigFile::parse_file(config_path);
        file.check_known_keys(kSchema);
    }
    Settings s(std::move(file));
    if (!preset.empty()) {
        if (preset == "midpoint-4-2") {
            s.push("sample.latent_steps", "4");
            s.push("sample.latent_method", "midpoint");
            s.push("sample.fm_steps", "2");
            s.push("sample.fm_method", "midpoint");
        } else if (preset == "heun3-2-1") {
            s.push("sample.latent_steps", "2");
            s.push("sample.latent_method", "heun3");
            s.push("sample.fm_steps", "1");
            s.push("sample.fm_method", "heun3");
        } else {
            throw std::invalid_argument("unknown preset '" + preset +
                                        "' (available: midpoint-4-2, heun3-2-1)");
        }
    }
    if (seed_given) {
        s.push("data.seed", std::to_string(seed));
    }
    return s;
}

struct DataSpec {
    bool images = false;
    Dataset2d kind = Dataset2d::two_moons;
    int n = 4096;
    double noise = 0.05;
    int side = 8;
    uint64_t seed = 1;
    std::vector<int> shape;
    int dim = 0;
};

DataSpec resolve_data(Settings& s) {
    DataSpec d;
    const std::string kind = s.get_string("data.kind", "two_moons");
    d.n = s.get_int("data.n", 4096);
    d.noise = s.get_double("data.noise", 0.05);
    d.side = s.get_int("data.side", 8);
    d.seed = s.get_u64("data.seed", 1);
    if (kind == "blobs") {
        d.images = true;
        d.shape = {d.side, d.side};
        d.dim = d.side * d.side;
    } else {
        d.kind = parse_dataset_2d(kind);
        d.shape = {2};
        d.dim = 2;
    }
    return d;
}

SampleSet build_dataset(const DataSpec& d) {
    return d.images ? make_blob_images(d.n, d.side, d.seed)
                    : make_2d(d.kind, d.n, d.noise, d.seed);
}

struct ModelSpec {
    int width = 128;
    int blocks = 3;
    int time_freqs = 16;
    int latent_dim = 0;
};

ModelSpec resolve_model(Settings& s, const DataSpec& d) {
    ModelSpec m;
    m.width = s.get_int("model.width", 128);
    m.blocks = s.get_int("model.blocks", 3);
    m.time_freqs = s.get_int("model.time_freqs", 16);
    m.latent_dim = s.get_int("model.latent_dim", d.images ? 64 : 32);
    return m;
}

TrainConfig resolve_train(Settings& s, uint64_t seed) {
    TrainConfig t;
    t.steps = s.get_int("train.steps", 8000);
    t.batch = s.get_int("train.batch", 128);
    t.lr = s.get_double("train.lr", 3e-4);
    t.beta1 = s.get_double("train.beta1", 0.9);
    t.beta2 = s.get_double("train.beta2", 0.99);
    t.weight_decay = s.get_double("train.weight_decay", 0.0);
    t.eps = s.get_double("train.eps", 1e-8);
    t.record_every = s.get_int("train.record_every", 0);
    t.seed = seed;
    return t;
}

GenerationConfig resolve_generation(Settings& s, uint64_t seed) {
    GenerationConfig g;
    g.latent_steps = s.get_int("sample.latent_steps", 4);
    g.latent_method = parse_solver_method(s.get_string("sample.latent_method", "midpoint"));
    g.fm_steps = s.get_int("sample.fm_steps", 2);
    g.fm_method = parse_solver_method(s.get_string("sample.fm_method", "midpoint"));
    g.count = s.get_int("sample.count", 256);
    g.seed = seed;
    return g;
}

void write_resolved(const Settings& s, const fs::path& out_dir) {
    std::ofstream os(out_dir / "config.resolved", std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot write config.resolved in " + out_dir.string());
    }
    os << s.resolved_snapshot();
}

fs::path require_out_dir(const std::string& out) {
    require(!out.empty(), "--out directory is required");
    fs::path p(out);
    fs::create_directories(p);
    return p;
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) {
        throw missing_prereq("missing " + what + ": " + p.string() +
                             " (run the corresponding train stage first)");
    }
}

AuxModel load_aux(const fs::path& dir, float kl_weight) {
    require_file(dir / "encoder.ckpt", "aux encoder checkpoint");
    require_file(dir / "decoder.ckpt", "aux decoder checkpoint");
    AuxModel aux;
    aux.encoder = load_checkpoint(dir / "encoder.ckpt", ModelKind::encoder);
    aux.decoder = load_checkpoint(dir / "decoder.ckpt", ModelKind::decoder);
    aux.kl_weight = kl_weight;
    aux.data_dim = aux.encoder.config().input_dim;
    aux.latent_dim = aux.decoder.config().input_dim;
    require(aux.encoder.config().output_dim == 2 * aux.latent_dim &&
                aux.decoder.config().output_dim == 2 * aux.data_dim,
            "aux checkpoints are inconsistent with each other");
    return aux;
}

void write_manifest(const fs::path& out_dir, json manifest) {
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    os << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_train(const std::string& stage, const std::string& config_path, const std::string& preset,
              uint64_t seed, bool seed_given, const std::string& out, const std::string& aux_dir) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);
    const ModelSpec mspec = resolve_model(s, dspec);
    TrainConfig tcfg = resolve_train(s, seed);
    const double kl_weight = s.get_double("train.kl_weight", 1e-3);
    const SampleSet dataset = build_dataset(dspec);
    const fs::path aux_path = aux_dir.empty() ? out_dir : fs::path(aux_dir);

    if (stage == "aux") {
        AuxModel aux = make_aux_model(dspec.dim, mspec.latent_dim, mspec.width, mspec.blocks,
                                      static_cast<float>(kl_weight), derive_seed(seed, 1));
        const TrainResult res = train_auxiliary(aux, dataset, tcfg);
        write_history_csv(out_dir / "history_aux.csv", res.history);
        save_checkpoint(out_dir / "encoder.ckpt", ModelKind::encoder, aux.encoder);
        save_checkpoint(out_dir / "decoder.ckpt", ModelKind::decoder, aux.decoder);
        write_resolved(s, out_dir);
        if (res.aborted) {
            std::cerr << "training aborted: " << res.diagnostic << "\n";
            return 1;
        }
        std::printf("trained aux (%d steps), final loss %.6f\n", tcfg.steps, res.final_loss);
    } else if (stage == "fm" || stage == "latent") {
        const AuxModel aux = load_aux(aux_path, static_cast<float>(kl_weight));
        require(aux.data_dim == dspec.dim, "aux checkpoint does not match the configured dataset");
        if (stage == "fm") {
            MlpConfig mc;
            mc.input_dim = dspec.dim;
            mc.cond_dim = aux.latent_dim;
            mc.output_dim = dspec.dim;
            mc.width = mspec.width;
            mc.blocks = mspec.blocks;
            mc.time_freqs = mspec.time_freqs;
            Mlp<float> model(mc, derive_seed(seed, 2));
            const TrainResult res = train_flow(model, PriorSource::learned, &aux, dataset, tcfg);
            write_history_csv(out_dir / "history_fm.csv", res.history);
            save_checkpoint(out_dir / "fm.ckpt", ModelKind::flow, model);
            write_resolved(s, out_dir);
            if (res.aborted) {
                std::cerr << "training aborted: " << res.diagnostic << "\n";
                return 1;
            }
            std::printf("trained fm (%d steps), final loss %.6f\n", tcfg.steps, res.final_loss);
        } else {
            MlpConfig mc;
            mc.input_dim = aux.latent_dim;
            mc.cond_dim = 0;
            mc.output_dim = aux.latent_dim;
            mc.width = mspec.width;
            mc.blocks = mspec.blocks;
            mc.time_freqs = mspec.time_freqs;
            Mlp<float> model(mc, derive_seed(seed, 3));
            const TrainResult res = train_latent_sampler(model, aux, dataset, tcfg);
            write_history_csv(out_dir / "history_latent.csv", res.history);
            save_checkpoint(out_dir / "latent.ckpt", ModelKind::latent, model);
            write_resolved(s, out_dir);
            if (res.aborted) {
                std::cerr << "training aborted: " << res.diagnostic << "\n";
                return 1;
            }
            std::printf("trained latent sampler (%d steps), final loss %.6f\n", tcfg.steps,
                        res.final_loss);
        }
    } else if (stage == "fm-baseline") {
        MlpConfig mc;
        mc.input_dim = dspec.dim;
        mc.cond_dim = 0;
        mc.output_dim = dspec.dim;
        mc.width = mspec.width;
        mc.blocks = mspec.blocks;
        mc.time_freqs = mspec.time_freqs;
        Mlp<float> model(mc, derive_seed(seed, 4));
        const TrainResult res = train_flow(model, PriorSource::gaussian, nullptr, dataset, tcfg);
        write_history_csv(out_dir / "history_fm_baseline.csv", res.history);
        save_checkpoint(out_dir / "fm_baseline.ckpt", ModelKind::flow, model);
        write_resolved(s, out_dir);
        if (res.aborted) {
            std::cerr << "training aborted: " << res.diagnostic << "\n";
            return 1;
        }
        std::printf("trained fm-baseline (%d steps), final loss %.6f\n", tcfg.steps, res.final_loss);
    } else {
        throw std::invalid_argument("unknown train stage '" + stage +
                                    "' (expected aux, fm, fm-baseline or latent)");
    }
    return 0;
}

json solver_json(const GenerationConfig& g) {
    return json{{"latent_steps", g.latent_steps},
                {"latent_method", to_string(g.latent_method)},
                {"fm_steps", g.fm_steps},
                {"fm_method", to_string(g.fm_method)}};
}

std::vector<std::string> emit_samples(const SampleSet& set, const DataSpec& dspec,
                                      const fs::path& out_dir, const std::string& stem) {
    std::vector<std::string> files;
    if (dspec.images) {
        for (int i = 0; i < set.count; ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_%05d.pgm", stem.c_str(), i);
            const auto row = set.row(i);
            write_pgm(out_dir / name, row, dspec.side, dspec.side);
            files.emplace_back(name);
        }
    } else {
        const std::string name = stem + ".csv";
        write_samples_csv(out_dir / name, set);
        files.push_back(name);
    }
    return files;
}

int cmd_generate(const std::string& config_path, const std::string& preset, uint64_t seed,
                 bool seed_given, const std::string& out, const std::string& aux_dir,
                 const std::string& fm_path, const std::string& lat_path, bool baseline) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);
    GenerationConfig gcfg = resolve_generation(s, seed);
    require(!fm_path.empty(), "--fm checkpoint path is required");
    require_file(fm_path, "flow checkpoint");
    const Mlp<float> fm = load_checkpoint(fm_path, ModelKind::flow);

    SampleSet set;
    if (baseline) {
        set = generate_baseline(fm, gcfg, dspec.shape);
    } else {
        require(!lat_path.empty(), "--latent checkpoint path is required (or pass --baseline)");
        const fs::path aux_path = aux_dir.empty() ? out_dir : fs::path(aux_dir);
        const AuxModel aux = load_aux(aux_path, 1e-3f);
        require_file(lat_path, "latent sampler checkpoint");
        const Mlp<float> lat = load_checkpoint(lat_path, ModelKind::latent);
        set = generate(aux, fm, lat, gcfg, dspec.shape);
    }

    const auto files = emit_samples(set, dspec, out_dir, "samples");
    json manifest{{"command", "generate"},
                  {"prior", baseline ? "gaussian" : "learned"},
                  {"seed", seed},
                  {"count", gcfg.count},
                  {"solver", solver_json(gcfg)},
                  {"files", files}};
    if (!preset.empty()) manifest["preset"] = preset;
    write_manifest(out_dir, manifest);
    write_resolved(s, out_dir);
    std::printf("generated %d samples (%s prior)\n", gcfg.count, baseline ? "gaussian" : "learned");
    return 0;
}

std::vector<double> read_sample_file(const std::string& path, const DataSpec& dspec) {
    std::vector<double> y;
    if (fs::path(path).extension() == ".pgm") {
        const PgmImage img = read_pgm(path);
        require(img.width == dspec.side && img.height == dspec.side,
                "input image size does not match data.side");
        y = img.values;
    } else {
        y = read_values_csv(path);
    }
    require(static_cast<int>(y.size()) == dspec.dim,
            "input sample has " + std::to_string(y.size()) + " values, expected " +
                std::to_string(dspec.dim));
    return y;
}

int cmd_inpaint(const std::string& config_path, const std::string& preset, uint64_t seed,
                bool seed_given, const std::string& out, const std::string& aux_dir,
                const std::string& fm_path, const std::string& lat_path,
                const std::string& input_path, const std::string& mask_path) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);

    require(!fm_path.empty(), "--fm checkpoint path is required");
    require_file(fm_path, "flow checkpoint");
    const fs::path aux_path = aux_dir.empty() ? out_dir : fs::path(aux_dir);
    const AuxModel aux = load_aux(aux_path, 1e-3f);
    const Mlp<float> fm = load_checkpoint(fm_path, ModelKind::flow);

    InpaintConfig icfg;
    icfg.fm_steps = s.get_int("sample.fm_steps", 4);
    icfg.fm_method = parse_solver_method(s.get_string("sample.fm_method", "midpoint"));
    icfg.seed = seed;
    icfg.perturb_alpha = s.get_double("sample.perturb_alpha", 0.0);
    icfg.invert_steps = s.get_int("sample.invert_steps", 32);

    std::optional<Mlp<float>> lat;
    if (icfg.perturb_alpha != 0.0) {
        require(!lat_path.empty(), "--latent is required when sample.perturb_alpha != 0");
    }
    if (!lat_path.empty()) {
        require_file(lat_path, "latent sampler checkpoint");
        lat = load_checkpoint(lat_path, ModelKind::latent);
    }

    const std::vector<double> y = read_sample_file(input_path, dspec);
    const std::vector<double> mask_vals = read_values_csv(mask_path);
    require(mask_vals.size() == y.size(), "mask length " + std::to_string(mask_vals.size()) +
                                              " does not match sample length " +
                                              std::to_string(y.size()));
    std::vector<uint8_t> mask(mask_vals.size());
    for (size_t i = 0; i < mask_vals.size(); ++i) {
        require(mask_vals[i] == 0.0 || mask_vals[i] == 1.0, "mask entries must be 0 or 1");
        mask[i] = static_cast<uint8_t>(mask_vals[i]);
    }

    const auto result = inpaint(aux, fm, lat ? &*lat : nullptr, y, mask, icfg);

    std::string file;
    if (dspec.images) {
        file = "inpainted.pgm";
        write_pgm(out_dir / file, result, dspec.side, dspec.side);
    } else {
        file = "inpainted.csv";
        write_vector_csv(out_dir / file, result, dspec.dim);
    }
    json manifest{{"command", "inpaint"},
                  {"seed", seed},
                  {"fm_steps", icfg.fm_steps},
                  {"fm_method", to_string(icfg.fm_method)},
                  {"perturb_alpha", icfg.perturb_alpha},
                  {"files", {file}}};
    write_manifest(out_dir, manifest);
    write_resolved(s, out_dir);
    std::printf("inpainted sample written to %s\n", (out_dir / file).string().c_str());
    return 0;
}

int cmd_interp(const std::string& config_path, const std::string& preset, uint64_t seed,
               bool seed_given, const std::string& out, const std::string& aux_dir,
               const std::string& fm_path, const std::string& lat_path, const std::string& mode_str,
               const std::string& input_a, const std::string& input_b, int frames) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);
    require(frames >= 2, "--frames must be >= 2");

    require(!fm_path.empty() && !lat_path.empty(), "--fm and --latent checkpoints are required");
    require_file(fm_path, "flow checkpoint");
    require_file(lat_path, "latent sampler checkpoint");
    const fs::path aux_path = aux_dir.empty() ? out_dir : fs::path(aux_dir);
    const AuxModel aux = load_aux(aux_path, 1e-3f);
    const Mlp<float> fm = load_checkpoint(fm_path, ModelKind::flow);
    const Mlp<float> lat = load_checkpoint(lat_path, ModelKind::latent);

    const InterpMode mode = parse_interp_mode(mode_str);
    const int invert_steps = s.get_int("sample.invert_steps", 32);
    GenerationConfig gcfg = resolve_generation(s, seed);

    Rng rng(derive_seed(seed, 7));
    std::vector<float> z0, z1;
    if (!input_a.empty() || !input_b.empty()) {
        require(!input_a.empty() && !input_b.empty(), "provide both --input-a and --input-b");
        const auto ya = read_sample_file(input_a, dspec);
        const auto yb = read_sample_file(input_b, dspec);
        std::vector<float> fa(ya.begin(), ya.end()), fb(yb.begin(), yb.end());
        z0 = reparam_sample(encode(aux, fa), rng);
        z1 = reparam_sample(encode(aux, fb), rng);
    } else {
        z0 = sample_latent(lat, rng, gcfg.latent_steps, gcfg.latent_method);
        z1 = sample_latent(lat, rng, gcfg.latent_steps, gcfg.latent_method);
    }

    std::vector<std::string> files;
    for (int i = 0; i < frames; ++i) {
        const double alpha = static_cast<double>(i) / (frames - 1);
        const auto z = interpolate_latents(&lat, z0, z1, alpha, mode, invert_steps,
                                           gcfg.latent_method);
        const auto y = generate_one(aux, fm, z, rng, gcfg.fm_steps, gcfg.fm_method);
        const std::vector<double> yd(y.begin(), y.end());
        char name[64];
        if (dspec.images) {
            std::snprintf(name, sizeof(name), "interp_%03d.pgm", i);
            write_pgm(out_dir / name, yd, dspec.side, dspec.side);
        } else {
            std::snprintf(name, sizeof(name), "interp_%03d.csv", i);
            write_vector_csv(out_dir / name, yd, dspec.dim);
        }
        files.emplace_back(name);
    }
    json manifest{{"command", "interp"},
                  {"seed", seed},
                  {"mode", mode_str},
                  {"frames", frames},
                  {"solver", solver_json(gcfg)},
                  {"files", files}};
    write_manifest(out_dir, manifest);
    write_resolved(s, out_dir);
    std::printf("wrote %d interpolation frames (%s mode)\n", frames, mode_str.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset, uint64_t seed,
              bool seed_given, const std::string& out, const std::string& aux_dir,
              const std::string& fm_path, const std::string& baseline_path,
              const std::string& lat_path, const std::string& steps_list_arg, bool plot_script) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);
    GenerationConfig gcfg = resolve_generation(s, seed);
    require(!fm_path.empty() || !baseline_path.empty(),
            "provide --fm (learned prior) and/or --fm-baseline (gaussian prior)");

    // steps list: CLI flag wins over config
    std::string steps_str = steps_list_arg.empty()
                                ? s.get_string("sweep.steps_list", "1,2,4,8,16")
                                : steps_list_arg;
    std::vector<int> steps_list;
    {
        std::string tok;
        std::istringstream iss(steps_str);
        while (std::getline(iss, tok, ',')) {
            if (tok.empty()) continue;
            steps_list.push_back(std::stoi(tok));
            require(steps_list.back() >= 1, "sweep steps must be >= 1");
        }
        require(!steps_list.empty(), "sweep steps_list is empty");
    }

    const SampleSet reference = build_dataset(dspec);
    const std::string metric_name = s.get_string("eval.metric", "sliced_w2");
    const int projections = s.get_int("eval.projections", 512);
    double bandwidth = s.get_double("eval.mmd_bandwidth", 0.0);
    if (metric_name == "mmd" && bandwidth <= 0.0) {
        bandwidth = median_heuristic_bandwidth(reference, reference);
    }
    const uint64_t metric_seed = derive_seed(seed, 91);
    auto metric = [&](const SampleSet& a, const SampleSet& b) {
        if (metric_name == "sliced_w2") {
            Rng mrng(metric_seed);
            return sliced_w2(a, b, projections, mrng);
        }
        if (metric_name == "mmd") {
            return mmd_rbf(a, b, bandwidth);
        }
        throw std::invalid_argument("unknown eval.metric '" + metric_name + "'");
    };

    std::vector<SweepRow> all_rows;
    if (!fm_path.empty()) {
        require(!lat_path.empty(), "--latent is required for the learned-prior sweep");
        const fs::path aux_path = aux_dir.empty() ? out_dir : fs::path(aux_dir);
        const AuxModel aux = load_aux(aux_path, 1e-3f);
        require_file(fm_path, "flow checkpoint");
        require_file(lat_path, "latent sampler checkpoint");
        const Mlp<float> fm = load_checkpoint(fm_path, ModelKind::flow);
        const Mlp<float> lat = load_checkpoint(lat_path, ModelKind::latent);
        auto generator = [&](int steps) {
            GenerationConfig g = gcfg;
            g.fm_steps = steps;
            return generate(aux, fm, lat, g, dspec.shape);
        };
        auto rows = step_sweep(generator, reference, steps_list, metric);
        for (auto& r : rows) {
            r.method = metric_name;
            r.prior = "learned";
            r.solver = to_string(gcfg.fm_method);
            all_rows.push_back(std::move(r));
        }
    }
    if (!baseline_path.empty()) {
        require_file(baseline_path, "baseline flow checkpoint");
        const Mlp<float> fm = load_checkpoint(baseline_path, ModelKind::flow);
        auto generator = [&](int steps) {
            GenerationConfig g = gcfg;
            g.fm_steps = steps;
            return generate_baseline(fm, g, dspec.shape);
        };
        auto rows = step_sweep(generator, reference, steps_list, metric);
        for (auto& r : rows) {
            r.method = metric_name;
            r.prior = "gaussian";
            r.solver = to_string(gcfg.fm_method);
            all_rows.push_back(std::move(r));
        }
    }

    write_sweep_csv(out_dir / "sweep.csv", all_rows);
    if (plot_script) {
        write_sweep_plot_script(out_dir / "sweep.gp", "sweep.csv");
    }
    write_resolved(s, out_dir);
    std::printf("sweep finished: %zu rows\n", all_rows.size());
    return 0;
}

int cmd_export_data(const std::string& config_path, const std::string& preset, uint64_t seed,
                    bool seed_given, const std::string& out) {
    Settings s = load_settings(config_path, preset, seed, seed_given);
    const fs::path out_dir = require_out_dir(out);
    const DataSpec dspec = resolve_data(s);
    const SampleSet set = build_dataset(dspec);
    const auto files = emit_samples(set, dspec, out_dir, "data");
    json manifest{{"command", "export-data"},
                  {"kind", dspec.images ? "blobs" : to_string(dspec.kind)},
                  {"n", dspec.n},
                  {"seed", dspec.seed},
                  {"files", files}};
    write_manifest(out_dir, manifest);
    write_resolved(s, out_dir);
    std::printf("exported %d samples\n", set.count);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flow-matching generative modeling with a learned prior"};
    app.require_subcommand(1);

    std::string config_path, out, preset;
    uint64_t seed = 0;
    app.add_option("--config", config_path, "config file (key = value sections)");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "global seed (u64)");
    app.add_option("--preset", preset, "sampling preset: midpoint-4-2 | heun3-2-1");
    app.fallthrough();

    auto* train = app.add_subcommand("train", "train one pipeline stage");
    std::string stage, aux_dir;
    train->add_option("--stage", stage, "aux | fm | fm-baseline | latent")->required();
    train->add_option("--aux", aux_dir, "directory holding encoder.ckpt/decoder.ckpt (default: --out)");

    auto* gen = app.add_subcommand("generate", "sample from trained models");
    std::string fm_path, lat_path;
    bool baseline = false;
    gen->add_option("--fm", fm_path, "flow checkpoint");
    gen->add_option("--latent", lat_path, "latent sampler checkpoint");
    gen->add_option("--aux", aux_dir, "aux checkpoint directory (default: --out)");
    gen->add_flag("--baseline", baseline, "gaussian-prior unconditional generation");

    auto* inp = app.add_subcommand("inpaint", "regenerate masked coordinates of a sample");
    std::string input_path, mask_path;
    inp->add_option("--fm", fm_path, "flow checkpoint");
    inp->add_option("--latent", lat_path, "latent sampler checkpoint (for perturbation)");
    inp->add_option("--aux", aux_dir, "aux checkpoint directory (default: --out)");
    inp->add_option("--input", input_path, "sample to inpaint (.csv or .pgm)")->required();
    inp->add_option("--mask", mask_path, "mask file, one 0/1 per coordinate")->required();

    auto* interp = app.add_subcommand("interp", "interpolate between two latent codes");
    std::string mode = "w", input_a, input_b;
    int frames = 9;
    interp->add_option("--fm", fm_path, "flow checkpoint");
    interp->add_option("--latent", lat_path, "latent sampler checkpoint");
    interp->add_option("--aux", aux_dir, "aux checkpoint directory (default: --out)");
    interp->add_option("--mode", mode, "z (linear in latent) | w (linear in source space)");
    interp->add_option("--input-a", input_a, "first endpoint sample file");
    interp->add_option("--input-b", input_b, "second endpoint sample file");
    interp->add_option("--frames", frames, "number of interpolation frames");

    auto* sweep = app.add_subcommand("sweep", "metric vs solver steps table");
    std::string baseline_path, steps_list_arg;
    bool plot = false;
    sweep->add_option("--fm", fm_path, "learned-prior flow checkpoint");
    sweep->add_option("--fm-baseline", baseline_path, "gaussian-prior flow checkpoint");
    sweep->add_option("--latent", lat_path, "latent sampler checkpoint");
    sweep->add_option("--aux", aux_dir, "aux checkpoint directory (default: --out)");
    sweep->add_option("--steps-list", steps_list_arg, "comma-separated step counts");
    sweep->add_flag("--plot-script", plot, "emit a gnuplot script next to the CSV");

    auto* exp = app.add_subcommand("export-data", "write the configured dataset to disk");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }
    const bool seed_given = app.count("--seed") > 0;

    try {
        if (train->parsed()) {
            return cmd_train(stage, config_path, preset, seed, seed_given, out, aux_dir);
        }
        if (gen->parsed()) {
            return cmd_generate(config_path, preset, seed, seed_given, out, aux_dir, fm_path,
                                lat_path, baseline);
        }
        if (inp->parsed()) {
            return cmd_inpaint(config_path, preset, seed, seed_given, out, aux_dir, fm_path,
                               lat_path, input_path, mask_path);
        }
        if (interp->parsed()) {
            return cmd_interp(config_path, preset, seed, seed_given, out, aux_dir, fm_path,
                              lat_path, mode, input_a, input_b, frames);
        }
        if (sweep->parsed()) {
            return cmd_sweep(config_path, preset, seed, seed_given, out, aux_dir, fm_path,
                             baseline_path, lat_path, steps_list_arg, plot);
        }
        if (exp->parsed()) {
            return cmd_export_data(config_path, preset, seed, seed_given, out);
        }
        std::cerr << "no command given\n";
        return 3;
    } catch (const missing_prereq& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const kind_mismatch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
