// Batch front door. Every subcommand validates its inputs, writes its outputs
// plus a config echo into the target directory, and uses exit codes
// 0 (ok) / 1 (runtime failure) / 2 (usage or config error).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgssl/analysis.hpp"
#include "cgssl/augment.hpp"
#include "cgssl/encoder.hpp"
#include "cgssl/graph.hpp"
#include "cgssl/objectives.hpp"
#include "cgssl/spectrum.hpp"
#include "cgssl/theory.hpp"
#include "cgssl/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "cgssl 1.0.0";

std::uint64_t env_seed() {
    const char* s = std::getenv("CGSSL_SEED");
    return s ? std::strtoull(s, nullptr, 10) : 0;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
}

// Config echo + tool version, written into every run directory.
void write_run_info(const fs::path& dir, const json& config) {
    fs::create_directories(dir);
    json echo = config;
    echo["version"] = kVersion;
    write_text(dir / "config.json", echo.dump(2) + "\n");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// --- config <-> json ---------------------------------------------------------

cgssl::AugmentationSpec augmentation_from_json(const json& j) {
    cgssl::AugmentationSpec spec;
    spec.kind = cgssl::augment_kind_from_string(j.value("kind", "identity"));
    spec.p = j.value("p", spec.p);
    spec.q = j.value("q", spec.q);
    spec.alpha = j.value("alpha", spec.alpha);
    spec.budget = j.value("budget", spec.budget);
    spec.candidates = j.value("candidates", spec.candidates);
    spec.r_spa = j.value("r_spa", spec.r_spa);
    spec.d_spa = j.value("d_spa", spec.d_spa);
    spec.max_attempts = j.value("max_attempts", spec.max_attempts);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

json augmentation_to_json(const cgssl::AugmentationSpec& s) {
    return json{{"kind", cgssl::to_string(s.kind)}, {"p", s.p},       {"q", s.q},
                {"alpha", s.alpha},                 {"budget", s.budget},
                {"candidates", s.candidates},       {"r_spa", s.r_spa},
                {"d_spa", s.d_spa},                 {"max_attempts", s.max_attempts},
                {"seed", s.seed}};
}

cgssl::EncoderConfig encoder_from_json(const json& j) {
    cgssl::EncoderConfig cfg;
    cfg.k = j.value("k", cfg.k);
    if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<int>>();
    cfg.proj_dim = j.value("proj_dim", cfg.proj_dim);
    if (j.contains("weight_norm_cap") && !j["weight_norm_cap"].is_null())
        cfg.weight_norm_cap = j["weight_norm_cap"].get<double>();
    cfg.self_loops = j.value("self_loops", cfg.self_loops);
    cfg.normalize_output = j.value("normalize_output", cfg.normalize_output);
    return cfg;
}

json encoder_to_json(const cgssl::EncoderConfig& c) {
    json j{{"k", c.k},
           {"dims", c.dims},
           {"proj_dim", c.proj_dim},
           {"self_loops", c.self_loops},
           {"normalize_output", c.normalize_output}};
    if (c.weight_norm_cap) j["weight_norm_cap"] = *c.weight_norm_cap;
    else j["weight_norm_cap"] = nullptr;
    return j;
}

cgssl::TrainConfig train_config_from_json(const json& j) {
    cgssl::TrainConfig cfg;
    cfg.framework = cgssl::framework_from_string(j.value("framework", "gbt"));
    cfg.loss.kind = cgssl::framework_loss(cfg.framework);
    if (j.contains("augmentation_1"))
        cfg.augmentation_1 = augmentation_from_json(j["augmentation_1"]);
    if (j.contains("augmentation_2"))
        cfg.augmentation_2 = augmentation_from_json(j["augmentation_2"]);
    if (j.contains("encoder")) cfg.encoder = encoder_from_json(j["encoder"]);
    if (j.contains("loss")) {
        cfg.loss.tau = j["loss"].value("tau", cfg.loss.tau);
        cfg.loss.lambda = j["loss"].value("lambda", cfg.loss.lambda);
    }
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.spectrum_logging = j.value("spectrum_logging", cfg.spectrum_logging);
    return cfg;
}

json train_config_to_json(const cgssl::TrainConfig& c) {
    return json{{"framework", cgssl::to_string(c.framework)},
                {"augmentation_1", augmentation_to_json(c.augmentation_1)},
                {"augmentation_2", augmentation_to_json(c.augmentation_2)},
                {"encoder", encoder_to_json(c.encoder)},
                {"loss", json{{"tau", c.loss.tau}, {"lambda", c.loss.lambda}}},
                {"epochs", c.epochs},
                {"lr", c.lr},
                {"momentum", c.momentum},
                {"seed", c.seed},
                {"spectrum_logging", c.spectrum_logging}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return json::parse(in);
}

cgssl::Graph data_from_json(const json& j, std::uint64_t fallback_seed) {
    if (j.contains("path")) return cgssl::load_graph(j["path"].get<std::string>());
    cgssl::FeatureParams feat;
    feat.dim = j.value("feature_dim", feat.dim);
    feat.signal = j.value("signal", feat.signal);
    feat.noise = j.value("noise", feat.noise);
    std::uint64_t seed = j.value("data_seed", fallback_seed);
    std::string family = j.value("family", "er");
    if (family == "er")
        return cgssl::generate_er(j.value("n", 100), j.value("p", 0.05), seed, feat);
    if (family == "sbm") {
        int blocks = j.value("blocks", 2);
        int block_size = j.value("block_size", 100);
        return cgssl::generate_sbm(std::vector<int>(blocks, block_size),
                                   j.value("p_in", 0.1), j.value("p_out", 0.005),
                                   seed, feat);
    }
    throw std::invalid_argument("data: unknown family '" + family + "'");
}

// --- shared run logic ----------------------------------------------------------

struct RunMetrics {
    double final_loss = 0.0;
    double accuracy = -1.0;
    double og_aug = -1.0;
    double aug_aug = -1.0;
};

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

// Mean spectral distance original-vs-view and view-vs-view for samples of the
// first augmentation (size-preserving kinds only).
void view_distances(const cgssl::Graph& g, const cgssl::AugmentationSpec& spec,
                    std::uint64_t seed, RunMetrics& m) {
    if (spec.kind == cgssl::AugmentKind::ppr) return;
    cgssl::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    cgssl::Spectrum orig = cgssl::laplacian_spectrum(g);
    std::vector<cgssl::Spectrum> views;
    for (int i = 0; i < 10; ++i)
        views.push_back(cgssl::laplacian_spectrum(
            cgssl::apply_augmentation(g, spec, rng).graph));
    std::vector<double> og, aa;
    for (const auto& s : views) og.push_back(cgssl::spectral_distance(orig, s));
    for (std::size_t i = 1; i < views.size(); ++i)
        aa.push_back(cgssl::spectral_distance(views[i - 1], views[i]));
    m.og_aug = mean(og);
    m.aug_aug = mean(aa);
}

cgssl::Split split_from_json(const json& j, int n, std::uint64_t seed) {
    double f_train = 0.3, f_val = 0.2, f_test = 0.5;
    if (j.contains("split")) {
        f_train = j["split"].value("train", f_train);
        f_val = j["split"].value("val", f_val);
        f_test = j["split"].value("test", f_test);
    }
    return cgssl::make_split(n, f_train, f_val, f_test,
                             seed ^ 0x51b7a5e5d1c3ULL);
}

RunMetrics run_training(const json& experiment, const cgssl::TrainConfig& cfg,
                        const fs::path& out_dir) {
    cgssl::Graph g = data_from_json(experiment.value("data", json::object()),
                                    cfg.seed);
    cgssl::RunRecord rec = cgssl::train(cfg, g);
    rec.final_state.save((out_dir / "encoder.json").string());

    std::ofstream loss_csv(out_dir / "loss.csv");
    loss_csv.precision(17);
    loss_csv << "epoch,loss,seconds\n";
    for (std::size_t e = 0; e < rec.loss_history.size(); ++e)
        loss_csv << e << ',' << rec.loss_history[e] << ','
                 << rec.wallclock_per_epoch[e] << '\n';

    if (cfg.spectrum_logging && !rec.augmented_spectra.empty()) {
        std::ofstream slog(out_dir / "spectrum_log.csv");
        slog.precision(17);
        slog << "epoch,view,eigenvalues...\n";
        for (std::size_t i = 0; i < rec.augmented_spectra.size(); ++i) {
            slog << i / 2 << ',' << (i % 2 + 1);
            for (double v : rec.augmented_spectra[i].values) slog << ',' << v;
            slog << '\n';
        }
    }

    RunMetrics m;
    m.final_loss = rec.loss_history.empty() ? 0.0 : rec.loss_history.back();
    view_distances(g, cfg.augmentation_1, cfg.seed, m);
    if (g.node_labels) {
        cgssl::Embeddings emb = cgssl::encode(rec.final_state, cfg.encoder, g);
        cgssl::Split split = split_from_json(experiment, g.n, cfg.seed);
        m.accuracy = cgssl::linear_probe(emb, *g.node_labels, split);
    }

    std::ofstream metrics(out_dir / "metrics.csv");
    metrics.precision(17);
    metrics << "framework,aug1,p,q,seed,final_loss,accuracy,og_aug,aug_aug\n";
    metrics << cgssl::to_string(cfg.framework) << ','
            << cgssl::to_string(cfg.augmentation_1.kind) << ','
            << cfg.augmentation_1.p << ',' << cfg.augmentation_1.q << ','
            << cfg.seed << ',' << m.final_loss << ',' << m.accuracy << ','
            << m.og_aug << ',' << m.aug_aug << '\n';
    return m;
}

// --- tiny CSV reader -----------------------------------------------------------

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::invalid_argument("csv: missing column '" + name + "'");
        return static_cast<int>(it - header.begin());
    }
    std::vector<double> numeric(const std::string& name) const {
        int c = column(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
        return out;
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open csv: " + path);
    Csv csv;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            csv.header = cells;
            first = false;
        } else {
            csv.rows.push_back(cells);
        }
    }
    return csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph contrastive SSL workbench"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a synthetic graph");
    std::string gen_family = "er", gen_out = "graph.json";
    int gen_n = 100, gen_blocks = 2, gen_block_size = 100, gen_fdim = 8;
    double gen_p = 0.05, gen_p_in = 0.1, gen_p_out = 0.005;
    double gen_signal = 1.0, gen_noise = 1.0;
    std::uint64_t gen_seed = env_seed();
    gen->add_option("--family", gen_family)->check(CLI::IsMember({"er", "sbm"}));
    gen->add_option("--n", gen_n);
    gen->add_option("--p", gen_p);
    gen->add_option("--blocks", gen_blocks);
    gen->add_option("--block-size", gen_block_size);
    gen->add_option("--p-in", gen_p_in);
    gen->add_option("--p-out", gen_p_out);
    gen->add_option("--feature-dim", gen_fdim);
    gen->add_option("--signal", gen_signal);
    gen->add_option("--noise", gen_noise);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "Laplacian spectrum of a graph");
    std::string sp_in, sp_out = ".";
    int sp_grid = 0, sp_bins = 0;
    double sp_bandwidth = 0.0;
    spectrum->add_option("--in", sp_in)->required();
    spectrum->add_option("--out", sp_out);
    spectrum->add_option("--kde-grid", sp_grid, "also write curve.csv on this grid");
    spectrum->add_option("--bandwidth", sp_bandwidth);
    spectrum->add_option("--hist-bins", sp_bins, "also write histogram.csv");

    // ---- augment ----
    auto* augment = app.add_subcommand("augment", "produce an augmented view");
    std::string au_in, au_out = ".", au_kind = "drop_edge";
    cgssl::AugmentationSpec au_spec;
    std::uint64_t au_seed = env_seed();
    augment->add_option("--in", au_in)->required();
    augment->add_option("--out", au_out);
    augment->add_option("--kind", au_kind)
        ->check(CLI::IsMember({"drop_edge", "add_edge", "ppr", "span", "spa",
                               "identity"}));
    augment->add_option("--p", au_spec.p);
    augment->add_option("--q", au_spec.q);
    augment->add_option("--alpha", au_spec.alpha);
    augment->add_option("--budget", au_spec.budget);
    augment->add_option("--candidates", au_spec.candidates);
    augment->add_option("--r-spa", au_spec.r_spa);
    augment->add_option("--d-spa", au_spec.d_spa);
    augment->add_option("--max-attempts", au_spec.max_attempts);
    augment->add_option("--seed", au_seed);

    // ---- train ----
    auto* train = app.add_subcommand("train", "one contrastive training run");
    std::string tr_config, tr_out, tr_framework;
    int tr_epochs = -1;
    double tr_lr = -1.0;
    std::uint64_t tr_seed = 0;
    bool tr_seed_set = false;
    train->add_option("--config", tr_config)->required();
    train->add_option("--out", tr_out, "overrides config 'out'");
    train->add_option("--framework", tr_framework);
    train->add_option("--epochs", tr_epochs);
    train->add_option("--lr", tr_lr);
    train->add_option("--seed", tr_seed)->each([&](const std::string&) {
        tr_seed_set = true;
    });

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "fan out runs over p values and seeds");
    std::string sw_config, sw_out;
    int sw_jobs = 1;
    sweep->add_option("--config", sw_config)->required();
    sweep->add_option("--out", sw_out, "overrides config 'out'");
    sweep->add_option("--jobs", sw_jobs)->check(CLI::PositiveNumber);

    // ---- probe ----
    auto* probe = app.add_subcommand("probe", "linear probe of a finished run");
    std::string pr_run, pr_graph;
    probe->add_option("--run", pr_run)->required();
    probe->add_option("--graph", pr_graph, "overrides the run's data path");

    // ---- bounds ----
    auto* bounds = app.add_subcommand("bounds", "InfoNCE bound computation");
    std::string bo_preset, bo_out = ".";
    cgssl::BoundInputs bo_in;
    std::vector<double> bo_delta_sweep;
    bounds->add_option("--preset", bo_preset)->check(CLI::IsMember({"appendix-d"}));
    bounds->add_option("--n", bo_in.n);
    bounds->add_option("--d", bo_in.d);
    bounds->add_option("--n-v", bo_in.n_v);
    bounds->add_option("--d-min", bo_in.d_min);
    bounds->add_option("--d-max", bo_in.d_max);
    bounds->add_option("--k", bo_in.k);
    bounds->add_option("--l-w", bo_in.l_w);
    bounds->add_option("--x-norm", bo_in.x_norm);
    bounds->add_option("--p-norm", bo_in.p_norm);
    bounds->add_option("--tau", bo_in.tau);
    bounds->add_option("--delta", bo_in.delta);
    bounds->add_option("--c-z", bo_in.c_z);
    bounds->add_option("--delta-sweep", bo_delta_sweep,
                       "extra delta values, one CSV row each");
    bounds->add_option("--out", bo_out);

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "lemma / theorem verification");
    int ve_lemma = 0, ve_constructions = 0;
    cgssl::TrialSpec ve_spec;
    bool ve_negative = false;
    std::string ve_out = ".";
    double ve_tau = 0.5;
    verify->add_option("--lemma", ve_lemma)->check(CLI::Range(0, 6));
    verify->add_option("--theorem", ve_constructions,
                       "verify the InfoNCE sandwich on this many constructions");
    verify->add_flag("--negative-control", ve_negative);
    verify->add_option("--trials", ve_spec.trials);
    verify->add_option("--n", ve_spec.n);
    verify->add_option("--p", ve_spec.p);
    verify->add_option("--family", ve_spec.family)
        ->check(CLI::IsMember({"er", "sbm"}));
    verify->add_option("--delta", ve_spec.delta_target);
    verify->add_option("--k", ve_spec.k);
    verify->add_option("--d", ve_spec.d);
    verify->add_option("--hidden", ve_spec.hidden);
    verify->add_option("--l-w", ve_spec.l_w);
    verify->add_option("--tau", ve_tau);
    verify->add_option("--seed", ve_spec.seed);
    verify->add_option("--out", ve_out);

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "regression over sweep metrics");
    std::string an_in, an_out = ".", an_x = "p", an_y = "accuracy", an_z;
    int an_order = 1;
    analyze->add_option("--in", an_in)->required();
    analyze->add_option("--x", an_x);
    analyze->add_option("--y", an_y);
    analyze->add_option("--order", an_order)->check(CLI::Range(1, 2));
    analyze->add_option("--instrument", an_z,
                        "run IV2SLS with this column as the instrument");
    analyze->add_option("--out", an_out);

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "timing benchmark table");
    std::vector<int> be_n{250, 500, 1000, 2000};
    std::vector<std::string> be_ops{"spectrum", "drop_edge", "add_edge"};
    double be_degree = 10.0;
    int be_repeats = 5;
    std::uint64_t be_seed = env_seed();
    std::string be_out = ".";
    bench->add_option("--n", be_n);
    bench->add_option("--op", be_ops)
        ->check(CLI::IsMember({"spectrum", "drop_edge", "add_edge"}));
    bench->add_option("--mean-degree", be_degree);
    bench->add_option("--repeats", be_repeats);
    bench->add_option("--seed", be_seed);
    bench->add_option("--out", be_out);

    // ---- report ----
    auto* report = app.add_subcommand("report", "consolidate run directories");
    std::vector<std::string> re_runs;
    std::string re_out = ".";
    report->add_option("--runs", re_runs)->required()->expected(-1);
    report->add_option("--out", re_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::cout.precision(17);

        if (*gen) {
            cgssl::FeatureParams feat{gen_fdim, gen_signal, gen_noise};
            cgssl::Graph g =
                gen_family == "er"
                    ? cgssl::generate_er(gen_n, gen_p, gen_seed, feat)
                    : cgssl::generate_sbm(
                          std::vector<int>(gen_blocks, gen_block_size), gen_p_in,
                          gen_p_out, gen_seed, feat);
            if (fs::path(gen_out).has_parent_path())
                fs::create_directories(fs::path(gen_out).parent_path());
            cgssl::save_graph(g, gen_out);
            std::cout << "wrote " << gen_out << " (n=" << g.n
                      << ", m=" << g.num_edges() << ")\n";
            return 0;
        }

        if (*spectrum) {
            cgssl::Graph g = cgssl::load_graph(sp_in);
            fs::create_directories(sp_out);
            write_run_info(sp_out, json{{"command", "spectrum"},
                                        {"in", sp_in},
                                        {"kde_grid", sp_grid},
                                        {"bandwidth", sp_bandwidth},
                                        {"hist_bins", sp_bins}});
            cgssl::Spectrum s = cgssl::laplacian_spectrum(g);
            cgssl::write_spectrum_csv(s, (fs::path(sp_out) / "spectrum.csv").string());
            if (sp_grid > 0)
                cgssl::write_curve_csv(cgssl::kde_curve({s}, sp_bandwidth, sp_grid),
                                       (fs::path(sp_out) / "curve.csv").string());
            if (sp_bins > 0)
                cgssl::write_histogram_csv(
                    cgssl::histogram(s, sp_bins),
                    (fs::path(sp_out) / "histogram.csv").string());
            std::cout << "spectrum: n=" << s.size() << " min=" << s.values.front()
                      << " max=" << s.values.back() << "\n";
            return 0;
        }

        if (*augment) {
            cgssl::Graph g = cgssl::load_graph(au_in);
            au_spec.kind = cgssl::augment_kind_from_string(au_kind);
            au_spec.seed = au_seed;
            fs::create_directories(au_out);
            json cfg{{"command", "augment"}, {"in", au_in}};
            cfg["augmentation"] = augmentation_to_json(au_spec);
            write_run_info(au_out, cfg);
            cgssl::Rng rng(au_seed);
            if (au_spec.kind == cgssl::AugmentKind::ppr) {
                Eigen::MatrixXd s = cgssl::ppr_diffusion(g, au_spec.alpha);
                std::ofstream out(fs::path(au_out) / "ppr_matrix.csv");
                out.precision(17);
                for (int i = 0; i < s.rows(); ++i) {
                    for (int j = 0; j < s.cols(); ++j)
                        out << (j ? "," : "") << s(i, j);
                    out << '\n';
                }
                std::cout << "wrote ppr_matrix.csv\n";
                return 0;
            }
            cgssl::AugmentedView view = cgssl::apply_augmentation(g, au_spec, rng);
            cgssl::save_graph(view.graph,
                              (fs::path(au_out) / "view.json").string());
            json rep{{"edges_removed", view.edges_removed},
                     {"edges_added", view.edges_added},
                     {"target_met", view.target_met},
                     {"attempts", view.attempts}};
            if (view.achieved_spectral_divergence)
                rep["achieved_spectral_divergence"] =
                    *view.achieved_spectral_divergence;
            write_text(fs::path(au_out) / "augment.json", rep.dump(2) + "\n");
            std::cout << "wrote view.json (-" << view.edges_removed << " +"
                      << view.edges_added << " edges)\n";
            return 0;
        }

        if (*train) {
            json experiment = load_json_file(tr_config);
            if (!tr_framework.empty()) experiment["framework"] = tr_framework;
            if (tr_epochs >= 0) experiment["epochs"] = tr_epochs;
            if (tr_lr >= 0.0) experiment["lr"] = tr_lr;
            if (tr_seed_set) experiment["seed"] = tr_seed;
            else if (!experiment.contains("seed")) experiment["seed"] = env_seed();
            cgssl::TrainConfig cfg = train_config_from_json(experiment);
            cfg.validate();
            fs::path out_dir =
                !tr_out.empty() ? tr_out : experiment.value("out", "run");
            json echo = experiment;
            echo.update(train_config_to_json(cfg));
            write_run_info(out_dir, echo);
            RunMetrics m = run_training(experiment, cfg, out_dir);
            std::cout << "final_loss=" << m.final_loss;
            if (m.accuracy >= 0.0) std::cout << " accuracy=" << m.accuracy;
            std::cout << "\n";
            return 0;
        }

        if (*sweep) {
            json experiment = load_json_file(sw_config);
            if (!experiment.contains("sweep"))
                throw std::invalid_argument("sweep: config needs a 'sweep' object");
            std::vector<double> ps =
                experiment["sweep"].value("p", std::vector<double>{});
            std::vector<std::uint64_t> seeds =
                experiment["sweep"].value("seeds", std::vector<std::uint64_t>{0});
            if (ps.empty()) ps.push_back(-1.0);  // single run at the config p
            fs::path out_dir =
                !sw_out.empty() ? sw_out : experiment.value("out", "sweep");
            write_run_info(out_dir, experiment);

            struct Job {
                double p;
                std::uint64_t seed;
                fs::path dir;
                RunMetrics metrics;
                std::string error;
            };
            std::vector<Job> jobs;
            for (double p : ps)
                for (std::uint64_t seed : seeds) {
                    Job job;
                    job.p = p;
                    job.seed = seed;
                    job.dir = out_dir / ("run_p" + std::to_string(jobs.size()));
                    jobs.push_back(job);
                }
            std::atomic<std::size_t> next{0};
            auto worker = [&]() {
                for (std::size_t i = next++; i < jobs.size(); i = next++) {
                    try {
                        json exp = experiment;
                        exp["seed"] = jobs[i].seed;
                        if (jobs[i].p >= 0.0) {
                            exp["augmentation_1"]["p"] = jobs[i].p;
                            exp["augmentation_2"]["p"] = jobs[i].p;
                        }
                        cgssl::TrainConfig cfg = train_config_from_json(exp);
                        cfg.validate();
                        json echo = exp;
                        echo.update(train_config_to_json(cfg));
                        write_run_info(jobs[i].dir, echo);
                        jobs[i].metrics = run_training(exp, cfg, jobs[i].dir);
                    } catch (const std::exception& e) {
                        jobs[i].error = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int t = 1; t < sw_jobs; ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();

            std::ofstream metrics(out_dir / "metrics.csv");
            metrics.precision(17);
            metrics << "p,seed,final_loss,accuracy,og_aug,aug_aug\n";
            for (const auto& job : jobs) {
                if (!job.error.empty())
                    throw std::runtime_error("sweep run failed: " + job.error);
                metrics << job.p << ',' << job.seed << ',' << job.metrics.final_loss
                        << ',' << job.metrics.accuracy << ',' << job.metrics.og_aug
                        << ',' << job.metrics.aug_aug << '\n';
            }
            std::cout << "wrote " << (out_dir / "metrics.csv").string() << " ("
                      << jobs.size() << " runs)\n";
            return 0;
        }

        if (*probe) {
            json experiment = load_json_file(
                (fs::path(pr_run) / "config.json").string());
            cgssl::TrainConfig cfg = train_config_from_json(experiment);
            cgssl::EncoderState state = cgssl::EncoderState::load(
                (fs::path(pr_run) / "encoder.json").string());
            json data = experiment.value("data", json::object());
            if (!pr_graph.empty()) data = json{{"path", pr_graph}};
            cgssl::Graph g = data_from_json(data, cfg.seed);
            if (!g.node_labels)
                throw std::invalid_argument("probe: graph has no node labels");
            cgssl::Embeddings emb = cgssl::encode(state, cfg.encoder, g);
            cgssl::Split split = split_from_json(experiment, g.n, cfg.seed);
            double acc = cgssl::linear_probe(emb, *g.node_labels, split);
            write_text(fs::path(pr_run) / "probe.json",
                       json{{"accuracy", acc}}.dump(2) + "\n");
            std::cout << "accuracy=" << acc << "\n";
            return 0;
        }

        if (*bounds) {
            if (bo_preset == "appendix-d") bo_in = cgssl::appendix_d_inputs();
            std::vector<std::pair<cgssl::BoundInputs, cgssl::BoundResult>> rows;
            cgssl::BoundResult res = cgssl::infonce_bounds(bo_in);
            rows.emplace_back(bo_in, res);
            for (double delta : bo_delta_sweep) {
                cgssl::BoundInputs in = bo_in;
                in.delta = delta;
                rows.emplace_back(in, cgssl::infonce_bounds(in));
            }
            fs::create_directories(bo_out);
            cgssl::write_bounds_csv(rows,
                                    (fs::path(bo_out) / "bounds.csv").string());
            std::cout << "A=" << res.A << " B=" << res.B
                      << " epsilon=" << res.epsilon
                      << " epsilon_prime=" << res.epsilon_prime << "\n"
                      << "lower=" << res.lower << " upper=" << res.upper
                      << " gap=" << res.upper - res.lower << "\n";
            return 0;
        }

        if (*verify) {
            fs::create_directories(ve_out);
            if (ve_lemma > 0) {
                cgssl::LemmaReport rep = cgssl::verify_lemma(ve_lemma, ve_spec);
                write_text(fs::path(ve_out) / "verify.json",
                           rep.to_json(ve_spec) + "\n");
                std::cout << "lemma " << ve_lemma << ": " << rep.passes << "/"
                          << rep.trials << " passed, worst margin "
                          << rep.worst_margin << "\n";
                return rep.id <= 5 && rep.passes < rep.trials ? 1 : 0;
            }
            if (ve_constructions > 0) {
                cgssl::BoundInputs in = cgssl::appendix_d_inputs();
                in.n = ve_spec.n > 2 ? ve_spec.n : in.n;
                in.d = ve_spec.d;
                in.tau = ve_tau;
                cgssl::BoundResult bp = cgssl::bound_params(in);
                int within = 0;
                json runs = json::array();
                for (int c = 0; c < ve_constructions; ++c) {
                    cgssl::TheoremResult tr = cgssl::verify_theorem(
                        in.n, in.d, in.tau, bp.epsilon, bp.epsilon_prime,
                        ve_spec.seed + c, ve_negative);
                    if (tr.within) within++;
                    runs.push_back(json{{"loss", tr.loss},
                                        {"lower", tr.lower},
                                        {"upper", tr.upper},
                                        {"within", tr.within}});
                }
                write_text(fs::path(ve_out) / "verify.json",
                           json{{"theorem", 1},
                                {"constructions", ve_constructions},
                                {"within", within},
                                {"negative_control", ve_negative},
                                {"runs", runs}}
                                   .dump(2) +
                               "\n");
                std::cout << "theorem 1: " << within << "/" << ve_constructions
                          << " within bounds\n";
                return 0;
            }
            throw std::invalid_argument("verify: pass --lemma 1..6 or --theorem N");
        }

        if (*analyze) {
            Csv csv = read_csv(an_in);
            std::vector<double> x = csv.numeric(an_x);
            std::vector<double> y = csv.numeric(an_y);
            cgssl::RegressionResult res;
            std::string model;
            if (!an_z.empty()) {
                res = cgssl::iv2sls(y, x, csv.numeric(an_z));
                model = "iv2sls(" + an_y + " ~ " + an_x + " | " + an_z + ")";
                if (res.weak_instrument)
                    std::cerr << "warning: weak instrument (first-stage F="
                              << fmt(res.first_stage_f) << " < 10)\n";
            } else {
                res = cgssl::poly_regression(x, y, an_order);
                model = "poly" + std::to_string(an_order) + "(" + an_y + " ~ " +
                        an_x + ")";
            }
            fs::create_directories(an_out);
            std::ofstream out(fs::path(an_out) / "analysis.csv");
            out.precision(17);
            out << "model,coefficients,r_squared,adj_r_squared,f_statistic,"
                   "p_value,n,dof,first_stage_f\n";
            out << '"' << model << "\",\"";
            for (std::size_t i = 0; i < res.coefficients.size(); ++i)
                out << (i ? ";" : "") << res.coefficients[i];
            out << "\"," << res.r_squared << ',' << res.adj_r_squared << ','
                << res.f_statistic << ',' << res.p_value << ',' << res.n << ','
                << res.dof << ',' << res.first_stage_f << '\n';
            std::cout << model << ": R2=" << res.r_squared
                      << " F=" << res.f_statistic << " p=" << res.p_value << "\n";
            return 0;
        }

        if (*bench) {
            fs::create_directories(be_out);
            std::ofstream out(fs::path(be_out) / "timings.csv");
            out.precision(17);
            out << "method,n,m,seconds_per_call\n";
            for (int n : be_n) {
                cgssl::Graph g = cgssl::generate_er(n, be_degree / (n - 1.0),
                                                    be_seed + n);
                for (const auto& op : be_ops) {
                    cgssl::TimingRow row = cgssl::time_benchmark(op, g, be_repeats);
                    out << row.method << ',' << row.n << ',' << row.m << ','
                        << row.seconds_per_call << '\n';
                    std::cout << row.method << " n=" << row.n
                              << " s/call=" << row.seconds_per_call << "\n";
                }
            }
            return 0;
        }

        if (*report) {
            fs::create_directories(re_out);
            // key = config hash; value = rows of (accuracy, final_loss)
            std::map<std::string, std::vector<std::pair<double, double>>> groups;
            std::vector<cgssl::DensityCurve> curves;
            std::vector<std::string> names;
            std::ofstream merged(fs::path(re_out) / "report.csv");
            merged.precision(17);
            merged << "config_hash,run,final_loss,accuracy,og_aug,aug_aug\n";
            for (const auto& run : re_runs) {
                fs::path metrics_path = fs::path(run) / "metrics.csv";
                if (!fs::exists(metrics_path)) {
                    std::cerr << "warning: " << run
                              << " has no metrics.csv, skipped\n";
                    continue;
                }
                std::string key = "0";
                fs::path cfg_path = fs::path(run) / "config.json";
                if (fs::exists(cfg_path)) {
                    std::ifstream in(cfg_path);
                    std::string text((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
                    json j = json::parse(text);
                    j.erase("seed");  // same config, different seed groups
                    std::ostringstream hex;
                    hex << std::hex << std::hash<std::string>{}(j.dump());
                    key = hex.str();
                }
                Csv csv = read_csv(metrics_path.string());
                std::vector<double> loss = csv.numeric("final_loss");
                std::vector<double> acc = csv.numeric("accuracy");
                for (std::size_t i = 0; i < loss.size(); ++i) {
                    groups[key].emplace_back(acc[i], loss[i]);
                    merged << key << ',' << run << ',' << loss[i] << ','
                           << acc[i] << ",,\n";
                }
                fs::path curve_path = fs::path(run) / "curve.csv";
                if (fs::exists(curve_path)) {
                    Csv cc = read_csv(curve_path.string());
                    cgssl::DensityCurve curve;
                    curve.grid = cc.numeric("grid");
                    curve.mean = cc.numeric("mean");
                    curve.std = cc.numeric("std");
                    curves.push_back(curve);
                    names.push_back(fs::path(run).filename().string());
                }
            }
            std::ofstream summary(fs::path(re_out) / "summary.csv");
            summary.precision(17);
            summary << "config_hash,runs,accuracy_mean,accuracy_std,"
                       "final_loss_mean,final_loss_std\n";
            for (const auto& [key, rows] : groups) {
                double am = 0.0, lm = 0.0;
                for (const auto& [a, l] : rows) am += a, lm += l;
                am /= rows.size();
                lm /= rows.size();
                double av = 0.0, lv = 0.0;
                for (const auto& [a, l] : rows)
                    av += (a - am) * (a - am), lv += (l - lm) * (l - lm);
                summary << key << ',' << rows.size() << ',' << am << ','
                        << std::sqrt(av / rows.size()) << ',' << lm << ','
                        << std::sqrt(lv / rows.size()) << '\n';
            }
            if (!curves.empty())
                cgssl::write_curves_svg(
                    curves, names, (fs::path(re_out) / "report.svg").string());
            std::cout << "report over " << groups.size() << " config group(s)\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
