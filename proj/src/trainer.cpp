#include "cgssl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace cgssl {

Framework framework_from_string(const std::string& s) {
    if (s == "grace") return Framework::grace;
    if (s == "mvgrl") return Framework::mvgrl;
    if (s == "gbt") return Framework::gbt;
    if (s == "bgrl") return Framework::bgrl;
    throw std::invalid_argument("unknown framework: " + s);
}

std::string to_string(Framework f) {
    switch (f) {
        case Framework::grace: return "grace";
        case Framework::mvgrl: return "mvgrl";
        case Framework::gbt: return "gbt";
        case Framework::bgrl: return "bgrl";
    }
    return "?";
}

LossKind framework_loss(Framework f) {
    switch (f) {
        case Framework::grace: return LossKind::infonce;
        case Framework::mvgrl: return LossKind::jse;
        case Framework::gbt: return LossKind::barlow_twins;
        case Framework::bgrl: return LossKind::byol;
    }
    throw std::logic_error("framework_loss: unreachable");
}

void TrainConfig::validate() const {
    if (loss.kind != framework_loss(framework))
        throw std::invalid_argument("train config: framework " + to_string(framework) +
                                    " requires loss " +
                                    to_string(framework_loss(framework)) + ", got " +
                                    to_string(loss.kind));
    if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
    if (lr < 0.0) throw std::invalid_argument("train config: lr must be >= 0");
    encoder.validate();
    loss.validate();
    if (framework == Framework::mvgrl && augmentation_2.kind != AugmentKind::ppr &&
        augmentation_1.kind == AugmentKind::ppr)
        throw std::invalid_argument("train config: put the ppr view in augmentation_2");
}

Split make_split(int n, double f_train, double f_val, double f_test,
                 std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("split: need at least 3 items");
    if (f_train <= 0.0 || f_val <= 0.0 || f_test <= 0.0)
        throw std::invalid_argument("split: fractions must be positive");
    if (std::abs(f_train + f_val + f_test - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must sum to 1");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    int n_train = static_cast<int>(n * f_train);
    int n_val = static_cast<int>(n * f_val);
    Split s;
    s.train.assign(order.begin(), order.begin() + n_train);
    s.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    s.test.assign(order.begin() + n_train + n_val, order.end());
    return s;
}

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t view) {
    // splitmix64 over (seed, epoch, view)
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (epoch * 2 + view + 1);
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27; x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

struct Momentum {
    std::vector<Eigen::MatrixXd> weights;
    Eigen::MatrixXd projection;

    void init(const EncoderState& state) {
        for (const auto& w : state.weights) weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        projection = Eigen::MatrixXd::Zero(state.projection.rows(), state.projection.cols());
    }

    void step(EncoderState& state, const EncoderGradients& grads, double lr, double mu) {
        for (std::size_t l = 0; l < state.weights.size(); ++l) {
            weights[l] = mu * weights[l] + grads.weights[l];
            state.weights[l] -= lr * weights[l];
        }
        projection = mu * projection + grads.projection;
        state.projection -= lr * projection;
    }
};

void accumulate(EncoderGradients& acc, const EncoderGradients& g) {
    if (acc.weights.empty()) {
        acc = g;
        return;
    }
    for (std::size_t l = 0; l < acc.weights.size(); ++l) acc.weights[l] += g.weights[l];
    acc.projection += g.projection;
}

struct ViewInput {
    Eigen::MatrixXd matrix;  // aggregation operator
    const Eigen::MatrixXd* features;
    Graph graph;             // populated for topological views (spectrum logging)
    bool is_graph = false;
};

ViewInput make_view(const Graph& g, const AugmentationSpec& spec,
                    const EncoderConfig& enc, std::uint64_t seed) {
    ViewInput view;
    view.features = &g.features;
    if (spec.kind == AugmentKind::ppr) {
        view.matrix = ppr_diffusion(g, spec.alpha);
        return view;
    }
    Rng rng(seed);
    AugmentedView av = apply_augmentation(g, spec, rng);
    view.graph = std::move(av.graph);
    view.is_graph = true;
    // Views may contain isolated nodes after edge drops; aggregate their
    // self-loop only in that case even when self_loops is off.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (const auto& [u, v] : view.graph.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    if (enc.self_loops)
        a.diagonal().setConstant(1.0);
    else
        for (int i = 0; i < g.n; ++i)
            if (a.row(i).sum() == 0.0) a(i, i) = 1.0;
    Eigen::VectorXd dinv = a.rowwise().sum().array().rsqrt();
    view.matrix = dinv.asDiagonal() * a * dinv.asDiagonal();
    view.matrix = 0.5 * (view.matrix + view.matrix.transpose()).eval();
    return view;
}

RunRecord train_impl(const TrainConfig& config, const std::vector<const Graph*>& graphs) {
    config.validate();
    for (const Graph* g : graphs) g->validate();

    Rng init_rng(sub_seed(config.seed, 0, 7));
    RunRecord record;
    record.final_state = init_encoder(config.encoder, init_rng);
    Momentum momentum;
    momentum.init(record.final_state);
    bool graph_level = graphs.size() > 1;
    bool stop_grad_target = config.loss.kind == LossKind::byol;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();

        std::vector<ViewInput> v1s, v2s;
        v1s.reserve(graphs.size());
        v2s.reserve(graphs.size());
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            std::uint64_t base = config.seed + 0x51ab5ULL * gi;
            v1s.push_back(make_view(*graphs[gi], config.augmentation_1, config.encoder,
                                    sub_seed(base, epoch, 0)));
            v2s.push_back(make_view(*graphs[gi], config.augmentation_2, config.encoder,
                                    sub_seed(base, epoch, 1)));
        }

        // Forward both views of every graph, pool if graph-level.
        std::vector<Embeddings> e1(graphs.size()), e2(graphs.size());
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            e1[gi] = encode(record.final_state, config.encoder, v1s[gi].matrix,
                            *v1s[gi].features);
            e2[gi] = encode(record.final_state, config.encoder, v2s[gi].matrix,
                            *v2s[gi].features);
        }
        Eigen::MatrixXd z1, z2;
        if (graph_level) {
            z1 = graph_readout(e1);
            z2 = graph_readout(e2);
        } else {
            z1 = e1[0].Z;
            z2 = e2[0].Z;
        }

        LossResult loss = loss_value_and_grad(config.loss, z1, z2);
        if (!std::isfinite(loss.value)) {
            double wnorm = 0.0;
            for (const auto& w : record.final_state.weights) wnorm += w.squaredNorm();
            throw std::runtime_error(
                "train: non-finite loss at epoch " + std::to_string(epoch) +
                " (sum ||W||_F^2 = " + std::to_string(wnorm) + ")");
        }
        if (stop_grad_target) loss.grad_z2.setZero();

        EncoderGradients total;
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            Eigen::MatrixXd up1, up2;
            if (graph_level) {
                // Mean pooling spreads the per-graph gradient over nodes.
                int n_g = graphs[gi]->n;
                up1 = Eigen::VectorXd::Ones(n_g) * loss.grad_z1.row(gi) / n_g;
                up2 = Eigen::VectorXd::Ones(n_g) * loss.grad_z2.row(gi) / n_g;
            } else {
                up1 = loss.grad_z1;
                up2 = loss.grad_z2;
            }
            accumulate(total, encode_grad(record.final_state, config.encoder,
                                          v1s[gi].matrix, *v1s[gi].features, up1));
            if (!stop_grad_target)
                accumulate(total, encode_grad(record.final_state, config.encoder,
                                              v2s[gi].matrix, *v2s[gi].features, up2));
        }

        momentum.step(record.final_state, total, config.lr, config.momentum);
        if (config.encoder.weight_norm_cap)
            spectral_norm_cap(record.final_state, *config.encoder.weight_norm_cap);

        record.loss_history.push_back(loss.value);
        if (config.spectrum_logging) {
            for (const auto& views : {std::cref(v1s), std::cref(v2s)})
                for (const auto& v : views.get())
                    if (v.is_graph)
                        record.augmented_spectra.push_back(laplacian_spectrum(v.graph));
        }
        record.wallclock_per_epoch.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return record;
}

}  // namespace

RunRecord train(const TrainConfig& config, const Graph& data) {
    return train_impl(config, {&data});
}

RunRecord train(const TrainConfig& config, const std::vector<Graph>& data) {
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    std::vector<const Graph*> ptrs;
    for (const auto& g : data) ptrs.push_back(&g);
    return train_impl(config, ptrs);
}

Eigen::MatrixXd graph_readout(const std::vector<Embeddings>& per_graph) {
    if (per_graph.empty()) throw std::invalid_argument("graph_readout: empty batch");
    int d = static_cast<int>(per_graph[0].Z.cols());
    Eigen::MatrixXd out(static_cast<int>(per_graph.size()), d);
    for (std::size_t i = 0; i < per_graph.size(); ++i) {
        if (per_graph[i].Z.rows() == 0)
            throw std::invalid_argument("graph_readout: empty graph at index " +
                                        std::to_string(i));
        out.row(i) = per_graph[i].Z.colwise().mean();
    }
    return out;
}

double linear_probe(const Embeddings& embeddings, const std::vector<int>& labels,
                    const Split& split, const ProbeOptions& opts) {
    const Eigen::MatrixXd& z = embeddings.Z;
    if (static_cast<int>(labels.size()) != z.rows())
        throw std::invalid_argument("linear_probe: labels do not cover all rows");

    int num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    std::set<int> train_classes;
    for (int i : split.train) train_classes.insert(labels[i]);
    if (train_classes.size() < 2)
        throw std::invalid_argument("linear_probe: train split contains a single class");

    int d = static_cast<int>(z.cols());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, num_classes);
    Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(num_classes);

    Eigen::MatrixXd x_train(static_cast<int>(split.train.size()), d);
    std::vector<int> y_train(split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        x_train.row(static_cast<int>(i)) = z.row(split.train[i]);
        y_train[i] = labels[split.train[i]];
    }
    int m = static_cast<int>(x_train.rows());

    auto accuracy_on = [&](const std::vector<int>& idx, const Eigen::MatrixXd& wm,
                           const Eigen::RowVectorXd& bm) {
        if (idx.empty()) return 0.0;
        int correct = 0;
        for (int i : idx) {
            Eigen::RowVectorXd scores = z.row(i) * wm + bm;
            int pred;
            scores.maxCoeff(&pred);
            if (pred == labels[i]) correct++;
        }
        return static_cast<double>(correct) / idx.size();
    };

    Eigen::MatrixXd best_w = w;
    Eigen::RowVectorXd best_b = b;
    double best_val = -1.0;
    for (int step = 0; step < opts.steps; ++step) {
        Eigen::MatrixXd logits = (x_train * w).rowwise() + b;
        Eigen::MatrixXd probs(m, num_classes);
        for (int i = 0; i < m; ++i) {
            Eigen::RowVectorXd row = logits.row(i);
            double mx = row.maxCoeff();
            Eigen::RowVectorXd ex = (row.array() - mx).exp();
            probs.row(i) = ex / ex.sum();
        }
        for (int i = 0; i < m; ++i) probs(i, y_train[i]) -= 1.0;
        Eigen::MatrixXd gw = x_train.transpose() * probs / m + opts.l2 * w;
        Eigen::RowVectorXd gb = probs.colwise().mean();
        w -= opts.lr * gw;
        b -= opts.lr * gb;

        double val = accuracy_on(split.val, w, b);
        if (val > best_val) {
            best_val = val;
            best_w = w;
            best_b = b;
        }
    }
    return accuracy_on(split.test, best_w, best_b);
}

}  // namespace cgssl
