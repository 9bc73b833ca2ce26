#include "cgssl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace cgssl {

AugmentKind augment_kind_from_string(const std::string& s) {
    if (s == "drop_edge") return AugmentKind::drop_edge;
    if (s == "add_edge") return AugmentKind::add_edge;
    if (s == "ppr") return AugmentKind::ppr;
    if (s == "span") return AugmentKind::span;
    if (s == "spa") return AugmentKind::spa;
    if (s == "identity") return AugmentKind::identity;
    throw std::invalid_argument("unknown augmentation kind: " + s);
}

std::string to_string(AugmentKind kind) {
    switch (kind) {
        case AugmentKind::drop_edge: return "drop_edge";
        case AugmentKind::add_edge: return "add_edge";
        case AugmentKind::ppr: return "ppr";
        case AugmentKind::span: return "span";
        case AugmentKind::spa: return "spa";
        case AugmentKind::identity: return "identity";
    }
    return "?";
}

AugmentedView drop_edge(const Graph& g, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("drop_edge: p must be in [0,1]");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    AugmentedView view;
    view.graph = g;
    view.graph.edges.clear();
    for (const auto& e : g.edges) {
        if (unif(rng) < 1.0 - p)
            view.graph.edges.push_back(e);
        else
            view.edges_removed++;
    }
    return view;
}

AugmentedView add_edge(const Graph& g, double q, Rng& rng) {
    if (q < 0.0 || q > 1.0)
        throw std::invalid_argument("add_edge: q must be in [0,1]");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::set<std::pair<int, int>> existing(g.edges.begin(), g.edges.end());
    AugmentedView view;
    view.graph = g;
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) {
            if (existing.count({u, v})) continue;
            if (unif(rng) < q) {
                view.graph.edges.emplace_back(u, v);
                view.edges_added++;
            }
        }
    view.graph.canonicalize();
    return view;
}

Eigen::MatrixXd ppr_diffusion(const Graph& g, double alpha, bool symmetric) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("ppr_diffusion: alpha must be in (0,1)");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (const auto& [u, v] : g.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    a.diagonal().setConstant(1.0);
    Eigen::VectorXd deg = a.rowwise().sum();
    Eigen::MatrixXd norm;
    if (symmetric) {
        Eigen::VectorXd dinv = deg.array().rsqrt();
        norm = dinv.asDiagonal() * a * dinv.asDiagonal();
    } else {
        norm = deg.array().inverse().matrix().asDiagonal() * a;
    }
    Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(g.n, g.n) - (1.0 - alpha) * norm;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    Eigen::MatrixXd s = alpha * lu.solve(Eigen::MatrixXd::Identity(g.n, g.n));
    double residual = (system * s / alpha - Eigen::MatrixXd::Identity(g.n, g.n)).norm();
    if (!std::isfinite(residual) || residual > 1e-6 * g.n)
        throw std::runtime_error("ppr_diffusion: singular system");
    return s;
}

namespace {

// Toggle one pair slot; returns the flipped edge.
std::pair<int, int> flip_edge(Graph& g, int u, int v) {
    auto e = make_edge(u, v);
    auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
    if (it != g.edges.end() && *it == e)
        g.edges.erase(it);
    else
        g.edges.insert(it, e);
    return e;
}

std::pair<int, int> random_pair(int n, Rng& rng) {
    std::uniform_int_distribution<int> node(0, n - 1);
    int u = node(rng), v = node(rng);
    while (v == u) v = node(rng);
    return make_edge(u, v);
}

}  // namespace

SpanPairResult span_pair(const Graph& g, int budget, int candidates, Rng& rng) {
    if (budget < 0) throw std::invalid_argument("span_pair: budget must be >= 0");
    if (candidates < 1) throw std::invalid_argument("span_pair: candidates must be >= 1");
    if (g.n < 2) throw std::invalid_argument("span_pair: need at least 2 nodes");

    SpanPairResult res;
    res.view1.graph = g;
    res.view2.graph = g;
    Spectrum s1 = laplacian_spectrum(g);
    Spectrum s2 = s1;
    double dist = 0.0;  // ||eig(L1) - eig(L2)||_2
    double objective = 0.0;

    long total_pairs = static_cast<long>(g.n) * (g.n - 1) / 2;
    bool exhaustive = candidates >= total_pairs;

    for (int step = 0; step < budget; ++step) {
        bool turn1 = step % 2 == 0;
        Graph& active = turn1 ? res.view1.graph : res.view2.graph;
        const Spectrum& fixed = turn1 ? s2 : s1;

        std::vector<std::pair<int, int>> flips;
        if (exhaustive) {
            for (int u = 0; u < g.n; ++u)
                for (int v = u + 1; v < g.n; ++v) flips.emplace_back(u, v);
        } else {
            std::set<std::pair<int, int>> chosen;
            while (static_cast<long>(chosen.size()) <
                   std::min<long>(candidates, total_pairs))
                chosen.insert(random_pair(g.n, rng));
            flips.assign(chosen.begin(), chosen.end());
        }

        double best_obj = objective;
        int best_idx = -1;
        Spectrum best_spec;
        for (std::size_t i = 0; i < flips.size(); ++i) {
            flip_edge(active, flips[i].first, flips[i].second);
            Spectrum cand = laplacian_spectrum(active);
            flip_edge(active, flips[i].first, flips[i].second);  // undo
            double d = spectral_distance(cand, fixed);
            if (d * d > best_obj) {
                best_obj = d * d;
                best_idx = static_cast<int>(i);
                best_spec = std::move(cand);
            }
        }
        if (best_idx < 0) {
            res.warning = true;  // no candidate improves; objective stays put
            res.divergence_history.push_back(objective);
            continue;
        }
        auto e = flip_edge(active, flips[best_idx].first, flips[best_idx].second);
        bool removed = !active.has_edge(e.first, e.second);
        auto& view = turn1 ? res.view1 : res.view2;
        (removed ? view.edges_removed : view.edges_added)++;
        (turn1 ? s1 : s2) = std::move(best_spec);
        objective = best_obj;
        dist = std::sqrt(objective);
        res.divergence_history.push_back(objective);
    }

    res.view1.achieved_spectral_divergence = dist;
    res.view2.achieved_spectral_divergence = dist;
    return res;
}

AugmentedView spa_perturb(const Graph& g, double r_spa, double d_spa,
                          int max_attempts, Rng& rng) {
    if (r_spa <= 0.0 || r_spa > 1.0)
        throw std::invalid_argument("spa_perturb: r_spa must be in (0,1]");
    if (max_attempts < 1)
        throw std::invalid_argument("spa_perturb: max_attempts must be >= 1");
    if (g.num_edges() == 0)
        throw std::invalid_argument("spa_perturb: graph has no edges");

    int flips = static_cast<int>(std::ceil(r_spa * g.num_edges()));
    Spectrum original = laplacian_spectrum(g);

    AugmentedView best;
    double best_div = -1.0;
    std::uniform_int_distribution<int> coin(0, 1);

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        AugmentedView view;
        view.graph = g;
        std::set<std::pair<int, int>> touched;
        int done = 0;
        // Each flip toggles a uniformly chosen slot: 50/50 intent between
        // dropping an existing edge and adding a sampled non-edge.
        while (done < flips) {
            bool want_drop = coin(rng) == 0 && !view.graph.edges.empty();
            std::pair<int, int> slot;
            if (want_drop) {
                std::uniform_int_distribution<std::size_t> pick(
                    0, view.graph.edges.size() - 1);
                slot = view.graph.edges[pick(rng)];
            } else {
                slot = random_pair(g.n, rng);
                int guard = 0;
                while (view.graph.has_edge(slot.first, slot.second) && ++guard < 64)
                    slot = random_pair(g.n, rng);
                if (view.graph.has_edge(slot.first, slot.second)) continue;
            }
            if (touched.count(slot)) continue;
            touched.insert(slot);
            bool existed = view.graph.has_edge(slot.first, slot.second);
            flip_edge(view.graph, slot.first, slot.second);
            (existed ? view.edges_removed : view.edges_added)++;
            done++;
        }
        double div = spectral_distance(laplacian_spectrum(view.graph), original);
        view.achieved_spectral_divergence = div;
        view.attempts = attempt;
        if (div > best_div) {
            best_div = div;
            best = std::move(view);
        }
        if (best_div >= d_spa) {
            best.target_met = true;
            return best;
        }
    }
    best.target_met = false;
    best.attempts = max_attempts;
    return best;
}

AugmentedView apply_augmentation(const Graph& g, const AugmentationSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case AugmentKind::drop_edge: return drop_edge(g, spec.p, rng);
        case AugmentKind::add_edge: return add_edge(g, spec.q, rng);
        case AugmentKind::spa:
            return spa_perturb(g, spec.r_spa, spec.d_spa, spec.max_attempts, rng);
        case AugmentKind::span: {
            auto pair = span_pair(g, spec.budget, spec.candidates, rng);
            return pair.view1;
        }
        case AugmentKind::identity: {
            AugmentedView view;
            view.graph = g;
            return view;
        }
        case AugmentKind::ppr:
            throw std::invalid_argument(
                "apply_augmentation: ppr produces a dense view matrix; use ppr_diffusion");
    }
    throw std::logic_error("apply_augmentation: unreachable");
}

}  // namespace cgssl
