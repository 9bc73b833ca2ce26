#include "cgssl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "cgssl/encoder.hpp"
#include "json.hpp"

namespace cgssl {

using nlohmann::json;

void BoundInputs::validate() const {
    if (n < 1) throw std::invalid_argument("bounds: n must be >= 1");
    if (d < 1) throw std::invalid_argument("bounds: d must be >= 1");
    if (n_v < 1) throw std::invalid_argument("bounds: n_v must be >= 1");
    if (d_min < 1) throw std::invalid_argument("bounds: d_min must be >= 1");
    if (d_max < d_min) throw std::invalid_argument("bounds: d_max must be >= d_min");
    if (k < 1) throw std::invalid_argument("bounds: k must be >= 1");
    if (l_w <= 0.0) throw std::invalid_argument("bounds: L_W must be > 0");
    if (x_norm <= 0.0) throw std::invalid_argument("bounds: x_norm must be > 0");
    if (p_norm <= 0.0) throw std::invalid_argument("bounds: p_norm must be > 0");
    if (tau <= 0.0) throw std::invalid_argument("bounds: tau must be > 0");
    if (c_z <= 0.0) throw std::invalid_argument("bounds: c_z must be > 0");
    if (delta < 0.0 || delta >= 1.0)
        throw std::invalid_argument("bounds: delta must be in [0, 1)");
}

BoundInputs appendix_d_inputs() { return BoundInputs{}; }

namespace {

double log_sum_exp2(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double b_of_delta(double delta) {
    return std::sqrt(delta) + delta / std::pow(1.0 - delta, 1.5);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over (seed, a, b)
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) +
                      0xbf58476d1ce4e5b9ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace

BoundResult bound_params(const BoundInputs& in) {
    in.validate();
    BoundResult out;
    out.A = std::sqrt(static_cast<double>(in.n_v) * in.d_max) / in.d_min;
    out.B = b_of_delta(in.delta);
    out.epsilon = in.k * std::pow(out.A, in.k) * out.B * std::pow(in.l_w, in.k) *
                  in.x_norm * in.p_norm / in.c_z;
    out.epsilon_prime = std::sqrt(2.0 * std::log(static_cast<double>(in.n)) / in.d);
    return out;
}

BoundResult infonce_bounds(const BoundInputs& in) {
    BoundResult out = bound_params(in);
    double log_negs = in.n > 1 ? std::log(in.n - 1.0)
                               : -std::numeric_limits<double>::infinity();
    double s = 1.0 - out.epsilon * out.epsilon / 2.0;
    out.lower =
        log_sum_exp2(1.0 / in.tau, log_negs - out.epsilon_prime / in.tau) -
        1.0 / in.tau;
    out.upper =
        log_sum_exp2(s / in.tau, log_negs + out.epsilon_prime / in.tau) -
        s / in.tau;
    return out;
}

void write_bounds_csv(const std::vector<std::pair<BoundInputs, BoundResult>>& rows,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    out << "n,d,n_v,d_min,d_max,k,l_w,x_norm,p_norm,tau,delta,c_z,"
           "A,B,epsilon,epsilon_prime,lower,upper\n";
    for (const auto& [in, res] : rows)
        out << in.n << ',' << in.d << ',' << in.n_v << ',' << in.d_min << ','
            << in.d_max << ',' << in.k << ',' << in.l_w << ',' << in.x_norm << ','
            << in.p_norm << ',' << in.tau << ',' << in.delta << ',' << in.c_z << ','
            << res.A << ',' << res.B << ',' << res.epsilon << ','
            << res.epsilon_prime << ',' << res.lower << ',' << res.upper << '\n';
}

// --- perturbation sampling ---------------------------------------------------

Graph sample_delta_perturbation(const Graph& g, int k, double target, Rng& rng) {
    g.validate();
    if (k < 1) throw std::invalid_argument("sample_delta_perturbation: k must be >= 1");
    if (target < 0.0 || target >= 1.0)
        throw std::invalid_argument(
            "sample_delta_perturbation: delta target must be in [0, 1)");
    if (target == 0.0) return g;

    std::vector<int> base_deg = g.degrees();
    std::set<std::pair<int, int>> edges(g.edges.begin(), g.edges.end());
    std::vector<int> deg = base_deg;
    // Degree-stability premise: every node keeps |d' - d| <= cap * d.
    double cap = 1.1 * target;
    std::uniform_int_distribution<int> node(0, g.n - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    Graph current = g;
    auto rebuild = [&]() {
        current.edges.assign(edges.begin(), edges.end());
        return current;
    };
    double achieved = 0.0;
    int max_proposals = 2000 + 400 * g.n;
    for (int it = 0; it < max_proposals; ++it) {
        bool drop = coin(rng) < 0.5 && !edges.empty();
        std::pair<int, int> e;
        if (drop) {
            auto pos = edges.begin();
            std::advance(pos, std::uniform_int_distribution<std::size_t>(
                                  0, edges.size() - 1)(rng));
            e = *pos;
        } else {
            int a = node(rng), b = node(rng);
            if (a == b) continue;
            e = make_edge(a, b);
            if (edges.count(e)) continue;
        }
        int sign = drop ? -1 : 1;
        int du = deg[e.first] + sign;
        int dv = deg[e.second] + sign;
        if (du < 1 || dv < 1) continue;
        if (std::abs(du - base_deg[e.first]) > cap * base_deg[e.first] + 1e-12)
            continue;
        if (std::abs(dv - base_deg[e.second]) > cap * base_deg[e.second] + 1e-12)
            continue;

        if (drop) edges.erase(e); else edges.insert(e);
        double delta = perturbation_strength(g, rebuild(), k).delta;
        if (delta > 1.1 * target) {
            if (drop) edges.insert(e); else edges.erase(e);
            continue;
        }
        deg[e.first] = du;
        deg[e.second] = dv;
        achieved = delta;
        if (delta >= 0.9 * target) return rebuild();
    }
    throw std::runtime_error(
        "sample_delta_perturbation: could not reach delta target " +
        std::to_string(target) + " within " + std::to_string(max_proposals) +
        " proposals; achieved " + std::to_string(achieved));
}

// --- lemma verification --------------------------------------------------------

namespace {

constexpr double kMarginTol = -1e-9;

Graph make_base(const TrialSpec& spec, Rng& rng, bool need_min_degree) {
    FeatureParams feat;
    feat.dim = spec.feature_dim;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Graph g;
        if (spec.family == "er") {
            g = generate_er(spec.n, spec.p, rng(), feat);
        } else if (spec.family == "sbm") {
            std::vector<int> blocks{spec.n / 2, spec.n - spec.n / 2};
            g = generate_sbm(blocks, spec.p, spec.p_out, rng(), feat);
        } else {
            throw std::invalid_argument("verify_lemma: unknown graph family '" +
                                        spec.family + "'");
        }
        if (!need_min_degree) return g;
        auto deg = g.degrees();
        if (*std::min_element(deg.begin(), deg.end()) >= 1) return g;
    }
    throw std::runtime_error(
        "verify_lemma: could not sample a base graph without isolated nodes");
}

// Symmetric difference between the k-hop edge sets around v, in original ids,
// matching the perturbation-strength definition.
std::pair<int, int> local_edge_change(const Graph& g, const Graph& gp, int v, int k) {
    auto sub = k_hop_subgraph(g, v, k);
    auto sub_p = k_hop_subgraph(gp, v, k);
    std::set<std::pair<int, int>> e1, e2;
    for (const auto& [a, b] : sub.graph.edges)
        e1.insert(make_edge(sub.original_ids[a], sub.original_ids[b]));
    for (const auto& [a, b] : sub_p.graph.edges)
        e2.insert(make_edge(sub_p.original_ids[a], sub_p.original_ids[b]));
    int m = 0;
    for (const auto& e : e1)
        if (!e2.count(e)) m++;
    for (const auto& e : e2)
        if (!e1.count(e)) m++;
    return {m, static_cast<int>(e1.size())};
}

// All nodes of v's k-hop subgraph in g, with adjacency induced from g and gp
// on that same node set.
struct LocalPair {
    Eigen::MatrixXd a1, a2;
    Eigen::VectorXd d1, d2;
    int n_v = 0;
    int e1 = 0;          // edges of the original-side subgraph
    int sym_diff = 0;
    double delta = 0.0;  // effective strength satisfying the degree premise
    double d_min = 0.0, d_max = 0.0;
    bool ok = false;
};

LocalPair local_pair(const Graph& g, const Graph& gp, int v, int k) {
    LocalPair lp;
    auto sub = k_hop_subgraph(g, v, k);
    lp.n_v = sub.graph.n;
    std::vector<int> index(g.n, -1);
    for (int i = 0; i < lp.n_v; ++i) index[sub.original_ids[i]] = i;

    lp.a1 = Eigen::MatrixXd::Zero(lp.n_v, lp.n_v);
    for (const auto& [a, b] : sub.graph.edges) {
        lp.a1(a, b) = 1.0;
        lp.a1(b, a) = 1.0;
    }
    lp.a2 = Eigen::MatrixXd::Zero(lp.n_v, lp.n_v);
    for (const auto& [a, b] : gp.edges) {
        int ia = index[a], ib = index[b];
        if (ia >= 0 && ib >= 0) {
            lp.a2(ia, ib) = 1.0;
            lp.a2(ib, ia) = 1.0;
        }
    }
    lp.d1 = lp.a1.rowwise().sum();
    lp.d2 = lp.a2.rowwise().sum();
    lp.e1 = sub.graph.num_edges();
    lp.sym_diff = static_cast<int>(std::lround((lp.a1 - lp.a2).squaredNorm() / 2.0));

    if (lp.d1.minCoeff() < 0.5 || lp.d2.minCoeff() < 0.5) return lp;  // degenerate
    lp.delta = lp.e1 > 0 ? static_cast<double>(lp.sym_diff) / lp.e1 : 0.0;
    for (int u = 0; u < lp.n_v; ++u)
        lp.delta = std::max(lp.delta, std::abs(lp.d1(u) - lp.d2(u)) / lp.d1(u));
    if (lp.delta >= 1.0) return lp;
    lp.d_min = std::min(lp.d1.minCoeff(), lp.d2.minCoeff());
    lp.d_max = std::max(lp.d1.maxCoeff(), lp.d2.maxCoeff());
    lp.ok = true;
    return lp;
}

double lemma1_margin(const Graph& g, const Graph& gp, double delta, int k) {
    double worst = std::numeric_limits<double>::infinity();
    for (int v = 0; v < g.n; ++v) {
        auto [m, e1] = local_edge_change(g, gp, v, k);
        if (e1 == 0) continue;
        double lhs = std::sqrt(2.0 * m);
        double rhs = std::sqrt(2.0 * delta * e1);
        worst = std::min(worst, rhs - lhs);
    }
    return worst;
}

double lemma2_margin(const LocalPair& lp) {
    Eigen::ArrayXd inv1 = lp.d1.array().rsqrt();
    Eigen::ArrayXd inv2 = lp.d2.array().rsqrt();
    double lhs_f = std::sqrt((inv1 - inv2).square().sum());
    double lhs_2 = (inv1 - inv2).abs().maxCoeff();
    double rhs_2 =
        lp.delta / (2.0 * std::sqrt(lp.d_min) * std::pow(1.0 - lp.delta, 1.5));
    double rhs_f = rhs_2 * std::sqrt(static_cast<double>(lp.n_v));
    // The scalar premise |d - d'| <= delta d holds by construction of
    // lp.delta, so the matrix bounds carry the margin.
    return std::min(rhs_f - lhs_f, rhs_2 - lhs_2);
}

double lemma3_margin(const LocalPair& lp) {
    Eigen::VectorXd inv1 = lp.d1.array().rsqrt();
    Eigen::VectorXd inv2 = lp.d2.array().rsqrt();
    Eigen::MatrixXd at1 = inv1.asDiagonal() * lp.a1 * inv1.asDiagonal();
    Eigen::MatrixXd at2 = inv2.asDiagonal() * lp.a2 * inv2.asDiagonal();
    double a_const = std::sqrt(lp.n_v * lp.d_max) / lp.d_min;
    return a_const * b_of_delta(lp.delta) - (at1 - at2).norm();
}

// Whole-graph effective strength and degree extremes, treating the graph as
// its own enclosing subgraph for lemmas 4 and 5.
struct GlobalPair {
    double delta = 0.0;
    double d_min = 0.0, d_max = 0.0;
    double a_const = 0.0;
    bool ok = false;
};

GlobalPair global_pair(const Graph& g, const Graph& gp, double delta_def) {
    GlobalPair gpair;
    auto deg1 = g.degrees();
    auto deg2 = gp.degrees();
    if (*std::min_element(deg1.begin(), deg1.end()) < 1 ||
        *std::min_element(deg2.begin(), deg2.end()) < 1)
        return gpair;

    std::set<std::pair<int, int>> e1(g.edges.begin(), g.edges.end());
    std::set<std::pair<int, int>> e2(gp.edges.begin(), gp.edges.end());
    int m = 0;
    for (const auto& e : e1)
        if (!e2.count(e)) m++;
    for (const auto& e : e2)
        if (!e1.count(e)) m++;

    gpair.delta = std::max(delta_def,
                           g.num_edges() > 0
                               ? static_cast<double>(m) / g.num_edges()
                               : 0.0);
    for (int u = 0; u < g.n; ++u)
        gpair.delta = std::max(
            gpair.delta, std::abs(deg1[u] - deg2[u]) / static_cast<double>(deg1[u]));
    if (gpair.delta >= 1.0) return gpair;

    gpair.d_min = std::min(*std::min_element(deg1.begin(), deg1.end()),
                           *std::min_element(deg2.begin(), deg2.end()));
    gpair.d_max = std::max(*std::max_element(deg1.begin(), deg1.end()),
                           *std::max_element(deg2.begin(), deg2.end()));
    gpair.a_const = std::sqrt(static_cast<double>(g.n) * gpair.d_max) / gpair.d_min;
    gpair.ok = true;
    return gpair;
}

Eigen::MatrixXd gnn_output(const EncoderState& state, const Graph& g) {
    Eigen::MatrixXd at =
        normalize(g, NormalizedMatrix::Kind::adjacency, false).values;
    Eigen::MatrixXd h = g.features;
    for (const auto& w : state.weights) h = (at * h * w).cwiseMax(0.0);
    return h;
}

// Returns the trial margin, or nothing when the sampled pair is degenerate
// for this lemma (isolated subgraph node, effective delta >= 1, dead output).
std::optional<double> trial_margin(int id, const TrialSpec& spec, const Graph& g,
                                   const Graph& gp, Rng& rng) {
    auto ps = perturbation_strength(g, gp, spec.k);
    if (id == 1) return lemma1_margin(g, gp, ps.delta, spec.k);

    if (id == 2 || id == 3) {
        int v = ps.argmax_node >= 0 ? ps.argmax_node : 0;
        LocalPair lp = local_pair(g, gp, v, spec.k);
        if (!lp.ok) return std::nullopt;
        return id == 2 ? lemma2_margin(lp) : lemma3_margin(lp);
    }

    // Lemmas 4 and 5: full forward pass under an L_W-capped encoder.
    GlobalPair gl = global_pair(g, gp, ps.delta);
    if (!gl.ok) return std::nullopt;

    EncoderConfig cfg;
    cfg.k = spec.k;
    cfg.dims.assign(1, spec.feature_dim);
    for (int l = 0; l < spec.k; ++l) cfg.dims.push_back(spec.hidden);
    cfg.proj_dim = spec.proj_dim;
    cfg.weight_norm_cap = spec.l_w;
    cfg.self_loops = false;
    cfg.normalize_output = false;
    EncoderState state = init_encoder(cfg, rng);

    Eigen::MatrixXd h1 = gnn_output(state, g);
    Eigen::MatrixXd h2 = gnn_output(state, gp);
    double x_norm = spectral_norm(g.features);
    double b = b_of_delta(gl.delta);
    double bound_h =
        spec.k * std::pow(gl.a_const * spec.l_w, spec.k) * b * x_norm;
    if (id == 4) return bound_h - (h1 - h2).rowwise().norm().maxCoeff();

    Eigen::MatrixXd z1 = h1 * state.projection;
    Eigen::MatrixXd z2 = h2 * state.projection;
    double c_z = std::min(z1.rowwise().norm().minCoeff(),
                          z2.rowwise().norm().minCoeff());
    if (c_z < 1e-12) return std::nullopt;
    double p_norm = spectral_norm(state.projection);
    double eps = spec.k * std::pow(gl.a_const, spec.k) * b *
                 std::pow(spec.l_w, spec.k) * x_norm * p_norm / c_z;
    double min_sim = std::numeric_limits<double>::infinity();
    for (int v = 0; v < g.n; ++v)
        min_sim = std::min(min_sim, z1.row(v).dot(z2.row(v)) /
                                        (z1.row(v).norm() * z2.row(v).norm()));
    return min_sim - (1.0 - eps * eps / 2.0);
}

double run_trial(int id, const TrialSpec& spec, int t) {
    for (int attempt = 0; attempt < 30; ++attempt) {
        Rng rng(sub_seed(spec.seed, t, attempt));
        Graph g = make_base(spec, rng, id >= 2);
        Graph gp = sample_delta_perturbation(g, spec.k, spec.delta_target, rng);
        auto margin = trial_margin(id, spec, g, gp, rng);
        if (margin) return *margin;
    }
    throw std::runtime_error("verify_lemma: lemma " + std::to_string(id) +
                             " trial " + std::to_string(t) +
                             " stayed degenerate after 30 resamples");
}

LemmaReport lemma6_report(const TrialSpec& spec) {
    if (spec.n < 2 || spec.d < 1)
        throw std::invalid_argument("verify_lemma: lemma 6 needs n >= 2, d >= 1");
    double eps_prime = std::sqrt(2.0 * std::log(static_cast<double>(spec.n)) / spec.d);
    LemmaReport rep;
    rep.id = 6;
    rep.trials = spec.trials;
    int passes = 0;
    double worst = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(+ : passes) reduction(min : worst) \
    schedule(static)
    for (int i = 0; i < spec.trials; ++i) {
        Rng rng(sub_seed(spec.seed, i, 6));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd a(spec.d), b(spec.d);
        for (int j = 0; j < spec.d; ++j) a(j) = normal(rng);
        for (int j = 0; j < spec.d; ++j) b(j) = normal(rng);
        double sim = a.dot(b) / (a.norm() * b.norm());
        double margin = eps_prime - std::abs(sim);
        if (margin >= 0.0) passes++;
        worst = std::min(worst, margin);
    }
    rep.passes = passes;
    rep.worst_margin = worst;
    return rep;
}

}  // namespace

LemmaReport verify_lemma(int id, const TrialSpec& spec) {
    if (id < 1 || id > 6)
        throw std::invalid_argument("verify_lemma: lemma id must be in 1..6");
    if (spec.trials < 1)
        throw std::invalid_argument("verify_lemma: trials must be >= 1");
    if (id == 6) return lemma6_report(spec);

    LemmaReport rep;
    rep.id = id;
    rep.trials = spec.trials;
    int passes = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string error;
#pragma omp parallel for reduction(+ : passes) reduction(min : worst) \
    schedule(dynamic)
    for (int t = 0; t < spec.trials; ++t) {
        try {
            double margin = run_trial(id, spec, t);
            if (margin >= kMarginTol) passes++;
            worst = std::min(worst, margin);
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw std::runtime_error(error);
    rep.passes = passes;
    rep.worst_margin = worst;
    return rep;
}

std::string LemmaReport::to_json(const TrialSpec& spec) const {
    json j;
    j["lemma"] = id;
    j["trials"] = trials;
    j["passes"] = passes;
    j["pass_fraction"] = pass_fraction();
    j["worst_margin"] = worst_margin;
    json p;
    p["family"] = spec.family;
    p["n"] = spec.n;
    p["p"] = spec.p;
    p["p_out"] = spec.p_out;
    p["delta_target"] = spec.delta_target;
    p["k"] = spec.k;
    p["seed"] = spec.seed;
    p["l_w"] = spec.l_w;
    p["hidden"] = spec.hidden;
    p["proj_dim"] = spec.proj_dim;
    p["feature_dim"] = spec.feature_dim;
    p["d"] = spec.d;
    j["params"] = p;
    return j.dump(2);
}

// --- theorem verification ------------------------------------------------------

TheoremResult verify_theorem(int n, int d, double tau, double epsilon,
                             double epsilon_prime, std::uint64_t seed,
                             bool violate_positive) {
    if (n < 2) throw std::invalid_argument("verify_theorem: n must be >= 2");
    if (tau <= 0.0) throw std::invalid_argument("verify_theorem: tau must be > 0");
    if (epsilon < 0.0 || epsilon_prime < 0.0)
        throw std::invalid_argument("verify_theorem: epsilon, epsilon' must be >= 0");
    if (d < n)
        throw std::invalid_argument(
            "verify_theorem: construction needs d >= n for orthonormal rows");
    double needed = 2.0 * std::log(static_cast<double>(n)) /
                    (epsilon_prime * epsilon_prime);
    if (epsilon > 0.0 &&
        (epsilon_prime == 0.0 || d < 0.99 * needed))
        throw std::invalid_argument(
            "verify_theorem: d too small for n at requested epsilon'; the "
            "construction needs d >= 2 ln n / epsilon'^2 = " +
            std::to_string(needed));

    Rng rng(sub_seed(seed, 0, 42));
    // Z rows are signed standard basis vectors under a random permutation, so
    // cross similarities against Z depend only on single coordinates of each
    // rotated partner row.
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> sign(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int v = 0; v < n; ++v) sign[v] = unif(rng) < 0.5 ? -1.0 : 1.0;

    double cos_min = violate_positive ? 1.0 - epsilon * epsilon
                                      : 1.0 - epsilon * epsilon / 2.0;
    cos_min = std::max(cos_min, -1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // sims(v, u) = <z_v, z'_u>
    Eigen::MatrixXd sims(n, n);
    for (int u = 0; u < n; ++u) {
        double c = violate_positive
                       ? cos_min
                       : cos_min + (1.0 - cos_min) * unif(rng);
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            Eigen::VectorXd w(d);
            for (int j = 0; j < d; ++j) w(j) = normal(rng);
            w(perm[u]) = 0.0;  // keeps w orthogonal to z_u
            w.normalize();
            placed = true;
            for (int v = 0; v < n && placed; ++v)
                if (v != u && std::abs(s * sign[v] * w(perm[v])) > epsilon_prime)
                    placed = false;
            if (!placed) continue;
            for (int v = 0; v < n; ++v)
                sims(v, u) = v == u ? c : s * sign[v] * w(perm[v]);
        }
        if (!placed)
            throw std::invalid_argument(
                "verify_theorem: could not keep cross similarities within "
                "epsilon'; the construction needs d >= 2 ln n / epsilon'^2 = " +
                std::to_string(needed));
    }

    double loss = 0.0;
    for (int v = 0; v < n; ++v) {
        Eigen::RowVectorXd logits = sims.row(v) / tau;
        double m = logits.maxCoeff();
        loss += -(logits(v) - m - std::log((logits.array() - m).exp().sum()));
    }
    loss /= n;

    double log_negs = std::log(n - 1.0);
    double s_pos = 1.0 - epsilon * epsilon / 2.0;
    TheoremResult res;
    res.loss = loss;
    res.lower = log_sum_exp2(1.0 / tau, log_negs - epsilon_prime / tau) - 1.0 / tau;
    res.upper = log_sum_exp2(s_pos / tau, log_negs + epsilon_prime / tau) -
                s_pos / tau;
    res.within = loss >= res.lower - 1e-9 && loss <= res.upper + 1e-9;
    return res;
}

}  // namespace cgssl
