#include "cgssl/encoder.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace cgssl {

using nlohmann::json;

void EncoderConfig::validate() const {
    if (k < 1) throw std::invalid_argument("encoder: k must be >= 1");
    if (static_cast<int>(dims.size()) != k + 1)
        throw std::invalid_argument("encoder: dims must have k+1 entries");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("encoder: dims entries must be >= 1");
    if (proj_dim < 1) throw std::invalid_argument("encoder: proj_dim must be >= 1");
    if (weight_norm_cap && *weight_norm_cap <= 0.0)
        throw std::invalid_argument("encoder: weight_norm_cap must be > 0");
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    // Fixed pseudo-random start so the iterate is not orthogonal to the top
    // singular vector for structured matrices.
    Rng rng(0x5eed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(m.cols());
    for (int i = 0; i < v.size(); ++i) v(i) = normal(rng);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = m.transpose() * (m * v);
        double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        double next = (m * v).norm();
        if (std::abs(next - sigma) <= 1e-10 * std::max(1.0, next)) return next;
        sigma = next;
    }
    return sigma;
}

EncoderState init_encoder(const EncoderConfig& config, Rng& rng) {
    config.validate();
    EncoderState state;
    auto glorot = [&rng](int rows, int cols) {
        double bound = std::sqrt(6.0 / (rows + cols));
        std::uniform_real_distribution<double> unif(-bound, bound);
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = unif(rng);
        return m;
    };
    for (int l = 0; l < config.k; ++l)
        state.weights.push_back(glorot(config.dims[l], config.dims[l + 1]));
    state.projection = glorot(config.dims.back(), config.proj_dim);
    if (config.weight_norm_cap) spectral_norm_cap(state, *config.weight_norm_cap);
    return state;
}

void spectral_norm_cap(EncoderState& state, double cap) {
    if (cap <= 0.0) throw std::invalid_argument("spectral_norm_cap: cap must be > 0");
    for (auto& w : state.weights) {
        double norm = spectral_norm(w);
        if (norm > cap) w *= cap / norm;
    }
}

namespace {

struct ForwardCache {
    Eigen::MatrixXd a_norm;
    std::vector<Eigen::MatrixXd> hidden;   // H^(0..k)
    Eigen::MatrixXd z_raw;                 // before row normalization
    Eigen::VectorXd row_norms;             // valid iff normalize_output
};

ForwardCache forward(const EncoderState& state, const EncoderConfig& config,
                     const Eigen::MatrixXd& a_norm, const Eigen::MatrixXd& x) {
    config.validate();
    if (x.cols() != config.dims[0])
        throw std::invalid_argument("encode: feature dim " + std::to_string(x.cols()) +
                                    " does not match dims[0]=" +
                                    std::to_string(config.dims[0]));
    if (a_norm.rows() != x.rows() || a_norm.cols() != x.rows())
        throw std::invalid_argument("encode: view matrix shape does not match node count");
    if (static_cast<int>(state.weights.size()) != config.k)
        throw std::invalid_argument("encode: state has wrong layer count");

    ForwardCache cache;
    cache.a_norm = a_norm;
    cache.hidden.push_back(x);
    for (int l = 0; l < config.k; ++l) {
        if (state.weights[l].rows() != cache.hidden.back().cols())
            throw std::invalid_argument("encode: W^(" + std::to_string(l) +
                                        ") shape mismatch");
        Eigen::MatrixXd pre = a_norm * cache.hidden.back() * state.weights[l];
        cache.hidden.push_back(pre.cwiseMax(0.0));
    }
    if (state.projection.rows() != cache.hidden.back().cols())
        throw std::invalid_argument("encode: projection shape mismatch");
    cache.z_raw = cache.hidden.back() * state.projection;
    if (config.normalize_output) {
        cache.row_norms = cache.z_raw.rowwise().norm();
        for (int i = 0; i < cache.row_norms.size(); ++i)
            if (cache.row_norms(i) < 1e-300)
                throw std::runtime_error("encode: zero-norm embedding at node " +
                                         std::to_string(i) + "; cannot normalize");
    }
    return cache;
}

Eigen::MatrixXd view_of(const EncoderConfig& config, const Graph& g) {
    return normalize(g, NormalizedMatrix::Kind::adjacency, config.self_loops).values;
}

}  // namespace

Embeddings encode(const EncoderState& state, const EncoderConfig& config,
                  const Eigen::MatrixXd& view_matrix, const Eigen::MatrixXd& features) {
    auto cache = forward(state, config, view_matrix, features);
    Embeddings out;
    if (config.normalize_output) {
        out.Z = cache.row_norms.array().inverse().matrix().asDiagonal() * cache.z_raw;
        out.normalized = true;
    } else {
        out.Z = cache.z_raw;
    }
    return out;
}

Embeddings encode(const EncoderState& state, const EncoderConfig& config,
                  const Graph& g) {
    return encode(state, config, view_of(config, g), g.features);
}

EncoderGradients encode_grad(const EncoderState& state, const EncoderConfig& config,
                             const Eigen::MatrixXd& view_matrix,
                             const Eigen::MatrixXd& features,
                             const Eigen::MatrixXd& upstream) {
    auto cache = forward(state, config, view_matrix, features);
    if (upstream.rows() != cache.z_raw.rows() || upstream.cols() != cache.z_raw.cols())
        throw std::invalid_argument("encode_grad: upstream shape does not match Z");

    Eigen::MatrixXd g_raw;
    if (config.normalize_output) {
        // Row normalization Jacobian: dL/dz = (u - (u . zhat) zhat) / ||z||.
        g_raw.resizeLike(cache.z_raw);
        for (int i = 0; i < cache.z_raw.rows(); ++i) {
            double norm = cache.row_norms(i);
            Eigen::RowVectorXd zhat = cache.z_raw.row(i) / norm;
            Eigen::RowVectorXd u = upstream.row(i);
            g_raw.row(i) = (u - (u.dot(zhat)) * zhat) / norm;
        }
    } else {
        g_raw = upstream;
    }

    EncoderGradients grads;
    grads.projection = cache.hidden.back().transpose() * g_raw;
    Eigen::MatrixXd g_hidden = g_raw * state.projection.transpose();
    grads.weights.resize(config.k);
    for (int l = config.k - 1; l >= 0; --l) {
        // ReLU mask from the stored activations (H > 0 iff pre-activation > 0).
        Eigen::MatrixXd masked =
            (cache.hidden[l + 1].array() > 0.0).select(g_hidden, 0.0);
        Eigen::MatrixXd agg = cache.a_norm * cache.hidden[l];  // A~ H^(l)
        grads.weights[l] = agg.transpose() * masked;
        if (l > 0)
            g_hidden = cache.a_norm.transpose() * masked * state.weights[l].transpose();
    }
    return grads;
}

EncoderGradients encode_grad(const EncoderState& state, const EncoderConfig& config,
                             const Graph& g, const Eigen::MatrixXd& upstream) {
    return encode_grad(state, config, view_of(config, g), g.features, upstream);
}

// --- serialization -----------------------------------------------------------

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("encoder json: matrix must be a non-empty array");
    int rows = static_cast<int>(j.size());
    int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw std::invalid_argument("encoder json: ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

}  // namespace

std::string EncoderState::to_json() const {
    json j;
    j["weights"] = json::array();
    for (const auto& w : weights) j["weights"].push_back(matrix_to_json(w));
    j["projection"] = matrix_to_json(projection);
    return j.dump(2);
}

EncoderState EncoderState::from_json(const std::string& text) {
    json j = json::parse(text);
    EncoderState state;
    for (const auto& w : j.at("weights")) state.weights.push_back(matrix_from_json(w));
    state.projection = matrix_from_json(j.at("projection"));
    return state;
}

void EncoderState::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << to_json() << "\n";
}

EncoderState EncoderState::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json(text);
}

}  // namespace cgssl
