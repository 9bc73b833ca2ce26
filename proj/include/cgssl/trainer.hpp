#ifndef CGSSL_TRAINER_HPP
#define CGSSL_TRAINER_HPP

#include <optional>
#include <string>
#include <vector>

#include "cgssl/augment.hpp"
#include "cgssl/encoder.hpp"
#include "cgssl/graph.hpp"
#include "cgssl/objectives.hpp"
#include "cgssl/spectrum.hpp"

namespace cgssl {

enum class Framework { grace, mvgrl, gbt, bgrl };

Framework framework_from_string(const std::string& s);
std::string to_string(Framework f);
LossKind framework_loss(Framework f);

struct TrainConfig {
    Framework framework = Framework::gbt;
    AugmentationSpec augmentation_1;
    AugmentationSpec augmentation_2;
    EncoderConfig encoder;
    LossConfig loss;
    int epochs = 200;
    double lr = 5e-4;
    double momentum = 0.9;
    std::uint64_t seed = 0;
    bool spectrum_logging = false;

    /// Enforces the framework -> loss mapping and parameter sanity.
    void validate() const;
};

struct RunRecord {
    std::vector<double> loss_history;
    std::vector<Spectrum> augmented_spectra;  // both views per epoch when logging
    EncoderState final_state;
    std::vector<double> wallclock_per_epoch;  // seconds
};

struct Split {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Deterministic shuffle split; sizes floor(n*f) with remainder to test.
Split make_split(int n, double f_train, double f_val, double f_test,
                 std::uint64_t seed);

/// Two-view contrastive training on one graph (node level).
RunRecord train(const TrainConfig& config, const Graph& data);

/// Graph-level variant: every graph is augmented and encoded per epoch,
/// mean-pooled, and the loss is taken over per-graph embeddings.
RunRecord train(const TrainConfig& config, const std::vector<Graph>& data);

/// Mean-pool per-node embeddings of each graph into one row per graph.
Eigen::MatrixXd graph_readout(const std::vector<Embeddings>& per_graph);

struct ProbeOptions {
    int steps = 500;
    double lr = 0.1;
    double l2 = 1e-4;
};

/// Frozen-representation evaluation: multinomial logistic regression on the
/// train split, model selected by validation accuracy, scored on test.
double linear_probe(const Embeddings& embeddings, const std::vector<int>& labels,
                    const Split& split, const ProbeOptions& opts = {});

}  // namespace cgssl

#endif
