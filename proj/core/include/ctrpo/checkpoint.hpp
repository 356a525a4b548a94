#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrpo/mlp.hpp"

namespace ctrpo {

/// One named flat parameter vector together with the network shape it
/// belongs to. The vector may be longer than the bare net parameter count
/// (the policy appends its log-std entries).
struct ParamBlock {
    std::string name;
    MlpSpec spec;
    Eigen::VectorXd params;
};

struct Checkpoint {
    std::vector<ParamBlock> blocks;

    bool has(const std::string& name) const;
    const ParamBlock& find(const std::string& name) const;
};

/// Plain-text serialization. Values are written in decimal with enough
/// digits that reading the file back reproduces every double bit for bit.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ctrpo
