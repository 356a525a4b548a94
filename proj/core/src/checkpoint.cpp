#include "ctrpo/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ctrpo {

namespace {

constexpr const char* kMagic = "ctrpo-checkpoint-v1";

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw std::runtime_error("failed to format double");
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, int line_no) {
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    return x;
}

std::string next_line(std::istream& in, int& line_no) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("checkpoint truncated at line " + std::to_string(line_no));
    ++line_no;
    return line;
}

}  // namespace

bool Checkpoint::has(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return true;
    return false;
}

const ParamBlock& Checkpoint::find(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return b;
    throw std::runtime_error("checkpoint has no block named '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << kMagic << "\n";
    out << "blocks " << ckpt.blocks.size() << "\n";
    for (const auto& b : ckpt.blocks) {
        b.spec.validate();
        out << "block " << b.name << "\n";
        out << "dims " << b.spec.input_dim;
        for (int h : b.spec.hidden_dims) out << " " << h;
        out << " " << b.spec.output_dim << "\n";
        out << "activation " << to_string(b.spec.activation) << "\n";
        out << "params " << b.params.size() << "\n";
        for (Eigen::Index i = 0; i < b.params.size(); ++i) out << format_double(b.params[i]) << "\n";
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    int line_no = 0;

    if (next_line(in, line_no) != kMagic)
        throw std::runtime_error("'" + path + "' is not a checkpoint file");

    std::string word;
    std::size_t n_blocks = 0;
    {
        std::istringstream ls(next_line(in, line_no));
        if (!(ls >> word >> n_blocks) || word != "blocks")
            throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": expected block count");
    }

    Checkpoint ckpt;
    ckpt.blocks.reserve(n_blocks);
    for (std::size_t bi = 0; bi < n_blocks; ++bi) {
        ParamBlock block;
        {
            std::istringstream ls(next_line(in, line_no));
            if (!(ls >> word >> block.name) || word != "block")
                throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": expected block header");
        }
        {
            std::istringstream ls(next_line(in, line_no));
            if (!(ls >> word) || word != "dims")
                throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": expected dims");
            std::vector<int> dims;
            int d = 0;
            while (ls >> d) dims.push_back(d);
            if (dims.size() < 2)
                throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": need at least 2 dims");
            block.spec.input_dim = dims.front();
            block.spec.output_dim = dims.back();
            block.spec.hidden_dims.assign(dims.begin() + 1, dims.end() - 1);
        }
        {
            std::istringstream ls(next_line(in, line_no));
            std::string tag;
            if (!(ls >> word >> tag) || word != "activation")
                throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": expected activation");
            block.spec.activation = activation_from_string(tag);
        }
        block.spec.validate();
        Eigen::Index count = 0;
        {
            std::istringstream ls(next_line(in, line_no));
            if (!(ls >> word >> count) || word != "params" || count < 0)
                throw std::runtime_error("checkpoint line " + std::to_string(line_no) + ": expected param count");
        }
        block.params.resize(count);
        for (Eigen::Index i = 0; i < count; ++i) block.params[i] = parse_double(next_line(in, line_no), line_no);
        ckpt.blocks.push_back(std::move(block));
    }
    return ckpt;
}

}  // namespace ctrpo
