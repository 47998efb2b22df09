#include "checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace pcs {
namespace {

constexpr char kMagic[8] = {'P', 'C', 'S', 'M', 'O', 'D', 'L', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
    for (double d : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        write_u64(out, bits);
    }
}

void read_doubles(std::istream& in, std::vector<double>& values) {
    for (double& d : values) {
        const std::uint64_t bits = read_u64(in);
        std::memcpy(&d, &bits, 8);
    }
}

}  // namespace

void save_model(const ModelParams& params, const std::string& path) {
    nlohmann::json header;
    header["config"] = {{"vocab_size", params.config.vocab_size},
                        {"embed_dim", params.config.embed_dim},
                        {"num_layers", params.config.num_layers},
                        {"num_heads", params.config.num_heads},
                        {"mlp_hidden", params.config.mlp_hidden},
                        {"num_classes", params.config.num_classes},
                        {"max_seq_len", params.config.max_seq_len},
                        {"dropout_rate", params.config.dropout_rate}};
    nlohmann::json tensors = nlohmann::json::array();
    params.for_each_tensor([&tensors](const std::string& name, const Matrix& m) {
        tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    });
    header["tensors"] = tensors;
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(kMagic, 8);
    write_u64(out, header_str.size());
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    params.for_each_tensor(
        [&out](const std::string&, const Matrix& m) { write_doubles(out, m.data()); });
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError("not a model checkpoint: " + path);
    const std::uint64_t header_len = read_u64(in);
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError("truncated checkpoint header: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad checkpoint header: " + std::string(e.what()));
    }
    const auto& cfg = header.at("config");
    ModelConfig config;
    config.vocab_size = cfg.at("vocab_size").get<std::size_t>();
    config.embed_dim = cfg.at("embed_dim").get<std::size_t>();
    config.num_layers = cfg.at("num_layers").get<std::size_t>();
    config.num_heads = cfg.at("num_heads").get<std::size_t>();
    config.mlp_hidden = cfg.at("mlp_hidden").get<std::size_t>();
    config.num_classes = cfg.at("num_classes").get<std::size_t>();
    config.max_seq_len = cfg.at("max_seq_len").get<std::size_t>();
    config.dropout_rate = cfg.at("dropout_rate").get<double>();
    config.validate();

    RngStream throwaway(0);
    ModelParams params = init_params(config, throwaway);
    std::size_t idx = 0;
    const auto& tensors = header.at("tensors");
    params.for_each_tensor([&](const std::string& name, Matrix& m) {
        if (idx >= tensors.size()) throw IoError("checkpoint tensor manifest too short");
        const auto& t = tensors[idx++];
        if (t.at("name").get<std::string>() != name ||
            t.at("rows").get<std::size_t>() != m.rows() ||
            t.at("cols").get<std::size_t>() != m.cols())
            throw IoError("checkpoint tensor mismatch at " + name);
        read_doubles(in, m.data());
    });
    if (!in) throw IoError("truncated checkpoint payload: " + path);
    return params;
}

}  // namespace pcs
