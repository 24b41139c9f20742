#include "pgnav/model_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace pgnav {

namespace {

constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr const char* kMagic = "pgnav-model";
constexpr int kFormatVersion = 1;

void append_double_le(std::string& bytes, double v) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        bytes.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

double read_double_le(const std::string& bytes, std::size_t offset) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)]))
             << (8 * i);
    return std::bit_cast<double>(u);
}

struct Header {
    std::string kind;
    std::vector<long long> shape;
    std::size_t payload_bytes = 0;
};

void write_model(const std::string& path, const std::string& kind,
                 const std::vector<long long>& shape, const std::string& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "kind " << kind << '\n';
    out << "shape";
    for (long long v : shape) out << ' ' << v;
    out << '\n';
    out << "payload " << payload.size() << " base64\n";
    const std::string b64 = base64_encode(payload);
    for (std::size_t i = 0; i < b64.size(); i += 76)
        out << b64.substr(i, 76) << '\n';
    out << "end\n";
}

Header read_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ModelVersionError("empty model file");
    {
        std::istringstream ls(line);
        std::string magic;
        int version = -1;
        ls >> magic >> version;
        if (magic != kMagic || version != kFormatVersion)
            throw ModelVersionError("unsupported model header: " + line);
    }
    Header h;
    if (!std::getline(in, line)) throw ModelTruncatedError("missing kind line");
    {
        std::istringstream ls(line);
        std::string key;
        ls >> key >> h.kind;
        if (key != "kind" || h.kind.empty()) throw ModelShapeError("bad kind line: " + line);
    }
    if (!std::getline(in, line)) throw ModelTruncatedError("missing shape line");
    {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key != "shape") throw ModelShapeError("bad shape line: " + line);
        long long v;
        while (ls >> v) h.shape.push_back(v);
    }
    if (!std::getline(in, line)) throw ModelTruncatedError("missing payload line");
    {
        std::istringstream ls(line);
        std::string key, encoding;
        long long n = -1;
        ls >> key >> n >> encoding;
        if (key != "payload" || n < 0 || encoding != "base64")
            throw ModelShapeError("bad payload line: " + line);
        h.payload_bytes = static_cast<std::size_t>(n);
    }
    return h;
}

std::string read_payload(std::istream& in, const Header& h) {
    std::string b64;
    std::string line;
    bool saw_end = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "end") {
            saw_end = true;
            break;
        }
        b64 += line;
    }
    if (!saw_end) throw ModelTruncatedError("model payload not terminated");
    const std::string bytes = base64_decode(b64);
    if (bytes.size() != h.payload_bytes)
        throw ModelTruncatedError("model payload has wrong length");
    return bytes;
}

void expect_doubles(const Header& h, std::size_t count) {
    if (h.payload_bytes != count * 8)
        throw ModelShapeError("payload size does not match declared shape");
}

} // namespace

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
        out.push_back(kBase64Chars[v & 63]);
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::string base64_decode(const std::string& text) {
    int table[256];
    for (int& v : table) v = -1;
    for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kBase64Chars[i])] = i;

    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = table[static_cast<unsigned char>(c)];
        if (v < 0) throw std::runtime_error("invalid base64 character");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

void save_mlp(const MlpModel& m, const std::string& path) {
    std::string payload;
    payload.reserve(m.parameter_count() * 8);
    auto append_matrix = [&](const Eigen::MatrixXd& mat) {
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
            for (Eigen::Index c = 0; c < mat.cols(); ++c)
                append_double_le(payload, mat(r, c));
    };
    auto append_vector = [&](const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) append_double_le(payload, v[i]);
    };
    append_matrix(m.w1);
    append_vector(m.b1);
    append_matrix(m.w2);
    append_vector(m.b2);
    append_matrix(m.w3);
    append_vector(m.b3);
    write_model(path, "mlp", {m.sizes[0], m.sizes[1], m.sizes[2], m.sizes[3]}, payload);
}

MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    const Header h = read_header(in);
    if (h.kind != "mlp") throw ModelShapeError("expected an mlp model, found " + h.kind);
    if (h.shape.size() != 4) throw ModelShapeError("mlp shape must have 4 entries");
    MlpModel m;
    for (int i = 0; i < 4; ++i) {
        if (h.shape[static_cast<std::size_t>(i)] <= 0)
            throw ModelShapeError("mlp layer sizes must be positive");
        m.sizes[static_cast<std::size_t>(i)] = static_cast<int>(h.shape[static_cast<std::size_t>(i)]);
    }
    const std::size_t count =
        static_cast<std::size_t>(m.sizes[1]) * m.sizes[0] + m.sizes[1] +
        static_cast<std::size_t>(m.sizes[2]) * m.sizes[1] + m.sizes[2] +
        static_cast<std::size_t>(m.sizes[3]) * m.sizes[2] + m.sizes[3];
    expect_doubles(h, count);
    const std::string bytes = read_payload(in, h);

    std::size_t off = 0;
    auto take_matrix = [&](int rows, int cols) {
        Eigen::MatrixXd mat(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                mat(r, c) = read_double_le(bytes, off);
                off += 8;
            }
        return mat;
    };
    auto take_vector = [&](int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            v[i] = read_double_le(bytes, off);
            off += 8;
        }
        return v;
    };
    m.w1 = take_matrix(m.sizes[1], m.sizes[0]);
    m.b1 = take_vector(m.sizes[1]);
    m.w2 = take_matrix(m.sizes[2], m.sizes[1]);
    m.b2 = take_vector(m.sizes[2]);
    m.w3 = take_matrix(m.sizes[3], m.sizes[2]);
    m.b3 = take_vector(m.sizes[3]);
    return m;
}

void save_nnql(const NnqlStore& s, const std::string& path) {
    std::vector<long long> shape;
    shape.push_back(s.dim());
    shape.push_back(static_cast<long long>(s.insertion_counter()));
    std::size_t total = 0;
    for (int a = 0; a < kActionCount; ++a) {
        shape.push_back(static_cast<long long>(s.size_for_action(a)));
        total += s.size_for_action(a);
    }
    std::string payload;
    payload.reserve(total * (static_cast<std::size_t>(s.dim()) + 2) * 8);
    for (int a = 0; a < kActionCount; ++a) {
        const auto entries = s.action_entries(a);
        const std::size_t n = entries.qs.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (int d = 0; d < s.dim(); ++d)
                append_double_le(payload,
                                 entries.embeddings[i * static_cast<std::size_t>(s.dim()) +
                                                    static_cast<std::size_t>(d)]);
            append_double_le(payload, entries.qs[i]);
            append_double_le(payload, static_cast<double>(entries.insert_order[i]));
        }
    }
    write_model(path, "nnql", shape, payload);
}

NnqlStore load_nnql(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    const Header h = read_header(in);
    if (h.kind != "nnql") throw ModelShapeError("expected an nnql model, found " + h.kind);
    if (h.shape.size() != 2 + kActionCount)
        throw ModelShapeError("nnql shape must list dim, counter and 13 counts");
    const int dim = static_cast<int>(h.shape[0]);
    if (dim <= 0) throw ModelShapeError("nnql dimension must be positive");
    std::size_t total = 0;
    for (int a = 0; a < kActionCount; ++a) {
        if (h.shape[static_cast<std::size_t>(2 + a)] < 0)
            throw ModelShapeError("nnql entry counts must be nonnegative");
        total += static_cast<std::size_t>(h.shape[static_cast<std::size_t>(2 + a)]);
    }
    expect_doubles(h, total * (static_cast<std::size_t>(dim) + 2));
    const std::string bytes = read_payload(in, h);

    NnqlStore store(dim);
    std::size_t off = 0;
    std::vector<double> embedding(static_cast<std::size_t>(dim));
    for (int a = 0; a < kActionCount; ++a) {
        const auto n = static_cast<std::size_t>(h.shape[static_cast<std::size_t>(2 + a)]);
        for (std::size_t i = 0; i < n; ++i) {
            for (int d = 0; d < dim; ++d) {
                embedding[static_cast<std::size_t>(d)] = read_double_le(bytes, off);
                off += 8;
            }
            const double q = read_double_le(bytes, off);
            off += 8;
            const double order = read_double_le(bytes, off);
            off += 8;
            store.restore_entry(a, embedding, q, static_cast<std::uint64_t>(order));
        }
    }
    store.set_insertion_counter(static_cast<std::uint64_t>(h.shape[1]));
    return store;
}

void save_classifier(const PlaceClassifier& c, const std::string& path) {
    std::string payload;
    payload.reserve(static_cast<std::size_t>(c.weights.size() + c.bias.size()) * 8);
    for (Eigen::Index r = 0; r < c.weights.rows(); ++r)
        for (Eigen::Index col = 0; col < c.weights.cols(); ++col)
            append_double_le(payload, c.weights(r, col));
    for (Eigen::Index i = 0; i < c.bias.size(); ++i) append_double_le(payload, c.bias[i]);
    write_model(path, "place-classifier",
                {c.kind == Modality::fpv ? 0LL : 1LL, c.class_count(), c.input_dim()},
                payload);
}

PlaceClassifier load_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    const Header h = read_header(in);
    if (h.kind != "place-classifier")
        throw ModelShapeError("expected a place-classifier model, found " + h.kind);
    if (h.shape.size() != 3) throw ModelShapeError("classifier shape must have 3 entries");
    if (h.shape[0] != 0 && h.shape[0] != 1)
        throw ModelShapeError("classifier modality must be 0 (fpv) or 1 (tpv)");
    const int classes = static_cast<int>(h.shape[1]);
    const int dim = static_cast<int>(h.shape[2]);
    if (classes <= 0 || dim <= 0) throw ModelShapeError("classifier dims must be positive");
    expect_doubles(h, static_cast<std::size_t>(classes) * static_cast<std::size_t>(dim) +
                          static_cast<std::size_t>(classes));
    const std::string bytes = read_payload(in, h);

    PlaceClassifier c;
    c.kind = h.shape[0] == 0 ? Modality::fpv : Modality::tpv;
    c.weights.resize(classes, dim);
    c.bias.resize(classes);
    std::size_t off = 0;
    for (int r = 0; r < classes; ++r)
        for (int col = 0; col < dim; ++col) {
            c.weights(r, col) = read_double_le(bytes, off);
            off += 8;
        }
    for (int i = 0; i < classes; ++i) {
        c.bias[i] = read_double_le(bytes, off);
        off += 8;
    }
    return c;
}

} // namespace pgnav
