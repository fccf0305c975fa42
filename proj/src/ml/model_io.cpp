/**
 * @file model_io.cpp
 * @brief .palmmodel reader and writer
 */

#include <palm/ml/model_io.hpp>
#include <palm/error.hpp>
#include <palm/png_io.hpp>
#include <palm/text.hpp>

#include <fmt/format.h>

#include <cmath>
#include <sstream>

namespace palm::ml {

namespace {

constexpr const char* kMagic = "palmmodel";

void write_values(std::string& out, std::string_view key, std::span<const double> values) {
    out += key;
    for (double v : values) {
        out += ' ';
        out += format_double(v);
    }
    out += '\n';
}

class Reader {
public:
    Reader(const std::string& text, const std::string& source) : in_(text), source_(source) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw CorruptModel(fmt::format("{}: line {}: {}", source_, line_no_, what));
    }

    std::vector<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto t = trim(line);
            if (t.empty()) continue;
            std::vector<std::string> tokens;
            for (auto& tok : split(t, ' ')) {
                if (!tok.empty()) tokens.push_back(std::move(tok));
            }
            return tokens;
        }
        fail("unexpected end of file");
    }

    /// Reads "key v1 ... vn" and returns the values.
    std::vector<std::string> expect(std::string_view key, std::size_t n) {
        auto tokens = next();
        if (tokens.empty() || tokens[0] != key) fail(fmt::format("expected '{}'", key));
        if (tokens.size() != n + 1) fail(fmt::format("'{}' expects {} value(s), found {}", key, n, tokens.size() - 1));
        tokens.erase(tokens.begin());
        return tokens;
    }

    long long to_int(const std::string& s) const {
        const auto v = parse_int(s);
        if (!v) fail(fmt::format("'{}' is not an integer", s));
        return *v;
    }

    double to_double(const std::string& s) const {
        const auto v = parse_double(s);
        if (!v || !std::isfinite(*v)) fail(fmt::format("'{}' is not a finite number", s));
        return *v;
    }

    template <std::size_t N>
    std::array<double, N> doubles(std::string_view key) {
        const auto tokens = expect(key, N);
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = to_double(tokens[i]);
        return out;
    }

    long long integer(std::string_view key) { return to_int(expect(key, 1)[0]); }

private:
    std::istringstream in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

std::string serialize_forest(const ForestModel& m) {
    std::string out = fmt::format("n_trees {}\nmax_depth {}\nseed {}\n", m.params.n_trees, m.params.max_depth, m.params.seed);
    for (const auto& tree : m.trees) {
        out += fmt::format("tree {}\n", tree.nodes.size());
        for (const auto& n : tree.nodes) {
            out += fmt::format("node {} {} {} {} {} {} {} {}\n", n.feature, format_double(n.threshold), n.left, n.right,
                               n.counts[0], n.counts[1], n.counts[2], n.counts[3]);
        }
    }
    return out;
}

std::string serialize_svm(const SvmModel& m) {
    std::string out = fmt::format("epochs {}\nlambda {}\nseed {}\n", m.params.epochs, format_double(m.params.lambda), m.params.seed);
    write_values(out, "mean", m.mean);
    write_values(out, "stddev", m.stddev);
    for (auto kind : kAllLineKinds) write_values(out, fmt::format("weights_{}", to_string(kind)), m.weights[index_of(kind)]);
    write_values(out, "bias", m.bias);
    return out;
}

ForestModel read_forest(Reader& r) {
    ForestModel m;
    m.params.n_trees = static_cast<int>(r.integer("n_trees"));
    m.params.max_depth = static_cast<int>(r.integer("max_depth"));
    const auto seed = r.expect("seed", 1)[0];
    const auto s = parse_int(seed);
    if (!s || *s < 0) r.fail("seed must be a non-negative integer");
    m.params.seed = static_cast<std::uint64_t>(*s);
    if (m.params.n_trees < 1) r.fail("n_trees must be >= 1");

    for (int t = 0; t < m.params.n_trees; ++t) {
        const long long count = r.integer("tree");
        if (count < 1) r.fail("tree has no nodes");
        DecisionTree tree;
        tree.nodes.resize(static_cast<std::size_t>(count));
        for (long long i = 0; i < count; ++i) {
            const auto f = r.expect("node", 8);
            TreeNode& n = tree.nodes[static_cast<std::size_t>(i)];
            n.feature = static_cast<int>(r.to_int(f[0]));
            n.threshold = r.to_double(f[1]);
            n.left = static_cast<int>(r.to_int(f[2]));
            n.right = static_cast<int>(r.to_int(f[3]));
            std::uint64_t total = 0;
            for (int k = 0; k < 4; ++k) {
                const auto c = r.to_int(f[4 + k]);
                if (c < 0) r.fail("negative class count");
                n.counts[k] = static_cast<std::uint32_t>(c);
                total += n.counts[k];
            }
            if (n.feature >= static_cast<int>(kFeatureDim) || n.feature < -1) r.fail("split feature out of range");
            if (n.is_leaf()) {
                if (total == 0) r.fail("leaf without training samples");
            } else if (n.left <= i || n.right <= i || n.left >= count || n.right >= count) {
                // Children always follow their parent, which also rules out cycles.
                r.fail("child index out of range");
            }
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

SvmModel read_svm(Reader& r) {
    SvmModel m;
    m.params.epochs = static_cast<int>(r.integer("epochs"));
    m.params.lambda = r.to_double(r.expect("lambda", 1)[0]);
    const auto s = parse_int(r.expect("seed", 1)[0]);
    if (!s || *s < 0) r.fail("seed must be a non-negative integer");
    m.params.seed = static_cast<std::uint64_t>(*s);
    m.mean = r.doubles<kFeatureDim>("mean");
    m.stddev = r.doubles<kFeatureDim>("stddev");
    for (double v : m.stddev) {
        if (!(v > 0.0)) r.fail("stddev components must be positive");
    }
    for (auto kind : kAllLineKinds) m.weights[index_of(kind)] = r.doubles<kFeatureDim>(fmt::format("weights_{}", to_string(kind)));
    m.bias = r.doubles<4>("bias");
    return m;
}

}  // namespace

std::string serialize_model(const Model& model) {
    std::string out = fmt::format("{}\nformat_version {}\nkind {}\n", kMagic, kModelFormatVersion, model_name(model));
    if (const auto* f = std::get_if<ForestModel>(&model)) {
        out += serialize_forest(*f);
    } else {
        out += serialize_svm(std::get<SvmModel>(model));
    }
    out += "end\n";
    return out;
}

Model deserialize_model(const std::string& text, const std::string& source) {
    Reader r(text, source);
    const auto magic = r.next();
    if (magic.size() != 1 || magic[0] != kMagic) r.fail("missing palmmodel header");
    const auto version = r.integer("format_version");
    if (version != kModelFormatVersion) {
        throw CorruptModel(fmt::format("{}: unsupported format_version {} (expected {})", source, version, kModelFormatVersion));
    }
    const auto kind = r.expect("kind", 1)[0];
    Model model;
    if (kind == "random_forest") {
        model = read_forest(r);
    } else if (kind == "linear_svm") {
        model = read_svm(r);
    } else {
        r.fail(fmt::format("unknown model kind '{}'", kind));
    }
    const auto tail = r.next();
    if (tail.size() != 1 || tail[0] != "end") r.fail("expected 'end'");
    return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    const auto text = serialize_model(model);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Model load_model(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return deserialize_model(std::string(bytes.begin(), bytes.end()), path.string());
}

}  // namespace palm::ml
