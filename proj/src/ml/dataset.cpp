#include <palm/ml/dataset.hpp>
#include <palm/error.hpp>
#include <palm/random.hpp>
#include <palm/text.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace palm::ml {

void LabeledDataset::add(std::string id, LineKind label, const FeatureVector& fv) {
    ids.push_back(std::move(id));
    labels.push_back(label);
    features.push_back(fv);
}

std::array<std::size_t, 4> LabeledDataset::class_counts() const {
    std::array<std::size_t, 4> c{};
    for (auto l : labels) ++c[index_of(l)];
    return c;
}

void LabeledDataset::validate() const {
    if (features.size() != labels.size() || ids.size() != labels.size()) {
        throw InvalidDataset("dataset columns have different row counts");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (double v : features[i]) {
            if (!std::isfinite(v)) throw InvalidDataset("row " + ids[i] + " has a non-finite feature");
        }
    }
}

std::string to_csv(const LabeledDataset& ds) {
    std::string out = "id,label";
    for (std::size_t k = 0; k < kFeatureDim; ++k) out += ",f" + std::to_string(k);
    out += "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += ds.ids[i];
        out += ",";
        out += to_string(ds.labels[i]);
        for (double v : ds.features[i]) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

LabeledDataset parse_dataset_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidDataset("dataset CSV is empty");
    const auto header = split(trim(line), ',');
    if (header.size() != 2 + kFeatureDim || header[0] != "id" || header[1] != "label") {
        throw InvalidDataset("dataset CSV header must be id,label,f0..f5");
    }
    LabeledDataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto f = split(t, ',');
        if (f.size() != header.size()) {
            throw InvalidDataset("dataset line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        }
        const auto kind = parse_line_kind(f[1]);
        if (!kind) throw InvalidDataset("dataset line " + std::to_string(line_no) + ": unknown label '" + f[1] + "'");
        FeatureVector fv{};
        for (std::size_t k = 0; k < kFeatureDim; ++k) {
            const auto v = parse_double(f[2 + k]);
            if (!v || !std::isfinite(*v)) {
                throw InvalidDataset("dataset line " + std::to_string(line_no) + ": bad value in f" + std::to_string(k));
            }
            fv[k] = *v;
        }
        ds.add(f[0], *kind, fv);
    }
    return ds;
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_csv(ds);
    if (!out) throw IoError("write failed for " + path.string());
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
    return parse_dataset_csv(read_text_file(path.string()));
}

Split train_test_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InvalidArgument("test_fraction must lie strictly between 0 and 1");
    }
    ds.validate();
    if (ds.empty()) throw InvalidDataset("cannot split an empty dataset");

    std::array<std::vector<std::size_t>, 4> by_class;
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[index_of(ds.labels[i])].push_back(i);
    for (auto k : kAllLineKinds) {
        const auto n = by_class[index_of(k)].size();
        if (n == 1) {
            throw InvalidDataset("class '" + std::string(to_string(k)) + "' has 1 sample; need at least 2 to split");
        }
    }

    // Largest-remainder apportionment of the total test count.
    const auto total_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ds.size())));
    std::array<std::size_t, 4> quota{};
    std::array<double, 4> remainder{};
    std::size_t assigned = 0;
    for (int k = 0; k < 4; ++k) {
        const double exact = test_fraction * static_cast<double>(by_class[k].size());
        quota[k] = static_cast<std::size_t>(std::floor(exact));
        remainder[k] = exact - std::floor(exact);
        assigned += quota[k];
    }
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int idx = 0; assigned < total_test && idx < 4; ++idx) {
        const int k = order[idx];
        if (quota[k] < by_class[k].size() && remainder[k] > 0.0) {
            ++quota[k];
            ++assigned;
        }
    }

    Rng rng(mix_seed(seed, 0x5350u));
    std::vector<bool> is_test(ds.size(), false);
    for (int k = 0; k < 4; ++k) {
        auto idx = by_class[k];
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        for (std::size_t j = 0; j < quota[k]; ++j) is_test[idx[j]] = true;
    }

    Split s;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto& side = is_test[i] ? s.test : s.train;
        side.add(ds.ids[i], ds.labels[i], ds.features[i]);
    }
    return s;
}

}  // namespace palm::ml
