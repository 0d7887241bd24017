#include "bioadam/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>

#include "bioadam/error.hpp"

namespace bioadam::data {

void Dataset::validate() const {
    if (inputs.rows() != labels.size()) {
        throw InputError("dataset has " + std::to_string(inputs.rows()) + " rows but " +
                         std::to_string(labels.size()) + " labels");
    }
    for (std::size_t l : labels) {
        if (l >= n_classes) throw InputError("label " + std::to_string(l) + " >= n_classes");
    }
    for (double v : inputs.data()) {
        if (!std::isfinite(v)) throw InputError("dataset inputs must be finite");
    }
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw ShapeError("dataset slice out of range");
    const auto row0 = inputs.data().begin() + static_cast<std::ptrdiff_t>(first * features());
    std::vector<double> data(row0, row0 + static_cast<std::ptrdiff_t>(count * features()));
    Dataset out;
    out.inputs = Matrix(count, features(), std::move(data));
    out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                      labels.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.n_classes = n_classes;
    return out;
}

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t off, const std::string& path) {
    if (off + 4 > buf.size()) throw IoError("'" + path + "' is truncated in its header");
    return (static_cast<std::uint32_t>(buf[off]) << 24) | (static_cast<std::uint32_t>(buf[off + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[off + 2]) << 8) | static_cast<std::uint32_t>(buf[off + 3]);
}

std::string hex(std::uint32_t v) {
    char s[11];
    std::snprintf(s, sizeof s, "0x%08X", v);
    return s;
}

void put_be32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                       static_cast<char>(v)};
    os.write(b, 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);

    const auto img_magic = be32(img, 0, images_path);
    if (img_magic != kIdxImagesMagic) {
        throw FormatError("'" + images_path + "' has magic " + hex(img_magic) + ", expected " +
                          hex(kIdxImagesMagic));
    }
    const auto lab_magic = be32(lab, 0, labels_path);
    if (lab_magic != kIdxLabelsMagic) {
        throw FormatError("'" + labels_path + "' has magic " + hex(lab_magic) + ", expected " +
                          hex(kIdxLabelsMagic));
    }
    const std::size_t n = be32(img, 4, images_path);
    const std::size_t rows = be32(img, 8, images_path);
    const std::size_t cols = be32(img, 12, images_path);
    const std::size_t n_labels = be32(lab, 4, labels_path);
    if (n != n_labels) {
        throw ConsistencyError("image file holds " + std::to_string(n) + " samples, label file " +
                               std::to_string(n_labels));
    }
    const std::size_t features = rows * cols;
    if (img.size() < 16 + n * features) throw IoError("'" + images_path + "' is truncated");
    if (lab.size() < 8 + n) throw IoError("'" + labels_path + "' is truncated");

    Dataset ds;
    ds.inputs = Matrix(n, features);
    auto dst = ds.inputs.data();
    for (std::size_t i = 0; i < n * features; ++i) dst[i] = static_cast<double>(img[16 + i]) / 255.0;
    ds.labels.resize(n);
    std::size_t top = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = lab[8 + i];
        top = std::max(top, ds.labels[i]);
    }
    ds.n_classes = n == 0 ? 0 : top + 1;
    return ds;
}

void write_idx(const Dataset& ds, std::size_t image_rows, std::size_t image_cols,
               const std::string& images_path, const std::string& labels_path) {
    if (image_rows * image_cols != ds.features()) {
        throw ShapeError("image dims do not match dataset feature count");
    }
    std::ofstream img(images_path, std::ios::binary);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!img || !lab) throw IoError("cannot open IDX output files");
    put_be32(img, kIdxImagesMagic);
    put_be32(img, static_cast<std::uint32_t>(ds.size()));
    put_be32(img, static_cast<std::uint32_t>(image_rows));
    put_be32(img, static_cast<std::uint32_t>(image_cols));
    for (double v : ds.inputs.data()) {
        const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
        img.put(static_cast<char>(static_cast<unsigned char>(q)));
    }
    put_be32(lab, kIdxLabelsMagic);
    put_be32(lab, static_cast<std::uint32_t>(ds.size()));
    for (std::size_t l : ds.labels) {
        if (l > 255) throw InputError("IDX labels must fit in one byte");
        lab.put(static_cast<char>(static_cast<unsigned char>(l)));
    }
    if (!img || !lab) throw IoError("failed writing IDX files");
}

Dataset make_blobs(Rng& rng, std::size_t n_per_class, std::size_t n_classes, std::size_t dim,
                   double spread) {
    if (n_per_class == 0 || n_classes == 0 || dim == 0) throw ConfigError("blobs need positive sizes");
    if (!(spread >= 0.0)) throw ConfigError("blob spread must be >= 0");
    Dataset ds;
    ds.n_classes = n_classes;
    ds.inputs = Matrix(n_per_class * n_classes, dim);
    ds.labels.resize(n_per_class * n_classes);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t c = 0; c < n_classes; ++c, ++r) {
            auto row = ds.inputs.row_span(r);
            for (auto& v : row) v = spread == 0.0 ? 0.0 : rng.gaussian(0.0, spread);
            row[c % dim] += 1.0 + static_cast<double>(c / dim);
            ds.labels[r] = c;
        }
    }
    return ds;
}

BatchIterator::BatchIterator(const Dataset& ds, std::size_t batch_size, Rng& rng, bool shuffle)
    : ds_(&ds), batch_size_(batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (shuffle) {
        order_ = permutation(rng, ds.size());
    } else {
        order_.resize(ds.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
}

std::size_t BatchIterator::batch_count() const { return (order_.size() + batch_size_ - 1) / batch_size_; }

std::optional<Batch> BatchIterator::next() {
    if (cursor_ >= order_.size()) return std::nullopt;
    const std::size_t n = std::min(batch_size_, order_.size() - cursor_);
    const std::size_t f = ds_->features();
    Batch b;
    b.inputs = Matrix(n, f);
    b.labels.resize(n);
    b.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                     order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = b.indices[i];
        std::copy_n(ds_->inputs.row_span(src).begin(), f, b.inputs.row_span(i).begin());
        b.labels[i] = ds_->labels[src];
    }
    cursor_ += n;
    return b;
}

BatchIterator batches(const Dataset& ds, std::size_t batch_size, Rng& rng, bool shuffle) {
    return BatchIterator(ds, batch_size, rng, shuffle);
}

}  // namespace bioadam::data
