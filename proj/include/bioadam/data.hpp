#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bioadam/net.hpp"
#include "bioadam/numkit.hpp"

namespace bioadam::data {

struct Dataset {
    Matrix inputs;  // n_samples x n_features
    std::vector<std::size_t> labels;
    std::size_t n_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t features() const { return inputs.cols(); }
    // Throws InputError if a label is out of range or shapes disagree.
    void validate() const;
    net::Targets targets() const { return {labels, {}}; }
    // Rows [first, first + count).
    Dataset slice(std::size_t first, std::size_t count) const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Big-endian IDX pair. Pixels are scaled by 1/255. n_classes is max label + 1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes inputs quantized to round(255 x) as a rows x cols IDX3 image file
// (cols must equal rows * cols of the image) and the labels as IDX1.
void write_idx(const Dataset& ds, std::size_t image_rows, std::size_t image_cols,
               const std::string& images_path, const std::string& labels_path);

// Class c sits at the lattice point (1 + c / dim) * e_(c mod dim): an axis
// point at distance 1 from the origin for the first `dim` classes, further
// out for later ones. Samples add i.i.d. gaussian noise with std `spread`.
// Samples are emitted class-interleaved (0, 1, ..., K-1, 0, 1, ...).
Dataset make_blobs(Rng& rng, std::size_t n_per_class, std::size_t n_classes, std::size_t dim,
                   double spread);

struct Batch {
    Matrix inputs;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> indices;  // rows of the source dataset
};

// One epoch of mini-batches. The permutation is drawn once at construction
// from `rng` when shuffling; the final batch may be short.
class BatchIterator {
public:
    BatchIterator(const Dataset& ds, std::size_t batch_size, Rng& rng, bool shuffle);

    // Next batch, or nullopt once the epoch is exhausted.
    std::optional<Batch> next();
    std::size_t batch_count() const;
    const std::vector<std::size_t>& order() const { return order_; }

private:
    const Dataset* ds_;
    std::size_t batch_size_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

BatchIterator batches(const Dataset& ds, std::size_t batch_size, Rng& rng, bool shuffle);

}  // namespace bioadam::data
