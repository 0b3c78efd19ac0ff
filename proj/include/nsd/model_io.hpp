#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "nsd/pca.hpp"
#include "nsd/preprocess.hpp"
#include "nsd/protonn.hpp"

namespace nsd::io {

/// On-disk model bundle: magic "NSDM", version byte, then tagged sections
/// (4-byte tag, u64 length, payload) for the preprocess-config echo, the PCA
/// model and the ProtoNN model. All floats are little-endian 32-bit, so a
/// loaded container scores bit-identically to the saved one.
struct ModelContainer {
    prep::PreprocessConfig preprocess;
    pca::PcaModel pca_model;
    protonn::ProtoNNModel protonn_model;
};

inline constexpr char kModelMagic[4] = {'N', 'S', 'D', 'M'};
inline constexpr std::uint8_t kModelVersion = 1;

/// Build a container from trained models, rounding every parameter through
/// float32 so that save/load is lossless from here on.
ModelContainer make_container(const prep::PreprocessConfig& prep_cfg,
                              const pca::PcaModel& pca_model,
                              const protonn::ProtoNNModel& protonn_model);

void save_model(std::ostream& out, const ModelContainer& container);
void save_model(const std::filesystem::path& file, const ModelContainer& container);

/// Throws BadMagic, VersionUnsupported, SectionLengthMismatch, MissingSection.
ModelContainer load_model(std::istream& in);
ModelContainer load_model(const std::filesystem::path& file);

}  // namespace nsd::io
