#include "nsd/model_io.hpp"

#include <fstream>
#include <sstream>

#include "nsd/binio.hpp"

namespace nsd::io {

namespace {

float f32(double v) { return static_cast<float>(v); }

void write_matrix(std::ostream& out, const Eigen::MatrixXd& M, double sparsity) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(M.rows()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(M.cols()));
    if (sparsity >= 1.0) {
        write_le<std::uint8_t>(out, 0);  // dense, row-major
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c) write_f32(out, M(r, c));
        return;
    }
    std::uint32_t nnz = 0;
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            if (M(r, c) != 0.0) ++nnz;
    write_le<std::uint8_t>(out, 1);  // sparse: flat row-major index + value
    write_le<std::uint32_t>(out, nnz);
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            if (M(r, c) != 0.0) {
                write_le<std::uint32_t>(out, static_cast<std::uint32_t>(r * M.cols() + c));
                write_f32(out, M(r, c));
            }
}

Eigen::MatrixXd read_matrix(std::istream& in, const char* what) {
    const auto rows = read_le<std::uint32_t>(in, what);
    const auto cols = read_le<std::uint32_t>(in, what);
    const auto layout = read_le<std::uint8_t>(in, what);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
    if (layout == 0) {
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) M(r, c) = read_f32(in, what);
    } else if (layout == 1) {
        const auto nnz = read_le<std::uint32_t>(in, what);
        for (std::uint32_t i = 0; i < nnz; ++i) {
            const auto flat = read_le<std::uint32_t>(in, what);
            if (cols == 0 || flat >= rows * cols)
                throw SectionLengthMismatch(std::string(what) + ": sparse index out of range");
            M(flat / cols, flat % cols) = read_f32(in, what);
        }
    } else {
        throw SectionLengthMismatch(std::string(what) + ": unknown matrix layout");
    }
    return M;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) write_f32(out, v[i]);
}

Eigen::VectorXd read_vector(std::istream& in, const char* what) {
    const auto n = read_le<std::uint32_t>(in, what);
    Eigen::VectorXd v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = read_f32(in, what);
    return v;
}

void write_section(std::ostream& out, const char tag[4], const std::string& payload) {
    out.write(tag, 4);
    write_le<std::uint64_t>(out, payload.size());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

}  // namespace

ModelContainer make_container(const prep::PreprocessConfig& prep_cfg,
                              const pca::PcaModel& pca_model,
                              const protonn::ProtoNNModel& protonn_model) {
    ModelContainer c{prep_cfg, pca_model, protonn_model};
    c.preprocess.fs_target = f32(prep_cfg.fs_target);
    c.preprocess.highpass_cutoff_hz = f32(prep_cfg.highpass_cutoff_hz);
    auto round_vec = [](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f32(v[i]);
    };
    auto round_mat = [](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index col = 0; col < m.cols(); ++col) m(r, col) = f32(m(r, col));
    };
    round_vec(c.pca_model.mean);
    round_vec(c.pca_model.scale);
    round_vec(c.pca_model.explained_variance_ratio);
    round_mat(c.pca_model.components);
    protonn::snap_to_float32(c.protonn_model);
    return c;
}

void save_model(std::ostream& out, const ModelContainer& container) {
    out.write(kModelMagic, 4);
    write_le<std::uint8_t>(out, kModelVersion);

    std::ostringstream prep(std::ios::binary);
    write_f32(prep, container.preprocess.fs_target);
    write_f32(prep, container.preprocess.highpass_cutoff_hz);
    write_le<std::int32_t>(prep, container.preprocess.window_s);
    write_le<std::int32_t>(prep, container.preprocess.label_threshold);
    write_section(out, "PREP", prep.str());

    std::ostringstream pc(std::ios::binary);
    write_vector(pc, container.pca_model.mean);
    write_vector(pc, container.pca_model.scale);
    write_vector(pc, container.pca_model.explained_variance_ratio);
    write_matrix(pc, container.pca_model.components, 1.0);
    write_section(out, "PCA0", pc.str());

    const protonn::ProtoNNModel& p = container.protonn_model;
    std::ostringstream pt(std::ios::binary);
    write_le<std::uint32_t>(pt, static_cast<std::uint32_t>(p.input_dim));
    write_le<std::uint32_t>(pt, static_cast<std::uint32_t>(p.proj_dim()));
    write_le<std::uint32_t>(pt, static_cast<std::uint32_t>(p.n_prototypes()));
    write_le<std::uint32_t>(pt, static_cast<std::uint32_t>(p.n_labels()));
    write_f32(pt, p.gamma);
    write_f32(pt, p.sparsity_w);
    write_f32(pt, p.sparsity_b);
    write_f32(pt, p.sparsity_z);
    write_matrix(pt, p.W, p.sparsity_w);
    write_matrix(pt, p.B, p.sparsity_b);
    write_matrix(pt, p.Z, p.sparsity_z);
    write_section(out, "PTNN", pt.str());

    if (!out) throw Error("model write failed");
}

void save_model(const std::filesystem::path& file, const ModelContainer& container) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open model file for writing: " + file.string());
    save_model(out, container);
}

ModelContainer load_model(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
        throw BadMagic("model container: bad magic");
    const auto version = read_le<std::uint8_t>(in, "model version");
    if (version != kModelVersion)
        throw VersionUnsupported("model container: unsupported version " + std::to_string(version));

    ModelContainer c;
    bool saw_prep = false, saw_pca = false, saw_ptnn = false;
    char tag[4];
    while (in.read(tag, 4)) {
        const auto length = read_le<std::uint64_t>(in, "section length");
        std::string payload(length, '\0');
        in.read(payload.data(), static_cast<std::streamsize>(length));
        if (!in) throw SectionLengthMismatch("model container: section shorter than declared");
        std::istringstream body(payload, std::ios::binary);

        if (std::memcmp(tag, "PREP", 4) == 0) {
            c.preprocess.fs_target = read_f32(body, "PREP");
            c.preprocess.highpass_cutoff_hz = read_f32(body, "PREP");
            c.preprocess.window_s = read_le<std::int32_t>(body, "PREP");
            c.preprocess.label_threshold = read_le<std::int32_t>(body, "PREP");
            saw_prep = true;
        } else if (std::memcmp(tag, "PCA0", 4) == 0) {
            c.pca_model.mean = read_vector(body, "PCA0");
            c.pca_model.scale = read_vector(body, "PCA0");
            c.pca_model.explained_variance_ratio = read_vector(body, "PCA0");
            c.pca_model.components = read_matrix(body, "PCA0");
            saw_pca = true;
        } else if (std::memcmp(tag, "PTNN", 4) == 0) {
            protonn::ProtoNNModel& p = c.protonn_model;
            p.input_dim = static_cast<int>(read_le<std::uint32_t>(body, "PTNN"));
            const auto proj = read_le<std::uint32_t>(body, "PTNN");
            const auto protos = read_le<std::uint32_t>(body, "PTNN");
            const auto labels = read_le<std::uint32_t>(body, "PTNN");
            p.gamma = read_f32(body, "PTNN");
            p.sparsity_w = read_f32(body, "PTNN");
            p.sparsity_b = read_f32(body, "PTNN");
            p.sparsity_z = read_f32(body, "PTNN");
            p.W = read_matrix(body, "PTNN");
            p.B = read_matrix(body, "PTNN");
            p.Z = read_matrix(body, "PTNN");
            if (static_cast<std::uint32_t>(p.W.rows()) != proj ||
                p.W.cols() != static_cast<Eigen::Index>(p.input_dim) ||
                static_cast<std::uint32_t>(p.B.rows()) != proj ||
                static_cast<std::uint32_t>(p.B.cols()) != protos ||
                static_cast<std::uint32_t>(p.Z.rows()) != labels ||
                static_cast<std::uint32_t>(p.Z.cols()) != protos)
                throw SectionLengthMismatch("PTNN: matrix shapes disagree with header");
            saw_ptnn = true;
        }
        // unknown tags are skipped so old readers survive additive changes

        if (body.peek() != std::char_traits<char>::eof() &&
            (std::memcmp(tag, "PREP", 4) == 0 || std::memcmp(tag, "PCA0", 4) == 0 ||
             std::memcmp(tag, "PTNN", 4) == 0))
            throw SectionLengthMismatch("model container: section longer than its contents");
    }
    if (!saw_prep) throw MissingSection("model container: missing PREP section");
    if (!saw_pca) throw MissingSection("model container: missing PCA0 section");
    if (!saw_ptnn) throw MissingSection("model container: missing PTNN section");
    return c;
}

ModelContainer load_model(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + file.string());
    return load_model(in);
}

}  // namespace nsd::io
