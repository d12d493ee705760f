#include "epprobit/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "model artifact serialization assumes a little-endian host");

namespace epprobit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_double(const std::string& field, int line, int column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw CsvError("expected a finite number, got '" + field + "'", line, column);
    }
    return value;
}

int parse_label(const std::string& field, int line, int column) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw CsvError("label must be 0 or 1, got '" + field + "'", line, column);
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open '" + path + "'", 0, 0);
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        rows.push_back(split_line(line));
    }
    if (rows.size() < 2) {
        throw CsvError("need a header row and at least one data row", 1, 1);
    }
    const std::size_t width = rows.front().size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw CsvError("row has " + std::to_string(rows[r].size()) + " fields, header has " +
                               std::to_string(width),
                           static_cast<int>(r + 1), 1);
        }
    }
    return rows;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, double prior_variance) {
    const auto rows = read_rows(path);
    const auto width = rows.front().size();
    if (width < 2) {
        throw CsvError("dataset needs a label column and at least one covariate", 1, 1);
    }
    const auto n = rows.size() - 1;
    const auto p = width - 1;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXi y(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& fields = rows[r + 1];
        const int line = static_cast<int>(r + 2);
        y[static_cast<Eigen::Index>(r)] = parse_label(fields[0], line, 1);
        for (std::size_t c = 0; c < p; ++c) {
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_double(fields[c + 1], line, static_cast<int>(c + 2));
        }
    }
    return Dataset(std::move(X), std::move(y), prior_variance);
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "y";
    for (Eigen::Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        out << data.y[i];
        for (Eigen::Index j = 0; j < data.p(); ++j) out << "," << format_full(data.X(i, j));
        out << "\n";
    }
}

Eigen::MatrixXd read_covariates_csv(const std::string& path) {
    const auto rows = read_rows(path);
    const auto n = rows.size() - 1;
    const auto p = rows.front().size();
    Eigen::MatrixXd X(n, p);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_double(rows[r + 1][c], static_cast<int>(r + 2), static_cast<int>(c + 1));
        }
    }
    return X;
}

void write_covariates_csv(const Eigen::MatrixXd& X, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << (j ? "," : "") << "x" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            out << (j ? "," : "") << format_full(X(i, j));
        }
        out << "\n";
    }
}

std::string format_probability(double value) {
    const double mag = std::abs(value);
    int decimals = 12;
    if (mag > 0.0) {
        const int exponent = static_cast<int>(std::floor(std::log10(mag)));
        decimals = std::clamp(11 - exponent, 0, 340);
    }
    std::string buf(static_cast<std::size_t>(decimals) + 24, '\0');
    const int written = std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
    buf.resize(static_cast<std::size_t>(written));
    return buf;
}

void write_probabilities(const std::vector<PredictiveResult>& preds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (const PredictiveResult& pr : preds) {
        out << format_probability(pr.probability) << "\n";
    }
}

void write_report_csv(const StudyReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "scenario,p,median_abs_diff,q1,q3,ep_seconds,baseline_seconds,ep_sweeps,"
           "skipped_updates\n";
    char buf[64];
    const auto g12 = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    const auto f6 = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    for (const StudyRow& row : report.rows) {
        out << scenario_name(row.scenario) << "," << row.p << "," << g12(row.median_abs_diff)
            << "," << g12(row.q1) << "," << g12(row.q3) << "," << f6(row.ep_seconds) << ","
            << f6(row.baseline_seconds) << "," << row.ep_sweeps << "," << row.skipped_updates
            << "\n";
    }
}

namespace {

constexpr char kMagic[8] = {'E', 'P', 'P', 'M', 'O', 'D', 'L', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

template <class T>
void put(std::ostream& out, T value) {
    put_bytes(out, &value, sizeof(value));
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    put_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

void put_matrix_rowmajor(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put(out, m(i, j));
        }
    }
}

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error("cannot open model '" + path + "'");
    }

    void get_bytes(void* data, std::size_t size) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (in_.gcount() != static_cast<std::streamsize>(size)) {
            throw std::runtime_error("model '" + path_ + "' is truncated");
        }
    }

    template <class T>
    T get() {
        T value;
        get_bytes(&value, sizeof(value));
        return value;
    }

    Eigen::VectorXd get_vector(Eigen::Index size) {
        Eigen::VectorXd v(size);
        get_bytes(v.data(), sizeof(double) * static_cast<std::size_t>(size));
        return v;
    }

    Eigen::MatrixXd get_matrix_rowmajor(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                m(i, j) = get<double>();
            }
        }
        return m;
    }

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace

void write_model(const ModelArtifact& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");

    put_bytes(out, kMagic, sizeof(kMagic));
    put(out, kVersion);
    const auto* dense = std::get_if<DenseCovariance>(&model.posterior.covariance);
    put(out, static_cast<std::uint8_t>(dense ? 0 : 1));
    put(out, static_cast<std::uint8_t>(model.diagnostics.engine_used == Engine::Dense ? 0 : 1));
    put(out, static_cast<std::uint8_t>(model.diagnostics.converged ? 1 : 0));
    put(out, std::uint8_t{0});

    const auto p = static_cast<std::uint64_t>(model.posterior.dim());
    const auto n = static_cast<std::uint64_t>(model.sites.k.size());
    put(out, p);
    put(out, n);
    put(out, model.prior_variance);
    put(out, static_cast<std::uint64_t>(model.diagnostics.sweeps_run));
    put(out, static_cast<std::uint64_t>(model.diagnostics.skipped_updates));
    put(out, model.diagnostics.elapsed_seconds);

    put_vector(out, model.posterior.xi);
    if (dense) {
        put_matrix_rowmajor(out, dense->sigma);
    } else {
        const auto& f = std::get<FactoredCovariance>(model.posterior.covariance);
        put(out, f.prior_variance);
        put_matrix_rowmajor(out, f.V);
        put_vector(out, f.k);
        put_matrix_rowmajor(out, f.X);
    }
    put_vector(out, model.sites.k);
    put_vector(out, model.sites.m);
    put(out, static_cast<std::uint64_t>(model.diagnostics.max_delta_trace.size()));
    for (double d : model.diagnostics.max_delta_trace) put(out, d);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ModelArtifact read_model(const std::string& path) {
    Reader in(path);
    char magic[8];
    in.get_bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("'" + path + "' is not a model file");
    }
    const auto version = in.get<std::uint32_t>();
    if (version != kVersion) {
        throw std::runtime_error("model version " + std::to_string(version) + " unsupported");
    }
    const auto cov_tag = in.get<std::uint8_t>();
    const auto engine_tag = in.get<std::uint8_t>();
    const auto converged = in.get<std::uint8_t>();
    (void)in.get<std::uint8_t>();

    const auto p = static_cast<Eigen::Index>(in.get<std::uint64_t>());
    const auto n = static_cast<Eigen::Index>(in.get<std::uint64_t>());
    if (p < 1 || n < 1 || p > (1 << 24) || n > (1 << 24)) {
        throw std::runtime_error("model '" + path + "' has implausible dimensions");
    }

    ModelArtifact model;
    model.prior_variance = in.get<double>();
    model.diagnostics.sweeps_run = static_cast<int>(in.get<std::uint64_t>());
    model.diagnostics.skipped_updates = static_cast<long>(in.get<std::uint64_t>());
    model.diagnostics.elapsed_seconds = in.get<double>();
    model.diagnostics.converged = converged != 0;
    model.diagnostics.engine_used = engine_tag == 0 ? Engine::Dense : Engine::LowRank;

    model.posterior.xi = in.get_vector(p);
    if (cov_tag == 0) {
        model.posterior.covariance = DenseCovariance{in.get_matrix_rowmajor(p, p)};
    } else if (cov_tag == 1) {
        FactoredCovariance f;
        f.prior_variance = in.get<double>();
        f.V = in.get_matrix_rowmajor(p, n);
        f.k = in.get_vector(n);
        f.X = in.get_matrix_rowmajor(n, p);
        model.posterior.covariance = std::move(f);
    } else {
        throw std::runtime_error("model '" + path + "' has unknown covariance tag");
    }
    model.sites.k = in.get_vector(n);
    model.sites.m = in.get_vector(n);
    const auto trace_len = in.get<std::uint64_t>();
    if (trace_len > (1u << 24)) {
        throw std::runtime_error("model '" + path + "' has implausible trace length");
    }
    model.diagnostics.max_delta_trace.resize(trace_len);
    for (auto& d : model.diagnostics.max_delta_trace) d = in.get<double>();
    return model;
}

void write_model_text(const ModelArtifact& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const auto* dense = std::get_if<DenseCovariance>(&model.posterior.covariance);
    out << "format: epprobit model v" << kVersion << " (text export)\n";
    out << "p: " << model.posterior.dim() << "\n";
    out << "n: " << model.sites.k.size() << "\n";
    out << "prior_variance: " << format_full(model.prior_variance) << "\n";
    out << "engine: " << (model.diagnostics.engine_used == Engine::Dense ? "dense" : "lowrank")
        << "\n";
    out << "covariance: " << (dense ? "dense" : "factored") << "\n";
    out << "converged: " << (model.diagnostics.converged ? "true" : "false") << "\n";
    out << "sweeps_run: " << model.diagnostics.sweeps_run << "\n";
    out << "skipped_updates: " << model.diagnostics.skipped_updates << "\n";
    out << "xi:";
    for (Eigen::Index j = 0; j < model.posterior.xi.size(); ++j) {
        out << " " << format_full(model.posterior.xi[j]);
    }
    out << "\nsite_k:";
    for (Eigen::Index i = 0; i < model.sites.k.size(); ++i) {
        out << " " << format_full(model.sites.k[i]);
    }
    out << "\nsite_m:";
    for (Eigen::Index i = 0; i < model.sites.m.size(); ++i) {
        out << " " << format_full(model.sites.m[i]);
    }
    out << "\n";
    if (dense) {
        out << "sigma (row per line):\n";
        for (Eigen::Index i = 0; i < dense->sigma.rows(); ++i) {
            for (Eigen::Index j = 0; j < dense->sigma.cols(); ++j) {
                out << (j ? " " : "") << format_full(dense->sigma(i, j));
            }
            out << "\n";
        }
    } else {
        const auto& f = std::get<FactoredCovariance>(model.posterior.covariance);
        out << "V (row per line):\n";
        for (Eigen::Index i = 0; i < f.V.rows(); ++i) {
            for (Eigen::Index j = 0; j < f.V.cols(); ++j) {
                out << (j ? " " : "") << format_full(f.V(i, j));
            }
            out << "\n";
        }
        out << "k:";
        for (Eigen::Index i = 0; i < f.k.size(); ++i) out << " " << format_full(f.k[i]);
        out << "\n";
    }
}

}  // namespace epprobit
