#include "sslearn/io.hpp"

#include "sslearn/model_core.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sslearn {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("cannot parse number '" + s + "' on line " + std::to_string(line_no));
    return v;
}

}  // namespace

TimeSeriesFrame read_frame_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    TimeSeriesFrame frame;
    frame.names = split_csv_line(line);
    if (frame.names.empty()) throw DataError("CSV header has no columns");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != frame.names.size())
            throw DataError("line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(frame.names.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, line_no));
        rows.push_back(std::move(row));
    }

    frame.values.resize(static_cast<int>(rows.size()), static_cast<int>(frame.names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            frame.values(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    frame.validate();
    return frame;
}

TimeSeriesFrame read_frame_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_frame_csv(in);
}

void write_frame_csv(std::ostream& out, const TimeSeriesFrame& frame) {
    for (std::size_t j = 0; j < frame.names.size(); ++j)
        out << (j ? "," : "") << frame.names[j];
    out << '\n';
    for (int i = 0; i < frame.rows(); ++i) {
        for (int j = 0; j < frame.cols(); ++j)
            out << (j ? "," : "") << format_double(frame.values(i, j));
        out << '\n';
    }
}

void write_frame_csv_file(const std::string& path, const TimeSeriesFrame& frame) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_frame_csv(out, frame);
}

json partition_to_json(const StatePartition& part) {
    return json{{"exo_states", part.exo_states},
                {"endo_states", part.endo_states},
                {"controls", part.controls}};
}

StatePartition partition_from_json(const json& j) {
    StatePartition part;
    part.exo_states = j.at("exo_states").get<std::vector<std::string>>();
    part.endo_states = j.at("endo_states").get<std::vector<std::string>>();
    part.controls = j.at("controls").get<std::vector<std::string>>();
    part.validate();
    return part;
}

namespace {

json matrix_to_json(const Matrix& m, const std::vector<std::string>& row_names,
                    const std::vector<std::string>& col_names) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return json{{"row_names", row_names}, {"col_names", col_names}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("row_names").get<std::vector<std::string>>().size();
    const auto cols = j.at("col_names").get<std::vector<std::string>>().size();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) throw DataError("matrix data length mismatch");
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<int>(i), static_cast<int>(c)) = data[i * cols + c];
    return m;
}

json variances_to_json(const Vector& v, const std::vector<std::string>& names) {
    json out = json::object();
    for (int i = 0; i < v.size(); ++i) out[names[static_cast<std::size_t>(i)]] = v[i];
    return out;
}

Vector variances_from_json(const json& j, const std::vector<std::string>& names) {
    Vector v(static_cast<int>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) v[static_cast<int>(i)] = j.at(names[i]).get<double>();
    return v;
}

}  // namespace

json params_to_json(const StateSpaceParams& p) {
    const auto& part = p.partition;
    return json{
        {"partition", partition_to_json(part)},
        {"A", matrix_to_json(p.A, part.controls, part.endo_states)},
        {"B", matrix_to_json(p.B, part.controls, part.exo_states)},
        {"C", matrix_to_json(p.C, part.endo_states, part.endo_states)},
        {"D", matrix_to_json(p.D, part.endo_states, part.exo_states)},
        {"E_diag", variances_to_json(p.E_diag, part.exo_states)},
        {"shock_variances",
         json{{"exo", variances_to_json(p.sigma2_exo, part.exo_states)},
              {"endo", variances_to_json(p.sigma2_endo, part.endo_states)},
              {"controls", variances_to_json(p.sigma2_controls, part.controls)}}}};
}

StateSpaceParams params_from_json(const json& j) {
    StateSpaceParams p;
    p.partition = partition_from_json(j.at("partition"));
    p.A = matrix_from_json(j.at("A"));
    p.B = matrix_from_json(j.at("B"));
    p.C = matrix_from_json(j.at("C"));
    p.D = matrix_from_json(j.at("D"));
    p.E_diag = variances_from_json(j.at("E_diag"), p.partition.exo_states);
    const auto& sv = j.at("shock_variances");
    p.sigma2_exo = variances_from_json(sv.at("exo"), p.partition.exo_states);
    p.sigma2_endo = variances_from_json(sv.at("endo"), p.partition.endo_states);
    p.sigma2_controls = variances_from_json(sv.at("controls"), p.partition.controls);
    p.validate();
    return p;
}

json sim_config_to_json(const SimConfig& cfg) {
    return json{{"params", params_to_json(cfg.params)},
                {"n", cfg.n},
                {"seed", cfg.seed},
                {"burn_in", cfg.burn_in}};
}

SimConfig sim_config_from_json(const json& j) {
    SimConfig cfg;
    cfg.params = params_from_json(j.at("params"));
    cfg.n = j.at("n").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.burn_in = j.value("burn_in", 1000);
    cfg.validate();
    return cfg;
}

json validity_report_to_json(const ValidityReport& report) {
    json tests = json::array();
    for (const auto& t : report.tests)
        tests.push_back(json{{"label", t.label},
                             {"p_value", t.p_value},
                             {"guard_triggered", t.guard_triggered}});
    return json{{"partition", partition_to_json(report.partition)},
                {"strategy", strategy_name(report.strategy)},
                {"tests", tests},
                {"sig_level_used", report.sig_level_used},
                {"valid", report.valid},
                {"untestable", report.untestable},
                {"untestable_reason", report.untestable_reason},
                {"log_likelihood", report.score.log_likelihood},
                {"bic", report.score.bic},
                {"aic", report.score.aic},
                {"n_endo", report.n_endo}};
}

TimeSeriesFrame ar1_detrend(const TimeSeriesFrame& frame) {
    frame.validate();
    const int t = frame.rows();
    TimeSeriesFrame out;
    out.names = frame.names;
    out.values.resize(t - 1, frame.cols());

    for (int j = 0; j < frame.cols(); ++j) {
        const Vector col = frame.values.col(j);
        const Vector lag = col.head(t - 1);
        const Vector cur = col.tail(t - 1);
        const double lag_mean = lag.mean();
        const double cur_mean = cur.mean();
        const double ss = (lag.array() - lag_mean).matrix().squaredNorm();
        if (ss < 1e-12 * std::max(1.0, lag_mean * lag_mean) || ss == 0.0)
            throw DataError("column '" + frame.names[static_cast<std::size_t>(j)] +
                            "' is constant; cannot detrend");
        // AR(1) with intercept, then center the residuals.
        const double slope = ((lag.array() - lag_mean) * (cur.array() - cur_mean)).sum() / ss;
        Vector resid = (cur.array() - cur_mean) - slope * (lag.array() - lag_mean);
        out.values.col(j) = resid.array() - resid.mean();
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for hashing");

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace sslearn
