#include "cgad/io.hpp"

#include "cgad/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cgad {

namespace {

constexpr int kFormatVersion = 1;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error(ErrorCode::IoError, "failed to format a double");
    return {buf, ptr};
}

double parse_double(const std::string& token, Index row, Index col) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "non-finite or unparsable value '" + token + "' at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::vector<double> matrix_to_row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m.size()));
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
    return out;
}

Matrix matrix_from_row_major(const std::vector<double>& values, Index rows, Index cols) {
    if (static_cast<Index>(values.size()) != rows * cols) {
        throw Error(ErrorCode::IoError, "matrix payload size does not match its shape");
    }
    Matrix m(rows, cols);
    size_t idx = 0;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) m(r, c) = values[idx++];
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const Json& j) {
    Vector v(static_cast<Index>(j.size()));
    Index i = 0;
    for (const auto& e : j) v(i++) = e.get<double>();
    return v;
}

Json edges_to_json(const BinaryDbn& g) {
    Json intra = Json::array();
    for (const auto& [j, i] : g.intra_edges) intra.push_back({j, i});
    Json inter = Json::array();
    for (const auto& [j, l, i] : g.inter_edges) inter.push_back({j, l, i});
    return Json{{"node_count", g.node_count},
                {"lag", g.lag},
                {"intra_edges", std::move(intra)},
                {"inter_edges", std::move(inter)}};
}

BinaryDbn edges_from_json(const Json& j) {
    BinaryDbn g;
    g.node_count = j.at("node_count").get<int>();
    g.lag = j.at("lag").get<int>();
    for (const auto& e : j.at("intra_edges")) {
        g.intra_edges.emplace(e.at(0).get<int>(), e.at(1).get<int>());
    }
    for (const auto& e : j.at("inter_edges")) {
        g.inter_edges.emplace(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>());
    }
    return g;
}

Json weighted_to_json(const WeightedDbn& dbn) {
    return Json{{"node_count", dbn.node_count()},
                {"lag", dbn.lag},
                {"intra", matrix_to_row_major(dbn.intra)},
                {"inter", matrix_to_row_major(dbn.inter)}};
}

WeightedDbn weighted_from_json(const Json& j, std::vector<std::string> names) {
    WeightedDbn dbn;
    const auto k = j.at("node_count").get<Index>();
    dbn.lag = j.at("lag").get<int>();
    dbn.intra = matrix_from_row_major(j.at("intra").get<std::vector<double>>(), k, k);
    dbn.inter =
        matrix_from_row_major(j.at("inter").get<std::vector<double>>(), dbn.lag * k, k);
    dbn.sensor_names = std::move(names);
    return dbn;
}

Json solver_to_json(const SolverConfig& c) {
    return Json{{"lambda_w", c.lambda_w},
                {"lambda_a", c.lambda_a},
                {"edge_threshold", c.edge_threshold},
                {"h_tolerance", c.h_tolerance},
                {"rho_init", c.rho_init},
                {"rho_max", c.rho_max},
                {"rho_growth", c.rho_growth},
                {"max_outer_iters", c.max_outer_iters},
                {"inner_max_iters", c.inner_max_iters},
                {"inner_grad_tol", c.inner_grad_tol},
                {"seed", c.seed}};
}

SolverConfig solver_from_json(const Json& j) {
    SolverConfig c;
    c.lambda_w = j.at("lambda_w").get<double>();
    c.lambda_a = j.at("lambda_a").get<double>();
    c.edge_threshold = j.at("edge_threshold").get<double>();
    c.h_tolerance = j.at("h_tolerance").get<double>();
    c.rho_init = j.at("rho_init").get<double>();
    c.rho_max = j.at("rho_max").get<double>();
    c.rho_growth = j.at("rho_growth").get<double>();
    c.max_outer_iters = j.at("max_outer_iters").get<int>();
    c.inner_max_iters = j.at("inner_max_iters").get<int>();
    c.inner_grad_tol = j.at("inner_grad_tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace

MultivariateSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::IoError, path + " is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line = line.substr(3);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_csv_line(line);
    if (header.size() < 3 || header.front() != "timestamp") {
        throw Error(ErrorCode::IoError,
                    "header must be: timestamp, <sensors...>[, label]; missing column: timestamp");
    }
    const bool has_labels = header.back() == "label";
    const Index k = static_cast<Index>(header.size()) - 1 - (has_labels ? 1 : 0);
    if (k < 2) throw Error(ErrorCode::IoError, "need at least two sensor columns");
    std::vector<std::string> names(header.begin() + 1, header.end() - (has_labels ? 1 : 0));

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string prev_timestamp;
    bool prev_is_int = false;
    long long prev_int = 0;

    Index row_index = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<Index>(fields.size()) != k + 1 + (has_labels ? 1 : 0)) {
            throw Error(ErrorCode::IoError, "row " + std::to_string(row_index) +
                                                " has " + std::to_string(fields.size()) +
                                                " fields, expected header width");
        }

        const std::string& ts = fields[0];
        long long ts_int = 0;
        auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), ts_int);
        const bool is_int = ec == std::errc() && p == ts.data() + ts.size();
        if (row_index > 0) {
            const bool ordered = (is_int && prev_is_int) ? ts_int >= prev_int
                                                         : ts >= prev_timestamp;
            if (!ordered) {
                throw Error(ErrorCode::IoError,
                            "timestamps must be non-decreasing (row " +
                                std::to_string(row_index) + ")");
            }
        }
        prev_timestamp = ts;
        prev_is_int = is_int;
        prev_int = ts_int;

        std::vector<double> row(static_cast<size_t>(k));
        for (Index c = 0; c < k; ++c) {
            row[static_cast<size_t>(c)] = parse_double(fields[static_cast<size_t>(c + 1)],
                                                       row_index, c);
        }
        rows.push_back(std::move(row));
        if (has_labels) {
            const std::string& lab = fields.back();
            if (lab != "0" && lab != "1") {
                throw Error(ErrorCode::IoError, "label must be 0 or 1, got '" + lab + "'");
            }
            labels.push_back(lab == "1" ? 1 : 0);
        }
        ++row_index;
    }
    if (rows.empty()) throw Error(ErrorCode::IoError, path + " has no data rows");

    Matrix values(static_cast<Index>(rows.size()), k);
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < k; ++c) values(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return validate_series(std::move(values), std::move(names),
                           has_labels ? std::optional(std::move(labels)) : std::nullopt);
}

void write_series_csv(const std::string& path, const MultivariateSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);

    out << "timestamp";
    for (const auto& name : series.sensor_names) out << ',' << name;
    if (series.point_labels) out << ",label";
    out << '\n';
    for (Index r = 0; r < series.steps(); ++r) {
        out << r;
        for (Index c = 0; c < series.sensors(); ++c) {
            out << ',' << format_double(series.values(r, c));
        }
        if (series.point_labels) out << ',' << (*series.point_labels)[static_cast<size_t>(r)];
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path);
}

Json profile_to_json(const CausalProfile& profile) {
    const auto& cfg = profile.config;
    return Json{{"format_version", kFormatVersion},
                {"sensor_names", profile.sensor_names},
                {"lag", cfg.lag},
                {"segment_len", cfg.segment_len},
                {"noise_sigma_scale", cfg.noise_sigma_scale},
                {"divergence", to_string(cfg.kind)},
                {"shd_reversal_cost", cfg.shd_options.reversal_cost},
                {"include_inter_edges", cfg.shd_options.include_inter},
                {"restandardize_per_segment", cfg.restandardize_per_segment},
                {"seed", cfg.seed},
                {"solver", solver_to_json(cfg.solver)},
                {"stats",
                 Json{{"mean_current", vector_to_json(profile.stats.mean_current)},
                      {"std_current", vector_to_json(profile.stats.std_current)},
                      {"mean_lagged", vector_to_json(profile.stats.mean_lagged)},
                      {"std_lagged", vector_to_json(profile.stats.std_lagged)}}},
                {"weighted_normal", weighted_to_json(profile.weighted_normal)},
                {"weighted_attack", weighted_to_json(profile.weighted_attack)},
                {"g_normal", edges_to_json(profile.g_normal)},
                {"g_attack", edges_to_json(profile.g_attack)}};
}

CausalProfile profile_from_json(const Json& j) {
    if (j.at("format_version").get<int>() != kFormatVersion) {
        throw Error(ErrorCode::IoError, "unsupported profile format_version");
    }
    CausalProfile p;
    p.sensor_names = j.at("sensor_names").get<std::vector<std::string>>();
    p.config.lag = j.at("lag").get<int>();
    p.config.segment_len = j.at("segment_len").get<Index>();
    p.config.noise_sigma_scale = j.at("noise_sigma_scale").get<double>();
    p.config.kind = divergence_kind_from_string(j.at("divergence").get<std::string>());
    p.config.shd_options.reversal_cost = j.at("shd_reversal_cost").get<int>();
    p.config.shd_options.include_inter = j.at("include_inter_edges").get<bool>();
    p.config.restandardize_per_segment = j.at("restandardize_per_segment").get<bool>();
    p.config.seed = j.at("seed").get<std::uint64_t>();
    p.config.solver = solver_from_json(j.at("solver"));
    const Json& stats = j.at("stats");
    p.stats.mean_current = vector_from_json(stats.at("mean_current"));
    p.stats.std_current = vector_from_json(stats.at("std_current"));
    p.stats.mean_lagged = vector_from_json(stats.at("mean_lagged"));
    p.stats.std_lagged = vector_from_json(stats.at("std_lagged"));
    p.weighted_normal = weighted_from_json(j.at("weighted_normal"), p.sensor_names);
    p.weighted_attack = weighted_from_json(j.at("weighted_attack"), p.sensor_names);
    p.g_normal = edges_from_json(j.at("g_normal"));
    p.g_attack = edges_from_json(j.at("g_attack"));
    p.config.validate();
    return p;
}

namespace {

Json optional_metric(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

Json score_to_json(const SegmentScore& s, const std::optional<std::vector<int>>& labels) {
    Json row{{"segment_index", s.segment_index},
             {"shd_attack", std::isnan(s.shd_attack) ? Json(nullptr) : Json(s.shd_attack)},
             {"shd_normal", std::isnan(s.shd_normal) ? Json(nullptr) : Json(s.shd_normal)},
             {"score", s.score},
             {"predicted_label", s.predicted},
             {"converged", s.converged}};
    if (labels) row["label"] = (*labels)[static_cast<size_t>(s.segment_index)];
    return row;
}

} // namespace

Json report_to_json(const DetectionReport& report) {
    Json rows = Json::array();
    for (const auto& s : report.per_segment) rows.push_back(score_to_json(s, report.labels));
    return Json{{"format_version", kFormatVersion},
                {"segments", std::move(rows)},
                {"metrics",
                 Json{{"f1_point_adjusted", optional_metric(report.f1_point_adjusted)},
                      {"roc_auc", optional_metric(report.roc_auc)},
                      {"prc_auc", optional_metric(report.prc_auc)}}},
                {"notes",
                 Json{{"tie_count", report.tie_count},
                      {"nonconverged_count", report.nonconverged_count},
                      {"zero_positive_convention", report.zero_positive_convention}}}};
}

DetectionReport report_from_json(const Json& j) {
    if (j.at("format_version").get<int>() != kFormatVersion) {
        throw Error(ErrorCode::IoError, "unsupported report format_version");
    }
    DetectionReport report;
    bool has_labels = false;
    for (const auto& row : j.at("segments")) {
        SegmentScore s;
        s.segment_index = row.at("segment_index").get<Index>();
        s.shd_attack = row.at("shd_attack").is_null()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : row.at("shd_attack").get<double>();
        s.shd_normal = row.at("shd_normal").is_null()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : row.at("shd_normal").get<double>();
        s.score = row.at("score").get<double>();
        s.predicted = row.at("predicted_label").get<int>();
        s.converged = row.at("converged").get<bool>();
        report.per_segment.push_back(s);
        if (row.contains("label")) has_labels = true;
    }
    if (has_labels) {
        std::vector<int> labels;
        for (const auto& row : j.at("segments")) labels.push_back(row.at("label").get<int>());
        report.labels = std::move(labels);
    }
    const Json& metrics = j.at("metrics");
    if (!metrics.at("f1_point_adjusted").is_null()) {
        report.f1_point_adjusted = metrics.at("f1_point_adjusted").get<double>();
    }
    if (!metrics.at("roc_auc").is_null()) report.roc_auc = metrics.at("roc_auc").get<double>();
    if (!metrics.at("prc_auc").is_null()) report.prc_auc = metrics.at("prc_auc").get<double>();
    const Json& notes = j.at("notes");
    report.tie_count = notes.at("tie_count").get<Index>();
    report.nonconverged_count = notes.at("nonconverged_count").get<Index>();
    report.zero_positive_convention = notes.at("zero_positive_convention").get<bool>();
    return report;
}

Json ground_truth_to_json(const TwoRegimeData& data, double edge_threshold) {
    auto support = [&](const WeightedDbn& dbn) {
        BinaryDbn g;
        g.node_count = static_cast<int>(dbn.node_count());
        g.lag = dbn.lag;
        const int k = g.node_count;
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
                if (i != j && dbn.intra(j, i) != 0.0) g.intra_edges.emplace(j, i);
            }
        }
        for (int l = 1; l <= dbn.lag; ++l) {
            for (int j = 0; j < k; ++j) {
                for (int i = 0; i < k; ++i) {
                    if (dbn.inter((l - 1) * k + j, i) != 0.0) g.inter_edges.emplace(j, l, i);
                }
            }
        }
        return g;
    };
    Json labels = Json::array();
    if (data.series.labels) {
        for (int v : *data.series.labels) labels.push_back(v);
    }
    return Json{{"format_version", kFormatVersion},
                {"edge_threshold", edge_threshold},
                {"sensor_names", data.normal_truth.sensor_names},
                {"segment_labels", std::move(labels)},
                {"normal", Json{{"weighted", weighted_to_json(data.normal_truth)},
                                {"edges", edges_to_json(support(data.normal_truth))}}},
                {"attack", Json{{"weighted", weighted_to_json(data.attack_truth)},
                                {"edges", edges_to_json(support(data.attack_truth))}}}};
}

std::string to_dot(const BinaryDbn& graph, const std::vector<std::string>& names,
                   const std::string& graph_name) {
    auto name_of = [&](int idx) {
        if (idx < static_cast<int>(names.size())) return names[static_cast<size_t>(idx)];
        return "s" + std::to_string(idx);
    };
    std::ostringstream out;
    out << "digraph " << graph_name << " {\n";
    for (int v = 0; v < graph.node_count; ++v) {
        out << "  \"" << name_of(v) << "\";\n";
    }
    for (const auto& [j, i] : graph.intra_edges) {
        out << "  \"" << name_of(j) << "\" -> \"" << name_of(i) << "\";\n";
    }
    for (const auto& [j, l, i] : graph.inter_edges) {
        out << "  \"" << name_of(j) << "\" -> \"" << name_of(i)
            << "\" [style=dashed, label=\"lag " << l << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path);
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace cgad
