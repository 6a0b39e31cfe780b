#include "esg/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"

namespace esg {
namespace {

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

std::string_view to_string(ReturnKind kind) noexcept {
    return kind == ReturnKind::Relative ? "relative" : "absolute";
}

ReturnKind parse_return_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "relative") return ReturnKind::Relative;
    if (lower == "absolute") return ReturnKind::Absolute;
    fail(ErrorKind::InvalidConfig, "unknown return kind '" + std::string(text) + "'");
}

std::vector<std::string> FactorSchema::ids() const {
    std::vector<std::string> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.id);
    return out;
}

FactorSchema parse_factor_schema(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("factor schema: ") + e.what());
    }
    require(j.contains("factors") && j["factors"].is_array(), ErrorKind::InvalidConfig,
            "factor schema needs a 'factors' array");
    FactorSchema schema;
    for (const auto& item : j["factors"]) {
        require(item.contains("id") && item.contains("return_kind"), ErrorKind::InvalidConfig,
                "factor entries need 'id' and 'return_kind'");
        FactorDecl decl;
        decl.id = item["id"].get<std::string>();
        decl.kind = parse_return_kind(item["return_kind"].get<std::string>());
        decl.label = item.value("label", decl.id);
        decl.asset_class = item.value("asset_class", "");
        for (const auto& existing : schema.factors) {
            require(existing.id != decl.id, ErrorKind::InvalidConfig, "duplicate factor id " + decl.id);
        }
        schema.factors.push_back(std::move(decl));
    }
    require(!schema.factors.empty(), ErrorKind::InvalidConfig, "factor schema is empty");
    return schema;
}

FactorSchema load_factor_schema(const std::filesystem::path& path) {
    return parse_factor_schema(csv::read_text(path));
}

std::size_t TimeSeriesSet::missing_count() const {
    return static_cast<std::size_t>(values.array().isNaN().count());
}

TimeSeriesSet parse_time_series(std::string_view csv_text, const FactorSchema& schema) {
    const auto table = csv::parse(csv_text);
    require(!table.header.empty() && table.header.front() == "date", ErrorKind::UnparseableCell,
            "first column must be 'date'");

    std::unordered_map<std::string, std::size_t> schema_pos;
    for (std::size_t i = 0; i < schema.factors.size(); ++i) schema_pos[schema.factors[i].id] = i;

    // csv column -> schema position
    std::vector<std::size_t> column_to_factor;
    std::vector<bool> seen(schema.factors.size(), false);
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        const auto it = schema_pos.find(table.header[c]);
        require(it != schema_pos.end(), ErrorKind::UnknownFactor, "column '" + table.header[c] + "'");
        require(!seen[it->second], ErrorKind::UnknownFactor, "column '" + table.header[c] + "' repeated");
        seen[it->second] = true;
        column_to_factor.push_back(it->second);
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        require(seen[i], ErrorKind::UnknownFactor, "schema factor '" + schema.factors[i].id + "' missing from csv");
    }

    TimeSeriesSet ts;
    ts.factors = schema.factors;
    ts.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(schema.factors.size()));
    ts.dates.reserve(table.rows.size());

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "row " + std::to_string(r + 2);
        require(row.size() == table.header.size(), ErrorKind::UnparseableCell, where + ": wrong cell count");
        require(is_iso_date(row[0]), ErrorKind::UnparseableCell, where + ": bad date '" + row[0] + "'");
        if (!ts.dates.empty()) {
            require(row[0] != ts.dates.back(), ErrorKind::DuplicateDate, where + ": " + row[0]);
            require(row[0] > ts.dates.back(), ErrorKind::NonMonotoneDates, where + ": " + row[0]);
        }
        ts.dates.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) {
            const auto f = static_cast<Eigen::Index>(column_to_factor[c - 1]);
            const auto ri = static_cast<Eigen::Index>(r);
            if (row[c].empty()) {
                ts.values(ri, f) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const auto v = csv::parse_double(row[c]);
            require(v.has_value(), ErrorKind::UnparseableCell, where + ": '" + row[c] + "'");
            ts.values(ri, f) = *v;
        }
    }
    return ts;
}

TimeSeriesSet load_time_series(const std::filesystem::path& path, const FactorSchema& schema) {
    return parse_time_series(csv::read_text(path), schema);
}

TimeSeriesSet fill_gaps(const TimeSeriesSet& ts) {
    TimeSeriesSet out = ts;
    for (Eigen::Index f = 0; f < out.values.cols(); ++f) {
        if (out.values.rows() == 0) break;
        require(!std::isnan(out.values(0, f)), ErrorKind::LeadingGap, "factor '" + out.factors[static_cast<std::size_t>(f)].id + "'");
        for (Eigen::Index t = 1; t < out.values.rows(); ++t) {
            if (std::isnan(out.values(t, f))) out.values(t, f) = out.values(t - 1, f);
        }
    }
    return out;
}

ReturnMatrix compute_rolling_returns(const TimeSeriesSet& ts, std::size_t window) {
    require(window > 0, ErrorKind::InvalidConfig, "window must be positive");
    require(ts.rows() > window, ErrorKind::InsufficientHistory,
            std::to_string(ts.rows()) + " rows for window " + std::to_string(window));
    require(ts.missing_count() == 0, ErrorKind::NonFiniteValue, "fill gaps before computing returns");

    const auto n = static_cast<Eigen::Index>(ts.rows() - window);
    const auto w = static_cast<Eigen::Index>(window);
    ReturnMatrix rm;
    rm.factors = ts.factors;
    rm.window = window;
    rm.start_dates.assign(ts.dates.begin(), ts.dates.begin() + n);
    rm.returns.resize(n, ts.values.cols());

    for (Eigen::Index f = 0; f < ts.values.cols(); ++f) {
        const auto& decl = ts.factors[static_cast<std::size_t>(f)];
        const auto col = ts.values.col(f);
        if (decl.kind == ReturnKind::Relative) {
            for (Eigen::Index t = 0; t < col.size(); ++t) {
                require(col(t) > 0.0, ErrorKind::NonPositiveLevel,
                        "factor '" + decl.id + "' at " + ts.dates[static_cast<std::size_t>(t)]);
            }
            for (Eigen::Index t = 0; t < n; ++t) rm.returns(t, f) = col(t + w) / col(t) - 1.0;
        } else {
            for (Eigen::Index t = 0; t < n; ++t) rm.returns(t, f) = col(t + w) - col(t);
        }
    }
    return rm;
}

ReturnMatrix normalize(const ReturnMatrix& rm) {
    require(rm.returns.rows() > 0, ErrorKind::EmptySample, "no return rows");
    ReturnMatrix out = rm;
    out.scaling.clear();
    const double n = static_cast<double>(rm.returns.rows());
    for (Eigen::Index f = 0; f < rm.returns.cols(); ++f) {
        const auto col = rm.returns.col(f);
        const double mean = col.sum() / n;
        const double var = (col.array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
        require(sd > 1e-12 * scale, ErrorKind::DegenerateFactor,
                "factor '" + rm.factors[static_cast<std::size_t>(f)].id + "' has zero variance");
        out.returns.col(f) = (col.array() - mean) / sd;
        out.scaling.push_back({mean, sd});
    }
    out.normalized = true;
    return out;
}

Matrix apply_scaling(const Matrix& x, std::span<const Scaling> scaling) {
    require(static_cast<std::size_t>(x.cols()) == scaling.size(), ErrorKind::DimensionMismatch,
            std::to_string(x.cols()) + " columns vs " + std::to_string(scaling.size()) + " scalings");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        const auto& s = scaling[static_cast<std::size_t>(f)];
        out.col(f) = (x.col(f).array() - s.mean) / s.std;
    }
    return out;
}

Matrix denormalize(const Matrix& x, std::span<const Scaling> scaling) {
    require(static_cast<std::size_t>(x.cols()) == scaling.size(), ErrorKind::DimensionMismatch,
            std::to_string(x.cols()) + " columns vs " + std::to_string(scaling.size()) + " scalings");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        const auto& s = scaling[static_cast<std::size_t>(f)];
        out.col(f) = x.col(f).array() * s.std + s.mean;
    }
    return out;
}

ReturnMatrix prepare_training_data(const std::filesystem::path& csv, const FactorSchema& schema,
                                   std::size_t window) {
    return normalize(compute_rolling_returns(fill_gaps(load_time_series(csv, schema)), window));
}

}  // namespace esg
