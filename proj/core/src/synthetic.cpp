#include "esg/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/rng.hpp"

namespace esg {
namespace {

using nlohmann::json;
namespace chr = std::chrono;

chr::sys_days parse_iso(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    const std::string str(s);
    require(s.size() == 10 && std::sscanf(str.c_str(), "%d-%u-%u", &y, &m, &d) == 3, ErrorKind::InvalidConfig,
            "bad date '" + str + "'");
    const chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
    require(ymd.ok(), ErrorKind::InvalidConfig, "bad date '" + str + "'");
    return chr::sys_days{ymd};
}

std::string format_iso(chr::sys_days day) {
    const chr::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
    require(!factors.empty(), ErrorKind::InvalidConfig, "synthetic spec has no factors");
    require(days >= 2, ErrorKind::InvalidConfig, "synthetic spec needs at least two days");
    require(trading_days > 0.0, ErrorKind::InvalidConfig, "trading_days must be positive");
    for (const auto& f : factors) {
        require(f.vol >= 0.0 && std::isfinite(f.vol) && std::isfinite(f.drift) && std::isfinite(f.start),
                ErrorKind::InvalidConfig, "synthetic factor " + f.decl.id + " has invalid parameters");
        require(f.decl.kind == ReturnKind::Absolute || f.start > 0.0, ErrorKind::InvalidConfig,
                "relative synthetic factor " + f.decl.id + " needs a positive start level");
    }
    const auto n = static_cast<Eigen::Index>(factors.size());
    if (correlation_matrix) {
        require(correlation_matrix->rows() == n && correlation_matrix->cols() == n, ErrorKind::InvalidConfig,
                "correlation matrix shape");
    } else {
        require(correlation < 1.0 && (n == 1 || correlation > -1.0 / static_cast<double>(n - 1)),
                ErrorKind::InvalidConfig, "uniform correlation is not positive definite");
    }
}

std::vector<SyntheticFactor> default_synthetic_factors(std::size_t n) {
    std::vector<SyntheticFactor> out;
    for (std::size_t i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "F%02zu", i + 1);
        SyntheticFactor f;
        f.decl.id = id;
        f.decl.label = id;
        if (i % 2 == 0) {
            f.decl.kind = ReturnKind::Relative;
            f.decl.asset_class = "equity";
            f.start = 100.0;
            f.drift = 0.04;
            f.vol = 0.18;
        } else {
            f.decl.kind = ReturnKind::Absolute;
            f.decl.asset_class = "rate";
            f.start = 0.01;
            f.drift = 0.0;
            f.vol = 0.006;
        }
        out.push_back(std::move(f));
    }
    return out;
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text) {
    SyntheticSpec spec;
    try {
        const auto j = json::parse(json_text);
        spec.days = j.value("days", spec.days);
        spec.seed = j.value("seed", spec.seed);
        spec.correlation = j.value("correlation", spec.correlation);
        spec.start_date = j.value("start_date", spec.start_date);
        spec.trading_days = j.value("trading_days", spec.trading_days);
        if (j.contains("factors")) {
            for (const auto& item : j.at("factors")) {
                SyntheticFactor f;
                f.decl.id = item.at("id").get<std::string>();
                f.decl.kind = parse_return_kind(item.at("return_kind").get<std::string>());
                f.decl.label = item.value("label", f.decl.id);
                f.decl.asset_class = item.value("asset_class", "");
                f.start = item.value("start", f.decl.kind == ReturnKind::Relative ? 100.0 : 0.0);
                f.drift = item.value("drift", 0.0);
                f.vol = item.at("vol").get<double>();
                spec.factors.push_back(std::move(f));
            }
        } else {
            spec.factors = default_synthetic_factors(j.value("n_factors", std::size_t{4}));
        }
        if (j.contains("correlation_matrix")) {
            const auto& rows = j.at("correlation_matrix");
            const auto n = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXd c(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                require(static_cast<Eigen::Index>(rows[r].size()) == n, ErrorKind::InvalidConfig,
                        "correlation matrix must be square");
                for (Eigen::Index k = 0; k < n; ++k) c(r, k) = rows[r][k].get<double>();
            }
            spec.correlation_matrix = c;
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("synthetic spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::vector<std::string> business_days(std::string_view start, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (auto day = parse_iso(start); out.size() < count; day += chr::days{1}) {
        const chr::weekday wd{day};
        if (wd == chr::Saturday || wd == chr::Sunday) continue;
        out.push_back(format_iso(day));
    }
    return out;
}

TimeSeriesSet make_synthetic_dataset(const SyntheticSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.factors.size());
    Eigen::MatrixXd corr = spec.correlation_matrix.value_or(Eigen::MatrixXd::Constant(n, n, spec.correlation));
    corr.diagonal().setOnes();
    const Eigen::LLT<Eigen::MatrixXd> llt(corr);
    require(llt.info() == Eigen::Success, ErrorKind::InvalidConfig, "correlation matrix is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    TimeSeriesSet ts;
    for (const auto& f : spec.factors) ts.factors.push_back(f.decl);
    ts.dates = business_days(spec.start_date, spec.days);
    ts.values.resize(static_cast<Eigen::Index>(spec.days), n);

    Rng rng(spec.seed, Stream::Synthetic);
    const double dt = 1.0 / spec.trading_days;
    Eigen::VectorXd z(n);
    for (Eigen::Index j = 0; j < n; ++j) ts.values(0, j) = spec.factors[static_cast<std::size_t>(j)].start;
    for (Eigen::Index t = 1; t < static_cast<Eigen::Index>(spec.days); ++t) {
        for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
        const Eigen::VectorXd e = chol * z;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& f = spec.factors[static_cast<std::size_t>(j)];
            const double prev = ts.values(t - 1, j);
            const double step = f.vol * std::sqrt(dt) * e(j);
            ts.values(t, j) = f.decl.kind == ReturnKind::Relative
                                  ? prev * std::exp((f.drift - 0.5 * f.vol * f.vol) * dt + step)
                                  : prev + f.drift * dt + step;
        }
    }
    return ts;
}

std::string time_series_to_csv(const TimeSeriesSet& ts) {
    std::ostringstream os;
    os << "date";
    for (const auto& f : ts.factors) os << ',' << f.id;
    os << '\n';
    for (std::size_t t = 0; t < ts.rows(); ++t) {
        os << ts.dates[t];
        for (std::size_t j = 0; j < ts.cols(); ++j) {
            const double v = ts.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
            os << ',';
            if (!std::isnan(v)) os << csv::format_double(v);
        }
        os << '\n';
    }
    return os.str();
}

std::string factor_schema_to_json(const std::vector<FactorDecl>& factors) {
    json arr = json::array();
    for (const auto& f : factors) {
        arr.push_back({{"id", f.id}, {"return_kind", std::string(to_string(f.kind))}, {"label", f.label},
                       {"asset_class", f.asset_class}});
    }
    return json{{"factors", arr}}.dump(2) + "\n";
}

std::filesystem::path write_synthetic_dataset(const SyntheticSpec& spec, const std::filesystem::path& dir,
                                              std::string_view stem) {
    const auto ts = make_synthetic_dataset(spec);
    const auto csv_path = dir / (std::string(stem) + ".csv");
    csv::write_text(csv_path, time_series_to_csv(ts));
    csv::write_text(dir / (std::string(stem) + "_factors.json"), factor_schema_to_json(ts.factors));
    return csv_path;
}

}  // namespace esg
