#include "pplap/report.hpp"

#include "pplap/calculus.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <ostream>

namespace pplap {

Json json_number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

Json number_array(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(json_number(x));
    return a;
}

}  // namespace

Json to_json(const EstimateReport& report) {
    Json j;
    j["name"] = report.name;
    j["relation"] = report.relation;
    j["lhs"] = json_number(report.lhs);
    j["rhs"] = json_number(report.rhs);
    j["fitted_constant"] = json_number(report.fitted_constant);
    j["pass"] = report.pass;
    Json ctx = Json::object();
    for (const auto& [key, value] : report.context) ctx[key] = json_number(value);
    j["context"] = std::move(ctx);
    j["note"] = report.note;
    return j;
}

Json to_json(const std::vector<EstimateReport>& reports) {
    Json a = Json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    return a;
}

Json to_json(const StageRecord& stage) {
    Json j;
    j["eps"] = json_number(stage.eps);
    j["M"] = json_number(stage.M);
    j["outer_iterations"] = stage.outer_iterations;
    j["inner_iterations"] = stage.inner_iterations;
    j["max_inner_ratio"] = json_number(stage.max_inner_ratio);
    j["drift"] = json_number(stage.drift);
    j["damping"] = json_number(stage.damping);
    return j;
}

Json to_json(const SolveRecord& record) {
    Json j;
    j["residual"] = json_number(record.residual);
    j["residual_regularized"] = json_number(record.residual_regularized);
    j["mean"] = json_number(record.u.size() > 0 ? mean(record.u) : 0.0);
    j["outer_iterations"] = record.outer_iterations;
    j["inner_iterations"] = record.inner_iterations;
    j["eps_final"] = json_number(record.eps_final);
    j["M_final"] = json_number(record.M_final);
    j["damping_final"] = json_number(record.damping_final);
    j["inner_ratios"] = number_array(record.inner_ratios);
    Json stages = Json::array();
    for (const auto& s : record.stages) stages.push_back(to_json(s));
    j["stages"] = std::move(stages);
    return j;
}

Json to_json(const EigenRecord& record) {
    Json j;
    j["lambda"] = json_number(record.lambda);
    j["residual"] = json_number(record.residual);
    j["lipschitz_estimate"] = json_number(record.lipschitz_estimate);
    j["constraint"] = json_number(record.constraint);
    j["gradient_norm"] = json_number(record.gradient_norm);
    j["converged"] = record.converged;
    j["iterations"] = record.iterations;
    j["restart"] = record.restart;
    return j;
}

Json to_json(const GeometryConstants& constants) {
    Json j;
    j["lambda1"] = json_number(constants.lambda1);
    j["K_minus"] = json_number(constants.K_minus);
    j["N"] = json_number(constants.N);
    j["delta"] = json_number(constants.delta);
    j["p_lo"] = json_number(constants.interval.lo);
    j["p_hi"] = json_number(constants.interval.hi);
    return j;
}

Json to_json(const Domain& domain) {
    Json j;
    j["kind"] = to_string(domain.kind());
    j["vertices"] = domain.num_vertices();
    if (domain.is_grid()) {
        j["dim"] = domain.dim();
        j["n"] = domain.points_per_axis();
        j["L"] = json_number(domain.side());
    } else {
        j["edges"] = domain.edges().size();
    }
    j["K"] = json_number(domain.K());
    j["N"] = json_number(domain.N());
    return j;
}

Json envelope(const std::string& kind, Json payload, const std::string& timestamp) {
    Json j;
    j["schema"] = kind;
    j["version"] = kSchemaVersion;
    j["timestamp"] = timestamp;
    j["payload"] = std::move(payload);
    return j;
}

void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& reports) {
    out << "name,relation,lhs,rhs,fitted_constant,pass,context\n";
    for (const auto& r : reports) {
        out << r.name << ',' << r.relation << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
            << format_double(r.fitted_constant) << ',' << (r.pass ? 1 : 0) << ',';
        for (std::size_t i = 0; i < r.context.size(); ++i) {
            if (i > 0) out << ';';
            out << r.context[i].first << '=' << format_double(r.context[i].second);
        }
        out << '\n';
    }
}

}  // namespace pplap
