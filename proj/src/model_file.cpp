#include "sicreg/model_file.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sicreg {

using nlohmann::json;

ParamVector ModelFile::coefficients() const {
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
    return {std::move(b), std::move(a)};
}

ModelFile make_model_file(const FitResult& fit, const std::string& response,
                          const std::vector<std::string>& predictors,
                          const TelescopeSchedule& schedule, const SolverConfig& cfg, bool spr,
                          const std::string& train_fingerprint) {
    ModelFile m;
    m.response = response;
    m.predictors = predictors;
    m.standardized = fit.scaling.scaled;
    m.spr = spr;
    m.scaling_sd.assign(fit.scaling.sd.data(), fit.scaling.sd.data() + fit.scaling.sd.size());
    m.beta.assign(fit.theta_orig.beta.data(),
                  fit.theta_orig.beta.data() + fit.theta_orig.beta.size());
    m.alpha.assign(fit.theta_orig.alpha.data(),
                   fit.theta_orig.alpha.data() + fit.theta_orig.alpha.size());
    m.active_beta = fit.active.beta;
    m.active_alpha = fit.active.alpha;
    m.se_beta = fit.se_beta;
    m.se_alpha = fit.se_alpha;
    m.bic = fit.bic_value;
    m.delta_bic_beta = fit.delta_bic_beta;
    m.delta_bic_alpha = fit.delta_bic_alpha;
    m.eps_start = schedule.eps_start;
    m.eps_end = schedule.eps_end;
    m.steps = schedule.steps;
    m.tol = cfg.tol;
    m.zero_tol = cfg.zero_tol;
    m.train_fingerprint = train_fingerprint;
    return m;
}

namespace {

json delta_to_json(const std::vector<std::pair<int, double>>& d) {
    json out = json::array();
    for (const auto& [j, v] : d) out.push_back(json{{"index", j}, {"value", v}});
    return out;
}

std::vector<std::pair<int, double>> delta_from_json(const json& j) {
    std::vector<std::pair<int, double>> out;
    for (const auto& e : j)
        out.emplace_back(e.at("index").get<int>(), e.at("value").get<double>());
    return out;
}

}  // namespace

std::string to_json(const ModelFile& m) {
    json j;
    j["schema_version"] = ModelFile::kSchemaVersion;
    j["response"] = m.response;
    j["predictors"] = m.predictors;
    j["standardized"] = m.standardized;
    j["spr"] = m.spr;
    j["scaling_sd"] = m.scaling_sd;
    j["coefficients"] = json{{"location", m.beta}, {"dispersion", m.alpha}};
    j["active"] = json{{"location", m.active_beta}, {"dispersion", m.active_alpha}};
    j["standard_errors"] = json{{"location", m.se_beta}, {"dispersion", m.se_alpha}};
    j["bic"] = m.bic;
    j["delta_bic"] = json{{"location", delta_to_json(m.delta_bic_beta)},
                          {"dispersion", delta_to_json(m.delta_bic_alpha)}};
    j["schedule"] = json{{"eps_start", m.eps_start}, {"eps_end", m.eps_end}, {"steps", m.steps}};
    j["config"] = json{{"tol", m.tol}, {"zero_tol", m.zero_tol}};
    j["train_fingerprint"] = m.train_fingerprint;
    return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const std::string version = j.at("schema_version").get<std::string>();
        if (version != ModelFile::kSchemaVersion)
            throw InputError("unsupported model schema_version '" + version + "' (expected '" +
                             ModelFile::kSchemaVersion + "')");
        ModelFile m;
        m.response = j.at("response").get<std::string>();
        m.predictors = j.at("predictors").get<std::vector<std::string>>();
        m.standardized = j.at("standardized").get<bool>();
        m.spr = j.at("spr").get<bool>();
        m.scaling_sd = j.at("scaling_sd").get<std::vector<double>>();
        m.beta = j.at("coefficients").at("location").get<std::vector<double>>();
        m.alpha = j.at("coefficients").at("dispersion").get<std::vector<double>>();
        m.active_beta = j.at("active").at("location").get<std::vector<int>>();
        m.active_alpha = j.at("active").at("dispersion").get<std::vector<int>>();
        m.se_beta = j.at("standard_errors").at("location").get<std::vector<double>>();
        m.se_alpha = j.at("standard_errors").at("dispersion").get<std::vector<double>>();
        m.bic = j.at("bic").get<double>();
        m.delta_bic_beta = delta_from_json(j.at("delta_bic").at("location"));
        m.delta_bic_alpha = delta_from_json(j.at("delta_bic").at("dispersion"));
        m.eps_start = j.at("schedule").at("eps_start").get<double>();
        m.eps_end = j.at("schedule").at("eps_end").get<double>();
        m.steps = j.at("schedule").at("steps").get<int>();
        m.tol = j.at("config").at("tol").get<double>();
        m.zero_tol = j.at("config").at("zero_tol").get<double>();
        m.train_fingerprint = j.at("train_fingerprint").get<std::string>();
        if (m.beta.size() != m.alpha.size() || m.beta.size() != m.predictors.size() + 1)
            throw InputError("model file: coefficient lengths do not match predictors");
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("model file is missing required fields: ") + e.what());
    }
}

void save_model(const ModelFile& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write model file: " + path);
    out << to_json(m);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string fingerprint(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sicreg
