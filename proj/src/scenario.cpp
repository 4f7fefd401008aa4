#include "sicreg/scenario.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "sicreg/errors.hpp"

namespace sicreg {

void Scenario::validate() const {
    if (covariates.empty()) throw InputError("scenario: no covariates defined");
    if (truth.beta.size() != p() + 1)
        throw InputError("scenario: beta/alpha must have length p+1 = " + std::to_string(p() + 1));
    for (const auto& c : covariates) {
        if (c.kind == CovariateSpec::Kind::exponential && !(c.param > 0.0))
            throw InputError("scenario: exponential rate must be positive");
        if (c.kind == CovariateSpec::Kind::bernoulli && !(c.param > 0.0 && c.param < 1.0))
            throw InputError("scenario: bernoulli probability must lie in (0,1)");
    }
    if (sample_sizes.empty()) throw InputError("scenario: no sample sizes given");
    for (long n : sample_sizes)
        if (n < p() + 2) throw InputError("scenario: sample size below p + 2");
    if (replicates < 1) throw InputError("scenario: replicates must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InputError("scenario: test_fraction must lie in (0,1)");
    if (!(mvn_corr_base > -1.0 && mvn_corr_base < 1.0))
        throw InputError("scenario: mvn correlation base must lie in (-1,1)");
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_num(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("scenario: bad number '" + s + "' for key '" + key + "'");
    }
}

CovariateSpec parse_covariate(const std::string& tok) {
    CovariateSpec spec;
    const auto open = tok.find('(');
    std::string head = open == std::string::npos ? tok : tok.substr(0, open);
    std::string arg;
    if (open != std::string::npos) {
        if (tok.back() != ')') throw InputError("scenario: malformed covariate tag '" + tok + "'");
        arg = tok.substr(open + 1, tok.size() - open - 2);
    }

    if (head == "norm" || head == "normal") {
        spec.kind = CovariateSpec::Kind::std_normal;
    } else if (head == "exp" || head == "exponential") {
        spec.kind = CovariateSpec::Kind::exponential;
        spec.param = arg.empty() ? 1.0 : parse_num(arg, "covariates");
    } else if (head == "bern" || head == "bernoulli") {
        spec.kind = CovariateSpec::Kind::bernoulli;
        if (arg.empty()) throw InputError("scenario: bernoulli tag needs a probability");
        spec.param = parse_num(arg, "covariates");
    } else if (head == "mvn") {
        spec.kind = CovariateSpec::Kind::mvn_group;
        spec.group = arg.empty() ? 1 : static_cast<int>(parse_num(arg, "covariates"));
    } else {
        throw InputError("scenario: unknown covariate tag '" + tok + "'");
    }
    return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError("scenario: expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (kv.count(key)) throw InputError("scenario: duplicate key '" + key + "'");
        kv[key] = value;
    }

    const auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw InputError("scenario: missing key '" + key + "'");
        return it->second;
    };

    Scenario sc;
    if (auto it = kv.find("name"); it != kv.end()) sc.name = it->second;

    for (const auto& tok : split_ws(require("covariates")))
        sc.covariates.push_back(parse_covariate(tok));

    const auto parse_vec = [&](const std::string& key) {
        const auto toks = split_ws(require(key));
        Eigen::VectorXd v(static_cast<Eigen::Index>(toks.size()));
        for (size_t i = 0; i < toks.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = parse_num(toks[i], key);
        return v;
    };
    Eigen::VectorXd beta = parse_vec("beta");
    Eigen::VectorXd alpha = parse_vec("alpha");
    if (beta.size() != alpha.size())
        throw InputError("scenario: beta and alpha lengths differ");
    sc.truth = ParamVector(std::move(beta), std::move(alpha));

    for (const auto& tok : split_ws(require("n")))
        sc.sample_sizes.push_back(static_cast<long>(parse_num(tok, "n")));
    sc.replicates = static_cast<int>(parse_num(require("replicates"), "replicates"));

    if (auto it = kv.find("mvn_corr"); it != kv.end())
        sc.mvn_corr_base = parse_num(it->second, "mvn_corr");
    if (auto it = kv.find("test_fraction"); it != kv.end())
        sc.test_fraction = parse_num(it->second, "test_fraction");
    if (auto it = kv.find("seed"); it != kv.end())
        sc.seed = static_cast<uint64_t>(parse_num(it->second, "seed"));

    static const char* known[] = {"name",       "covariates", "beta",          "alpha", "n",
                                  "replicates", "mvn_corr",   "test_fraction", "seed"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InputError("scenario: unknown key '" + key + "'");
    }

    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace sicreg
