#include "aseplab/aw_io.hpp"

#include "json.hpp"

namespace aseplab {

namespace {
using json = nlohmann::ordered_json;

json cx_to_json(const Cx<Real>& z) { return json::array({to_double(z.re), to_double(z.im)}); }

Cx<Real> cx_from_json(const json& j) {
    return {Real(j.at(0).get<double>()), Real(j.at(1).get<double>())};
}
}  // namespace

std::string to_json(const AwMeasure<Real>& mu) {
    json j;
    j["quadruple"] = {{"a", to_double(mu.params.a)},
                      {"b", to_double(mu.params.b)},
                      {"c", cx_to_json(mu.params.c)},
                      {"d", cx_to_json(mu.params.d)},
                      {"q", to_double(mu.params.q)}};
    json atoms = json::array();
    for (const auto& a : mu.atoms) {
        json ja;
        ja["location"] = to_double(a.location);
        ja["mass"] = to_double(a.mass);
        ja["generator"] = a.slot >= 0 ? std::string(1, "abcd"[a.slot]) : std::string("point");
        ja["k"] = a.k;
        atoms.push_back(ja);
    }
    j["atoms"] = atoms;
    j["density_sign"] = mu.density_sign;
    j["has_continuous"] = mu.has_continuous;
    j["density_prefactor"] = to_double(mu.density_prefactor);
    j["continuous_mass"] = to_double(mu.continuous_mass);
    j["support"] = {{"y0", to_double(mu.support_top)}, {"y0_star", to_double(mu.support_second)}};
    j["is_point_mass"] = mu.is_point_mass;
    j["tolerances"] = {{"poch", to_double(mu.opts.poch_tol)},
                       {"quad", to_double(mu.opts.quad_tol)},
                       {"delta_omega", to_double(mu.opts.delta_omega)}};
    return j.dump();
}

AwMeasure<Real> measure_from_json(const std::string& text) {
    json j = json::parse(text);
    AwMeasure<Real> mu;
    const auto& qd = j.at("quadruple");
    mu.params.a = Real(qd.at("a").get<double>());
    mu.params.b = Real(qd.at("b").get<double>());
    mu.params.c = cx_from_json(qd.at("c"));
    mu.params.d = cx_from_json(qd.at("d"));
    mu.params.q = Real(qd.at("q").get<double>());
    for (const auto& ja : j.at("atoms")) {
        std::string gen = ja.at("generator").get<std::string>();
        int slot = gen == "point" ? -1 : int(gen[0] - 'a');
        mu.atoms.push_back({Real(ja.at("location").get<double>()),
                            Real(ja.at("mass").get<double>()), slot, ja.at("k").get<int>()});
    }
    mu.density_sign = j.at("density_sign").get<int>();
    mu.has_continuous = j.at("has_continuous").get<bool>();
    mu.density_prefactor = Real(j.at("density_prefactor").get<double>());
    mu.continuous_mass = Real(j.at("continuous_mass").get<double>());
    mu.support_top = Real(j.at("support").at("y0").get<double>());
    mu.support_second = Real(j.at("support").at("y0_star").get<double>());
    mu.is_point_mass = j.at("is_point_mass").get<bool>();
    mu.opts.poch_tol = Real(j.at("tolerances").at("poch").get<double>());
    mu.opts.quad_tol = Real(j.at("tolerances").at("quad").get<double>());
    mu.opts.delta_omega = Real(j.at("tolerances").at("delta_omega").get<double>());
    mu.adm = check_admissible(mu.params, mu.opts);
    return mu;
}

}  // namespace aseplab
