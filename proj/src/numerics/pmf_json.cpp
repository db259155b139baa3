#include "llt/pmf_json.hpp"

#include <string>

namespace llt {

nlohmann::json pmf_to_json(const AnyPmf& p) {
  nlohmann::json j;
  j["mode"] = to_string(mode_of(p));
  auto masses = nlohmann::json::array();
  if (const auto* e = std::get_if<ExactPmf>(&p)) {
    j["offset"] = e->offset();
    for (const auto& q : e->masses()) masses.push_back(q.get_str());
  } else {
    const auto& f = std::get<FloatPmf>(p);
    j["offset"] = f.offset();
    for (long double v : f.masses()) masses.push_back(static_cast<double>(v));
  }
  j["masses"] = std::move(masses);
  return j;
}

AnyPmf pmf_from_json(const nlohmann::json& j) {
  const auto offset = j.at("offset").get<std::int64_t>();
  const auto mode = j.at("mode").get<std::string>();
  const auto& masses = j.at("masses");
  if (!masses.is_array()) throw LawError("law json: masses must be an array");
  if (mode == "exact") {
    std::vector<mpq_class> q;
    q.reserve(masses.size());
    for (const auto& m : masses) {
      mpq_class v;
      if (m.is_string()) {
        if (v.set_str(m.get<std::string>(), 10) != 0) throw LawError("law json: bad rational");
        v.canonicalize();
      } else if (m.is_number_integer()) {
        v = mpq_class(m.get<long>());
      } else {
        throw LawError("law json: exact masses must be rational strings");
      }
      q.push_back(std::move(v));
    }
    return ExactPmf::from_masses(offset, q);
  }
  if (mode == "float") {
    std::vector<long double> v;
    v.reserve(masses.size());
    for (const auto& m : masses) {
      if (m.is_string()) {
        v.push_back(std::stold(m.get<std::string>()));
      } else {
        v.push_back(static_cast<long double>(m.get<double>()));
      }
    }
    return FloatPmf(offset, std::move(v));
  }
  throw LawError("law json: unknown mode '" + mode + "'");
}

}  // namespace llt
