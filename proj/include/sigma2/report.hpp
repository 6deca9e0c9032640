#pragma once

#include "sigma2/euler_lagrange.hpp"
#include "sigma2/stability.hpp"

#include <json.hpp>

namespace s2 {

using json = nlohmann::ordered_json;

// CSV table; cells are preformatted so output bytes do not depend on locale or stream state.
struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string csv() const;
};

std::string fmt(double v);  // %.17g, "nan"/"inf" spelled out
std::string fmt(int v);

json to_json(const Vec& v);
json to_json(const Charge& c);
json to_json(const Bound& b);
json to_json(const RadiusOpt& r);
json to_json(const EnergyReport& e);
json to_json(const Witness& w);
json to_json(const ClassFlags& f);
json to_json(const DistortionData& d);
json to_json(const ResidualReport& r);
json to_json(const HessianReport& h);
json to_json(const FieldIntegrals& I);
json to_json(const ThresholdResult& t);
json to_json(const ProfileResult& p);
json to_json(const ConformalReport& c);

Table residual_table(const ResidualReport& r);

}  // namespace s2
