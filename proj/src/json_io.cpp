#include "rdsec/json_io.hpp"

namespace rdsec {

using nlohmann::json;

json pmf_to_json(const Pmf& p) { return json(p.probs()); }

Pmf pmf_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("pmf: expected a nonempty array");
    std::vector<double> v = j.get<std::vector<double>>();
    return Pmf(Alphabet(static_cast<int>(v.size())), std::move(v));
}

json channel_to_json(const Channel& c) {
    json rows = json::array();
    for (int x = 0; x < c.input().size; ++x) {
        json row = json::array();
        for (int y = 0; y < c.output().size; ++y) row.push_back(c.prob(x, y));
        rows.push_back(std::move(row));
    }
    return rows;
}

Channel channel_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("channel: expected an array of rows");
    std::vector<Pmf> rows;
    rows.reserve(j.size());
    for (const auto& row : j) rows.push_back(pmf_from_json(row));
    return Channel(Alphabet(static_cast<int>(rows.size())), std::move(rows));
}

namespace {

void collect_dims(const json& j, std::vector<int>& dims) {
    if (j.is_array() && !j.empty() && j.front().is_array()) {
        dims.push_back(static_cast<int>(j.size()));
        collect_dims(j.front(), dims);
    } else if (j.is_array()) {
        dims.push_back(static_cast<int>(j.size()));
    } else {
        throw std::invalid_argument("joint: expected nested arrays of numbers");
    }
}

void flatten(const json& j, int depth, const std::vector<int>& dims, std::vector<double>& out) {
    if (depth + 1 == static_cast<int>(dims.size())) {
        if (!j.is_array() || static_cast<int>(j.size()) != dims[static_cast<std::size_t>(depth)]) {
            throw std::invalid_argument("joint: ragged nesting");
        }
        for (const auto& x : j) {
            if (!x.is_number()) throw std::invalid_argument("joint: expected numbers at the innermost level");
            out.push_back(x.get<double>());
        }
        return;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != dims[static_cast<std::size_t>(depth)]) {
        throw std::invalid_argument("joint: ragged nesting");
    }
    for (const auto& sub : j) flatten(sub, depth + 1, dims, out);
}

json nest(const JointPmf& jp, std::size_t axis, std::size_t base) {
    json out = json::array();
    const int size = jp.axes()[axis].size;
    if (axis + 1 == jp.num_axes()) {
        for (int i = 0; i < size; ++i) out.push_back(jp.at_flat(base + static_cast<std::size_t>(i)));
        return out;
    }
    for (int i = 0; i < size; ++i) {
        out.push_back(nest(jp, axis + 1, base + static_cast<std::size_t>(i) * jp.stride(axis)));
    }
    return out;
}

}  // namespace

json joint_to_json(const JointPmf& j) { return nest(j, 0, 0); }

JointPmf joint_from_json(const json& j) {
    std::vector<int> dims;
    collect_dims(j, dims);
    std::vector<double> flat;
    flatten(j, 0, dims, flat);
    std::vector<Alphabet> axes;
    for (int d : dims) axes.emplace_back(d);
    return JointPmf(std::move(axes), std::move(flat));
}

json scheme_to_json(const AuxScheme& aux) {
    json j;
    j["channel_v_given_x"] = channel_to_json(aux.v_given_x);
    j["channel_u_given_v"] = channel_to_json(aux.u_given_v);
    j["phi"] = aux.phi;
    if (!aux.z_map.empty()) j["z_map"] = aux.z_map;
    return j;
}

AuxScheme scheme_from_json(const json& j) {
    AuxScheme aux{channel_from_json(j.at("channel_v_given_x")), channel_from_json(j.at("channel_u_given_v")),
                  j.at("phi").get<std::vector<int>>(), {}};
    if (j.contains("z_map")) aux.z_map = j.at("z_map").get<std::vector<int>>();
    return aux;
}

json trial_record_to_json(const TrialRecord& r) {
    json j;
    j["x"] = r.x;
    j["b"] = r.b;
    j["w"] = r.w;
    j["m"] = {{"mp", r.chosen.mp}, {"mpp", r.chosen.mpp}, {"ms", r.chosen.ms}, {"msp", r.chosen.msp}};
    j["mpp_hat"] = r.mpp_hat;
    j["msp_hat"] = r.msp_hat;
    j["y"] = r.y;
    j["db"] = r.db;
    j["z"] = r.z;
    j["dw"] = r.dw;
    return j;
}

}  // namespace rdsec
