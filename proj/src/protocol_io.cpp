#include "thermoctl/protocol_io.hpp"

#include "thermoctl/errors.hpp"

#include <fstream>

namespace thermoctl {

using nlohmann::json;

namespace {

json real_matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix real_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("protocol: expected a non-empty nested array");
    const auto n = static_cast<Index>(j.size());
    RealMatrix m(n, static_cast<Index>(j[0].size()));
    for (Index r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != m.cols()) {
            throw ValidationError("protocol: ragged matrix");
        }
        for (Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("protocol: missing field '") + key + "'");
    return j.at(key);
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("protocol: expected a non-empty nested array");
    const auto n = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j[0].size());
    Matrix m(n, cols);
    for (Index r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ValidationError("protocol: ragged matrix");
        for (Index c = 0; c < cols; ++c) {
            const json& z = row[static_cast<std::size_t>(c)];
            if (!z.is_array() || z.size() != 2) throw ValidationError("protocol: entries must be [re, im] pairs");
            m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return m;
}

json protocol_to_json(const ProtocolDocument& doc) {
    json steps = json::array();
    for (const ProtocolStep& step : doc.protocol.steps) {
        if (const auto* u = std::get_if<UnitaryStep>(&step)) {
            steps.push_back({{"kind", "unitary"}, {"U", matrix_to_json(u->unitary)}, {"h_end", matrix_to_json(u->h_end.matrix())}});
            continue;
        }
        const ThermalizingMap& m = std::get<ThermalizeStep>(step).map;
        if (m.kind() == MapKind::ThermalContact) {
            steps.push_back({{"kind", "thermal_contact"}});
        } else {
            steps.push_back({{"kind", "classical_gp"},
                             {"matrix", real_matrix_to_json(m.matrix())},
                             {"hamiltonian", matrix_to_json(m.declared_hamiltonian().matrix())},
                             {"basis", matrix_to_json(m.basis())},
                             {"beta", m.beta()}});
        }
    }
    json out = {{"schema", kProtocolSchema}, {"version", kProtocolSchemaVersion}, {"beta", doc.beta}};
    if (doc.initial) {
        out["initial"] = {{"state", matrix_to_json(doc.initial->state.matrix())},
                          {"hamiltonian", matrix_to_json(doc.initial->hamiltonian.matrix())}};
    }
    out["steps"] = std::move(steps);
    return out;
}

ProtocolDocument protocol_from_json(const json& j) {
    try {
        if (field(j, "schema").get<std::string>() != kProtocolSchema) {
            throw ValidationError("protocol: unknown schema");
        }
        if (field(j, "version").get<int>() != kProtocolSchemaVersion) {
            throw ValidationError("protocol: unsupported schema version");
        }
        ProtocolDocument doc{field(j, "beta").get<double>(), std::nullopt, {}};
        if (j.contains("initial")) {
            const json& init = j.at("initial");
            doc.initial.emplace(DensityMatrix(matrix_from_json(field(init, "state"))),
                                HermitianOperator(matrix_from_json(field(init, "hamiltonian"))));
        }
        const json& steps = field(j, "steps");
        if (!steps.is_array()) throw ValidationError("protocol: 'steps' must be an array");
        for (const json& s : steps) {
            const std::string kind = field(s, "kind").get<std::string>();
            if (kind == "unitary") {
                Matrix u = matrix_from_json(field(s, "U"));
                require_unitary(u);
                doc.protocol.steps.emplace_back(UnitaryStep{std::move(u), HermitianOperator(matrix_from_json(field(s, "h_end")))});
            } else if (kind == "thermal_contact") {
                doc.protocol.steps.emplace_back(ThermalizeStep{ThermalizingMap::thermal_contact()});
            } else if (kind == "classical_gp") {
                const ThermoContext ctx(field(s, "beta").get<double>());
                doc.protocol.steps.emplace_back(ThermalizeStep{ThermalizingMap::classical_gp(
                    real_matrix_from_json(field(s, "matrix")), HermitianOperator(matrix_from_json(field(s, "hamiltonian"))),
                    matrix_from_json(field(s, "basis")), ctx)});
            } else {
                throw ValidationError("protocol: unknown step kind '" + kind + "'");
            }
        }
        return doc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("protocol: malformed document: ") + e.what());
    }
}

ProtocolDocument load_protocol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("protocol: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("protocol: " + path + " is not valid JSON: " + e.what());
    }
    return protocol_from_json(j);
}

}  // namespace thermoctl
