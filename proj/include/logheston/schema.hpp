#pragma once

// Validator for the small JSON-Schema subset used by the shipped result
// schemas: type (string or alternatives list), required, properties, items,
// enum, const, minimum/maximum.  Returns human-readable violations rather
// than throwing; an empty list means the document conforms.

#include <string>
#include <vector>

#include "json.hpp"

namespace logheston {

namespace detail {

inline bool type_matches(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

inline void validate_node(const nlohmann::json& v, const nlohmann::json& schema,
                          const std::string& path,
                          std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(v, t.get<std::string>());
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (type_matches(v, alt.get<std::string>())) { ok = true; break; }
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch, expected " + t.dump() +
                             ", got " + std::string(v.type_name()));
            return;  // deeper checks would only cascade
        }
    }
    if (schema.contains("const") && v != schema["const"])
        errors.push_back(path + ": expected constant " + schema["const"].dump());
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema["enum"])
            if (v == e) { ok = true; break; }
        if (!ok) errors.push_back(path + ": value not in enum " + schema["enum"].dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (schema.contains("minimum") && x < schema["minimum"].get<double>())
            errors.push_back(path + ": below minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && x > schema["maximum"].get<double>())
            errors.push_back(path + ": above maximum " + schema["maximum"].dump());
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"]) {
                const std::string k = key.get<std::string>();
                if (!v.contains(k))
                    errors.push_back(path + ": missing required member '" + k + "'");
            }
        if (schema.contains("properties"))
            for (auto it = schema["properties"].begin();
                 it != schema["properties"].end(); ++it)
                if (v.contains(it.key()))
                    validate_node(v[it.key()], it.value(), path + "/" + it.key(),
                                  errors);
    }
    if (v.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i)
            validate_node(v[i], schema["items"], path + "/" + std::to_string(i),
                          errors);
    }
}

}  // namespace detail

inline std::vector<std::string> validate_schema(const nlohmann::json& doc,
                                                const nlohmann::json& schema) {
    std::vector<std::string> errors;
    detail::validate_node(doc, schema, "", errors);
    return errors;
}

}  // namespace logheston
