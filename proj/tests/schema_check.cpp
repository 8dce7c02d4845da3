// Validates a JSON document (stdin) against a schema file (argv[1]).
// Supports the subset of JSON Schema used in docs/schema: type, properties,
// required, items, enum, and $ref into #/definitions.
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

const json* root_schema = nullptr;

bool type_matches(const std::string& t, const json& doc) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (t == "number") return doc.is_number();
    return false;
}

bool validate(const json& schema, const json& doc, const std::string& path) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"];
        const std::string prefix = "#/definitions/";
        if (ref.rfind(prefix, 0) != 0) {
            std::cerr << path << ": unsupported $ref " << ref << "\n";
            return false;
        }
        return validate((*root_schema)["definitions"][ref.substr(prefix.size())], doc, path);
    }
    if (schema.contains("type") && !type_matches(schema["type"], doc)) {
        std::cerr << path << ": expected type " << schema["type"] << "\n";
        return false;
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& v : schema["enum"]) hit = hit || v == doc;
        if (!hit) {
            std::cerr << path << ": value not in enum\n";
            return false;
        }
    }
    bool ok = true;
    if (schema.contains("required"))
        for (const auto& key : schema["required"])
            if (!doc.contains(key.get<std::string>())) {
                std::cerr << path << ": missing required key " << key << "\n";
                ok = false;
            }
    if (schema.contains("properties"))
        for (const auto& [key, sub] : schema["properties"].items())
            if (doc.contains(key)) ok = validate(sub, doc[key], path + "/" + key) && ok;
    if (schema.contains("items") && doc.is_array()) {
        std::size_t i = 0;
        for (const auto& el : doc)
            ok = validate(schema["items"], el, path + "/" + std::to_string(i++)) && ok;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: schema_check <schema.json> < document.json\n";
        return 2;
    }
    std::ifstream f(argv[1]);
    if (!f) {
        std::cerr << "cannot open schema " << argv[1] << "\n";
        return 2;
    }
    json schema = json::parse(f);
    root_schema = &schema;
    json doc = json::parse(std::cin);
    if (!validate(schema, doc, "")) return 1;
    std::cout << "valid\n";
    return 0;
}
