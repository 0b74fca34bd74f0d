#include "fjcalc/toml_json.hpp"

#include <sstream>

#include <toml.hpp>

#include "fjcalc/errors.hpp"

namespace fjc {

namespace {

nlohmann::json convert(const toml::node& node) {
    if (auto t = node.as_table()) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = convert(v);
        return j;
    }
    if (auto a = node.as_array()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& v : *a) j.push_back(convert(v));
        return j;
    }
    if (auto s = node.as_string()) return s->get();
    if (auto i = node.as_integer()) return i->get();
    if (auto f = node.as_floating_point()) return f->get();
    if (auto b = node.as_boolean()) return b->get();
    std::ostringstream os;
    node.visit([&](const auto& v) { os << v; });
    return os.str();
}

}  // namespace

nlohmann::json toml_to_json(const std::string& text) {
    try {
        return convert(toml::parse(text));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML line " << e.source().begin.line << ": " << e.description();
        throw ParseError(os.str());
    }
}

}  // namespace fjc
