#include "scatlab/jsonutil.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

namespace scatlab {

namespace {

void dump_rec(const nlohmann::json& j, std::string& out) {
    using value_t = nlohmann::json::value_t;
    switch (j.type()) {
        case value_t::object: {
            // std::map iteration is already key-sorted
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ':';
                dump_rec(it.value(), out);
            }
            out += '}';
            break;
        }
        case value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ',';
                first = false;
                dump_rec(el, out);
            }
            out += ']';
            break;
        }
        case value_t::number_float: {
            char buf[64];
            const double v = j.get<double>();
            if (std::isfinite(v))
                std::snprintf(buf, sizeof buf, "%.17g", v);
            else
                std::snprintf(buf, sizeof buf, "null");
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

} // namespace

std::string canonical_dump(const nlohmann::json& j) {
    std::string out;
    dump_rec(j, out);
    return out;
}

} // namespace scatlab
