#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpw {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::vector<std::int64_t> dims;  // empty when not meaningful
    std::optional<std::string> witness;
    std::optional<std::string> note;
};

struct Report {
    std::string command;
    std::uint64_t prime = 0;
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::int64_t elapsed_ms = 0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    CheckResult& add(const std::string& name, bool pass) {
        checks.push_back(CheckResult{name, pass, {}, std::nullopt, std::nullopt});
        return checks.back();
    }

    CheckResult& add(const std::string& name, bool pass, std::vector<std::int64_t> dims) {
        checks.push_back(CheckResult{name, pass, std::move(dims), std::nullopt, std::nullopt});
        return checks.back();
    }

    void absorb(const Report& other, const std::string& prefix = "") {
        for (const auto& c : other.checks) {
            checks.push_back(c);
            if (!prefix.empty()) checks.back().name = prefix + c.name;
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["prime"] = prime;
        j["inputs"] = inputs;
        j["seed"] = seed;
        j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            if (!c.dims.empty()) cj["dims"] = c.dims;
            if (c.witness) cj["witness"] = *c.witness;
            if (c.note) cj["note"] = *c.note;
            j["checks"].push_back(cj);
        }
        j["elapsed_ms"] = elapsed_ms;
        return j;
    }

    std::string to_text() const {
        std::string out;
        out += command + " (p=" + std::to_string(prime);
        for (const auto& i : inputs) out += ", " + i;
        out += ", seed=" + std::to_string(seed) + ")\n";
        for (const auto& c : checks) {
            out += c.pass ? "  PASS " : "  FAIL ";
            out += c.name;
            if (!c.dims.empty()) {
                out += " dims=[";
                for (std::size_t i = 0; i < c.dims.size(); ++i)
                    out += (i ? "," : "") + std::to_string(c.dims[i]);
                out += "]";
            }
            if (c.witness) out += " witness: " + *c.witness;
            if (c.note) out += "\n        " + *c.note;
            out += "\n";
        }
        out += all_pass() ? "  all checks passed\n" : "  CHECKS FAILED\n";
        return out;
    }
};

}  // namespace dpw
