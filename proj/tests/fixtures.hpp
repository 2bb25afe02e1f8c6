#pragma once
// Shared fixtures: the 5-node toy pair, null-model layers, scratch
// directories and a minimal XML well-formedness check for SVG output.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankshift/graph.hpp"

namespace fixture {

/// Nodes "1".."5". In-degree scores are (.2,.0,.6,.4,.8) in T0 and
/// (.2,.4,.6,.0,.8) in T1, giving positions [4,5,2,3,1] and [4,3,2,5,1].
inline std::vector<rankshift::TemporalLayer> toy_layers() {
    using rankshift::NamedEdge;
    std::vector<NamedEdge> t0 = {{"1", "5"}, {"2", "5"}, {"3", "5"}, {"4", "5"}, {"1", "3"},
                                 {"2", "3"}, {"4", "3"}, {"3", "4"}, {"5", "4"}, {"5", "1"}};
    std::vector<NamedEdge> t1 = {{"1", "5"}, {"2", "5"}, {"3", "5"}, {"4", "5"}, {"1", "3"},
                                 {"2", "3"}, {"4", "3"}, {"3", "2"}, {"5", "2"}, {"5", "1"}};
    std::vector<rankshift::Edge> e0, e1;
    auto nodes = rankshift::make_node_set({"1", "2", "3", "4", "5"});
    for (const auto& e : t0) {
        e0.push_back({nodes->index_of(e.src), nodes->index_of(e.dst), e.weight});
    }
    for (const auto& e : t1) {
        e1.push_back({nodes->index_of(e.src), nodes->index_of(e.dst), e.weight});
    }
    std::vector<rankshift::TemporalLayer> out;
    out.emplace_back("T0", nodes, std::move(e0));
    out.emplace_back("T1", nodes, std::move(e1));
    return out;
}

/// `count` layers of independent random graphs over the same n nodes, each
/// edge present with probability p and weight uniform in [1, 100).
inline std::vector<rankshift::TemporalLayer> random_layers(std::size_t n, std::size_t count, double p,
                                                           std::uint64_t seed) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(std::to_string(i));
    }
    auto nodes = rankshift::make_node_set(std::move(ids));
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::uniform_real_distribution<double> w(1.0, 100.0);
    std::vector<rankshift::TemporalLayer> out;
    for (std::size_t l = 0; l < count; ++l) {
        std::vector<rankshift::Edge> edges;
        for (rankshift::NodeIndex i = 0; i < n; ++i) {
            for (rankshift::NodeIndex j = 0; j < n; ++j) {
                if (i != j && coin(rng)) {
                    edges.push_back({i, j, w(rng)});
                }
            }
        }
        out.emplace_back("L" + std::to_string(l), nodes, std::move(edges));
    }
    return out;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rankshift-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Checks tag balance, attribute quoting and a single root element. Good
/// enough for generated SVG: no DTDs, CDATA or entities beyond the basic five.
inline bool well_formed_xml(const std::string& doc, std::string* root = nullptr) {
    std::vector<std::string> stack;
    std::size_t roots = 0;
    std::size_t i = 0;
    while (i < doc.size()) {
        if (doc[i] != '<') {
            if (doc[i] == '&') {
                const auto semi = doc.find(';', i);
                if (semi == std::string::npos) {
                    return false;
                }
                const auto ent = doc.substr(i + 1, semi - i - 1);
                if (ent != "amp" && ent != "lt" && ent != "gt" && ent != "quot" && ent != "apos") {
                    return false;
                }
            } else if (stack.empty() && !std::isspace(static_cast<unsigned char>(doc[i]))) {
                return false;  // text outside the root
            }
            ++i;
            continue;
        }
        const auto close = doc.find('>', i);
        if (close == std::string::npos) {
            return false;
        }
        std::string tag = doc.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.starts_with("?")) {
            if (!tag.ends_with("?")) {
                return false;
            }
            continue;
        }
        if (tag.starts_with("!--")) {
            continue;
        }
        if (tag.starts_with("/")) {
            const auto name = tag.substr(1);
            if (stack.empty() || stack.back() != name) {
                return false;
            }
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.ends_with("/");
        if (self_closing) {
            tag.pop_back();
        }
        const auto name_end = tag.find_first_of(" \t\n");
        const auto name = tag.substr(0, name_end);
        if (name.empty()) {
            return false;
        }
        // Attribute values must be quoted: count quotes.
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) {
            return false;
        }
        if (stack.empty()) {
            ++roots;
            if (root) {
                *root = name;
            }
        }
        if (!self_closing) {
            stack.push_back(name);
        }
    }
    return stack.empty() && roots == 1;
}

}  // namespace fixture
