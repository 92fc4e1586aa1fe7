#pragma once

// Platform descriptor files. One INI section per platform, section name is
// the platform name:
//
//   [E5-2650Lv3]
//   kind = CPU
//   total_cores = 24
//   peak_gflops = 115.2
//   peak_bandwidth = 68
//   mem_controllers = 2
//   frequencies = 1.2 1.3 1.4 1.5 1.6 1.7 1.8 1.81
//   static_power = 20
//
// GPU sections additionally carry `workgroup_sizes`.

#include "reoh/io.hpp"
#include "reoh/platform.hpp"

#include <filesystem>

namespace reoh {

inline System load_system(const std::filesystem::path& path) {
    const auto tree = io::read_key_value(path);
    System system;
    for (const auto& [name, section] : tree) {
        if (section.empty()) throw ParseError(path.string() + ": key '" + name + "' outside a platform section");
        const std::string where = path.string() + " [" + name + "]";
        auto required = [&](const char* key) -> std::string {
            auto v = section.get_optional<std::string>(key);
            if (!v) throw ParseError(where + ": missing key '" + key + "'");
            return io::trim(*v);
        };
        PlatformSpec spec;
        spec.name = name;
        try {
            spec.kind = parse_platform_kind(required("kind"));
        } catch (const InvalidArgument& e) {
            throw ParseError(where + ": " + e.what());
        }
        spec.total_cores = static_cast<int>(io::parse_int(required("total_cores"), where + " total_cores"));
        spec.peak_gflops = io::parse_double(required("peak_gflops"), where + " peak_gflops");
        spec.peak_bandwidth = io::parse_double(required("peak_bandwidth"), where + " peak_bandwidth");
        spec.mem_controllers = static_cast<int>(io::parse_int(required("mem_controllers"), where + " mem_controllers"));
        spec.frequencies = io::parse_double_list(required("frequencies"), where + " frequencies");
        spec.static_power = io::parse_double(section.get<std::string>("static_power", "0"), where + " static_power");
        if (auto wg = section.get_optional<std::string>("workgroup_sizes")) {
            for (double w : io::parse_double_list(*wg, where + " workgroup_sizes")) {
                if (w != std::floor(w)) throw ParseError(where + ": workgroup sizes must be integers");
                spec.workgroup_sizes.push_back(static_cast<int>(w));
            }
        }
        system.platforms.push_back(std::move(spec));
    }
    try {
        system.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return system;
}

inline void save_system(const std::filesystem::path& path, const System& system) {
    io::KeyValueTree tree;
    for (const auto& spec : system.platforms) {
        io::KeyValueTree s;
        s.put("kind", std::string(to_string(spec.kind)));
        s.put("total_cores", spec.total_cores);
        s.put("peak_gflops", io::format_double(spec.peak_gflops));
        s.put("peak_bandwidth", io::format_double(spec.peak_bandwidth));
        s.put("mem_controllers", spec.mem_controllers);
        s.put("frequencies", io::join(spec.frequencies));
        s.put("static_power", io::format_double(spec.static_power));
        if (!spec.workgroup_sizes.empty()) s.put("workgroup_sizes", io::join(spec.workgroup_sizes));
        tree.push_back({spec.name, s});
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    io::write_key_value(path, tree);
}

} // namespace reoh
