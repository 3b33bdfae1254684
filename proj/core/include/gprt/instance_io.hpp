#ifndef GPRT_INSTANCE_IO_HPP_
#define GPRT_INSTANCE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "gprt/instance.hpp"

namespace gprt {

// JSON document with sections nodes, travel, trucks, tasks, q and seed.
// Doubles are written in shortest round-trip form, so write/read/write is
// byte-identical.
void write_instance(std::ostream& out, const TerminalInstance& instance);
void write_instance(const std::filesystem::path& path, const TerminalInstance& instance);
// Throws InstanceError on malformed or inconsistent content.
TerminalInstance read_instance(std::istream& in);
TerminalInstance read_instance(const std::filesystem::path& path);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace gprt

#endif  // GPRT_INSTANCE_IO_HPP_
