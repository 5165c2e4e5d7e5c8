#pragma once

// Text formats shared by the tools: layout records (one JSON object per
// line) and SVM model files. Doubles are written in shortest round-trip
// form, so reading a file back reproduces every value bit for bit.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lemsched/channel_sim.hpp"
#include "lemsched/kernel_svm.hpp"

namespace lemsched {

inline constexpr int kModelSchemaVersion = 1;

/// {"index":..,"field_length":..,"K":..,"tx":[[x,y],..],"rx":[[x,y],..]}
std::string layout_to_jsonl(const Layout& layout);
/// Fields not stored in the record (frequencies, powers, ...) come from `base`.
Layout layout_from_jsonl(std::string_view line, const SimConfig& base);

void write_layouts(const std::filesystem::path& path, const std::vector<Layout>& layouts);
std::vector<Layout> read_layouts(const std::filesystem::path& path, const SimConfig& base);

std::string model_to_string(const SvmModel& model);
SvmModel model_from_string(std::string_view text);

void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

std::string to_string(KernelExponent e);
KernelExponent kernel_exponent_from_string(const std::string& s);

/// Whole-file helpers; throw IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lemsched
