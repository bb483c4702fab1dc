#pragma once

#include <string>

namespace coaeval {

/// Converters from the upstream corpus shapes to the normalized instance
/// format, one per supported corpus. Each returns the number of instances
/// written. Expected upstream layouts are documented in the README.
std::size_t convert_summeval(const std::string& in_path, const std::string& out_path);
std::size_t convert_topicalchat(const std::string& in_path, const std::string& out_path);
std::size_t convert_openmeva(const std::string& in_path, const std::string& out_path);
std::size_t convert_bagel(const std::string& in_path, const std::string& out_path);
std::size_t convert_iwslt14(const std::string& in_path, const std::string& out_path);

/// Dispatch by corpus name (summeval | topicalchat | openmeva | bagel | iwslt14).
std::size_t convert_corpus(const std::string& corpus, const std::string& in_path,
                           const std::string& out_path);

}  // namespace coaeval
