#ifndef FGAN_IOUTIL_HPP
#define FGAN_IOUTIL_HPP

#include <string>

namespace fgan {

std::string read_text_file(const std::string& path);
/// Writes atomically enough for this project's needs: truncate + write + close,
/// throwing std::runtime_error on any stream failure.
void write_text_file(const std::string& path, const std::string& content);
bool path_exists(const std::string& path);
void ensure_dir(const std::string& path);

}  // namespace fgan

#endif
