#pragma once

#include <string_view>

// Text resources compiled in from resources/ at configure time.
namespace afeng::resources {

std::string_view stopwords_txt();
std::string_view affect_tables_json();
std::string_view console_html();

}  // namespace afeng::resources
