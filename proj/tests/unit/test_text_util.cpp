#include <doctest.h>

#include "kgpipe/json_io.hpp"
#include "kgpipe/text_util.hpp"

using namespace kgpipe;

TEST_CASE("whitespace tokens split on Unicode spaces") {
  const std::string s = "a\xC2\xA0" "b\xE2\x80\x83" "c  d\n";
  const auto spans = text::whitespace_token_spans(s);
  REQUIRE(spans.size() == 4);
  CHECK(s.substr(spans[1].begin, spans[1].end - spans[1].begin) == "b");
  CHECK(text::whitespace_token_spans("   ").empty());
  CHECK(text::is_unicode_space(0x3000));
  CHECK_FALSE(text::is_unicode_space(U'x'));
}

TEST_CASE("decamelize splits words and acronyms") {
  CHECK(text::decamelize("DataFormat") == "data format");
  CHECK(text::decamelize("CNNModel") == "cnn model");
  CHECK(text::decamelize("Model") == "model");
}

TEST_CASE("normalize_for_compare folds case and whitespace") {
  CHECK(text::normalize_for_compare("  The  Model\tis\nHere ") == text::normalize_for_compare("the model is here"));
}

TEST_CASE("split_lines strips carriage returns") {
  const auto lines = text::split_lines("a\r\nb\nc");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "a");
}

TEST_CASE("sha256 of the empty string") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
