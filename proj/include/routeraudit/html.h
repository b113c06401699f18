#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace routeraudit::html {

struct Attribute {
    std::string name;   // lowercase
    std::string value;  // entity-decoded
};

struct Token {
    enum class Kind { Doctype, StartTag, EndTag, Text, Comment };
    Kind kind = Kind::Text;
    std::string name;  // lowercase tag name for tags
    std::vector<Attribute> attributes;
    std::string text;  // decoded text, raw comment body, or raw-text element content
    bool self_closing = false;

    std::optional<std::string> attr(std::string_view name) const;
    bool has_attr(std::string_view name) const { return attr(name).has_value(); }
};

// Lenient HTML5-style tokenizer. Content of script/style/textarea/title is
// kept verbatim as a single Text token.
std::vector<Token> tokenize(std::string_view document);

std::string decode_entities(std::string_view text);

// Escapes & < > " ' so the result is safe in text and quoted-attribute
// context alike.
std::string escape(std::string_view text);

bool is_void_element(std::string_view name);

// Every non-void element is closed in order and nothing is closed twice.
// `problem` receives the first violation.
bool is_well_formed(std::string_view document, std::string* problem = nullptr);

struct FormInput {
    std::string tag;   // input, select, textarea, button
    std::string type;  // lowercase; "text" when absent on <input>
    std::string name;
    std::string value;
};

struct Form {
    std::string action;
    std::string method;  // uppercase, GET when absent
    std::vector<FormInput> inputs;

    std::vector<FormInput> hidden_inputs() const;
    bool has_input_named(std::string_view name) const;
    bool has_password_input() const;
};

std::vector<Form> parse_forms(std::string_view document);

}  // namespace routeraudit::html
