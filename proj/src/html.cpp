#include "routeraudit/html.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>

namespace routeraudit::html {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

struct NamedEntity {
    std::string_view name;
    std::uint32_t code_point;
};

constexpr NamedEntity kEntities[] = {
    {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''}, {"nbsp", 0xA0},
};

bool is_raw_text(std::string_view name) {
    return name == "script" || name == "style" || name == "textarea" || name == "title";
}

class Tokenizer {
public:
    explicit Tokenizer(std::string_view doc) : doc_(doc) {}

    std::vector<Token> run() {
        std::string text;
        while (pos_ < doc_.size()) {
            if (doc_[pos_] == '<' && starts_markup()) {
                flush_text(text);
                read_markup();
            } else {
                text += doc_[pos_++];
            }
        }
        flush_text(text);
        return std::move(tokens_);
    }

private:
    bool starts_markup() const {
        if (pos_ + 1 >= doc_.size()) return false;
        char next = doc_[pos_ + 1];
        return std::isalpha(static_cast<unsigned char>(next)) || next == '/' || next == '!';
    }

    void flush_text(std::string& text) {
        if (text.empty()) return;
        Token token;
        token.kind = Token::Kind::Text;
        token.text = decode_entities(text);
        tokens_.push_back(std::move(token));
        text.clear();
    }

    void read_markup() {
        if (doc_.compare(pos_, 4, "<!--") == 0) {
            auto end = doc_.find("-->", pos_ + 4);
            Token token;
            token.kind = Token::Kind::Comment;
            token.text = std::string(doc_.substr(pos_ + 4, end == std::string_view::npos ? std::string_view::npos
                                                                                         : end - pos_ - 4));
            pos_ = end == std::string_view::npos ? doc_.size() : end + 3;
            tokens_.push_back(std::move(token));
            return;
        }
        if (doc_[pos_ + 1] == '!') {
            auto end = doc_.find('>', pos_);
            Token token;
            token.kind = Token::Kind::Doctype;
            token.text = std::string(doc_.substr(pos_ + 2, end == std::string_view::npos ? std::string_view::npos
                                                                                        : end - pos_ - 2));
            pos_ = end == std::string_view::npos ? doc_.size() : end + 1;
            tokens_.push_back(std::move(token));
            return;
        }
        bool closing = doc_[pos_ + 1] == '/';
        pos_ += closing ? 2 : 1;
        Token token;
        token.kind = closing ? Token::Kind::EndTag : Token::Kind::StartTag;
        std::size_t start = pos_;
        while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>' && doc_[pos_] != '/') ++pos_;
        token.name = lower(doc_.substr(start, pos_ - start));
        read_attributes(token);
        if (token.kind == Token::Kind::StartTag && is_raw_text(token.name) && !token.self_closing) {
            std::string closer = "</" + token.name;
            std::size_t end = pos_;
            while (true) {
                end = find_ci(closer, end);
                if (end == std::string_view::npos) break;
                std::size_t after = end + closer.size();
                if (after >= doc_.size() || is_space(doc_[after]) || doc_[after] == '>' || doc_[after] == '/') break;
                ++end;
            }
            std::string_view body = doc_.substr(pos_, end == std::string_view::npos ? std::string_view::npos
                                                                                    : end - pos_);
            tokens_.push_back(std::move(token));
            Token content;
            content.kind = Token::Kind::Text;
            bool escapable = tokens_.back().name == "textarea" || tokens_.back().name == "title";
            content.text = escapable ? decode_entities(body) : std::string(body);
            if (!content.text.empty()) tokens_.push_back(std::move(content));
            pos_ = end == std::string_view::npos ? doc_.size() : end;
            return;
        }
        tokens_.push_back(std::move(token));
    }

    std::size_t find_ci(std::string_view needle, std::size_t from) const {
        for (std::size_t i = from; i + needle.size() <= doc_.size(); ++i) {
            bool match = true;
            for (std::size_t j = 0; j < needle.size() && match; ++j) {
                match = std::tolower(static_cast<unsigned char>(doc_[i + j])) == needle[j];
            }
            if (match) return i;
        }
        return std::string_view::npos;
    }

    void read_attributes(Token& token) {
        while (pos_ < doc_.size()) {
            while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
            if (pos_ >= doc_.size()) return;
            if (doc_[pos_] == '>') {
                ++pos_;
                return;
            }
            if (doc_[pos_] == '/') {
                ++pos_;
                if (pos_ < doc_.size() && doc_[pos_] == '>') {
                    token.self_closing = true;
                    ++pos_;
                    return;
                }
                continue;
            }
            std::size_t start = pos_;
            while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>' && doc_[pos_] != '=' &&
                   !(doc_[pos_] == '/' && pos_ + 1 < doc_.size() && doc_[pos_ + 1] == '>')) {
                ++pos_;
            }
            Attribute attribute;
            attribute.name = lower(doc_.substr(start, pos_ - start));
            while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
            if (pos_ < doc_.size() && doc_[pos_] == '=') {
                ++pos_;
                while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
                if (pos_ < doc_.size() && (doc_[pos_] == '"' || doc_[pos_] == '\'')) {
                    char quote = doc_[pos_++];
                    auto end = doc_.find(quote, pos_);
                    if (end == std::string_view::npos) end = doc_.size();
                    attribute.value = decode_entities(doc_.substr(pos_, end - pos_));
                    pos_ = std::min(end + 1, doc_.size());
                } else {
                    std::size_t vstart = pos_;
                    while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>') ++pos_;
                    attribute.value = decode_entities(doc_.substr(vstart, pos_ - vstart));
                }
            }
            if (!attribute.name.empty()) token.attributes.push_back(std::move(attribute));
        }
    }

    std::string_view doc_;
    std::size_t pos_ = 0;
    std::vector<Token> tokens_;
};

}  // namespace

std::optional<std::string> Token::attr(std::string_view attr_name) const {
    for (const auto& attribute : attributes) {
        if (attribute.name == attr_name) return attribute.value;
    }
    return std::nullopt;
}

std::vector<Token> tokenize(std::string_view document) { return Tokenizer(document).run(); }

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out += text[i++];
            continue;
        }
        auto semi = text.find(';', i);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += text[i++];
            continue;
        }
        std::string_view body = text.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (!body.empty() && body[0] == '#') {
            bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
            std::string_view digits = body.substr(hex ? 2 : 1);
            std::uint32_t cp = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
                append_utf8(out, cp);
                decoded = true;
            }
        } else {
            for (const auto& entity : kEntities) {
                if (entity.name == body) {
                    append_utf8(out, entity.code_point);
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out += text[i++];
        }
    }
    return out;
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 16);
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

bool is_void_element(std::string_view name) {
    static constexpr std::string_view kVoid[] = {"area", "base", "br", "col", "embed", "hr", "img",
                                                 "input", "link", "meta", "source", "track", "wbr"};
    return std::find(std::begin(kVoid), std::end(kVoid), name) != std::end(kVoid);
}

bool is_well_formed(std::string_view document, std::string* problem) {
    auto report = [&](std::string why) {
        if (problem) *problem = std::move(why);
        return false;
    };
    std::vector<std::string> open;
    for (const auto& token : tokenize(document)) {
        if (token.kind == Token::Kind::StartTag) {
            if (token.name.empty()) return report("empty tag name");
            if (!is_void_element(token.name) && !token.self_closing) open.push_back(token.name);
        } else if (token.kind == Token::Kind::EndTag) {
            if (is_void_element(token.name)) return report("end tag for void element <" + token.name + ">");
            if (open.empty() || open.back() != token.name) {
                return report("unexpected </" + token.name + ">" +
                              (open.empty() ? std::string() : " while <" + open.back() + "> is open"));
            }
            open.pop_back();
        }
    }
    if (!open.empty()) return report("unclosed <" + open.back() + ">");
    return true;
}

std::vector<FormInput> Form::hidden_inputs() const {
    std::vector<FormInput> out;
    std::copy_if(inputs.begin(), inputs.end(), std::back_inserter(out),
                 [](const FormInput& input) { return input.tag == "input" && input.type == "hidden"; });
    return out;
}

bool Form::has_input_named(std::string_view input_name) const {
    return std::any_of(inputs.begin(), inputs.end(), [&](const FormInput& input) { return input.name == input_name; });
}

bool Form::has_password_input() const {
    return std::any_of(inputs.begin(), inputs.end(),
                       [](const FormInput& input) { return input.tag == "input" && input.type == "password"; });
}

std::vector<Form> parse_forms(std::string_view document) {
    std::vector<Form> forms;
    bool in_form = false;
    auto tokens = tokenize(document);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& token = tokens[i];
        if (token.kind == Token::Kind::StartTag && token.name == "form") {
            Form form;
            form.action = token.attr("action").value_or("");
            std::string method = token.attr("method").value_or("GET");
            std::transform(method.begin(), method.end(), method.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            form.method = method.empty() ? "GET" : method;
            forms.push_back(std::move(form));
            in_form = true;
        } else if (token.kind == Token::Kind::EndTag && token.name == "form") {
            in_form = false;
        } else if (in_form && token.kind == Token::Kind::StartTag &&
                   (token.name == "input" || token.name == "select" || token.name == "textarea" ||
                    token.name == "button")) {
            FormInput input;
            input.tag = token.name;
            input.type = lower(token.attr("type").value_or(token.name == "input" ? "text" : ""));
            input.name = token.attr("name").value_or("");
            input.value = token.attr("value").value_or("");
            if (token.name == "textarea" && i + 1 < tokens.size() && tokens[i + 1].kind == Token::Kind::Text) {
                input.value = tokens[i + 1].text;
            }
            forms.back().inputs.push_back(std::move(input));
        }
    }
    return forms;
}

}  // namespace routeraudit::html
