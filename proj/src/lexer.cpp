#include "lexer.hpp"

namespace amn::dsl_detail {
namespace {

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

bool digit(char c) { return c >= '0' && c <= '9'; }

} // namespace

LexResult lex(const std::string& text, const std::string& filename) {
    LexResult out;
    std::size_t i = 0;
    int line = 1, col = 1;

    auto pos = [&]() { return SourcePos{line, col}; };
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok kind, std::string t, SourcePos start) {
        Token tok;
        tok.kind = kind;
        tok.text = std::move(t);
        tok.span = SourceSpan{filename, start, pos()};
        out.tokens.push_back(std::move(tok));
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        SourcePos start = pos();
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            std::string t = text.substr(i, j - i);
            advance(j - i);
            push(Tok::Ident, std::move(t), start);
            continue;
        }
        if (digit(c)) {
            std::size_t j = i;
            while (j < text.size() && digit(text[j])) ++j;
            bool bad = false;
            if (j < text.size() && text[j] == '.' && j + 1 < text.size() && digit(text[j + 1])) {
                ++j;
                while (j < text.size() && digit(text[j])) ++j;
            }
            if (j < text.size() && ident_start(text[j])) bad = true;
            std::string t = text.substr(i, j - i);
            advance(j - i);
            if (bad) {
                out.diagnostics.push_back(Diagnostic{
                    "AMN-SYN-03", Severity::Error,
                    "malformed number \"" + t + "\"",
                    SourceSpan{filename, start, pos()}, {}});
                while (i < text.size() && ident_char(text[i])) advance(1);
                continue;
            }
            push(Tok::Number, std::move(t), start);
            continue;
        }
        if (c == '"') {
            advance(1);
            std::string val;
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                if (d == '"') {
                    advance(1);
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\' && i + 1 < text.size()) {
                    char e = text[i + 1];
                    if (e == '"' || e == '\\') {
                        val.push_back(e);
                        advance(2);
                        continue;
                    }
                }
                val.push_back(d);
                advance(1);
            }
            if (!closed) {
                out.diagnostics.push_back(Diagnostic{
                    "AMN-SYN-02", Severity::Error, "unterminated string literal",
                    SourceSpan{filename, start, pos()}, {}});
            }
            push(Tok::String, std::move(val), start);
            continue;
        }

        // Multi-character punctuation, longest first.
        auto starts = [&](const char* s) {
            std::size_t n = std::char_traits<char>::length(s);
            return text.compare(i, n, s) == 0;
        };
        const char* multi[] = {"-->", "->", "..", "==", "!=", "<=", ">=", "&&", "||"};
        bool matched = false;
        for (const char* mc : multi) {
            if (starts(mc)) {
                std::size_t n = std::char_traits<char>::length(mc);
                advance(n);
                push(Tok::Punct, mc, start);
                matched = true;
                break;
            }
        }
        if (matched) continue;

        const std::string singles = "{}[]():;,.=@%+-*/!<>";
        if (singles.find(c) != std::string::npos) {
            advance(1);
            push(Tok::Punct, std::string(1, c), start);
            continue;
        }

        out.diagnostics.push_back(Diagnostic{
            "AMN-SYN-01", Severity::Error,
            "unexpected character '" + std::string(1, c) + "'",
            SourceSpan{filename, start, SourcePos{line, col + 1}}, {}});
        advance(1);
    }

    Token end;
    end.kind = Tok::End;
    end.span = SourceSpan{filename, pos(), pos()};
    out.tokens.push_back(std::move(end));
    return out;
}

} // namespace amn::dsl_detail
