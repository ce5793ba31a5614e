#include "dot_check.hpp"

#include <cctype>
#include <cstddef>
#include <sstream>
#include <vector>

namespace amn_test {
namespace {

enum class Tok { Word, String, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Equals, Arrow, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
};

struct Lexed {
    std::vector<Token> tokens;
    bool ok = true;
    std::string why;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

Lexed lex(const std::string& text) {
    Lexed out;
    std::size_t i = 0;
    std::size_t line = 1;
    auto fail = [&](const std::string& msg) {
        out.ok = false;
        std::ostringstream ss;
        ss << "line " << line << ": " << msg;
        out.why = ss.str();
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (c == '"') {
            std::size_t start = ++i;
            std::string value;
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                if (d == '\n') break;
                if (d == '\\') {
                    if (i + 1 >= text.size()) break;
                    char e = text[i + 1];
                    if (e != '"' && e != '\\' && e != 'n' && e != 'l' && e != 'r') {
                        fail(std::string("invalid escape \\") + e + " in string");
                        return out;
                    }
                    value.push_back(d);
                    value.push_back(e);
                    i += 2;
                    continue;
                }
                if (d == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                value.push_back(d);
                ++i;
            }
            if (!closed) {
                fail("unterminated string");
                return out;
            }
            (void)start;
            out.tokens.push_back({Tok::String, value, line});
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.tokens.push_back({Tok::Arrow, "->", line});
            i += 2;
            continue;
        }
        if (word_char(c) || (c == '-' && i + 1 < text.size() && word_char(text[i + 1]))) {
            std::size_t start = i;
            if (c == '-') ++i;
            while (i < text.size() && word_char(text[i])) ++i;
            out.tokens.push_back({Tok::Word, text.substr(start, i - start), line});
            continue;
        }
        Tok kind;
        switch (c) {
            case '{': kind = Tok::LBrace; break;
            case '}': kind = Tok::RBrace; break;
            case '[': kind = Tok::LBracket; break;
            case ']': kind = Tok::RBracket; break;
            case ';': kind = Tok::Semi; break;
            case ',': kind = Tok::Comma; break;
            case '=': kind = Tok::Equals; break;
            default:
                fail(std::string("unexpected character '") + c + "'");
                return out;
        }
        out.tokens.push_back({kind, std::string(1, c), line});
        ++i;
    }
    out.tokens.push_back({Tok::End, "", line});
    return out;
}

struct Checker {
    const std::vector<Token>& tokens;
    std::size_t pos = 0;
    DotStats stats;
    std::string why;

    explicit Checker(const std::vector<Token>& t) : tokens(t) {}

    const Token& peek() const { return tokens[pos]; }

    bool fail(const std::string& msg) {
        std::ostringstream ss;
        ss << "line " << peek().line << ": " << msg;
        if (!peek().text.empty()) ss << " (near \"" << peek().text << "\")";
        why = ss.str();
        return false;
    }

    bool eat(Tok kind, const char* what) {
        if (peek().kind != kind) return fail(std::string("expected ") + what);
        ++pos;
        return true;
    }

    bool name(const char* what) {
        if (peek().kind != Tok::Word && peek().kind != Tok::String)
            return fail(std::string("expected ") + what);
        ++pos;
        return true;
    }

    // [ key = value, key = value, ... ]
    bool attr_list() {
        if (!eat(Tok::LBracket, "'['")) return false;
        if (peek().kind == Tok::RBracket) {
            ++pos;
            return true;
        }
        for (;;) {
            if (peek().kind != Tok::Word) return fail("expected attribute name");
            ++pos;
            if (!eat(Tok::Equals, "'=' after attribute name")) return false;
            if (!name("attribute value")) return false;
            if (peek().kind == Tok::Comma) {
                ++pos;
                continue;
            }
            break;
        }
        return eat(Tok::RBracket, "']' closing attribute list");
    }

    bool statement() {
        if (peek().kind == Tok::Word && peek().text == "subgraph") {
            ++pos;
            if (!name("subgraph name")) return false;
            ++stats.subgraphs;
            return block();
        }
        if (peek().kind == Tok::Word && (peek().text == "node" || peek().text == "edge")) {
            ++pos;
            if (!attr_list()) return false;
            return eat(Tok::Semi, "';' after default attributes");
        }
        if (peek().kind != Tok::Word && peek().kind != Tok::String)
            return fail("expected a statement");
        bool was_word = peek().kind == Tok::Word;
        ++pos;
        if (was_word && peek().kind == Tok::Equals) {
            ++pos;
            if (!name("attribute value")) return false;
            return eat(Tok::Semi, "';' after attribute assignment");
        }
        if (peek().kind == Tok::Arrow) {
            ++pos;
            if (!name("edge target")) return false;
            ++stats.edges;
            if (peek().kind == Tok::LBracket && !attr_list()) return false;
            return eat(Tok::Semi, "';' after edge");
        }
        ++stats.nodes;
        if (peek().kind == Tok::LBracket && !attr_list()) return false;
        return eat(Tok::Semi, "';' after node");
    }

    bool block() {
        if (!eat(Tok::LBrace, "'{'")) return false;
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) return fail("unexpected end of input inside block");
            if (!statement()) return false;
        }
        ++pos;
        return true;
    }

    bool run() {
        if (peek().kind != Tok::Word || peek().text != "digraph")
            return fail("expected 'digraph' header");
        ++pos;
        if (!name("graph name")) return false;
        if (!block()) return false;
        if (peek().kind != Tok::End) return fail("trailing content after closing '}'");
        return true;
    }
};

} // namespace

bool check_dot(const std::string& text, DotStats* stats, std::string* why) {
    Lexed lx = lex(text);
    if (!lx.ok) {
        if (why) *why = lx.why;
        return false;
    }
    Checker ck(lx.tokens);
    bool ok = ck.run();
    if (ok && stats) *stats = ck.stats;
    if (!ok && why) *why = ck.why;
    return ok;
}

} // namespace amn_test
