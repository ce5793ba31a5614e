#pragma once

#include <string>
#include <vector>

#include "amn/span.hpp"

namespace amn::dsl_detail {

enum class Tok {
    Ident,   // also carries keywords; the parser matches by text
    Number,  // integer or decimal literal
    String,  // quoted, text stores the unescaped value
    Punct,   // one of { } [ ] ( ) : ; , . = @ % + - * / ! < > and the
             // multi-char forms -> --> .. == != <= >= && ||
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
};

struct LexResult {
    std::vector<Token> tokens; // ends with a Tok::End sentinel
    std::vector<Diagnostic> diagnostics;
};

LexResult lex(const std::string& text, const std::string& filename);

} // namespace amn::dsl_detail
