//! Tokenizer for MJ source text.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Class,
    Extends,
    IntKw,
    BoolKw,
    Void,
    If,
    Else,
    While,
    Return,
    Throw,
    New,
    Null,
    True,
    False,
    This,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    EqEq,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    /// Canonical source text of the token.
    pub fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Int(v) => v.to_string(),
            Tok::Class => "class".into(),
            Tok::Extends => "extends".into(),
            Tok::IntKw => "int".into(),
            Tok::BoolKw => "bool".into(),
            Tok::Void => "void".into(),
            Tok::If => "if".into(),
            Tok::Else => "else".into(),
            Tok::While => "while".into(),
            Tok::Return => "return".into(),
            Tok::Throw => "throw".into(),
            Tok::New => "new".into(),
            Tok::Null => "null".into(),
            Tok::True => "true".into(),
            Tok::False => "false".into(),
            Tok::This => "this".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Semi => ";".into(),
            Tok::Comma => ",".into(),
            Tok::Dot => ".".into(),
            Tok::Assign => "=".into(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Lt => "<".into(),
            Tok::EqEq => "==".into(),
            Tok::AndAnd => "&&".into(),
            Tok::OrOr => "||".into(),
            Tok::Bang => "!".into(),
            Tok::Eof => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "class" => Tok::Class,
        "extends" => Tok::Extends,
        "int" => Tok::IntKw,
        "bool" => Tok::BoolKw,
        "void" => Tok::Void,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "return" => Tok::Return,
        "throw" => Tok::Throw,
        "new" => Tok::New,
        "null" => Tok::Null,
        "true" => Tok::True,
        "false" => Tok::False,
        "this" => Tok::This,
        _ => return None,
    })
}

/// Splits `source` into tokens. The returned vector always ends with `Tok::Eof`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (start_line, start_col) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(start_line, start_col, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let (tline, tcol) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            out.push(Token { tok, line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits
                .parse::<i64>()
                .map_err(|_| ParseError::new(tline, tcol, format!("integer literal `{digits}` out of range")))?;
            out.push(Token { tok: Tok::Int(value), line: tline, col: tcol });
            continue;
        }

        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('=', _) => (Tok::Assign, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('<', _) => (Tok::Lt, 1),
            ('!', _) => (Tok::Bang, 1),
            _ => return Err(ParseError::new(tline, tcol, format!("unexpected character `{c}`"))),
        };
        for _ in 0..width {
            bump!();
        }
        out.push(Token { tok, line: tline, col: tcol });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Token texts of a single source line, ignoring whitespace and comments.
/// Lines that fail to tokenize in isolation (e.g. inside a block comment) yield `None`.
pub fn line_tokens(line: &str) -> Option<Vec<String>> {
    let toks = tokenize(line).ok()?;
    Some(toks.into_iter().filter(|t| t.tok != Tok::Eof).map(|t| t.tok.text()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("class A {\n  int f;\n}").unwrap();
        assert_eq!(toks[0], Token { tok: Tok::Class, line: 1, col: 1 });
        assert_eq!(toks[3], Token { tok: Tok::IntKw, line: 2, col: 3 });
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn comments_only_shift_lines() {
        let toks = tokenize("// one\n/* two\nthree */ x").unwrap();
        assert_eq!(toks[0], Token { tok: Tok::Ident("x".into()), line: 3, col: 10 });
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a # b").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }

    #[test]
    fn line_tokens_ignore_spacing() {
        assert_eq!(line_tokens("x=1;"), line_tokens("  x  =  1 ; // c"));
    }
}
