use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Source text is kept so integer positions can be told apart from reals.
    Number { text: String, value: f64 },
    Str(String),
    Eq,
    Semi,
    Arrow,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number { text, .. } => format!("number `{text}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eq => "`=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits the document into tokens. Always ends with `Eof`; lexical errors are
/// collected and the offending character skipped.
pub(crate) fn tokenize(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut end = SourceSpan::new(1, 1, 0);

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let start = |len: u32| SourceSpan::new(line, column, len);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }

        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(|&c| is_ident_continue(c)) {
                s.push(c);
                cur.bump();
            }
            Some(Tok::Ident(s))
        } else if c.is_ascii_digit() || c == '.' {
            match lex_number(&mut cur) {
                Ok(t) => Some(t),
                Err(msg) => {
                    errors.push(ParseError::new(
                        ParseErrorKind::Lexical,
                        start(cur.column.saturating_sub(column).max(1)),
                        msg,
                    ));
                    None
                }
            }
        } else if c == '"' {
            cur.bump();
            match lex_string(&mut cur) {
                Ok(s) => Some(Tok::Str(s)),
                Err(msg) => {
                    errors.push(ParseError::new(ParseErrorKind::Lexical, start(1), msg));
                    None
                }
            }
        } else {
            cur.bump();
            match c {
                '=' => Some(Tok::Eq),
                ';' => Some(Tok::Semi),
                '+' => Some(Tok::Plus),
                '*' => Some(Tok::Star),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '\u{2212}' => Some(Tok::Minus),
                '-' => {
                    if cur.peek() == Some('>') {
                        cur.bump();
                        Some(Tok::Arrow)
                    } else {
                        Some(Tok::Minus)
                    }
                }
                other => {
                    errors.push(ParseError::new(
                        ParseErrorKind::Lexical,
                        start(1),
                        format!("unexpected character {other:?}"),
                    ));
                    None
                }
            }
        };

        if let Some(tok) = tok {
            let len = if cur.line == line {
                cur.column - column
            } else {
                1
            };
            let span = SourceSpan::new(line, column, len);
            end = SourceSpan::new(line, column + len.saturating_sub(1), 0);
            tokens.push(Token { tok, span });
        }
    }

    tokens.push(Token {
        tok: Tok::Eof,
        span: end,
    });
    (tokens, errors)
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<Tok, String> {
    let mut text = String::new();
    let mut digits = 0;
    while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
        text.push(c);
        digits += 1;
        cur.bump();
    }
    if cur.peek() == Some('.') {
        text.push('.');
        cur.bump();
        while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
            text.push(c);
            digits += 1;
            cur.bump();
        }
    }
    if digits == 0 {
        return Err(format!("malformed number `{text}`"));
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        text.push('e');
        cur.bump();
        if let Some(sign) = cur.peek().filter(|&c| c == '+' || c == '-') {
            text.push(sign);
            cur.bump();
        }
        let mut exp_digits = 0;
        while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
            text.push(c);
            exp_digits += 1;
            cur.bump();
        }
        if exp_digits == 0 {
            return Err(format!("malformed exponent in `{text}`"));
        }
    }
    if cur.peek().is_some_and(is_ident_start) {
        return Err(format!("malformed number `{text}` followed by a letter"));
    }
    let value: f64 = text
        .parse()
        .map_err(|_| format!("malformed number `{text}`"))?;
    if !value.is_finite() {
        return Err(format!("number `{text}` out of range"));
    }
    Ok(Tok::Number { text, value })
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<String, String> {
    let mut s = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => return Err("unterminated string".into()),
            Some('"') => {
                cur.bump();
                return Ok(s);
            }
            Some('\\') => {
                cur.bump();
                let esc = match cur.peek() {
                    Some('"') => '"',
                    Some('\\') => '\\',
                    Some('n') => '\n',
                    Some('t') => '\t',
                    other => return Err(format!("invalid escape {other:?} in string")),
                };
                cur.bump();
                s.push(esc);
            }
            Some(c) => {
                cur.bump();
                s.push(c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        let (toks, errs) = tokenize(text);
        assert!(errs.is_empty(), "{errs:?}");
        toks.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrow_and_minus() {
        assert_eq!(
            kinds("1 -> 2 1 - C"),
            [
                Tok::Number { text: "1".into(), value: 1.0 },
                Tok::Arrow,
                Tok::Number { text: "2".into(), value: 2.0 },
                Tok::Number { text: "1".into(), value: 1.0 },
                Tok::Minus,
                Tok::Ident("C".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn exponent_numbers() {
        let toks = kinds("3.3e-6 1E+2 .5");
        assert!(matches!(toks[0], Tok::Number { value, .. } if value == 3.3e-6));
        assert!(matches!(toks[1], Tok::Number { value, .. } if value == 100.0));
        assert!(matches!(toks[2], Tok::Number { value, .. } if value == 0.5));
    }

    #[test]
    fn comments_and_spans() {
        let (toks, _) = tokenize("# comment\n  param X");
        assert_eq!(toks[0].span, SourceSpan::new(2, 3, 5));
        assert_eq!(toks[1].span, SourceSpan::new(2, 9, 1));
    }

    #[test]
    fn lexical_errors_collected() {
        let (_, errs) = tokenize("param @ = 1e;");
        assert_eq!(errs.len(), 2);
        assert!(errs.iter().all(|e| e.kind == ParseErrorKind::Lexical));
    }

    #[test]
    fn unicode_minus() {
        assert_eq!(kinds("1 \u{2212} C")[1], Tok::Minus);
    }
}
