use super::ast::Span;
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Number(f64),
    Str(String),
    Ident(String),
    Keyword(&'static str),
    /// Punctuation and symbolic operators.
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: [&str; 19] =
    ["==", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]", ",", ";", "=", "<", ">", "+", "-", "*", "/"];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
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
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| ParseError::new(span, "malformed number"))?;
            if !value.is_finite() {
                return Err(ParseError::new(span, "number literal out of range"));
            }
            out.push(Token { tok: Tok::Number(value), span });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match super::ast::KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, span });
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(span, "unterminated string literal"));
                }
                match chars[i] {
                    '"' => {
                        bump!();
                        break;
                    }
                    '\\' => {
                        let esc_span = Span::new(line, col);
                        bump!();
                        let Some(&e) = chars.get(i) else {
                            return Err(ParseError::new(span, "unterminated string literal"));
                        };
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            'r' => '\r',
                            '"' => '"',
                            '\\' => '\\',
                            other => return Err(ParseError::new(esc_span, format!("unknown escape `\\{other}`"))),
                        });
                        bump!();
                    }
                    other => {
                        s.push(other);
                        bump!();
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), span });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                for _ in 0..sym.len() {
                    bump!();
                }
                out.push(Token { tok: Tok::Sym(sym), span });
            }
            None => return Err(ParseError::new(span, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_mixed_input() {
        let toks = tokenize("let x = 1.5 <= y # note\n\"a\\n\"").unwrap();
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Keyword("let"),
                Tok::Ident("x".into()),
                Tok::Sym("="),
                Tok::Number(1.5),
                Tok::Sym("<="),
                Tok::Ident("y".into()),
                Tok::Str("a\n".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_positions() {
        let err = tokenize("let a = 1\n  @").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = tokenize("say(\"open").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn rejects_overflowing_literal() {
        let huge = "9".repeat(400);
        assert!(tokenize(&huge).is_err());
    }
}
