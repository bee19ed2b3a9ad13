use crate::cupcap::CupType;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Cup,
    Cap,
    Kind(CupType),
    /// Real literal with its source text (sites must be plain integers).
    Number(f64, String),
    /// Imaginary literal: a number directly followed by `i`, or a bare `i`.
    Imag(f64),
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Pipe,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Cup => "'cup'".into(),
            Tok::Cap => "'cap'".into(),
            Tok::Kind(k) => format!("'{k}'"),
            Tok::Number(_, text) => format!("number {text}"),
            Tok::Imag(v) => format!("imaginary {v}i"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Semi => "';'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

fn lex_error(line: usize, column: usize, found: String) -> Error {
    Error::Syntax {
        line,
        column,
        expected: vec!["a token".into()],
        found,
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut k = 0;

    while k < chars.len() {
        let ch = chars[k];
        let (start_line, start_col) = (line, column);
        let mut push = |tok: Tok| {
            tokens.push(Token {
                tok,
                line: start_line,
                column: start_col,
            })
        };

        if ch == '\n' {
            line += 1;
            column = 1;
            k += 1;
            continue;
        }
        if ch.is_whitespace() {
            column += 1;
            k += 1;
            continue;
        }

        let single = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Pipe),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            push(tok);
            k += 1;
            column += 1;
            continue;
        }

        if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            if k < chars.len() && chars[k] == '.' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    k = j;
                }
            }
            let text: String = chars[start..k].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| lex_error(start_line, start_col, format!("malformed number {text:?}")))?;
            if !value.is_finite() {
                return Err(lex_error(start_line, start_col, format!("out-of-range number {text}")));
            }
            let imaginary = k < chars.len()
                && chars[k] == 'i'
                && !chars.get(k + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
            if imaginary {
                k += 1;
                push(Tok::Imag(value));
            } else {
                if chars.get(k).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
                    return Err(lex_error(start_line, start_col, format!("malformed number near {text:?}")));
                }
                push(Tok::Number(value, text));
            }
            column += k - start;
            continue;
        }

        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            let tok = match word.as_str() {
                "cup" => Tok::Cup,
                "cap" => Tok::Cap,
                "i" => Tok::Imag(1.0),
                other => match other.parse::<CupType>() {
                    Ok(kind) => Tok::Kind(kind),
                    Err(_) => {
                        return Err(lex_error(start_line, start_col, format!("identifier {word:?}")))
                    }
                },
            };
            push(tok);
            column += k - start;
            continue;
        }

        return Err(lex_error(start_line, start_col, format!("character {ch:?}")));
    }

    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}
