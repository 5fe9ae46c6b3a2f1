use crate::error::StaticError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int(u64),
    Ident(String),
    Kw(Kw),
    Semi,
    Colon,
    Assign,
    DotDot,
    Bar,
    Comma,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kw {
    Var,
    Skip,
    Fail,
    Check,
    End,
    If,
    Then,
    Else,
    Until,
    Loop,
    Repeat,
    Not,
    And,
    Or,
    True,
    False,
}

impl Kw {
    fn from_word(w: &str) -> Option<Kw> {
        Some(match w {
            "var" => Kw::Var,
            "skip" => Kw::Skip,
            "fail" => Kw::Fail,
            "check" => Kw::Check,
            "end" => Kw::End,
            "if" => Kw::If,
            "then" => Kw::Then,
            "else" => Kw::Else,
            "until" => Kw::Until,
            "loop" => Kw::Loop,
            "repeat" => Kw::Repeat,
            "not" => Kw::Not,
            "and" => Kw::And,
            "or" => Kw::Or,
            "True" => Kw::True,
            "False" => Kw::False,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits source into tokens. `--` starts a comment running to end of line.
pub fn lex(src: &str) -> Result<Vec<Token>, StaticError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let peek = chars.get(i + 1).copied();
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        let single = |t: Tok| Token {
            tok: t,
            line: tl,
            col: tc,
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i),
            '-' if peek == Some('-') => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i);
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(1, &mut i);
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse::<u64>().map_err(|_| StaticError::Syntax {
                    line: tl,
                    col: tc,
                    message: format!("integer literal {text} is too large"),
                })?;
                out.push(single(Tok::Int(n)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    advance(1, &mut i);
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match Kw::from_word(&word) {
                    Some(kw) => Tok::Kw(kw),
                    None => Tok::Ident(word),
                };
                out.push(single(tok));
            }
            _ => {
                let (tok, n) = match (c, peek) {
                    (':', Some('=')) => (Tok::Assign, 2),
                    ('.', Some('.')) => (Tok::DotDot, 2),
                    ('/', Some('=')) | ('!', Some('=')) => (Tok::Ne, 2),
                    ('<', Some('=')) => (Tok::Le, 2),
                    ('>', Some('=')) => (Tok::Ge, 2),
                    (':', _) => (Tok::Colon, 1),
                    (';', _) => (Tok::Semi, 1),
                    ('|', _) => (Tok::Bar, 1),
                    (',', _) => (Tok::Comma, 1),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    ('=', _) => (Tok::Eq, 1),
                    ('<', _) => (Tok::Lt, 1),
                    ('>', _) => (Tok::Gt, 1),
                    _ => {
                        return Err(StaticError::Syntax {
                            line: tl,
                            col: tc,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                };
                advance(n, &mut i);
                out.push(single(tok));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
