//! Tokenizer for the textual program format. `%` starts a comment that runs
//! to end of line; whitespace is insignificant.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Variable(String),
    Number(String),
    Quoted(String),
    Section(String),
    Implies, // :-
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Slash,
    Cmp(&'static str),
    Not,
    Key, // the word `key` inside #key entries
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{}", s),
            Tok::Variable(s) => write!(f, "{}", s),
            Tok::Number(s) => write!(f, "{}", s),
            Tok::Quoted(s) => write!(f, "'{}'", s),
            Tok::Section(s) => write!(f, "#{}", s),
            Tok::Implies => write!(f, ":-"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
            Tok::Dot => write!(f, "."),
            Tok::Slash => write!(f, "/"),
            Tok::Cmp(s) => write!(f, "{}", s),
            Tok::Not => write!(f, "not"),
            Tok::Key => write!(f, "key"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, LexError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut column = 1usize;
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }
    loop {
        let pos = Pos { line, column };
        let c = match chars.peek() {
            None => return Ok(out),
            Some(c) => *c,
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                out.push((Tok::LParen, pos));
            }
            ')' => {
                bump!();
                out.push((Tok::RParen, pos));
            }
            ',' => {
                bump!();
                out.push((Tok::Comma, pos));
            }
            ';' => {
                bump!();
                out.push((Tok::Semi, pos));
            }
            '.' => {
                bump!();
                out.push((Tok::Dot, pos));
            }
            '/' => {
                bump!();
                out.push((Tok::Slash, pos));
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    out.push((Tok::Implies, pos));
                } else {
                    return Err(LexError {
                        pos,
                        message: "expected `:-`".into(),
                    });
                }
            }
            '=' => {
                bump!();
                out.push((Tok::Cmp("="), pos));
            }
            '!' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Cmp("!="), pos));
                } else {
                    return Err(LexError {
                        pos,
                        message: "expected `!=`".into(),
                    });
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Cmp("<="), pos));
                } else {
                    out.push((Tok::Cmp("<"), pos));
                }
            }
            '>' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::Cmp(">="), pos));
                } else {
                    out.push((Tok::Cmp(">"), pos));
                }
            }
            '#' => {
                bump!();
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(LexError {
                        pos,
                        message: "expected a section name after `#`".into(),
                    });
                }
                out.push((Tok::Section(name), pos));
            }
            '\'' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None | Some('\n') => {
                            return Err(LexError {
                                pos,
                                message: "unterminated quoted constant".into(),
                            })
                        }
                        Some('\'') => break,
                        Some(c) => s.push(c),
                    }
                }
                out.push((Tok::Quoted(s), pos));
            }
            '$' => {
                return Err(LexError {
                    pos,
                    message: "`$`-prefixed names are reserved for generated terms".into(),
                })
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some(c) if c.is_ascii_digit() => {
                        let mut s = String::from("-");
                        lex_number_tail(&mut chars, &mut s, &mut line, &mut column);
                        out.push((Tok::Number(s), pos));
                    }
                    _ => {
                        return Err(LexError {
                            pos,
                            message: "expected a digit after `-`".into(),
                        })
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                lex_number_tail(&mut chars, &mut s, &mut line, &mut column);
                out.push((Tok::Number(s), pos));
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Variable(s), pos));
            }
            c if c.is_ascii_lowercase() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                match s.as_str() {
                    "not" => out.push((Tok::Not, pos)),
                    "key" => out.push((Tok::Key, pos)),
                    _ => out.push((Tok::Ident(s), pos)),
                }
            }
            other => {
                return Err(LexError {
                    pos,
                    message: format!("unexpected character `{}`", other),
                })
            }
        }
    }
}

fn lex_number_tail(
    chars: &mut std::iter::Peekable<std::str::Chars>,
    s: &mut String,
    line: &mut usize,
    column: &mut usize,
) {
    let mut seen_dot = false;
    while let Some(&c) = chars.peek() {
        if c.is_ascii_digit() {
            s.push(c);
            chars.next();
            *column += 1;
        } else if c == '.' && !seen_dot {
            // Only part of the number when a digit follows; otherwise it is
            // the clause terminator.
            let mut ahead = chars.clone();
            ahead.next();
            match ahead.peek() {
                Some(d) if d.is_ascii_digit() => {
                    seen_dot = true;
                    s.push('.');
                    chars.next();
                    *column += 1;
                }
                _ => break,
            }
        } else {
            break;
        }
    }
    let _ = line;
}
