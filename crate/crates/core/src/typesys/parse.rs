use thiserror::Error;

use super::{Ctor, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("bad constructor argument at offset {pos}: {message}")]
    Argument { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Arrow,
    Amp,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Amp => "`&`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, TypeParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => toks.push((start, Tok::LParen)),
            b')' => toks.push((start, Tok::RParen)),
            b',' => toks.push((start, Tok::Comma)),
            b'&' => toks.push((start, Tok::Amp)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((start, Tok::Arrow));
                i += 1;
            }
            b'-' | b'0'..=b'9' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit = &text[start..i];
                let n = lit.parse::<i64>().map_err(|_| TypeParseError::Argument {
                    pos: start,
                    message: format!("`{lit}` is not a valid integer"),
                })?;
                toks.push((start, Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(TypeParseError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    toks.push((text.len(), Tok::End));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<(), TypeParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", want.describe())))
        }
    }

    fn unexpected(&self, context: &str) -> TypeParseError {
        TypeParseError::Syntax {
            pos: self.pos(),
            message: format!("{context}, found {}", self.peek().describe()),
        }
    }

    // ty := inter ('->' ty)?
    fn ty(&mut self) -> Result<Type, TypeParseError> {
        let source = self.inter()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let target = self.ty()?;
            Ok(Type::Arrow(Box::new(source), Box::new(target)))
        } else {
            Ok(source)
        }
    }

    // inter := atom ('&' atom)*
    fn inter(&mut self) -> Result<Type, TypeParseError> {
        let mut members = vec![self.atom()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            members.push(self.atom()?);
        }
        Ok(if members.len() == 1 {
            members.pop().unwrap()
        } else {
            Type::Intersection(members)
        })
    }

    fn atom(&mut self) -> Result<Type, TypeParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "omega" => {
                self.bump();
                Ok(Type::Top)
            }
            Tok::Ident(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.int_arg()?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Type::Constructor(Ctor::new(name, args)))
            }
            _ => Err(self.unexpected("expected a type")),
        }
    }

    fn int_arg(&mut self) -> Result<i64, TypeParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            other => Err(TypeParseError::Argument {
                pos: self.pos(),
                message: format!(
                    "constructor arguments must be integer literals, found {}",
                    other.describe()
                ),
            }),
        }
    }
}

/// Parses the textual type syntax and returns the normalized type.
///
/// `T := atom | atom(int,...) | T -> T | T & T | omega | (T)`, with `&`
/// binding tighter than the right-associative `->`.
pub fn parse_type(text: &str) -> Result<Type, TypeParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let ty = p.ty()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected end of input"));
    }
    Ok(ty.normalize())
}
