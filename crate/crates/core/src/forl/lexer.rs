use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Words the language deliberately leaves out (`let`, `pred`, integers...).
    Unsupported(String),
    ReasonAt,
    // keywords
    Sig,
    Abstract,
    Extends,
    In,
    Fact,
    All,
    Some,
    No,
    Lone,
    One,
    Set,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Univ,
    Iden,
    None,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Bar,
    Dot,
    Arrow,
    Plus,
    Amp,
    Minus,
    Tilde,
    Caret,
    Star,
    Eq,
    NotEq,
    Bang,
    FatArrow,
    DoubleArrow,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Unsupported(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Tok::Ident(s) | Tok::Unsupported(s) => s,
            Tok::ReasonAt => "Reason@",
            Tok::Sig => "sig",
            Tok::Abstract => "abstract",
            Tok::Extends => "extends",
            Tok::In => "in",
            Tok::Fact => "fact",
            Tok::All => "all",
            Tok::Some => "some",
            Tok::No => "no",
            Tok::Lone => "lone",
            Tok::One => "one",
            Tok::Set => "set",
            Tok::Not => "not",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Implies => "implies",
            Tok::Iff => "iff",
            Tok::Univ => "univ",
            Tok::Iden => "iden",
            Tok::None => "none",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Bar => "|",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::Amp => "&",
            Tok::Minus => "-",
            Tok::Tilde => "~",
            Tok::Caret => "^",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::NotEq => "!=",
            Tok::Bang => "!",
            Tok::FatArrow => "=>",
            Tok::DoubleArrow => "<=>",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const UNSUPPORTED: &[&str] = &[
    "let", "pred", "fun", "assert", "run", "check", "open", "module", "Int", "int", "sum",
    "disj", "private", "enum", "else", "for", "but", "exactly", "this",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "sig" => Tok::Sig,
        "abstract" => Tok::Abstract,
        "extends" => Tok::Extends,
        "in" => Tok::In,
        "fact" => Tok::Fact,
        "all" => Tok::All,
        "some" => Tok::Some,
        "no" => Tok::No,
        "lone" => Tok::Lone,
        "one" => Tok::One,
        "set" => Tok::Set,
        "not" => Tok::Not,
        "and" => Tok::And,
        "or" => Tok::Or,
        "implies" => Tok::Implies,
        "iff" => Tok::Iff,
        "univ" => Tok::Univ,
        "iden" => Tok::Iden,
        "none" => Tok::None,
        _ => return None,
    })
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn here(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur)?;
        let mut span = cur.here();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span });
            return Ok(out);
        };
        let tok = if c.is_alphabetic() || c == '_' {
            let start = cur.pos;
            while let Some(ch) = cur.peek() {
                if ch.is_alphanumeric() || ch == '_' || ch == '\'' {
                    cur.bump();
                } else {
                    break;
                }
            }
            let word = &src[start..cur.pos];
            if word == "Reason" && cur.peek() == Some('@') {
                cur.bump();
                Tok::ReasonAt
            } else if let Some(k) = keyword(word) {
                k
            } else if UNSUPPORTED.contains(&word) {
                Tok::Unsupported(word.to_string())
            } else {
                Tok::Ident(word.to_string())
            }
        } else if c.is_ascii_digit() {
            let start = cur.pos;
            while cur.peek().is_some_and(|ch| ch.is_ascii_digit()) {
                cur.bump();
            }
            Tok::Unsupported(src[start..cur.pos].to_string())
        } else {
            let two: String = cur.rest().chars().take(3).collect();
            let (tok, len) = if two.starts_with("<=>") {
                (Tok::DoubleArrow, 3)
            } else if two.starts_with("->") {
                (Tok::Arrow, 2)
            } else if two.starts_with("=>") {
                (Tok::FatArrow, 2)
            } else if two.starts_with("!=") {
                (Tok::NotEq, 2)
            } else if two.starts_with("&&") {
                (Tok::AndAnd, 2)
            } else if two.starts_with("||") {
                (Tok::OrOr, 2)
            } else {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '|' => Tok::Bar,
                    '.' => Tok::Dot,
                    '+' => Tok::Plus,
                    '&' => Tok::Amp,
                    '-' => Tok::Minus,
                    '~' => Tok::Tilde,
                    '^' => Tok::Caret,
                    '*' => Tok::Star,
                    '=' => Tok::Eq,
                    '!' => Tok::Bang,
                    '#' | '<' | '>' | '[' | ']' | '@' | ';' => Tok::Unsupported(c.to_string()),
                    other => {
                        return Err(SyntaxError::new(
                            span,
                            "a token",
                            format!("character `{}`", other.escape_debug()),
                        ))
                    }
                };
                (t, 1)
            };
            for _ in 0..len {
                cur.bump();
            }
            tok
        };
        span.end = cur.pos;
        out.push(Token { tok, span });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), SyntaxError> {
    loop {
        match cur.peek() {
            Some(c) if c.is_whitespace() => {
                cur.bump();
            }
            Some('/') if cur.peek2() == Some('/') => skip_line(cur),
            Some('-') if cur.peek2() == Some('-') => skip_line(cur),
            Some('/') if cur.peek2() == Some('*') => {
                let open = cur.here();
                cur.bump();
                cur.bump();
                loop {
                    match cur.peek() {
                        None => {
                            return Err(SyntaxError::new(
                                open,
                                "`*/` closing this comment",
                                "end of input",
                            ))
                        }
                        Some('*') if cur.peek2() == Some('/') => {
                            cur.bump();
                            cur.bump();
                            break;
                        }
                        _ => {
                            cur.bump();
                        }
                    }
                }
            }
            _ => return Ok(()),
        }
    }
}

fn skip_line(cur: &mut Cursor<'_>) {
    while let Some(c) = cur.bump() {
        if c == '\n' {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a->b => c <=> d -- gone\n/* x */ ~e // y"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::FatArrow,
                Tok::Ident("c".into()),
                Tok::DoubleArrow,
                Tok::Ident("d".into()),
                Tok::Tilde,
                Tok::Ident("e".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reason_annotation_token() {
        assert_eq!(
            toks("Reason@ requires"),
            vec![Tok::ReasonAt, Tok::Ident("requires".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("\n  sig").unwrap();
        assert_eq!((t[0].span.line, t[0].span.col), (2, 3));
    }

    #[test]
    fn unterminated_block_comment() {
        assert!(tokenize("/* open").is_err());
    }
}
