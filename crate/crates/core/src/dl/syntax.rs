use super::{Concept, DlError, Ontology, Role};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Open,
    Close,
}

fn lex(src: &str, line: usize) -> Result<Vec<Tok>, DlError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                out.push(Tok::Open);
                chars.next();
            }
            ')' => {
                out.push(Tok::Close);
                chars.next();
            }
            ',' => {
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            c if c.is_alphanumeric() || "_:-.".contains(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || "_:-.".contains(c) {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            other => {
                return Err(DlError::Syntax {
                    line,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, DlError> {
        Err(DlError::Syntax {
            line: self.line,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn ident(&mut self) -> Result<String, DlError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => self.err(format!("expected a name, found {t:?}")),
            None => self.err("expected a name, found end of line"),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), DlError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn role(&mut self) -> Result<Role, DlError> {
        let name = self.ident()?;
        if name == "inv" && self.peek() == Some(&Tok::Open) {
            self.pos += 1;
            let r = self.role()?;
            self.expect(Tok::Close)?;
            return Ok(r.inv());
        }
        Ok(Role::named(&name))
    }

    fn concept(&mut self) -> Result<Concept, DlError> {
        let name = self.ident()?;
        if self.peek() != Some(&Tok::Open) {
            return Ok(match name.as_str() {
                "Thing" | "owl:Thing" | "top" => Concept::Top,
                "Nothing" | "owl:Nothing" | "bottom" => Concept::Bottom,
                _ => Concept::Atomic(name),
            });
        }
        self.pos += 1;
        let c = match name.as_str() {
            "and" | "or" => {
                let mut cs = Vec::new();
                while self.peek() != Some(&Tok::Close) {
                    if self.peek().is_none() {
                        return self.err("unclosed `(`");
                    }
                    cs.push(self.concept()?);
                }
                if name == "and" {
                    Concept::And(cs)
                } else {
                    Concept::Or(cs)
                }
            }
            "not" => Concept::not(self.concept()?),
            "some" | "all" => {
                let r = self.role()?;
                let c = self.concept()?;
                if name == "some" {
                    Concept::exists(r, c)
                } else {
                    Concept::forall(r, c)
                }
            }
            _ => return self.err(format!("unknown constructor `{name}`")),
        };
        self.expect(Tok::Close)?;
        Ok(c)
    }

    fn done(&self) -> Result<(), DlError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("trailing input at {t:?}")),
        }
    }
}

/// Parses one concept in prefix form, e.g. `and(Bracket some(inv(use) HydraulicArea))`.
pub fn parse_concept(src: &str) -> Result<Concept, DlError> {
    let mut p = Parser {
        toks: lex(src, 1)?,
        pos: 0,
        line: 1,
    };
    let c = p.concept()?;
    p.done()?;
    Ok(c)
}

pub fn parse_ontology(src: &str) -> Result<Ontology, DlError> {
    let mut onto = Ontology::default();
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let line = i + 1;
        let mut p = Parser {
            toks: lex(text, line)?,
            pos: 0,
            line,
        };
        let head = p.ident()?;
        p.expect(Tok::Open)?;
        match head.as_str() {
            "SubClassOf" => {
                let a = p.concept()?;
                let b = p.concept()?;
                onto.subclass.push((a, b));
            }
            "EquivalentClasses" => {
                let a = p.concept()?;
                let b = p.concept()?;
                onto.subclass.push((a.clone(), b.clone()));
                onto.subclass.push((b, a));
            }
            "DisjointClasses" => {
                let mut cs = vec![p.concept()?];
                while p.peek() != Some(&Tok::Close) {
                    cs.push(p.concept()?);
                }
                if cs.len() < 2 {
                    return p.err("DisjointClasses needs at least two classes");
                }
                for i in 0..cs.len() {
                    for j in i + 1..cs.len() {
                        onto.disjoint.push((cs[i].clone(), cs[j].clone()));
                    }
                }
            }
            "SubObjectPropertyOf" => {
                let r = p.role()?;
                let s = p.role()?;
                onto.role_inclusions.push((r, s));
            }
            "FunctionalObjectProperty" => onto.functional.push(p.role()?),
            "InverseFunctionalObjectProperty" => onto.functional.push(p.role()?.inv()),
            other => return p.err(format!("unknown axiom `{other}`")),
        }
        p.expect(Tok::Close)?;
        p.done()?;
    }
    Ok(onto)
}
