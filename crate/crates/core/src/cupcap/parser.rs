use crate::cupcap::lexer::{tokenize, Tok, Token};
use crate::cupcap::{Diagram, MAX_DIAGRAM_SITES};
use crate::error::{Error, Result};
use crate::numerics::C64;

/// Deepest parenthesis / scalar-prefix nesting the parser accepts.
pub const MAX_NESTING: usize = 64;

/// Parses and validates a diagram expression.
pub fn parse(src: &str) -> Result<Diagram> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let diagram = parser.expr()?;
    parser.expect(Tok::Eof, "end of input")?;
    diagram.boundary()?;
    Ok(diagram)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let k = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[k].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> Error {
        let here = &self.tokens[self.pos];
        Error::Syntax {
            line: here.line,
            column: here.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let here = &self.tokens[self.pos];
            return Err(Error::Syntax {
                line: here.line,
                column: here.column,
                expected: vec![format!("at most {MAX_NESTING} nested groups")],
                found: "deeper nesting".into(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Diagram> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Diagram::scaled(C64::new(-1.0, 0.0), t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Diagram::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Diagram> {
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Diagram::Tensor(factors)
        })
    }

    fn factor(&mut self) -> Result<Diagram> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let bottom = self.atom()?;
            acc = Diagram::compose(acc, bottom);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Diagram> {
        match self.peek().clone() {
            Tok::Cup | Tok::Cap => {
                let is_cup = self.bump() == Tok::Cup;
                self.expect(Tok::LParen, "'('")?;
                let a = self.site()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.site()?;
                if a == b {
                    return Err(self.error(&["a site different from the first"]));
                }
                self.expect(Tok::Colon, "':'")?;
                let kind = match self.peek() {
                    Tok::Kind(k) => *k,
                    _ => return Err(self.error(&["d1", "d2", "o1", "o2"])),
                };
                self.bump();
                self.expect(Tok::RParen, "')'")?;
                Ok(if is_cup {
                    Diagram::cup(a, b, kind)
                } else {
                    Diagram::cap(a, b, kind)
                })
            }
            Tok::LParen => {
                self.enter()?;
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(inner)
            }
            Tok::Number(..) | Tok::Imag(_) | Tok::Plus | Tok::Minus => {
                self.enter()?;
                let c = self.scalar()?;
                self.expect(Tok::Star, "'*'")?;
                let inner = self.atom()?;
                self.depth -= 1;
                Ok(Diagram::scaled(c, inner))
            }
            _ => Err(self.error(&["'cup'", "'cap'", "'('", "scalar"])),
        }
    }

    fn site(&mut self) -> Result<u8> {
        let expected = ["site number 1..8"];
        let Tok::Number(value, text) = self.peek().clone() else {
            return Err(self.error(&expected));
        };
        if !text.bytes().all(|b| b.is_ascii_digit()) || !(1.0..=MAX_DIAGRAM_SITES as f64).contains(&value) {
            return Err(self.error(&expected));
        }
        self.bump();
        Ok(value as u8)
    }

    fn scalar(&mut self) -> Result<C64> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let sign = if negate { -1.0 } else { 1.0 };
        match self.peek().clone() {
            Tok::Imag(im) => {
                self.bump();
                Ok(C64::new(0.0, sign * im))
            }
            Tok::Number(re, _) => {
                self.bump();
                let re = sign * re;
                let im_sign = match (self.peek(), self.peek_at(1)) {
                    (Tok::Plus, Tok::Imag(_)) => 1.0,
                    (Tok::Minus, Tok::Imag(_)) => -1.0,
                    _ => return Ok(C64::new(re, 0.0)),
                };
                self.bump();
                let Tok::Imag(im) = self.bump() else {
                    unreachable!("checked by lookahead")
                };
                Ok(C64::new(re, im_sign * im))
            }
            _ => Err(self.error(&["number", "imaginary number"])),
        }
    }
}
