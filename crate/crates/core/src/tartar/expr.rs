//! Symbol files: two lines `m1 = <expr>` and `m2 = <expr>` over xi1, xi2, norm (= |ξ|)
//! and the imaginary unit i, with + - * / ^, parentheses and sqrt(). `#` starts a comment.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Xi1,
    Xi2,
    Norm,
    I,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            Expr::Num(x) => re(*x),
            Expr::Xi1 => re(xi[0]),
            Expr::Xi2 => re(xi[1]),
            Expr::Norm => re(xi[0].hypot(xi[1])),
            Expr::I => Complex64::new(0.0, 1.0),
            Expr::Neg(a) => -a.eval(xi),
            Expr::Add(a, b) => a.eval(xi) + b.eval(xi),
            Expr::Sub(a, b) => a.eval(xi) - b.eval(xi),
            Expr::Mul(a, b) => a.eval(xi) * b.eval(xi),
            Expr::Div(a, b) => a.eval(xi) / b.eval(xi),
            Expr::Pow(a, b) => {
                let (base, e) = (a.eval(xi), b.eval(xi));
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() < 64.0 {
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Expr::Sqrt(a) => a.eval(xi).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse {
                col: start + 1,
                msg: format!("bad number '{text}'"),
            })?;
            out.push((start + 1, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start + 1, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i + 1, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                col: i + 1,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                let col = self.col();
                self.pos += 1;
                match name.as_str() {
                    "xi1" => Ok(Expr::Xi1),
                    "xi2" => Ok(Expr::Xi2),
                    "norm" => Ok(Expr::Norm),
                    "i" => Ok(Expr::I),
                    "sqrt" => {
                        if !self.eat('(') {
                            return self.err("expected '(' after sqrt");
                        }
                        let e = self.expr()?;
                        if !self.eat(')') {
                            return self.err("expected ')'");
                        }
                        Ok(Expr::Sqrt(Box::new(e)))
                    }
                    _ => Err(Error::Parse {
                        col,
                        msg: format!("unknown identifier '{name}'"),
                    }),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: src.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a two-line symbol file into (m1, m2). Column numbers refer to the offending line.
pub fn parse_symbol_file(text: &str) -> Result<[Expr; 2]> {
    let mut m1 = None;
    let mut m2 = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Parse {
                col: 1,
                msg: format!("line {}: expected 'm1 = ...' or 'm2 = ...'", ln + 1),
            });
        };
        let lhs = line[..eq].trim();
        let rhs = &line[eq + 1..];
        let offset = line[..eq + 1].chars().count();
        let e = parse_expr(rhs).map_err(|e| match e {
            Error::Parse { col, msg } => Error::Parse {
                col: col + offset,
                msg: format!("line {}: {msg}", ln + 1),
            },
            other => other,
        })?;
        let slot = match lhs {
            "m1" => &mut m1,
            "m2" => &mut m2,
            _ => {
                return Err(Error::Parse {
                    col: 1,
                    msg: format!("line {}: unknown component '{lhs}'", ln + 1),
                })
            }
        };
        if slot.is_some() {
            return Err(Error::Parse {
                col: 1,
                msg: format!("line {}: '{lhs}' defined twice", ln + 1),
            });
        }
        *slot = Some(e);
    }
    match (m1, m2) {
        (Some(a), Some(b)) => Ok([a, b]),
        _ => Err(Error::Parse {
            col: 1,
            msg: "both m1 and m2 are required".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_power() {
        let e = parse_expr("1 + 2 * 3 ^ 2 - -4 / 2").unwrap();
        assert_eq!(e.eval([0.0, 0.0]), Complex64::new(21.0, 0.0));
        let e = parse_expr("2 ^ -1").unwrap();
        assert_eq!(e.eval([0.0, 0.0]).re, 0.5);
        let e = parse_expr("sqrt(xi1^2 + xi2^2) - norm").unwrap();
        assert!(e.eval([3.0, 4.0]).norm() < 1e-15);
        let e = parse_expr("i * i").unwrap();
        assert_eq!(e.eval([0.0, 0.0]), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_expr("1.5e2").unwrap().eval([0.0, 0.0]).re, 150.0);
    }

    #[test]
    fn errors_carry_columns() {
        assert_eq!(
            parse_expr("xi1 + $"),
            Err(Error::Parse { col: 7, msg: "unexpected character '$'".into() })
        );
        assert!(matches!(parse_expr("xi3"), Err(Error::Parse { col: 1, .. })));
        assert!(matches!(parse_expr("(xi1"), Err(Error::Parse { col: 5, .. })));
        assert!(matches!(parse_expr("xi1 xi2"), Err(Error::Parse { col: 5, .. })));
    }

    #[test]
    fn symbol_file() {
        let text = "# sqg\nm1 = -i*xi2/norm\nm2 = i*xi1/norm\n";
        let [a, b] = parse_symbol_file(text).unwrap();
        let v = (a.eval([1.0, 0.0]), b.eval([1.0, 0.0]));
        assert_eq!(v.0, Complex64::new(0.0, 0.0) * -1.0);
        assert_eq!(v.1, Complex64::new(0.0, 1.0));
        assert!(parse_symbol_file("m1 = 1").is_err());
        assert!(matches!(
            parse_symbol_file("m1 = 1\nm2 = 2 +"),
            Err(Error::Parse { col: 9, .. })
        ));
    }
}
