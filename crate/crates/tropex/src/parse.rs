//! Text grammar for exploded polynomials and chart points.
//!
//! ```text
//! poly  := ["+"|"-"] term (("+"|"-") term)*
//! term  := [coeff] ["t" "^" rat] mono*
//! mono  := "z" nat ["^" int]
//! coeff := rat | "(" rat [("+"|"-") rat "i"] ")"
//! rat   := int ["/" nat]
//! ```
//!
//! Points are written `z1=<coeff>t^<rat>, z2=…` with the same coefficient
//! and rational syntax.

use crate::arith::{gaussian, rat_int, rat_to_string, Gaussian, Rat};
use crate::charts::{ChartPoint, Monomial};
use crate::troppoly::{ExplodedPolynomial, PolyError};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {col}: {message}")]
    Syntax { col: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Var(usize), // z-index, 1-based as written
    T,
    ImagUnit,
    Plus,
    Minus,
    Caret,
    Slash,
    LParen,
    RParen,
    Equals,
    Comma,
}

struct Lexer {
    tokens: Vec<(Token, usize)>, // token and 1-based column
    pos: usize,
    end_col: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                tokens.push((Token::Num(digits.parse().expect("digits")), col));
            }
            'z' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(ParseError::Syntax {
                        col,
                        message: "expected a variable index after 'z'".into(),
                    });
                }
                let idx: usize = chars[start..i].iter().collect::<String>().parse().map_err(
                    |_| ParseError::Syntax { col, message: "variable index too large".into() },
                )?;
                if idx == 0 {
                    return Err(ParseError::Syntax {
                        col,
                        message: "variable indices start at 1".into(),
                    });
                }
                tokens.push((Token::Var(idx), col));
            }
            't' => {
                tokens.push((Token::T, col));
                i += 1;
            }
            'i' => {
                tokens.push((Token::ImagUnit, col));
                i += 1;
            }
            '+' => {
                tokens.push((Token::Plus, col));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, col));
                i += 1;
            }
            '^' => {
                tokens.push((Token::Caret, col));
                i += 1;
            }
            '/' => {
                tokens.push((Token::Slash, col));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, col));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, col));
                i += 1;
            }
            '=' => {
                tokens.push((Token::Equals, col));
                i += 1;
            }
            ',' => {
                tokens.push((Token::Comma, col));
                i += 1;
            }
            other => {
                return Err(ParseError::Syntax {
                    col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(Lexer { tokens, pos: 0, end_col: chars.len() + 1 })
}

impl Lexer {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        let col = self.col();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::Syntax { col, message: format!("expected {what}") }),
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    /// `int ["/" nat]`, with an optional sign.
    fn parse_rat(&mut self) -> Result<Rat, ParseError> {
        let mut sign = BigInt::one();
        loop {
            match self.peek() {
                Some(Token::Minus) => {
                    sign = -sign;
                    self.next();
                }
                Some(Token::Plus) => {
                    self.next();
                }
                _ => break,
            }
        }
        let col = self.col();
        let numer = match self.next() {
            Some(Token::Num(n)) => n,
            _ => {
                return Err(ParseError::Syntax { col, message: "expected a number".into() })
            }
        };
        let mut denom = BigInt::one();
        if self.peek() == Some(&Token::Slash) {
            self.next();
            let col = self.col();
            denom = match self.next() {
                Some(Token::Num(n)) if !n.is_zero() => n,
                _ => {
                    return Err(ParseError::Syntax {
                        col,
                        message: "expected a nonzero denominator".into(),
                    })
                }
            };
        }
        Ok(Rat::new(sign * numer, denom))
    }

    /// `rat` or `"(" rat [("+"|"-") rat "i"] ")"`. The bare-rat branch may
    /// also carry a trailing `i` inside parentheses.
    fn parse_coeff(&mut self) -> Result<Gaussian, ParseError> {
        if self.peek() == Some(&Token::LParen) {
            self.next();
            let first = self.parse_rat()?;
            // Optional imaginary part, or the first part itself imaginary.
            let value = if self.peek() == Some(&Token::ImagUnit) {
                self.next();
                gaussian(Rat::zero(), first)
            } else if matches!(self.peek(), Some(Token::Plus) | Some(Token::Minus)) {
                let negative = self.peek() == Some(&Token::Minus);
                self.next();
                let mut im = self.parse_rat()?;
                if negative {
                    im = -im;
                }
                self.expect(Token::ImagUnit, "'i' after the imaginary part")?;
                gaussian(first, im)
            } else {
                gaussian(first, Rat::zero())
            };
            self.expect(Token::RParen, "')'")?;
            Ok(value)
        } else {
            Ok(gaussian(self.parse_rat()?, Rat::zero()))
        }
    }
}

/// Parse a polynomial; the number of variables is the largest index used,
/// or `min_vars` if larger.
pub fn parse_polynomial(
    text: &str,
    min_vars: usize,
) -> Result<ExplodedPolynomial, ParseError> {
    let mut lexer = lex(text)?;
    let mut raw: Vec<(Gaussian, Rat, Vec<(usize, i64)>)> = Vec::new();
    let mut nvars = min_vars;
    let mut negate = false;
    match lexer.peek() {
        Some(Token::Plus) => {
            lexer.next();
        }
        Some(Token::Minus) => {
            negate = true;
            lexer.next();
        }
        _ => {}
    }
    loop {
        let (coeff, a, monos) = parse_term(&mut lexer)?;
        let coeff = if negate { -coeff } else { coeff };
        for &(idx, _) in &monos {
            nvars = nvars.max(idx);
        }
        raw.push((coeff, a, monos));
        match lexer.next() {
            None => break,
            Some(Token::Plus) => negate = false,
            Some(Token::Minus) => negate = true,
            Some(_) => {
                return Err(ParseError::Syntax {
                    col: lexer.col().saturating_sub(1),
                    message: "expected '+' or '-' between terms".into(),
                })
            }
        }
        if lexer.at_end() {
            return Err(ParseError::Syntax {
                col: lexer.end_col,
                message: "dangling sign at end of input".into(),
            });
        }
    }
    let terms: Vec<Monomial> = raw
        .into_iter()
        .map(|(coeff, a, monos)| {
            let mut alpha = vec![0i64; nvars];
            for (idx, e) in monos {
                alpha[idx - 1] += e;
            }
            Monomial::new(coeff, a, alpha)
        })
        .collect();
    Ok(ExplodedPolynomial::new(nvars, terms)?)
}

fn parse_term(lexer: &mut Lexer) -> Result<(Gaussian, Rat, Vec<(usize, i64)>), ParseError> {
    let mut coeff = Gaussian::one();
    let mut has_content = false;
    if matches!(lexer.peek(), Some(Token::Num(_)) | Some(Token::LParen)) {
        coeff = lexer.parse_coeff()?;
        has_content = true;
    }
    let mut a = Rat::zero();
    if lexer.peek() == Some(&Token::T) {
        lexer.next();
        lexer.expect(Token::Caret, "'^' after 't'")?;
        a = lexer.parse_rat()?;
        has_content = true;
    }
    let mut monos = Vec::new();
    while let Some(Token::Var(idx)) = lexer.peek() {
        let idx = *idx;
        lexer.next();
        let mut exp = 1i64;
        if lexer.peek() == Some(&Token::Caret) {
            lexer.next();
            let e = lexer.parse_rat()?;
            if !e.denom().is_one() {
                return Err(ParseError::Syntax {
                    col: lexer.col().saturating_sub(1),
                    message: "monomial exponents must be integers".into(),
                });
            }
            exp = i64::try_from(e.numer()).map_err(|_| ParseError::Syntax {
                col: lexer.col().saturating_sub(1),
                message: "monomial exponent too large".into(),
            })?;
        }
        monos.push((idx, exp));
        has_content = true;
    }
    if !has_content {
        return Err(ParseError::Syntax {
            col: lexer.col(),
            message: "expected a term".into(),
        });
    }
    Ok((coeff, a, monos))
}

/// Canonical printer; `print ∘ parse` is the identity on canonical forms.
/// Negative real coefficients are emitted through '-' separators so the
/// output stays inside the term grammar.
pub fn print_polynomial(poly: &ExplodedPolynomial) -> String {
    let rendered: Vec<(bool, String)> = poly
        .terms()
        .iter()
        .map(|t| {
            let negative = t.coeff.im.is_zero() && t.coeff.re.is_negative();
            let coeff = if negative { -t.coeff.clone() } else { t.coeff.clone() };
            let mut parts: Vec<String> = Vec::new();
            let trivial_coeff = coeff == Gaussian::one();
            if !trivial_coeff || (t.a.is_zero() && t.alpha.iter().all(|&e| e == 0)) {
                if coeff.im.is_zero() {
                    parts.push(rat_to_string(&coeff.re));
                } else {
                    let re = rat_to_string(&coeff.re);
                    let (sign, im_abs) = if coeff.im.is_negative() {
                        ("-", -coeff.im.clone())
                    } else {
                        ("+", coeff.im.clone())
                    };
                    parts.push(format!("({re}{sign}{}i)", rat_to_string(&im_abs)));
                }
            }
            if !t.a.is_zero() {
                parts.push(format!("t^{}", rat_to_string(&t.a)));
            }
            for (j, &e) in t.alpha.iter().enumerate() {
                if e == 1 {
                    parts.push(format!("z{}", j + 1));
                } else if e != 0 {
                    parts.push(format!("z{}^{}", j + 1, e));
                }
            }
            (negative, parts.join(" "))
        })
        .collect();
    let mut out = String::new();
    for (i, (negative, body)) in rendered.iter().enumerate() {
        if i == 0 {
            if *negative {
                out.push('-');
            }
        } else if *negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(body);
    }
    out
}

/// Parse a standalone coefficient: `rat` or `(rat ± rat i)`.
pub fn parse_coefficient(text: &str) -> Result<Gaussian, ParseError> {
    let mut lexer = lex(text)?;
    let negative = {
        let mut neg = false;
        while matches!(lexer.peek(), Some(Token::Minus) | Some(Token::Plus)) {
            if lexer.peek() == Some(&Token::Minus) {
                neg = !neg;
            }
            lexer.next();
        }
        neg
    };
    let c = lexer.parse_coeff()?;
    if !lexer.at_end() {
        return Err(ParseError::Syntax {
            col: lexer.col(),
            message: "trailing input after coefficient".into(),
        });
    }
    Ok(if negative { -c } else { c })
}

/// Parse a chart point `z1=<coeff>t^<rat>, z2=…`. Every variable from 1 to
/// the largest mentioned index must be assigned.
pub fn parse_point(text: &str) -> Result<ChartPoint, ParseError> {
    let mut lexer = lex(text)?;
    let mut assignments: Vec<(usize, Gaussian, Rat)> = Vec::new();
    loop {
        let col = lexer.col();
        let idx = match lexer.next() {
            Some(Token::Var(idx)) => idx,
            _ => {
                return Err(ParseError::Syntax {
                    col,
                    message: "expected a coordinate like 'z1=…'".into(),
                })
            }
        };
        lexer.expect(Token::Equals, "'='")?;
        let coeff = if matches!(lexer.peek(), Some(Token::Num(_)) | Some(Token::LParen))
            || matches!(lexer.peek(), Some(Token::Minus) | Some(Token::Plus))
        {
            let sign_negative = {
                let mut neg = false;
                while matches!(lexer.peek(), Some(Token::Minus) | Some(Token::Plus)) {
                    if lexer.peek() == Some(&Token::Minus) {
                        neg = !neg;
                    }
                    lexer.next();
                }
                neg
            };
            let c = lexer.parse_coeff()?;
            if sign_negative {
                -c
            } else {
                c
            }
        } else {
            Gaussian::one()
        };
        let mut exponent = Rat::zero();
        if lexer.peek() == Some(&Token::T) {
            lexer.next();
            lexer.expect(Token::Caret, "'^' after 't'")?;
            exponent = lexer.parse_rat()?;
        }
        if assignments.iter().any(|(i, _, _)| *i == idx) {
            return Err(ParseError::Syntax {
                col,
                message: format!("coordinate z{idx} assigned twice"),
            });
        }
        assignments.push((idx, coeff, exponent));
        match lexer.next() {
            None => break,
            Some(Token::Comma) => {}
            Some(_) => {
                return Err(ParseError::Syntax {
                    col: lexer.col().saturating_sub(1),
                    message: "expected ',' between coordinates".into(),
                })
            }
        }
    }
    let m = assignments.iter().map(|(i, _, _)| *i).max().unwrap_or(0);
    let mut coords: Vec<Option<(Gaussian, Rat)>> = vec![None; m];
    for (idx, c, x) in assignments {
        coords[idx - 1] = Some((c, x));
    }
    let coords: Vec<(Gaussian, Rat)> = coords
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            c.ok_or_else(|| ParseError::Syntax {
                col: 1,
                message: format!("coordinate z{} missing", j + 1),
            })
        })
        .collect::<Result<_, _>>()?;
    ChartPoint::new(Vec::new(), coords).map_err(|_| ParseError::Syntax {
        col: 1,
        message: "point coefficients must be nonzero".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, gauss_parts, rat};

    #[test]
    fn parse_simple_polynomials() {
        let f = parse_polynomial("z1 + z2 + 1", 0).unwrap();
        assert_eq!(f.variables(), 2);
        assert_eq!(f.terms().len(), 3);
        assert!(f.terms().iter().all(|t| t.a.is_zero()));
    }

    #[test]
    fn parse_exploded_terms() {
        let f = parse_polynomial("t^1 z1^2 + (1+1i) z2^-1", 0).unwrap();
        assert_eq!(f.terms().len(), 2);
        let t1 = f.terms().iter().find(|t| t.alpha == vec![2, 0]).unwrap();
        assert_eq!(t1.coeff, gauss_int(1));
        assert_eq!(t1.a, rat_int(1));
        let t2 = f.terms().iter().find(|t| t.alpha == vec![0, -1]).unwrap();
        assert_eq!(t2.coeff, gauss_parts(1, 1));
        assert_eq!(t2.a, rat_int(0));
    }

    #[test]
    fn merge_rule() {
        let f = parse_polynomial("z1 + z1", 0).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].coeff, gauss_int(2));
    }

    #[test]
    fn signs_and_rationals() {
        let f = parse_polynomial("-3/2 z1 + t^-1/2 z2 - (0+2i)", 0).unwrap();
        assert_eq!(f.terms().len(), 3);
        let c = f.terms().iter().find(|t| t.alpha == vec![1, 0]).unwrap();
        assert_eq!(c.coeff, crate::arith::gauss_rat(-3, 2));
        let t = f.terms().iter().find(|t| t.a == rat(-1, 2)).unwrap();
        assert_eq!(t.coeff, gauss_int(1));
        assert_eq!(t.alpha, vec![0, 1]);
        let imag = f
            .terms()
            .iter()
            .find(|t| t.alpha == vec![0, 0] && t.a.is_zero())
            .unwrap();
        assert_eq!(imag.coeff, gauss_parts(0, -2));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        match parse_polynomial("z1 + @", 0) {
            Err(ParseError::Syntax { col, .. }) => assert_eq!(col, 6),
            other => panic!("{other:?}"),
        }
        match parse_polynomial("z1 +", 0) {
            Err(ParseError::Syntax { .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_polynomial("z0", 0) {
            Err(ParseError::Syntax { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_exponent_conflict_detected() {
        match parse_polynomial("t^1 z1 + t^2 z1", 0) {
            Err(ParseError::Poly(PolyError::DuplicateExponentConflict { .. })) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "z1 + z2 + 1",
            "t^1 z1^2 + (1+1i) z2^-1",
            "-3/2 z1 + 7",
            "(2-1/3i) t^5/2 z1 z2^4",
            "t^2 z3^-2 + z1 z2",
        ] {
            let f = parse_polynomial(text, 0).unwrap();
            let printed = print_polynomial(&f);
            let g = parse_polynomial(&printed, 0).unwrap();
            assert_eq!(f, g, "round trip through {printed:?}");
        }
    }

    #[test]
    fn parse_points() {
        let p = parse_point("z1=-1t^0,z2=5t^1").unwrap();
        assert_eq!(p.exp_coords.len(), 2);
        assert_eq!(p.exp_coords[0].0, gauss_int(-1));
        assert_eq!(p.exp_coords[0].1, rat_int(0));
        assert_eq!(p.exp_coords[1].0, gauss_int(5));
        assert_eq!(p.exp_coords[1].1, rat_int(1));
        let q = parse_point("z1=(1+1i)t^1/2").unwrap();
        assert_eq!(q.exp_coords[0].0, gauss_parts(1, 1));
        assert_eq!(q.exp_coords[0].1, rat(1, 2));
        // Bare coefficient defaults to exponent zero; bare t-power to 1.
        let r = parse_point("z1=7").unwrap();
        assert_eq!(r.exp_coords[0].1, rat_int(0));
        let s = parse_point("z1=t^3").unwrap();
        assert_eq!(s.exp_coords[0].0, gauss_int(1));
        assert!(parse_point("z1=0t^1").is_err());
        assert!(parse_point("z2=1t^0").is_err());
    }
}
