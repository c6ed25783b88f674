//! Reader for integer-coefficient forms.
//!
//! ```text
//! form     := ['-'] term (('+' | '-') term)*
//! term     := [integer '*'] factor ('*' factor)* | integer
//! factor   := variable ['^' natural]
//! variable := <letter> natural
//! ```
//!
//! Whitespace is ignored. Columns in errors are 1-based.

use num_bigint::BigInt;

use super::{HomogPoly, Monomial, PolyError};

/// Parse a form in the variables `y0 .. y{num_vars-1}`.
pub fn parse_form(text: &str, num_vars: usize) -> Result<HomogPoly, PolyError> {
    parse_form_with(text, num_vars, 'y')
}

/// Parse a form whose variables are written with `letter`.
pub fn parse_form_with(text: &str, num_vars: usize, letter: char) -> Result<HomogPoly, PolyError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        num_vars,
        letter,
    };
    p.form()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    num_vars: usize,
    letter: char,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn form(&mut self) -> Result<HomogPoly, PolyError> {
        let mut negate = false;
        if self.peek() == Some('-') {
            negate = true;
            self.pos += 1;
        }
        let (coeff, mono) = self.term()?;
        let degree = mono.degree();
        let mut acc = HomogPoly::monomial(if negate { -coeff } else { coeff }, mono);
        // A cancelled sum still remembers its degree.
        acc.degree = degree;
        loop {
            let sign = match self.peek() {
                None => break,
                Some('+') => 1,
                Some('-') => -1,
                Some(c) => return self.syntax(format!("expected '+' or '-', found '{c}'")),
            };
            self.pos += 1;
            self.skip_ws();
            let column = self.column();
            let (coeff, mono) = self.term()?;
            if mono.degree() != degree {
                return Err(PolyError::NonHomogeneous {
                    column,
                    expected: degree,
                    found: mono.degree(),
                });
            }
            let term = HomogPoly::monomial(coeff * sign, mono);
            acc = acc.add(&term)?;
            acc.degree = degree;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(BigInt, Monomial), PolyError> {
        let mut exps = vec![0u32; self.num_vars];
        let mut coeff = BigInt::from(1);
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = self.integer()?;
                if self.peek() != Some('*') {
                    return Ok((coeff, Monomial::new(exps)));
                }
                self.pos += 1;
            }
            Some(_) => {}
            None => return self.syntax("unexpected end of input"),
        }
        self.factor(&mut exps)?;
        while self.peek() == Some('*') {
            self.pos += 1;
            self.factor(&mut exps)?;
        }
        Ok((coeff, Monomial::new(exps)))
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<(), PolyError> {
        match self.peek() {
            Some(c) if c == self.letter => {}
            Some(c) => return self.syntax(format!("expected variable '{}<n>', found '{c}'", self.letter)),
            None => return self.syntax("unexpected end of input"),
        }
        let column = self.column();
        self.pos += 1;
        if !self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            return self.syntax("expected variable index");
        }
        let index = self.natural()?;
        let index = usize::try_from(index).unwrap_or(usize::MAX);
        if index >= self.num_vars {
            return Err(PolyError::VarOutOfRange {
                column,
                index,
                num_vars: self.num_vars,
            });
        }
        let mut e = 1;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            if !self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
                return self.syntax("expected exponent");
            }
            let v = self.natural()?;
            e = match u32::try_from(v) {
                Ok(v) => v,
                Err(_) => return self.syntax("exponent too large"),
            };
        }
        exps[index] += e;
        Ok(())
    }

    fn natural(&mut self) -> Result<u64, PolyError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().or_else(|_| {
            self.pos = start;
            self.syntax("number too large")
        })
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let p = parse_form("y0^2 + 3*y1*y2", 5).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial::new(vec![0, 1, 1, 0, 0])), BigInt::from(3));
    }

    #[test]
    fn whitespace_and_signs() {
        let a = parse_form("  - y0 *y1+ 2 * y1 ^ 2 -y0*y1", 2).unwrap();
        assert_eq!(a.to_string(), "-2*y0*y1 + 2*y1^2");
        let c = parse_form("y0*y0", 1).unwrap();
        assert_eq!(c.to_string(), "y0^2");
    }

    #[test]
    fn cancellation_keeps_degree() {
        let p = parse_form("y0^2 - y0^2", 2).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn rejects_non_homogeneous() {
        assert_eq!(
            parse_form("y0 + y1^2", 5),
            Err(PolyError::NonHomogeneous {
                column: 6,
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn rejects_out_of_range_variable() {
        assert_eq!(
            parse_form("y9", 5),
            Err(PolyError::VarOutOfRange {
                column: 1,
                index: 9,
                num_vars: 5
            })
        );
    }

    #[test]
    fn syntax_errors_report_column() {
        match parse_form("y0 + *y1", 2) {
            Err(PolyError::Syntax { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_form("", 2), Err(PolyError::Syntax { column: 1, .. })));
        assert!(matches!(
            parse_form("y0 y1", 2),
            Err(PolyError::Syntax { column: 4, .. })
        ));
        assert!(matches!(parse_form("x0", 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_form("y0^", 2), Err(PolyError::Syntax { .. })));
        assert!(parse_form_with("x0 + x1", 2, 'x').is_ok());
    }
}
