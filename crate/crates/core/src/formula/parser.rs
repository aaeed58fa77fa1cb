use std::collections::BTreeSet;

use super::{Formula, FormulaError, ModalOp};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Mu,
    Nu,
    True,
    False,
    Ident(String),
    Nat(String),
    Dot,
    Pipe,
    Amp,
    Bang,
    LParen,
    RParen,
    Slash,
    Comma,
    Gt,
    RBrack,
    RBrace,
    Dia,
    BoxOp,
    GradedDiaOpen,
    GradedBoxOpen,
    ProbDiaOpen,
    ProbBoxOpen,
    MonDia,
    MonBox,
    CoalDiaOpen,
    CoalBoxOpen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '.' => (Tok::Dot, 1),
            '|' => (Tok::Pipe, 1),
            '&' => (Tok::Amp, 1),
            '!' => (Tok::Bang, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '/' => (Tok::Slash, 1),
            ',' => (Tok::Comma, 1),
            '>' => (Tok::Gt, 1),
            ']' => (Tok::RBrack, 1),
            '}' => (Tok::RBrace, 1),
            '<' => match next {
                Some('>') => (Tok::Dia, 2),
                Some('g') => (Tok::GradedDiaOpen, 2),
                Some('p') => (Tok::ProbDiaOpen, 2),
                Some('m') if chars.get(i + 2) == Some(&'>') => (Tok::MonDia, 3),
                Some('{') => (Tok::CoalDiaOpen, 2),
                _ => return Err(syntax(line, col, "unrecognized modality after `<`")),
            },
            '[' => match next {
                Some(']') => (Tok::BoxOp, 2),
                Some('g') => (Tok::GradedBoxOpen, 2),
                Some('p') => (Tok::ProbBoxOpen, 2),
                Some('m') if chars.get(i + 2) == Some(&']') => (Tok::MonBox, 3),
                Some('{') => (Tok::CoalBoxOpen, 2),
                _ => return Err(syntax(line, col, "unrecognized modality after `[`")),
            },
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                (Tok::Nat(chars[i..j].iter().collect()), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "mu" => Tok::Mu,
                    "nu" => Tok::Nu,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                (tok, j - i)
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, line: start_line, column: start_col });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// Surface syntax before variable resolution and negation normal form.
#[derive(Debug)]
enum Syn {
    Top,
    Bot,
    Ident(String),
    Not(Box<Syn>),
    And(Box<Syn>, Box<Syn>),
    Or(Box<Syn>, Box<Syn>),
    Modal(ModalOp, Box<Syn>),
    Mu(String, Box<Syn>),
    Nu(String, Box<Syn>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        let (line, column) = self.here();
        syntax(line, column, message)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn nat(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Nat(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected number, found {}", other.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Syn, FormulaError> {
        match self.peek() {
            Tok::Mu | Tok::Nu => {
                let least = *self.peek() == Tok::Mu;
                self.bump();
                let var = self.ident()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = Box::new(self.formula()?);
                Ok(if least { Syn::Mu(var, body) } else { Syn::Nu(var, body) })
            }
            _ => self.disj(),
        }
    }

    fn disj(&mut self) -> Result<Syn, FormulaError> {
        let mut left = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let right = self.conj()?;
            left = Syn::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Syn, FormulaError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Syn::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Syn, FormulaError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Syn::Not(Box::new(self.unary()?)))
            }
            // A binder in operand position extends maximally to the right.
            Tok::Mu | Tok::Nu => self.formula(),
            Tok::True => {
                self.bump();
                Ok(Syn::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Syn::Bot)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Syn::Ident(s))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => {
                let op = self.modal()?;
                Ok(Syn::Modal(op, Box::new(self.unary()?)))
            }
        }
    }

    fn modal(&mut self) -> Result<ModalOp, FormulaError> {
        let tok = self.peek().clone();
        let op = match tok {
            Tok::Dia => {
                self.bump();
                ModalOp::Diamond
            }
            Tok::BoxOp => {
                self.bump();
                ModalOp::Box
            }
            Tok::MonDia => {
                self.bump();
                ModalOp::MonDia
            }
            Tok::MonBox => {
                self.bump();
                ModalOp::MonBox
            }
            Tok::GradedDiaOpen | Tok::GradedBoxOpen => {
                self.bump();
                let (line, column) = self.here();
                let n: u64 = self.nat()?.parse().map_err(|_| syntax(line, column, "grade out of range"))?;
                if tok == Tok::GradedDiaOpen {
                    self.expect(Tok::Gt, "`>`")?;
                    ModalOp::GradedDia(n)
                } else {
                    self.expect(Tok::RBrack, "`]`")?;
                    ModalOp::GradedBox(n)
                }
            }
            Tok::ProbDiaOpen | Tok::ProbBoxOpen => {
                self.bump();
                let (line, column) = self.here();
                let mut text = self.nat()?;
                if *self.peek() == Tok::Slash {
                    self.bump();
                    text = format!("{text}/{}", self.nat()?);
                }
                let p: Rational = text.parse().map_err(|_| syntax(line, column, "invalid probability"))?;
                if !p.is_probability() {
                    return Err(syntax(line, column, format!("probability {p} outside [0,1]")));
                }
                if tok == Tok::ProbDiaOpen {
                    self.expect(Tok::Gt, "`>`")?;
                    ModalOp::ProbDia(p)
                } else {
                    self.expect(Tok::RBrack, "`]`")?;
                    ModalOp::ProbBox(p)
                }
            }
            Tok::CoalDiaOpen | Tok::CoalBoxOpen => {
                self.bump();
                let mut agents = BTreeSet::new();
                if let Tok::Ident(_) = self.peek() {
                    agents.insert(self.ident()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        agents.insert(self.ident()?);
                    }
                }
                self.expect(Tok::RBrace, "`}`")?;
                if tok == Tok::CoalDiaOpen {
                    self.expect(Tok::Gt, "`>`")?;
                    ModalOp::CoalDia(agents)
                } else {
                    self.expect(Tok::RBrack, "`]`")?;
                    ModalOp::CoalBox(agents)
                }
            }
            other => return Err(self.error(format!("expected a formula, found {}", other.describe()))),
        };
        Ok(op)
    }
}

/// Identifiers bound by an enclosing binder become variables, all others atoms.
fn resolve(syn: Syn, scope: &mut Vec<String>, negated_above: &mut Vec<usize>) -> Result<Formula, FormulaError> {
    Ok(match syn {
        Syn::Top => Formula::Top,
        Syn::Bot => Formula::Bot,
        Syn::Ident(name) => match scope.iter().rposition(|v| *v == name) {
            Some(depth) => {
                // Negation whose scope started inside this variable's binder is fine;
                // a negation between the binder and the occurrence is not.
                if negated_above.iter().any(|&level| level > depth) {
                    return Err(FormulaError::NonMonotoneNegation(name));
                }
                Formula::Var(name)
            }
            None => Formula::Atom(name),
        },
        Syn::Not(inner) => {
            negated_above.push(scope.len());
            let f = resolve(*inner, scope, negated_above)?;
            negated_above.pop();
            super::negate(&f)
        }
        Syn::And(l, r) => Formula::and(resolve(*l, scope, negated_above)?, resolve(*r, scope, negated_above)?),
        Syn::Or(l, r) => Formula::or(resolve(*l, scope, negated_above)?, resolve(*r, scope, negated_above)?),
        Syn::Modal(op, a) => Formula::modal(op, resolve(*a, scope, negated_above)?),
        Syn::Mu(x, b) => {
            scope.push(x.clone());
            let body = resolve(*b, scope, negated_above);
            scope.pop();
            Formula::mu(x, body?)
        }
        Syn::Nu(x, b) => {
            scope.push(x.clone());
            let body = resolve(*b, scope, negated_above);
            scope.pop();
            Formula::nu(x, body?)
        }
    })
}

/// Parses the surface syntax into a closed formula in negation normal form
/// with pairwise distinct binder names.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let syn = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(format!("unexpected {}", parser.peek().describe())));
    }
    let phi = resolve(syn, &mut Vec::new(), &mut Vec::new())?;
    Ok(phi.alpha_rename())
}
