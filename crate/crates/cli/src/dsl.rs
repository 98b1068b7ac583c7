//! Class expressions.
//!
//! ```text
//! program  := (let ';')* expr [';']
//! let      := 'let' ident (',' ident)* '=' (iso | expr)
//! iso      := 'isotropic' '(' [pair (',' pair)*] ')'
//! pair     := ident '.' ident '=' int | 'others' '=' int
//! expr     := ['+' | '-'] term (('+' | '-') term)*
//! term     := [int '*'] atom
//! atom     := 'v[' int (',' int){9} ']' | ident | '(' expr ')'
//! ```
//!
//! `isotropic(...)` binds its names to primitive effective isotropic classes
//! with the requested mutual pairings, realized deterministically (the first
//! is `f`; each later one is the lexicographically smallest choice of
//! smallest degree that still extends). Every pair of names needs a value,
//! given explicitly or through `others`. Separate `isotropic` calls are
//! realized independently. Positions are 0-based character offsets.

use std::collections::BTreeMap;
use std::fmt;

use enriques_core::decompose::realize_gram;
use enriques_core::{EnriquesLattice, LatticeClass, RANK};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("syntax error at position {pos}: expected {}", expected.join(" or "))]
    Syntax { pos: usize, expected: Vec<String> },
    #[error("unbound name {name:?} at position {pos}")]
    UnboundName { pos: usize, name: String },
    #[error("unsatisfiable pairing spec: {0}")]
    UnsatisfiablePairingSpec(String),
    #[error(transparent)]
    Lattice(#[from] enriques_core::Error),
}

pub type Bindings = BTreeMap<String, LatticeClass>;

/// Source text together with the class it resolves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassExpression {
    pub source: String,
    pub class: LatticeClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Let,
    VOpen,
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Let => f.write_str("let"),
            Tok::VOpen => f.write_str("v["),
            Tok::Sym(c) => write!(f, "{c}"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<i64>().map_err(|_| DslError::Syntax {
                pos: start,
                expected: vec!["an integer that fits in 64 bits".into()],
            })?;
            out.push((start, Tok::Int(n)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if s == "v" && chars.get(i) == Some(&'[') {
                i += 1;
                out.push((start, Tok::VOpen));
            } else if s == "let" {
                out.push((start, Tok::Let));
            } else {
                out.push((start, Tok::Ident(s)));
            }
        } else if "+-*(),;=.[]".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(DslError::Syntax {
                pos: i,
                expected: vec!["a token".into()],
            });
        }
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    lat: &'a EnriquesLattice,
    toks: Vec<(usize, Tok)>,
    at: usize,
    env: &'a mut Bindings,
}

fn wide(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T, DslError> {
        Err(DslError::Syntax {
            pos: self.pos(),
            expected: wide(expected),
        })
    }

    fn sym(&mut self, c: char) -> Result<(), DslError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(&[&format!("'{c}'")])
        }
    }

    fn ident(&mut self) -> Result<(usize, String), DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((pos, s))
            }
            _ => self.err(&["identifier"]),
        }
    }

    fn int(&mut self) -> Result<i64, DslError> {
        let neg = *self.peek() == Tok::Sym('-');
        if neg {
            self.bump();
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => self.err(&["integer"]),
        }
    }

    fn program(&mut self) -> Result<LatticeClass, DslError> {
        while *self.peek() == Tok::Let {
            self.bump();
            self.binding()?;
            self.sym(';')?;
        }
        let x = self.expr()?;
        if *self.peek() == Tok::Sym(';') {
            self.bump();
        }
        if *self.peek() != Tok::End {
            return self.err(&["'+'", "'-'", "end of input"]);
        }
        Ok(x)
    }

    fn binding(&mut self) -> Result<(), DslError> {
        let mut names = vec![self.ident()?];
        while *self.peek() == Tok::Sym(',') {
            self.bump();
            names.push(self.ident()?);
        }
        self.sym('=')?;
        if *self.peek() == Tok::Ident("isotropic".into()) {
            self.bump();
            return self.isotropic(&names);
        }
        if names.len() > 1 {
            return self.err(&["'isotropic'"]);
        }
        let x = self.expr()?;
        self.env.insert(names[0].1.clone(), x);
        Ok(())
    }

    fn isotropic(&mut self, names: &[(usize, String)]) -> Result<(), DslError> {
        self.sym('(')?;
        let n = names.len();
        let index = |name: &str| names.iter().position(|(_, m)| m == name);
        let mut gram: Vec<Vec<Option<i64>>> = vec![vec![None; n]; n];
        let mut others = None;
        if *self.peek() != Tok::Sym(')') {
            loop {
                let (p1, a) = self.ident()?;
                if a == "others" && *self.peek() == Tok::Sym('=') {
                    self.bump();
                    others = Some(self.int()?);
                } else {
                    self.sym('.')?;
                    let (p2, b) = self.ident()?;
                    self.sym('=')?;
                    let v = self.int()?;
                    let i = index(&a).ok_or(DslError::UnboundName { pos: p1, name: a.clone() })?;
                    let j = index(&b).ok_or(DslError::UnboundName { pos: p2, name: b.clone() })?;
                    for (r, c) in [(i, j), (j, i)] {
                        if gram[r][c].is_some_and(|old| old != v) {
                            return Err(DslError::UnsatisfiablePairingSpec(format!(
                                "conflicting values for {a}.{b}"
                            )));
                        }
                        gram[r][c] = Some(v);
                    }
                }
                if *self.peek() == Tok::Sym(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.sym(')')?;
        let mut full = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                full[i][j] = match (i == j, gram[i][j], others) {
                    (true, Some(v), _) if v != 0 => {
                        return Err(DslError::UnsatisfiablePairingSpec(format!(
                            "{}.{} must be 0 for an isotropic class",
                            names[i].1, names[i].1
                        )))
                    }
                    (true, _, _) => 0,
                    (false, Some(v), _) | (false, None, Some(v)) => v,
                    (false, None, None) => {
                        return Err(DslError::UnsatisfiablePairingSpec(format!(
                            "no value for {}.{}",
                            names[i].1, names[j].1
                        )))
                    }
                };
            }
        }
        let classes = realize_gram(self.lat, &full).map_err(|e| match e {
            enriques_core::Error::UnsatisfiablePairingSpec(m) => DslError::UnsatisfiablePairingSpec(m),
            other => DslError::Lattice(other),
        })?;
        for ((_, name), x) in names.iter().zip(classes) {
            self.env.insert(name.clone(), x);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<LatticeClass, DslError> {
        let mut sign = 1;
        match self.peek() {
            Tok::Sym('+') => {
                self.bump();
            }
            Tok::Sym('-') => {
                self.bump();
                sign = -1;
            }
            _ => {}
        }
        let mut acc = self.term(sign)?;
        loop {
            let sign = match self.peek() {
                Tok::Sym('+') => 1,
                Tok::Sym('-') => -1,
                _ => return Ok(acc),
            };
            self.bump();
            acc = checked_add(acc, self.term(sign)?)?;
        }
    }

    fn term(&mut self, sign: i64) -> Result<LatticeClass, DslError> {
        let mut k = sign;
        if let Tok::Int(n) = *self.peek() {
            self.bump();
            self.sym('*')?;
            k *= n;
        }
        let x = self.atom()?;
        checked_scale(k, x)
    }

    fn atom(&mut self) -> Result<LatticeClass, DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::VOpen => {
                self.bump();
                let mut c = [0i64; RANK];
                for (i, slot) in c.iter_mut().enumerate() {
                    if i > 0 {
                        self.sym(',')?;
                    }
                    *slot = self.int()?;
                }
                self.sym(']')?;
                let x = LatticeClass::new(c);
                x.check_range()?;
                Ok(x)
            }
            Tok::Ident(name) => {
                self.bump();
                self.env
                    .get(&name)
                    .copied()
                    .ok_or(DslError::UnboundName { pos, name })
            }
            Tok::Sym('(') => {
                self.bump();
                let x = self.expr()?;
                self.sym(')')?;
                Ok(x)
            }
            _ => self.err(&["integer", "identifier", "'v['", "'('"]),
        }
    }
}

fn checked_add(a: LatticeClass, b: LatticeClass) -> Result<LatticeClass, DslError> {
    let x = a + b;
    x.check_range()?;
    Ok(x)
}

fn checked_scale(k: i64, x: LatticeClass) -> Result<LatticeClass, DslError> {
    let mut c = [0i64; RANK];
    for (out, v) in c.iter_mut().zip(x.0) {
        *out = k.checked_mul(v).ok_or_else(|| {
            enriques_core::Error::Overflow(format!("{k} * {x}"))
        })?;
    }
    let y = LatticeClass::new(c);
    y.check_range()?;
    Ok(y)
}

/// Parses and resolves `text`; `let` bindings are added to `env`.
pub fn parse_class(
    lat: &EnriquesLattice,
    text: &str,
    env: &mut Bindings,
) -> Result<ClassExpression, DslError> {
    let toks = lex(text)?;
    let mut p = Parser {
        lat,
        toks,
        at: 0,
        env,
    };
    let class = p.program()?;
    Ok(ClassExpression {
        source: text.to_string(),
        class,
    })
}

/// [`parse_class`] with a fresh environment.
pub fn resolve(lat: &EnriquesLattice, text: &str) -> Result<LatticeClass, DslError> {
    Ok(parse_class(lat, text, &mut Bindings::new())?.class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use enriques_core::invariants::min_pairing_isotropic;

    fn lat() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    #[test]
    fn literal() {
        let x = resolve(lat(), "v[1,1,0,0,0,0,0,0,0,0]").unwrap();
        assert_eq!(x, lat().reference_ample());
        assert_eq!(resolve(lat(), " v[ 0,0,0,0,0,0,0,0,0,-1 ] ").unwrap().0[9], -1);
    }

    #[test]
    fn dangling_star() {
        match resolve(lat(), "3*") {
            Err(DslError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hyperbolic_pair_combination() {
        let x = resolve(lat(), "let E1,E2 = isotropic(E1.E2=1); 3*E1 + 5*E2").unwrap();
        assert_eq!(lat().norm(&x), 30);
        assert_eq!(min_pairing_isotropic(lat(), &x).unwrap().value, 3);
    }

    #[test]
    fn bindings_and_parentheses() {
        let a = resolve(lat(), "let E1,E2,E3 = isotropic(E1.E2=2, E1.E3=2, E2.E3=1); 2*(E1+E2+E3)").unwrap();
        let b = resolve(lat(), "let E1,E2,E3 = isotropic(E1.E2=2, E1.E3=2, E2.E3=1); let D = E1+E2+E3; 2*D").unwrap();
        assert_eq!(a, b);
        assert_eq!(lat().norm(&a), 40);
        let c = resolve(lat(), "let A,B,C = isotropic(others=1); -A + 2*B - (C - A)").unwrap();
        let mut env = Bindings::new();
        parse_class(lat(), "let A,B,C = isotropic(others=1); A", &mut env).unwrap();
        assert_eq!(c, 2 * env["B"] - env["C"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(resolve(lat(), "E1 + 1"), Err(DslError::UnboundName { pos: 0, .. })));
        assert!(matches!(
            resolve(lat(), "let E1,E2 = isotropic(E1.E2=-1); E1"),
            Err(DslError::UnsatisfiablePairingSpec(_))
        ));
        assert!(matches!(
            resolve(lat(), "let E1,E2,E3 = isotropic(E1.E2=1); E1"),
            Err(DslError::UnsatisfiablePairingSpec(_))
        ));
        assert!(matches!(
            resolve(lat(), "let E1,E2 = isotropic(E1.E3=1); E1"),
            Err(DslError::UnboundName { pos: 25, .. })
        ));
        assert!(matches!(resolve(lat(), "v[1,2]"), Err(DslError::Syntax { pos: 5, .. })));
        assert!(matches!(resolve(lat(), "2 E"), Err(DslError::Syntax { pos: 2, .. })));
        assert!(matches!(resolve(lat(), ""), Err(DslError::Syntax { pos: 0, .. })));
        assert!(matches!(
            resolve(lat(), "v[2000000,0,0,0,0,0,0,0,0,0]"),
            Err(DslError::Lattice(_))
        ));
    }
}
