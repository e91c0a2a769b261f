//! Text grammar for tensor expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        division only by constants
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | 'n' | 'i' | '(' expr ')'
//!         | 'D' '[' idx (',' idx)* ']' '(' expr ')'   derivatives, outermost first
//!         | NAME ('[' idx (',' idx)* ']')?            symbol
//!         | NAME ('[' idx (',' idx)* ']')? '(' expr ')'   function or operator
//! idx    := '0' | '^'? '~'? LABEL
//! ```
//!
//! `a` is a lower holomorphic index, `^a` an upper one, `~a` a lower
//! antiholomorphic index and `^~a` an upper antiholomorphic one. A repeated
//! label contracts an upper with a lower index. Built-in functions are `Re`,
//! `Im` and `conj`; other functions come from a [`Functions`] table. The
//! token `#` stands for the argument when parsing operator templates.

use std::collections::{BTreeMap, HashMap};

use crate::coeff::{Coeff, RatN};
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Term};
use crate::index::{parse_label_name, Kind, Label, Slot};
use crate::registry::Registry;

/// A callable: receives the index list written after its name (lowered)
/// and the optional argument.
pub type Function = Box<dyn Fn(&Registry, &[Slot], Option<Expr>) -> Result<Expr> + Send + Sync>;

#[derive(Default)]
pub struct Functions {
    map: HashMap<String, Function>,
}

impl Functions {
    pub fn new() -> Self {
        Functions::default()
    }

    pub fn insert(&mut self, name: &str, f: Function) {
        self.map.insert(name.to_string(), f);
    }

    pub fn get(&self, name: &str) -> Option<&Function> {
        self.map.get(name)
    }

    pub fn names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.map.keys().map(|s| s.as_str()).collect();
        v.sort();
        v
    }
}

/// Label renaming used for hygienic template expansion.
pub struct Hygiene {
    pub fixed: BTreeMap<Label, Label>,
    pub fresh_from: Label,
}

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
    reg: &'a Registry,
    funcs: Option<&'a Functions>,
    arg: Option<Expr>,
    hygiene: Option<Hygiene>,
    renamed: BTreeMap<Label, Label>,
    // written forms per label: (upper, barred)
    forms: BTreeMap<Label, Vec<(bool, bool)>>,
}

pub fn parse(reg: &Registry, src: &str) -> Result<Expr> {
    Parser::new(reg, src).run()
}

pub fn parse_with(reg: &Registry, funcs: &Functions, src: &str) -> Result<Expr> {
    Parser::new(reg, src).functions(funcs).run()
}

impl<'a> Parser<'a> {
    pub fn new(reg: &'a Registry, src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            reg,
            funcs: None,
            arg: None,
            hygiene: None,
            renamed: BTreeMap::new(),
            forms: BTreeMap::new(),
        }
    }

    pub fn functions(mut self, f: &'a Functions) -> Self {
        self.funcs = Some(f);
        self
    }

    pub fn argument(mut self, e: Expr) -> Self {
        self.arg = Some(e);
        self
    }

    pub fn hygiene(mut self, h: Hygiene) -> Self {
        self.hygiene = Some(h);
        self
    }

    pub fn run(mut self) -> Result<Expr> {
        let e = self.expr()?;
        self.ws();
        if self.pos < self.src.len() {
            return Err(self.err("unexpected trailing input"));
        }
        for (l, forms) in &self.forms {
            let up = forms.iter().any(|f| f.0);
            let low = forms.iter().any(|f| !f.0);
            let mixed = forms.iter().any(|f| f.1) && forms.iter().any(|f| !f.1);
            if mixed && (!up || !low) {
                return Err(Error::UnbalancedDummy(crate::index::label_name(*l)));
            }
        }
        for t in e.terms() {
            for (l, kinds) in t.labels() {
                let bad = kinds.len() > 2 || (kinds.len() == 2 && kinds[0] == kinds[1]);
                if bad {
                    return Err(Error::UnbalancedDummy(crate::index::label_name(l)));
                }
            }
        }
        e.signature(self.reg)?;
        Ok(e)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            first = false;
            self.pos += 1;
        }
        if self.pos > start {
            Some(self.src[start..self.pos].to_string())
        } else {
            None
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = acc.checked_add(self.reg, &t)?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = acc.checked_add(self.reg, &t.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let u = self.unary()?;
                acc = acc.mul(self.reg, &u);
            } else if self.eat('/') {
                let at = self.pos;
                let u = self.unary()?;
                let c = u.as_constant().filter(|c| !c.is_zero()).ok_or(Error::Parse {
                    pos: at,
                    msg: "division by a non-constant or zero".into(),
                })?;
                acc = acc.scale(&c.inv());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.ws();
            let k = self.integer().ok_or_else(|| self.err("expected exponent"))?;
            let mut acc = Expr::one();
            for _ in 0..k {
                acc = acc.mul(self.reg, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Option<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos > start {
            self.src[start..self.pos].parse().ok()
        } else {
            None
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        self.ws();
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c.is_ascii_digit() {
            let k = self.integer().ok_or_else(|| self.err("bad integer"))?;
            let k = i64::try_from(k).map_err(|_| self.err("integer too large"))?;
            return Ok(Expr::constant(Coeff::int(k)));
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c == '#' {
            self.pos += 1;
            return self
                .arg
                .clone()
                .ok_or_else(|| self.err("`#` outside an operator template"));
        }
        let start = self.pos;
        let name = self.ident().ok_or_else(|| self.err("expected a term"))?;
        match name.as_str() {
            "n" => return Ok(Expr::constant(Coeff::real(RatN::n()))),
            "i" => return Ok(Expr::constant(Coeff::i())),
            // `D(...)` without indices is the operator of that name
            "D" if !self.peek_char('(') => {
                let dirs = self.indices()?;
                if dirs.is_empty() {
                    return Err(self.err("empty derivative"));
                }
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                return Ok(e.derive_chain(self.reg, &dirs));
            }
            "Re" | "Im" | "conj" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                return match name.as_str() {
                    "Re" => e.re(self.reg),
                    "Im" => e.im(self.reg),
                    _ => e.conjugate(self.reg),
                };
            }
            _ => {}
        }
        if self.reg.contains(&name) {
            let slots = if self.peek_char('[') {
                self.indices()?
            } else {
                vec![]
            };
            let decl = self.reg.get(&name)?;
            if decl.slots.len() != slots.len() {
                return Err(Error::WrongArity {
                    name,
                    expected: decl.slots.len(),
                    got: slots.len(),
                });
            }
            for (k, s) in decl.slots.iter().zip(&slots) {
                if *k != s.kind() {
                    return Err(Error::KindMismatch(name));
                }
            }
            return Ok(Expr::factor(self.reg, Factor::new(&name, vec![], slots)));
        }
        if let Some(funcs) = self.funcs {
            if let Some(f) = funcs.get(&name) {
                let idx = if self.peek_char('[') {
                    self.indices()?
                } else {
                    vec![]
                };
                let arg = if self.peek_char('(') {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Some(e)
                } else {
                    None
                };
                return f(self.reg, &idx, arg);
            }
        }
        self.pos = start;
        Err(Error::UnknownSymbol(name))
    }

    fn peek_char(&mut self, c: char) -> bool {
        self.ws();
        self.peek() == Some(c)
    }

    fn indices(&mut self) -> Result<Vec<Slot>> {
        self.expect('[')?;
        let mut out = vec![];
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.index()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn index(&mut self) -> Result<Slot> {
        self.ws();
        if self.eat('0') {
            return Ok(Slot::Reeb);
        }
        let upper = self.eat('^');
        let bar = self.eat('~');
        self.ws();
        let name = self.ident().ok_or_else(|| self.err("expected an index"))?;
        let raw = parse_label_name(&name).ok_or_else(|| self.err("bad index label"))?;
        let label = self.map_label(raw);
        self.forms.entry(label).or_default().push((upper, bar));
        let kind = if upper != bar { Kind::Anti } else { Kind::Hol };
        Ok(Slot::new(kind, label))
    }

    fn map_label(&mut self, raw: Label) -> Label {
        let Some(h) = &mut self.hygiene else {
            return raw;
        };
        if let Some(&m) = h.fixed.get(&raw) {
            return m;
        }
        if let Some(&m) = self.renamed.get(&raw) {
            return m;
        }
        let m = h.fresh_from;
        h.fresh_from += 1;
        self.renamed.insert(raw, m);
        m
    }
}

/// Expand an operator template hygienically.
///
/// Labels named in `free` are bound to `idx` (in order); every other label in
/// the template is renamed away from the argument's labels.
pub fn expand_template(
    reg: &Registry,
    funcs: Option<&Functions>,
    template: &str,
    free: &[&str],
    idx: &[Slot],
    arg: Option<Expr>,
) -> Result<Expr> {
    if idx.len() > free.len() {
        return Err(Error::Invalid(format!(
            "too many indices for template `{}`",
            template
        )));
    }
    let mut fixed = BTreeMap::new();
    let mut top = arg.as_ref().and_then(|a| a.max_label()).map_or(0, |m| m + 1);
    for (k, name) in free.iter().enumerate() {
        let raw = parse_label_name(name).expect("template label");
        let to = idx.get(k).and_then(|s| s.label()).unwrap_or(raw);
        fixed.insert(raw, to);
        top = top.max(to + 1);
    }
    let mut p = Parser::new(reg, template).hygiene(Hygiene {
        fixed,
        fresh_from: top + 32,
    });
    if let Some(f) = funcs {
        p = p.functions(f);
    }
    if let Some(a) = arg {
        p = p.argument(a);
    }
    p.run()
}

/// Build an expression from a single term without parsing.
pub fn monomial(reg: &Registry, c: Coeff, factors: Vec<Factor>) -> Expr {
    Expr::from_terms(reg, vec![Term::new(c, factors)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Registry {
        Registry::pseudohermitian()
    }

    #[test]
    fn round_trip_printing() {
        let r = reg();
        for src in [
            "D[a](sigma)*D[^a](sigma)",
            "A[a,b]*D[^a](sigma)*D[^b](sigma) + 3*i*P^2",
            "(n - 1)/(2*n)*D[0,b](sigma) - i*D[^~a](Pab[b,~a])",
            "Rm[a,~b,c,~d]*Ab[^a,^c]",
        ] {
            let e = parse(&r, src).unwrap();
            let again = parse(&r, &e.to_string()).unwrap();
            assert_eq!(e, again, "{}", src);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let r = reg();
        assert!(matches!(parse(&r, "P*D[~a](sigma) + Tb[~b]"), Err(Error::FreeIndexMismatch(..))));
        assert!(matches!(parse(&r, "P + f"), Err(Error::WeightMismatch(..))));
        assert!(matches!(parse(&r, "D[a](f)*D[a](f)"), Err(Error::UnbalancedDummy(_))));
        assert!(matches!(parse(&r, "D[a](f)*D[~a](f)"), Err(Error::UnbalancedDummy(_))));
        assert!(matches!(parse(&r, "A[a]"), Err(Error::WrongArity { .. })));
        assert!(matches!(parse(&r, "Q"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse(&r, "P*"), Err(Error::Parse { .. })));
    }

    #[test]
    fn upper_index_lowers_to_opposite_kind() {
        let r = reg();
        let a = parse(&r, "Ab[^a,^b]*D[a,b](f)").unwrap();
        let b = parse(&r, "D[b,a](f)*Ab[^b,^a]").unwrap();
        assert_eq!(a, b);
    }
}
