//! The ring definition file format.
//!
//! ```text
//! # comment
//! p = 3
//! vars = x, y, z
//! relations = x*y - z^2
//! ideal m = x, y, z
//! ideal n = x^2, y, z
//! sop = x, y
//! chain J(t) = x^t, y^t
//! ```
//!
//! `p` and `vars` are required and must precede nothing in particular (the
//! file is scanned for them first). `relations`, named `ideal`s, `sop` and
//! one `chain` are optional. Expressions use integers, variables, `+ - *`,
//! `^` with integer exponents and parentheses; in the chain block the named
//! parameter may appear in exponents as `t`, `t+k`, `t-k`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::field::PrimeField;
use crate::monomial::{MonomialOrder, OrderKind};
use crate::poly::{PolyRing, Polynomial};

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub name: String,
    pub param: String,
    pub templates: Vec<Expr>,
}

impl ChainSpec {
    pub fn instantiate(&self, ring: &Arc<PolyRing>, t: u32) -> Result<Vec<Polynomial>> {
        self.templates.iter().map(|e| e.eval(ring, Some(t))).collect()
    }
}

impl PartialEq for ChainSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.param == other.param && self.templates == other.templates
    }
}

#[derive(Debug, Clone)]
pub struct RingFile {
    pub ring: Arc<PolyRing>,
    pub relations: Vec<Polynomial>,
    /// Named ideals in file order.
    pub ideals: Vec<(String, Vec<Polynomial>)>,
    pub sop: Option<Vec<Polynomial>>,
    pub chain: Option<ChainSpec>,
}

impl PartialEq for RingFile {
    fn eq(&self, other: &Self) -> bool {
        self.ring.field == other.ring.field
            && self.ring.vars == other.ring.vars
            && self.relations == other.relations
            && self.ideals == other.ideals
            && self.sop == other.sop
            && self.chain == other.chain
    }
}

impl RingFile {
    pub fn parse(text: &str, order: OrderKind) -> Result<RingFile> {
        let lines: Vec<(usize, String)> = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let no_comment = match raw.find('#') {
                    Some(pos) => &raw[..pos],
                    None => raw,
                };
                (i + 1, no_comment.trim().to_string())
            })
            .filter(|(_, l)| !l.is_empty())
            .collect();

        let perr = |line: usize, msg: &str| Error::ParseError {
            line,
            col: 1,
            msg: msg.to_string(),
        };

        // pass 1: p and vars
        let mut p: Option<(usize, u64)> = None;
        let mut vars: Option<(usize, Vec<String>)> = None;
        for (line_no, line) in &lines {
            let Some((key, value)) = line.split_once('=') else { continue };
            match key.trim() {
                "p" => {
                    let v = value
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| perr(*line_no, "p must be an integer"))?;
                    p = Some((*line_no, v));
                }
                "vars" => {
                    let names: Vec<String> =
                        value.split(',').map(|s| s.trim().to_string()).collect();
                    for name in &names {
                        if name.is_empty()
                            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                            || name.chars().next().is_some_and(|c| c.is_ascii_digit())
                        {
                            return Err(perr(*line_no, "variable names must be identifiers"));
                        }
                    }
                    vars = Some((*line_no, names));
                }
                _ => {}
            }
        }
        let (_, p) = p.ok_or_else(|| perr(1, "missing `p = <prime>`"))?;
        let (_, vars) = vars.ok_or_else(|| perr(1, "missing `vars = ...`"))?;
        let field = PrimeField::new(p)?;
        let order = MonomialOrder::new(order, vars.len());
        let ring = PolyRing::new(field, vars, order)?;

        // pass 2: everything else, in file order
        let mut relations: Vec<Polynomial> = Vec::new();
        let mut ideals: Vec<(String, Vec<Polynomial>)> = Vec::new();
        let mut sop: Option<Vec<Polynomial>> = None;
        let mut chain: Option<ChainSpec> = None;
        for (line_no, line) in &lines {
            let Some((key, value)) = line.split_once('=') else {
                return Err(perr(*line_no, "expected `key = value`"));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "p" | "vars" => {}
                "relations" => {
                    relations = parse_list(&ring, value, *line_no)?;
                }
                "sop" => {
                    sop = Some(parse_list(&ring, value, *line_no)?);
                }
                _ if key.starts_with("ideal ") || key.starts_with("ideal\t") => {
                    let name = key["ideal".len()..].trim();
                    if name.is_empty() {
                        return Err(perr(*line_no, "ideal needs a name"));
                    }
                    if ideals.iter().any(|(n, _)| n == name) {
                        return Err(perr(*line_no, "duplicate ideal name"));
                    }
                    ideals.push((name.to_string(), parse_list(&ring, value, *line_no)?));
                }
                _ if key.starts_with("chain ") || key.starts_with("chain\t") => {
                    let head = key["chain".len()..].trim();
                    let (name, param) = head
                        .split_once('(')
                        .and_then(|(n, rest)| rest.strip_suffix(')').map(|p| (n.trim(), p.trim())))
                        .ok_or_else(|| perr(*line_no, "chain header must look like `chain J(t)`"))?;
                    if name.is_empty() || param.is_empty() {
                        return Err(perr(*line_no, "chain needs a name and a parameter"));
                    }
                    if ring.var_index(param).is_some() {
                        return Err(perr(*line_no, "chain parameter shadows a ring variable"));
                    }
                    if chain.is_some() {
                        return Err(perr(*line_no, "only one chain block is supported"));
                    }
                    let templates = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| relocate(parse_expr(&ring, s, Some(param)), *line_no))
                        .collect::<Result<Vec<Expr>>>()?;
                    chain = Some(ChainSpec {
                        name: name.to_string(),
                        param: param.to_string(),
                        templates,
                    });
                }
                other => {
                    return Err(perr(*line_no, &format!("unknown key `{other}`")));
                }
            }
        }
        Ok(RingFile { ring, relations, ideals, sop, chain })
    }

    /// Looks up a named ideal; the name `m` falls back to the irrelevant
    /// maximal ideal when the file does not define it.
    pub fn ideal_generators(&self, name: &str) -> Result<Vec<Polynomial>> {
        if let Some((_, gens)) = self.ideals.iter().find(|(n, _)| n == name) {
            return Ok(gens.clone());
        }
        if name == "m" {
            return Ok((0..self.ring.arity())
                .map(|i| Polynomial::variable(self.ring.clone(), i))
                .collect());
        }
        Err(Error::Invalid(format!("no ideal named `{name}` in the ring file")))
    }
}

fn parse_list(ring: &Arc<PolyRing>, value: &str, line_no: usize) -> Result<Vec<Polynomial>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| relocate(parse_expr(ring, s, None), line_no).and_then(|e| e.eval(ring, None)))
        .collect()
}

/// Re-anchors an expression parse error to its ring-file line.
fn relocate<T>(res: Result<T>, line_no: usize) -> Result<T> {
    res.map_err(|err| match err {
        Error::ParseError { col, msg, .. } => Error::ParseError { line: line_no, col, msg },
        other => other,
    })
}

impl fmt::Display for RingFile {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "p = {}", self.ring.field.modulus())?;
        writeln!(out, "vars = {}", self.ring.vars.join(", "))?;
        if !self.relations.is_empty() {
            let rendered: Vec<String> = self.relations.iter().map(|f| f.to_string()).collect();
            writeln!(out, "relations = {}", rendered.join(", "))?;
        }
        for (name, gens) in &self.ideals {
            let rendered: Vec<String> = gens.iter().map(|f| f.to_string()).collect();
            writeln!(out, "ideal {} = {}", name, rendered.join(", "))?;
        }
        if let Some(sop) = &self.sop {
            let rendered: Vec<String> = sop.iter().map(|f| f.to_string()).collect();
            writeln!(out, "sop = {}", rendered.join(", "))?;
        }
        if let Some(chain) = &self.chain {
            let rendered: Vec<String> =
                chain.templates.iter().map(|e| e.render(&self.ring, &chain.param)).collect();
            writeln!(out, "chain {}({}) = {}", chain.name, chain.param, rendered.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A1: &str = "\
# quadric surface
p = 3
vars = x, y, z
relations = x*y - z^2
ideal m = x, y, z
sop = x, y
chain J(t) = x^t, y^t
";

    #[test]
    fn parses_the_quadric_file() {
        let file = RingFile::parse(A1, OrderKind::GrevLex).unwrap();
        assert_eq!(file.ring.field.modulus(), 3);
        assert_eq!(file.ring.vars, vec!["x", "y", "z"]);
        assert_eq!(file.relations.len(), 1);
        assert_eq!(file.ideals.len(), 1);
        assert_eq!(file.sop.as_ref().unwrap().len(), 2);
        let chain = file.chain.as_ref().unwrap();
        let j2 = chain.instantiate(&file.ring, 2).unwrap();
        assert_eq!(j2.len(), 2);
        assert_eq!(j2[0].to_string(), "x^2");
    }

    #[test]
    fn non_prime_modulus_is_rejected() {
        let text = "p = 4\nvars = x\n";
        assert!(matches!(
            RingFile::parse(text, OrderKind::GrevLex),
            Err(Error::NonPrimeModulus(4))
        ));
    }

    #[test]
    fn unknown_variable_and_position_in_errors() {
        let text = "p = 3\nvars = x\nideal i = x + w\n";
        assert!(matches!(
            RingFile::parse(text, OrderKind::GrevLex),
            Err(Error::UnknownVariable(w)) if w == "w"
        ));
        let text = "p = 3\nvars = x\nideal i = x +\n";
        match RingFile::parse(text, OrderKind::GrevLex) {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "p = 3\nvars = x\nfrobnicate = 1\n";
        assert!(RingFile::parse(text, OrderKind::GrevLex).is_err());
    }

    #[test]
    fn missing_header_lines_are_rejected() {
        assert!(RingFile::parse("vars = x\n", OrderKind::GrevLex).is_err());
        assert!(RingFile::parse("p = 3\n", OrderKind::GrevLex).is_err());
    }

    #[test]
    fn maximal_ideal_fallback() {
        let file = RingFile::parse("p = 5\nvars = x, y\n", OrderKind::GrevLex).unwrap();
        let m = file.ideal_generators("m").unwrap();
        assert_eq!(m.len(), 2);
        assert!(file.ideal_generators("nope").is_err());
    }

    #[test]
    fn serialization_round_trips() {
        for text in [
            A1,
            "p = 2\nvars = x\n",
            "p = 5\nvars = x, y\nideal a = x^2 + 4*y, y\nsop = x + y, x - y\n",
            "p = 7\nvars = u, v\nrelations = u^3 - v^2\nchain C(s) = u^s, v^(s-1)\n",
        ] {
            let parsed = RingFile::parse(text, OrderKind::GrevLex).unwrap();
            let rendered = parsed.to_string();
            let reparsed = RingFile::parse(&rendered, OrderKind::GrevLex).unwrap();
            assert_eq!(parsed, reparsed, "round trip failed for:\n{text}\n->\n{rendered}");
        }
    }

    #[test]
    fn chain_parameter_cannot_shadow_variables() {
        let text = "p = 3\nvars = x, t\nchain J(t) = x^t\n";
        assert!(RingFile::parse(text, OrderKind::GrevLex).is_err());
    }
}
