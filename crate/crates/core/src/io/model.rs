//! The `pcrf` model text format.
//!
//! ```text
//! model     = header { line } ;
//! header    = "pcrf" ws "1" nl ;
//! line      = ( alphabet | length | semiring | pattern | override | blank ) nl ;
//! alphabet  = "alphabet" { ws symbol } ;
//! length    = "n" ws integer ;
//! semiring  = "semiring" ws ( "sum-product" | "min-plus" | "count" | "bool" ) ;
//! pattern   = "pattern" ws word ws energy ;
//! override  = "override" ws word ws integer ws energy ;
//! word      = symbol { symbol }            (single-character symbols)
//!           | symbol { "." symbol } ;      (otherwise)
//! ```
//!
//! `#` starts a comment that runs to the end of the line. `alphabet` and `n`
//! must appear once, before any `pattern` or `override`; `semiring` is
//! optional and defaults to `sum-product`. Energies are decimal reals; the
//! count semiring reads them as integer costs and the boolean semiring reads
//! zero as false.

use crate::algebra::SemiringKind;
use crate::error::{Error, Result};
use crate::pattern::{Alphabet, PatternBank, Symbol};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub version: u32,
    pub semiring: SemiringKind,
    /// Closed over its alphabet.
    pub bank: PatternBank,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedModel {
    pub model: ModelFile,
    /// Letters that had no pattern of their own and were added.
    pub added_letters: Vec<Symbol>,
}

impl ParsedModel {
    pub fn warnings(&self) -> Vec<String> {
        if self.added_letters.is_empty() {
            return Vec::new();
        }
        let alpha = self.model.bank.alphabet();
        let names: Vec<&str> = self.added_letters.iter().map(|&c| alpha.symbol(c)).collect();
        vec![format!("added single-letter patterns with neutral cost: {}", names.join(" "))]
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, message: message.into() }
}

fn invalid(path: String, message: impl Into<String>) -> Error {
    Error::Invalid { path, message: message.into() }
}

fn energy(text: &str, line: usize) -> Result<f64> {
    let e: f64 = text.parse().map_err(|_| syntax(line, format!("bad energy {text:?}")))?;
    if !e.is_finite() {
        return Err(syntax(line, format!("energy {text:?} is not finite")));
    }
    Ok(e)
}

pub fn parse_model(text: &str) -> Result<ParsedModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "empty model"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.first() != Some(&"pcrf") || head.len() != 2 {
        return Err(syntax(hl, "expected header `pcrf 1`"));
    }
    let version: u32 = head[1].parse().map_err(|_| syntax(hl, "bad format version"))?;
    if version != FORMAT_VERSION {
        return Err(syntax(hl, format!("unsupported format version {version}")));
    }

    let mut alphabet: Option<Alphabet> = None;
    let mut n: Option<usize> = None;
    let mut semiring: Option<SemiringKind> = None;
    let mut bank: Option<PatternBank> = None;
    let (mut np, mut no) = (0, 0);
    for (ln, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        let key = tok[0];
        let arity = |k: usize| if tok.len() == k + 1 { Ok(()) } else { Err(syntax(ln, format!("`{key}` takes {k} fields"))) };
        match key {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(syntax(ln, "alphabet given twice"));
                }
                alphabet = Some(Alphabet::new(tok[1..].iter().copied())?);
            }
            "n" => {
                arity(1)?;
                if n.is_some() {
                    return Err(syntax(ln, "n given twice"));
                }
                let v: usize = tok[1].parse().map_err(|_| syntax(ln, format!("bad length {:?}", tok[1])))?;
                if v < 1 {
                    return Err(invalid("n".into(), "sequence length must be at least 1"));
                }
                n = Some(v);
            }
            "semiring" => {
                arity(1)?;
                if semiring.is_some() {
                    return Err(syntax(ln, "semiring given twice"));
                }
                semiring =
                    Some(SemiringKind::parse(tok[1]).ok_or_else(|| syntax(ln, format!("unknown semiring {:?}", tok[1])))?);
            }
            "pattern" | "override" => {
                if bank.is_none() {
                    let a = alphabet.clone().ok_or_else(|| syntax(ln, "alphabet must come before patterns"))?;
                    let len = n.ok_or_else(|| syntax(ln, "n must come before patterns"))?;
                    bank = Some(PatternBank::new(a, len)?);
                }
                let b = bank.as_mut().expect("created above");
                if key == "pattern" {
                    arity(2)?;
                    let path = format!("patterns[{np}]");
                    let word = b.alphabet().parse_word(tok[1]).map_err(|e| invalid(format!("{path}.word"), e.to_string()))?;
                    b.add_pattern(word, energy(tok[2], ln)?)?;
                    np += 1;
                } else {
                    arity(3)?;
                    let path = format!("overrides[{no}]");
                    let word = b.alphabet().parse_word(tok[1]).map_err(|e| invalid(format!("{path}.word"), e.to_string()))?;
                    let start: usize = tok[2].parse().map_err(|_| syntax(ln, format!("bad start {:?}", tok[2])))?;
                    b.add_override(word, start, energy(tok[3], ln)?)
                        .map_err(|e| invalid(format!("{path}.start"), e.to_string()))?;
                    no += 1;
                }
            }
            other => return Err(syntax(ln, format!("unknown key {other:?}"))),
        }
    }
    let mut bank = match bank {
        Some(b) => b,
        None => {
            let a = alphabet.ok_or_else(|| invalid("alphabet".into(), "missing"))?;
            PatternBank::new(a, n.ok_or_else(|| invalid("n".into(), "missing"))?)?
        }
    };
    let semiring = semiring.unwrap_or(SemiringKind::SumProduct);
    if semiring == SemiringKind::Count {
        for (i, p) in bank.patterns().iter().enumerate() {
            if p.energy.fract() != 0.0 {
                return Err(invalid(format!("patterns[{i}].energy"), "count costs must be integers"));
            }
        }
        for (i, o) in bank.overrides().iter().enumerate() {
            if o.energy.fract() != 0.0 {
                return Err(invalid(format!("overrides[{i}].energy"), "count costs must be integers"));
            }
        }
    }
    let added_letters = bank.close_alphabet();
    Ok(ParsedModel { model: ModelFile { version, semiring, bank }, added_letters })
}

/// Writes a model that [`parse_model`] reads back to an identical value.
/// Letters added by closure are left out; parsing adds them again.
pub fn serialize_model(model: &ModelFile) -> String {
    let b = &model.bank;
    let alpha = b.alphabet();
    let mut out = format!("pcrf {}\n", model.version);
    out.push_str(&format!("alphabet {}\n", alpha.symbols().join(" ")));
    out.push_str(&format!("n {}\n", b.n()));
    out.push_str(&format!("semiring {}\n", model.semiring));
    for p in b.patterns() {
        out.push_str(&format!("pattern {} {:?}\n", alpha.format_word(&p.word), p.energy));
    }
    for o in b.overrides() {
        out.push_str(&format!("override {} {} {:?}\n", alpha.format_word(&o.word), o.start, o.energy));
    }
    out
}
