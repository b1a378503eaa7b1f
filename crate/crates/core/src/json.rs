//! Versioned JSON documents for algebras, elements, simplices, morphisms and contractions.
//!
//! Objects are emitted with sorted keys and rationals as canonical `"p/q"`
//! strings, so serialization is deterministic and re-parses to an equal value.
//! Schema errors carry the JSON pointer of the offending node.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::coalg::Word;
use crate::dupont::Face;
use crate::error::{Error, Result};
use crate::forms::{Monomial, PolyForm};
use crate::holonomy::{cone, wrap_lie, Horn, LieAlgebra};
use crate::lincomb::LinComb;
use crate::linf::{AlgElement, BasisVector, CurvedLinf, LinfMorphism, ValidationReport};
use crate::perturb::{BasisSpace, Matrix, MatrixContraction};
use crate::rational::{format_q, parse_q, Q};
use crate::tensor::{FormValuedElement, WhitneyKey};

pub const SCHEMA: &str = "mc-holonomy/1";

fn schema_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema { pointer: if pointer.is_empty() { "/".into() } else { pointer.into() }, message: message.into() }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

fn field<'a>(v: &'a Value, pointer: &str, key: &str) -> Result<&'a Value> {
    object(v, pointer)?.get(key).ok_or_else(|| schema_err(pointer, format!("missing field {key:?}")))
}

fn object<'a>(v: &'a Value, pointer: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema_err(pointer, "expected an object"))
}

fn array<'a>(v: &'a Value, pointer: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(pointer, "expected an array"))
}

fn string<'a>(v: &'a Value, pointer: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema_err(pointer, "expected a string"))
}

fn uint(v: &Value, pointer: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema_err(pointer, "expected a non-negative integer"))
}

fn int(v: &Value, pointer: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema_err(pointer, "expected an integer"))
}

fn positive(v: &Value, pointer: &str) -> Result<u64> {
    match uint(v, pointer)? {
        0 => Err(schema_err(pointer, "expected a positive integer")),
        k => Ok(k),
    }
}

fn rational(v: &Value, pointer: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s).map_err(|e| schema_err(pointer, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
        _ => Err(schema_err(pointer, "expected a rational string \"p/q\"")),
    }
}

fn q_json(c: &Q) -> Value {
    Value::String(format_q(c))
}

/// Checks the `"schema"` tag of a top-level document.
pub fn check_tag(v: &Value) -> Result<()> {
    match object(v, "")?.get("schema") {
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(Value::String(s)) => Err(schema_err("/schema", format!("unsupported schema {s:?}, expected {SCHEMA:?}"))),
        Some(_) => Err(schema_err("/schema", "expected a string")),
        None => Err(schema_err("", format!("missing field \"schema\" (expected {SCHEMA:?})"))),
    }
}

/// Parses a document from text, reporting syntax errors with their position.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Canonical text of a document: pretty-printed with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn tagged(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

// basis

fn parse_basis(v: &Value, pointer: &str, with_degree: bool) -> Result<Vec<BasisVector>> {
    let mut out = Vec::new();
    for (i, b) in array(v, pointer)?.iter().enumerate() {
        let p = child(pointer, i);
        let name = string(field(b, &p, "name")?, &child(&p, "name"))?;
        if name.is_empty() {
            return Err(schema_err(&child(&p, "name"), "empty basis name"));
        }
        if out.iter().any(|x: &BasisVector| x.name == name) {
            return Err(schema_err(&child(&p, "name"), format!("duplicate basis name {name:?}")));
        }
        let deg = if with_degree {
            let d = int(field(b, &p, "deg")?, &child(&p, "deg"))?;
            i32::try_from(d).map_err(|_| schema_err(&child(&p, "deg"), "degree out of range"))?
        } else {
            -1
        };
        let weight = positive(field(b, &p, "weight")?, &child(&p, "weight"))?;
        let weight = u32::try_from(weight).map_err(|_| schema_err(&child(&p, "weight"), "weight out of range"))?;
        out.push(BasisVector::new(name, deg, weight));
    }
    Ok(out)
}

fn basis_json(basis: &[BasisVector]) -> Value {
    Value::Array(basis.iter().map(|b| json!({"name": b.name, "deg": b.deg, "weight": b.weight})).collect())
}

fn lookup(names: &[BasisVector], v: &Value, pointer: &str) -> Result<usize> {
    let name = string(v, pointer)?;
    names.iter().position(|b| b.name == name).ok_or_else(|| schema_err(pointer, format!("unknown basis name {name:?}")))
}

fn parse_terms(basis: &[BasisVector], v: &Value, pointer: &str) -> Result<AlgElement> {
    let mut out = LinComb::new();
    for (i, t) in array(v, pointer)?.iter().enumerate() {
        let p = child(pointer, i);
        let k = lookup(basis, field(t, &p, "name")?, &child(&p, "name"))?;
        out.add_term(k, rational(field(t, &p, "coef")?, &child(&p, "coef"))?);
    }
    Ok(out)
}

fn terms_json(basis: &[BasisVector], x: &AlgElement) -> Value {
    Value::Array(x.iter().map(|(k, c)| json!({"name": basis[*k].name, "coef": format_q(c)})).collect())
}

// algebras

/// Parses an algebra document, or the `"lie"` shorthand for a nilpotent Lie
/// algebra (placed in degree −1, or its cone when `"cone": true`).
pub fn parse_algebra(v: &Value) -> Result<CurvedLinf> {
    check_tag(v)?;
    parse_algebra_body(v, "")
}

fn parse_algebra_body(v: &Value, pointer: &str) -> Result<CurvedLinf> {
    let obj = object(v, pointer)?;
    let cutoff = positive(field(v, pointer, "cutoff")?, &child(pointer, "cutoff"))? as u32;
    if let Some(lie) = obj.get("lie") {
        let g = parse_lie(lie, &child(pointer, "lie"))?;
        let as_cone = match obj.get("cone") {
            None => false,
            Some(c) => c.as_bool().ok_or_else(|| schema_err(&child(pointer, "cone"), "expected a boolean"))?,
        };
        return Ok(if as_cone { cone(&g, cutoff) } else { wrap_lie(&g, cutoff) });
    }
    let basis = parse_basis(field(v, pointer, "basis")?, &child(pointer, "basis"), true)?;
    let arity_cap = match obj.get("arity_cap") {
        None => cutoff as usize,
        Some(a) => positive(a, &child(pointer, "arity_cap"))? as usize,
    };
    let mut l = CurvedLinf::new(basis.clone(), cutoff, arity_cap).map_err(|e| schema_err(&child(pointer, "basis"), e.to_string()))?;
    let brackets = match obj.get("brackets") {
        None => return Ok(l),
        Some(b) => array(b, &child(pointer, "brackets"))?,
    };
    for (i, b) in brackets.iter().enumerate() {
        let p = child(&child(pointer, "brackets"), i);
        let inputs = array(field(b, &p, "in")?, &child(&p, "in"))?;
        let word: Vec<usize> =
            inputs.iter().enumerate().map(|(j, x)| lookup(&basis, x, &child(&child(&p, "in"), j))).collect::<Result<_>>()?;
        if let Some(a) = object(b, &p)?.get("arity") {
            if uint(a, &child(&p, "arity"))? as usize != word.len() {
                return Err(schema_err(&child(&p, "arity"), format!("arity {a} but {} inputs", word.len())));
            }
        }
        let out = parse_terms(&basis, field(b, &p, "out")?, &child(&p, "out"))?;
        if word.len() > arity_cap {
            return Err(Error::CutoffOverflow(format!("bracket at {p} has arity {} above the arity cap {arity_cap}", word.len())));
        }
        l.set_bracket(&word, out).map_err(|e| schema_err(&p, e.to_string()))?;
    }
    Ok(l)
}

fn parse_lie(v: &Value, pointer: &str) -> Result<LieAlgebra> {
    let basis = parse_basis(field(v, pointer, "basis")?, &child(pointer, "basis"), false)?;
    let pairs: Vec<(&str, u32)> = basis.iter().map(|b| (b.name.as_str(), b.weight)).collect();
    let mut g = LieAlgebra::new(&pairs);
    if let Some(bs) = object(v, pointer)?.get("brackets") {
        for (i, b) in array(bs, &child(pointer, "brackets"))?.iter().enumerate() {
            let p = child(&child(pointer, "brackets"), i);
            let inputs = array(field(b, &p, "in")?, &child(&p, "in"))?;
            if inputs.len() != 2 {
                return Err(schema_err(&child(&p, "in"), "a Lie bracket takes two inputs"));
            }
            let a = lookup(&basis, &inputs[0], &child(&child(&p, "in"), 0))?;
            let c = lookup(&basis, &inputs[1], &child(&child(&p, "in"), 1))?;
            let out = parse_terms(&basis, field(b, &p, "out")?, &child(&p, "out"))?;
            g.set_bracket(a, c, out).map_err(|e| schema_err(&p, e.to_string()))?;
        }
    }
    let problems = g.check();
    if !problems.is_empty() {
        return Err(schema_err(pointer, problems.join("; ")));
    }
    Ok(g)
}

/// The algebra document, brackets listed by sorted input words.
pub fn algebra_to_json(l: &CurvedLinf) -> Value {
    tagged(algebra_body(l))
}

fn algebra_body(l: &CurvedLinf) -> Value {
    let brackets: Vec<Value> = l
        .brackets()
        .iter()
        .map(|(w, out)| json!({"arity": w.len(), "in": l.names(w), "out": terms_json(l.basis(), out)}))
        .collect();
    json!({"basis": basis_json(l.basis()), "brackets": brackets, "cutoff": l.cutoff(), "arity_cap": l.arity_cap()})
}

// elements

/// An element as a map from basis names to rationals.
pub fn element_to_json(l: &CurvedLinf, x: &AlgElement) -> Value {
    Value::Object(x.iter().map(|(k, c)| (l.name(*k).to_string(), q_json(c))).collect())
}

pub fn parse_element(l: &CurvedLinf, v: &Value, pointer: &str) -> Result<AlgElement> {
    let mut out = LinComb::new();
    for (name, c) in object(v, pointer)? {
        let p = child(pointer, name);
        let k = l.index_of(name).ok_or_else(|| schema_err(&p, format!("unknown basis name {name:?}")))?;
        out.add_term(k, rational(c, &p)?);
    }
    Ok(out)
}

/// An element document: `{"schema": …, "element": {name: coef}}`, or the bare map.
pub fn parse_element_document(l: &CurvedLinf, v: &Value) -> Result<AlgElement> {
    let obj = object(v, "")?;
    if obj.contains_key("schema") {
        check_tag(v)?;
        parse_element(l, field(v, "", "element")?, "/element")
    } else {
        parse_element(l, v, "")
    }
}

// forms

pub fn polyform_to_json(a: &PolyForm) -> Value {
    let terms: Vec<Value> =
        a.terms().iter().map(|(m, c)| json!({"exp": m.exp, "ds": m.dt_indices(), "coef": format_q(c)})).collect();
    json!({"n": a.dim(), "terms": terms})
}

pub fn parse_polyform(v: &Value, pointer: &str) -> Result<PolyForm> {
    let n = uint(field(v, pointer, "n")?, &child(pointer, "n"))? as usize;
    let mut terms = LinComb::new();
    for (i, t) in array(field(v, pointer, "terms")?, &child(pointer, "terms"))?.iter().enumerate() {
        let p = child(&child(pointer, "terms"), i);
        let exp: Vec<u32> = array(field(t, &p, "exp")?, &child(&p, "exp"))?
            .iter()
            .enumerate()
            .map(|(j, e)| uint(e, &child(&child(&p, "exp"), j)).map(|e| e as u32))
            .collect::<Result<_>>()?;
        if exp.len() != n {
            return Err(schema_err(&child(&p, "exp"), format!("expected {n} exponents, found {}", exp.len())));
        }
        let mut ds = 0u32;
        let dts = match object(t, &p)?.get("ds") {
            None => Vec::new(),
            Some(d) => array(d, &child(&p, "ds"))?.clone(),
        };
        let mut previous = 0;
        for (j, d) in dts.iter().enumerate() {
            let dp = child(&child(&p, "ds"), j);
            let d = uint(d, &dp)? as usize;
            if d == 0 || d > n || d <= previous {
                return Err(schema_err(&dp, format!("dt indices must increase within 1..={n}")));
            }
            previous = d;
            ds |= 1 << (d - 1);
        }
        terms.add_term(Monomial { exp, ds }, rational(field(t, &p, "coef")?, &child(&p, "coef"))?);
    }
    PolyForm::from_terms(n, terms).map_err(|e| schema_err(pointer, e.to_string()))
}

/// A form-valued element as a map from basis names to forms.
pub fn form_valued_to_json(l: &CurvedLinf, x: &FormValuedElement) -> Value {
    Value::Object(x.components().iter().map(|(k, a)| (l.name(*k).to_string(), polyform_to_json(a))).collect())
}

pub fn parse_form_valued(l: &CurvedLinf, n: usize, v: &Value, pointer: &str) -> Result<FormValuedElement> {
    let mut comps = BTreeMap::new();
    for (name, a) in object(v, pointer)? {
        let p = child(pointer, name);
        let k = l.index_of(name).ok_or_else(|| schema_err(&p, format!("unknown basis name {name:?}")))?;
        let a = parse_polyform(a, &p)?;
        if a.dim() != n {
            return Err(schema_err(&child(&p, "n"), format!("form on Δ{} inside a {n}-simplex", a.dim())));
        }
        comps.insert(k, a);
    }
    FormValuedElement::new(n, comps).map_err(|e| schema_err(pointer, e.to_string()))
}

/// A simplex document: `{"schema", "n", "algebra"?, "components": {name: form}}`.
pub fn simplex_to_json(l: &CurvedLinf, x: &FormValuedElement) -> Value {
    tagged(simplex_body(l, x))
}

fn simplex_body(l: &CurvedLinf, x: &FormValuedElement) -> Value {
    json!({"n": x.dim(), "components": form_valued_to_json(l, x)})
}

pub fn parse_simplex(l: &CurvedLinf, v: &Value) -> Result<FormValuedElement> {
    check_tag(v)?;
    parse_simplex_body(l, v, "")
}

// a face is a simplex object, or `{"edge": {name: coef}}` for `dt₁ ⊗ v`
fn parse_simplex_body(l: &CurvedLinf, v: &Value, pointer: &str) -> Result<FormValuedElement> {
    if let Some(e) = object(v, pointer)?.get("edge") {
        return Ok(crate::holonomy::edge(&parse_element(l, e, &child(pointer, "edge"))?));
    }
    let n = uint(field(v, pointer, "n")?, &child(pointer, "n"))? as usize;
    parse_form_valued(l, n, field(v, pointer, "components")?, &child(pointer, "components"))
}

/// A horn document: `{"schema", "n", "missing", "faces": [...]}` listing the
/// facets `j ≠ missing` in increasing order.
pub fn parse_horn(l: &CurvedLinf, v: &Value) -> Result<Horn> {
    check_tag(v)?;
    let n = positive(field(v, "", "n")?, "/n")? as usize;
    let missing = uint(field(v, "", "missing")?, "/missing")? as usize;
    if missing > n {
        return Err(schema_err("/missing", format!("no facet {missing} on the {n}-simplex")));
    }
    let faces = array(field(v, "", "faces")?, "/faces")?;
    if faces.len() != n {
        return Err(schema_err("/faces", format!("expected {n} faces, found {}", faces.len())));
    }
    let mut out = BTreeMap::new();
    for (slot, j) in (0..=n).filter(|&j| j != missing).enumerate() {
        let p = child("/faces", slot);
        let x = parse_simplex_body(l, &faces[slot], &p)?;
        if x.dim() + 1 != n {
            return Err(schema_err(&p, format!("facet {j} must be an {}-simplex", n - 1)));
        }
        out.insert(j, x);
    }
    Horn::new(n, missing, out).map_err(|e| schema_err("/faces", e.to_string()))
}

/// Whitney coordinates `{"n", "coeffs": [{"face", "name", "coef"}]}`.
pub fn whitney_to_json(l: &CurvedLinf, n: usize, y: &LinComb<WhitneyKey>) -> Value {
    let coeffs: Vec<Value> =
        y.iter().map(|((f, k), c): (&(Face, usize), &Q)| json!({"face": f, "name": l.name(*k), "coef": format_q(c)})).collect();
    json!({"n": n, "coeffs": coeffs})
}

// morphisms

/// `{"schema", "source", "target", "arity_cap", "components": {arity: [{"in", "out"}]}}`.
pub fn morphism_to_json(f: &LinfMorphism) -> Value {
    let mut by_arity: BTreeMap<usize, Vec<Value>> = BTreeMap::new();
    for (w, out) in f.components() {
        by_arity.entry(w.len()).or_default().push(json!({"in": f.source().names(w), "out": terms_json(f.target().basis(), out)}));
    }
    let components: Map<String, Value> = by_arity.into_iter().map(|(a, v)| (a.to_string(), Value::Array(v))).collect();
    tagged(json!({
        "source": algebra_body(f.source()),
        "target": algebra_body(f.target()),
        "arity_cap": f.arity_cap(),
        "components": components,
    }))
}

pub fn parse_morphism(v: &Value) -> Result<LinfMorphism> {
    check_tag(v)?;
    let source = parse_algebra_body(field(v, "", "source")?, "/source")?;
    let target = parse_algebra_body(field(v, "", "target")?, "/target")?;
    let cap = match object(v, "")?.get("arity_cap") {
        None => source.cutoff() as usize,
        Some(a) => positive(a, "/arity_cap")? as usize,
    };
    let mut f = LinfMorphism::new(source.clone(), target.clone(), cap);
    for (arity, entries) in object(field(v, "", "components")?, "/components")? {
        let ap = child("/components", arity);
        let arity: usize = arity.parse().map_err(|_| schema_err(&ap, "arity keys are integers"))?;
        for (i, e) in array(entries, &ap)?.iter().enumerate() {
            let p = child(&ap, i);
            let inputs = array(field(e, &p, "in")?, &child(&p, "in"))?;
            if inputs.len() != arity {
                return Err(schema_err(&child(&p, "in"), format!("expected {arity} inputs, found {}", inputs.len())));
            }
            let word: Word<usize> = inputs
                .iter()
                .enumerate()
                .map(|(j, x)| lookup(source.basis(), x, &child(&child(&p, "in"), j)))
                .collect::<Result<_>>()?;
            let out = parse_terms(target.basis(), field(e, &p, "out")?, &child(&p, "out"))?;
            f.set_component(&word, out).map_err(|e| schema_err(&p, e.to_string()))?;
        }
    }
    Ok(f)
}

// contractions

fn matrix_json(domain: &[BasisVector], codomain: &[BasisVector], m: &Matrix) -> Value {
    Value::Object(
        m.iter()
            .enumerate()
            .filter(|(_, col)| !col.is_zero())
            .map(|(k, col)| (domain[k].name.clone(), terms_json(codomain, col)))
            .collect(),
    )
}

fn parse_matrix(domain: &[BasisVector], codomain: &[BasisVector], v: &Value, pointer: &str) -> Result<Matrix> {
    let mut m: Matrix = vec![LinComb::new(); domain.len()];
    for (name, col) in object(v, pointer)? {
        let p = child(pointer, name);
        let k = domain.iter().position(|b| &b.name == name).ok_or_else(|| schema_err(&p, format!("unknown basis name {name:?}")))?;
        m[k] = parse_terms(codomain, col, &p)?;
    }
    Ok(m)
}

/// `{"schema", "big", "small", "D", "d", "p", "i", "h"}`; matrices map a
/// domain basis name to the image column.
pub fn contraction_to_json(c: &MatrixContraction) -> Value {
    let (big_d, small_d, p, i, h) = c.matrices();
    let big = &c.big_space().basis;
    let small = &c.small_space().basis;
    tagged(json!({
        "big": basis_json(big),
        "small": basis_json(small),
        "D": matrix_json(big, big, big_d),
        "d": matrix_json(small, small, small_d),
        "p": matrix_json(big, small, p),
        "i": matrix_json(small, big, i),
        "h": matrix_json(big, big, h),
    }))
}

pub fn parse_contraction(v: &Value) -> Result<MatrixContraction> {
    check_tag(v)?;
    let big = parse_basis(field(v, "", "big")?, "/big", true)?;
    let small = parse_basis(field(v, "", "small")?, "/small", true)?;
    let m = |key: &str, dom: &[BasisVector], cod: &[BasisVector]| -> Result<Matrix> {
        match object(v, "")?.get(key) {
            None => Ok(vec![LinComb::new(); dom.len()]),
            Some(x) => parse_matrix(dom, cod, x, &child("", key)),
        }
    };
    let big_d = m("D", &big, &big)?;
    let small_d = m("d", &small, &small)?;
    let p = m("p", &big, &small)?;
    let i = m("i", &small, &big)?;
    let h = m("h", &big, &big)?;
    MatrixContraction::new(BasisSpace::new(big), BasisSpace::new(small), big_d, small_d, p, i, h)
}

// reports

pub fn report_to_json(r: &ValidationReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({"kind": v.kind.to_string(), "arity": v.arity, "inputs": v.inputs, "detail": v.detail}))
        .collect();
    json!({"valid": r.is_valid(), "checked": r.checked, "violations": violations})
}
