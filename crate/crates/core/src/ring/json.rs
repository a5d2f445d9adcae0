//! JSON encodings of rings, elements, forms and homs.
//!
//! An element is `{"num":[{"c":int,"e":[int,..]},..],"den":[int,..]}` with `e`
//! indexed by variable order and `den` by the inverted list. A string in the
//! expression syntax is accepted wherever an element is expected. A ring is
//! `{"vars":[{"name":str,"log":bool}],"inverted":[poly,..]}`.

use serde_json::{json, Map, Value};

use super::{LogOneForm, Modulus, Poly, Ring, RingElem, RingHom, Var};
use crate::error::{Error, Result};

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, found {v}"))
}

fn signed(c: u64, m: u64) -> i64 {
    if c > m / 2 {
        c as i64 - m as i64
    } else {
        c as i64
    }
}

pub fn poly_to_json(p: &Poly, m: u64) -> Value {
    let terms: Vec<Value> = p.terms().map(|(e, c)| json!({"c": signed(c, m), "e": e})).collect();
    Value::Array(terms)
}

pub fn poly_from_json(v: &Value, nvars: usize, m: u64) -> Result<Poly> {
    let arr = v.as_array().ok_or_else(|| bad("array of terms", v))?;
    let mut p = Poly::zero(nvars);
    for t in arr {
        let c = t.get("c").and_then(Value::as_i64).ok_or_else(|| bad("term with integer \"c\"", t))?;
        let e = t.get("e").and_then(Value::as_array).ok_or_else(|| bad("term with exponent array \"e\"", t))?;
        if e.len() != nvars {
            return Err(Error::Parse(format!("exponent vector {t} has length {} but ring has {nvars} variables", e.len())));
        }
        let exps = e
            .iter()
            .map(|x| x.as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| bad("nonnegative exponent", x)))
            .collect::<Result<Vec<u32>>>()?;
        p.add_term(exps, super::reduce_signed(c, m), m);
    }
    Ok(p)
}

pub fn elem_to_json(e: &RingElem) -> Value {
    json!({"num": poly_to_json(e.num(), e.ring().m()), "den": e.den()})
}

pub fn elem_from_json(ring: &Ring, v: &Value) -> Result<RingElem> {
    match v {
        Value::String(s) => ring.parse(s),
        Value::Number(n) => {
            let c = n.as_i64().ok_or_else(|| bad("integer", v))?;
            Ok(ring.constant(c))
        }
        Value::Object(o) => {
            let num = poly_from_json(o.get("num").ok_or_else(|| bad("element with \"num\"", v))?, ring.nvars(), ring.m())?;
            let den = match o.get("den") {
                None => vec![0; ring.inverted().len()],
                Some(d) => {
                    let arr = d.as_array().ok_or_else(|| bad("denominator array", d))?;
                    if arr.len() != ring.inverted().len() {
                        return Err(Error::Parse(format!(
                            "denominator {d} has length {} but ring inverts {} elements",
                            arr.len(),
                            ring.inverted().len()
                        )));
                    }
                    arr.iter()
                        .map(|x| x.as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| bad("nonnegative exponent", x)))
                        .collect::<Result<Vec<u32>>>()?
                }
            };
            Ok(RingElem::from_parts(ring, num, den))
        }
        _ => Err(bad("element", v)),
    }
}

pub fn ring_to_json(r: &Ring) -> Value {
    let vars: Vec<Value> = r.vars().iter().map(|v| json!({"name": v.name, "log": v.log})).collect();
    let inv: Vec<Value> = r.inverted().iter().map(|g| poly_to_json(g, r.m())).collect();
    json!({"vars": vars, "inverted": inv})
}

/// Parses a ring at the given modulus. Inverted elements may be term arrays
/// or expression strings over the polynomial ring on the same variables.
pub fn ring_from_json(v: &Value, modulus: Modulus) -> Result<Ring> {
    let vars_v = v.get("vars").and_then(Value::as_array).ok_or_else(|| bad("ring with \"vars\"", v))?;
    let mut vars = Vec::new();
    for x in vars_v {
        let name = match x {
            Value::String(s) => s.clone(),
            _ => x.get("name").and_then(Value::as_str).ok_or_else(|| bad("variable with \"name\"", x))?.to_string(),
        };
        let log = x.get("log").and_then(Value::as_bool).unwrap_or(false);
        vars.push(Var { name, log });
    }
    let poly_ring = Ring::polynomial(vars.clone(), modulus)?;
    let mut inverted = Vec::new();
    if let Some(inv) = v.get("inverted") {
        let arr = inv.as_array().ok_or_else(|| bad("inverted list", inv))?;
        for g in arr {
            let p = match g {
                Value::String(s) => {
                    let e = poly_ring.parse(s)?;
                    e.num().clone()
                }
                _ => poly_from_json(g, vars.len(), modulus.m())?,
            };
            inverted.push(p);
        }
    }
    Ring::new(vars, inverted, modulus)
}

pub fn form_to_json(w: &LogOneForm) -> Value {
    let mut m = Map::new();
    for (var, c) in w.ring().vars().iter().zip(w.coeffs()) {
        m.insert(var.name.clone(), elem_to_json(c));
    }
    Value::Object(m)
}

/// A form is an object keyed by variable name; missing variables are zero.
pub fn form_from_json(ring: &Ring, v: &Value) -> Result<LogOneForm> {
    let o = v.as_object().ok_or_else(|| bad("form object keyed by variable", v))?;
    let mut coeffs = vec![ring.zero(); ring.nvars()];
    for (k, val) in o {
        let i = ring.var_index(k).ok_or_else(|| Error::Parse(format!("unknown variable `{k}` in form")))?;
        coeffs[i] = elem_from_json(ring, val)?;
    }
    Ok(LogOneForm::from_coeffs(ring, coeffs))
}

pub fn hom_to_json(h: &RingHom) -> Value {
    let mut m = Map::new();
    for (var, img) in h.source().vars().iter().zip(h.images()) {
        m.insert(var.name.clone(), elem_to_json(img));
    }
    Value::Object(m)
}

/// A hom is an object mapping each source variable name to its image.
pub fn hom_from_json(source: &Ring, target: &Ring, v: &Value) -> Result<RingHom> {
    let o = v.as_object().ok_or_else(|| bad("hom object keyed by variable", v))?;
    let mut imgs = Vec::new();
    for var in source.vars() {
        let img = o.get(&var.name).ok_or_else(|| Error::Parse(format!("hom {v} has no image for `{}`", var.name)))?;
        imgs.push(elem_from_json(target, img)?);
    }
    if let Some(k) = o.keys().find(|k| source.var_index(k).is_none()) {
        return Err(Error::Parse(format!("hom names unknown variable `{k}`")));
    }
    RingHom::new(source, target, imgs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip() {
        let md = Modulus::new(5, 2).unwrap();
        let r = ring_from_json(&json!({"vars":[{"name":"x","log":true},{"name":"y","log":false}],"inverted":["x - 1"]}), md)
            .unwrap();
        let e = r.el("(3*x^2*y - 7)/(x - 1)^2");
        let v = elem_to_json(&e);
        assert_eq!(elem_from_json(&r, &v).unwrap(), e);
        let r2 = ring_from_json(&ring_to_json(&r), md).unwrap();
        assert!(r2.same(&r));
        assert_eq!(elem_from_json(&r, &json!("x*y")).unwrap(), r.el("x*y"));
        assert!(elem_from_json(&r, &json!({"num":[{"c":1,"e":[1]}]})).is_err());
    }

    #[test]
    fn hom_and_form_round_trip() {
        let md = Modulus::new(7, 1).unwrap();
        let r = ring_from_json(&json!({"vars":["x"]}), md).unwrap();
        let h = hom_from_json(&r, &r, &json!({"x":"x^2 + 1"})).unwrap();
        assert!(hom_from_json(&r, &r, &hom_to_json(&h)).unwrap().same_as(&h));
        let w = LogOneForm::from_coeffs(&r, vec![r.el("x")]);
        assert_eq!(form_from_json(&r, &form_to_json(&w)).unwrap(), w);
    }
}
