//! JSON forms of the library types. Complex numbers are `[re, im]`, faces
//! are keyed as `"1,2,3"`, object keys come out sorted and every float is
//! written with 17 significant digits.

use std::collections::BTreeMap;
use std::io;

use serde_json::{json, Map, Value};

use crate::edgeops::EdgeOperatorFamily;
use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSpace, GrassmannElement};
use crate::operators::LinearOperator;
use crate::pachner::PachnerReport;
use crate::simplicial::{Cochain, Edge, Face, Simplex4, Tet, Vertex};
use crate::weights::WeightMatrix;
use crate::C64;

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

pub fn key(v: &[Vertex]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_key(s: &str) -> Result<Vec<Vertex>> {
    s.split(',')
        .map(|p| p.trim().parse::<Vertex>().map_err(|_| bad(format!("bad vertex list {s:?}"))))
        .collect()
}

fn fixed<const N: usize>(v: Vec<Vertex>) -> Result<[Vertex; N]> {
    let n = v.len();
    v.try_into().map_err(|_| bad(format!("expected {N} vertices, found {n}")))
}

/// Finite floats as numbers, anything else as `null`.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

fn num(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(format!("expected a number, found {v}")))
}

pub fn parse_complex(v: &Value) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(bad(format!("expected [re, im], found {v}"))),
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| bad(format!("missing field {name:?}")))
}

fn object<'a>(v: &'a Value, name: &str) -> Result<&'a Map<String, Value>> {
    field(v, name)?.as_object().ok_or_else(|| bad(format!("{name:?} must be an object")))
}

fn vertex_list(v: &Value) -> Result<Vec<Vertex>> {
    v.as_array()
        .ok_or_else(|| bad("expected a vertex list"))?
        .iter()
        .map(|x| x.as_u64().and_then(|n| Vertex::try_from(n).ok()).ok_or_else(|| bad(format!("bad vertex {x}"))))
        .collect()
}

pub fn element_to_json(w: &GrassmannElement) -> Value {
    let labels = w.space().labels();
    let coeffs: Vec<Value> = w
        .terms()
        .map(|(mask, c)| {
            let mono: Vec<Value> = (0..labels.len()).filter(|i| mask >> i & 1 == 1).map(|i| json!(labels[i])).collect();
            json!({"mono": mono, "re": float(c.re), "im": float(c.im)})
        })
        .collect();
    json!({"generators": labels, "coeffs": coeffs})
}

/// Monomials may list their generators in any order; the coefficient is
/// read as belonging to that product and re-signed to canonical order.
pub fn element_from_json(v: &Value) -> Result<GrassmannElement> {
    let gens = field(v, "generators")?.as_array().ok_or_else(|| bad("generators must be a list"))?;
    let labels: Vec<Tet> = gens.iter().map(|g| fixed(vertex_list(g)?)).collect::<Result<_>>()?;
    let space = GeneratorSpace::new(labels)?;
    let mut out = GrassmannElement::zero(&space);
    for term in field(v, "coeffs")?.as_array().ok_or_else(|| bad("coeffs must be a list"))? {
        let c = C64::new(num(field(term, "re")?)?, num(field(term, "im")?)?);
        let mut m = GrassmannElement::scalar(&space, c);
        let mono = field(term, "mono")?.as_array().ok_or_else(|| bad("mono must be a list"))?;
        // x_a x_b ... = ((1·x_a)·x_b)...
        for g in mono {
            let i = space.require(&fixed(vertex_list(g)?)?)?;
            m = m.multiply(&GrassmannElement::generator(&space, i)?)?;
            if m.is_zero() && c != C64::default() {
                return Err(Error::RepeatedVariable(space.label(i)?));
            }
        }
        out = out.add(&m)?;
    }
    Ok(out)
}

pub fn cochain_to_json(c: &Cochain) -> Value {
    let values: Map<String, Value> = c.values().iter().map(|(k, z)| (key(k), complex(*z))).collect();
    json!({"degree": c.degree(), "values": values})
}

pub fn cochain_from_json(v: &Value) -> Result<Cochain> {
    let degree = field(v, "degree")?.as_u64().ok_or_else(|| bad("degree must be an integer"))? as usize;
    let values = object(v, "values")?
        .iter()
        .map(|(k, z)| Ok((parse_key(k)?, parse_complex(z)?)))
        .collect::<Result<Vec<_>>>()?;
    Cochain::from_values(degree, values)
}

pub fn operator_to_json(d: &LinearOperator) -> Value {
    let terms: Map<String, Value> = d
        .space()
        .labels()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (b, g) = d.component_at(i).expect("index within space");
            (key(t), json!({"beta": complex(b), "gamma": complex(g)}))
        })
        .collect();
    json!({"terms": terms})
}

/// The generator space is the set of keys.
pub fn operator_from_json(v: &Value) -> Result<LinearOperator> {
    let terms = object(v, "terms")?;
    let labels: Vec<Tet> = terms.keys().map(|k| fixed(parse_key(k)?)).collect::<Result<_>>()?;
    let space = GeneratorSpace::new(labels)?;
    let mut d = LinearOperator::zero(&space);
    for (k, t) in terms {
        let i = space.require(&fixed(parse_key(k)?)?)?;
        d.set_component(i, parse_complex(field(t, "beta")?)?, parse_complex(field(t, "gamma")?)?)?;
    }
    Ok(d)
}

pub fn weight_matrix_to_json(f: &WeightMatrix) -> Value {
    let phi: Map<String, Value> = f.phi_map().iter().map(|(k, z)| (key(k), complex(*z))).collect();
    json!({"simplex": f.simplex(), "phi": phi})
}

pub fn weight_matrix_from_json(v: &Value) -> Result<WeightMatrix> {
    let simplex: Simplex4 = fixed(vertex_list(field(v, "simplex")?)?)?;
    let phi: BTreeMap<Face, C64> = object(v, "phi")?
        .iter()
        .map(|(k, z)| Ok((fixed(parse_key(k)?)?, parse_complex(z)?)))
        .collect::<Result<_>>()?;
    WeightMatrix::from_phi(simplex, &phi)
}

pub fn family_to_json(fam: &EdgeOperatorFamily) -> Value {
    let edges: Map<String, Value> = fam.operators().iter().map(|(e, d)| (key(e), operator_to_json(d))).collect();
    json!({"edges": edges, "normalized": fam.is_normalized()})
}

pub fn family_from_json(v: &Value) -> Result<EdgeOperatorFamily> {
    let mut ops = BTreeMap::new();
    for (k, d) in object(v, "edges")? {
        let e: Edge = fixed(parse_key(k)?)?;
        ops.insert(e, operator_from_json(d)?);
    }
    let vertices: std::collections::BTreeSet<Vertex> = ops.keys().flatten().copied().collect();
    let simplex: Simplex4 = fixed(vertices.into_iter().collect())?;
    let normalized = field(v, "normalized")?.as_bool().ok_or_else(|| bad("normalized must be a boolean"))?;
    // operators read from JSON live on their own key sets; move them onto
    // the simplex's tetrahedra
    let space = GeneratorSpace::new(crate::simplicial::tets_of(&simplex))?;
    let moved = ops
        .into_iter()
        .map(|(e, d)| {
            let mut out = LinearOperator::zero(&space);
            for (i, t) in d.space().labels().iter().enumerate() {
                let (b, g) = d.component_at(i)?;
                out.set_component(space.require(t)?, b, g)?;
            }
            Ok((e, out))
        })
        .collect::<Result<_>>()?;
    EdgeOperatorFamily::new(simplex, moved, normalized)
}

pub fn elliptic_to_json(p: &EllipticParams) -> Value {
    let coords: Map<String, Value> = p.coords().iter().map(|(v, z)| (v.to_string(), complex(*z))).collect();
    json!({"modulus": complex(p.modulus()), "coords": coords})
}

pub fn elliptic_from_json(v: &Value) -> Result<EllipticParams> {
    let k = parse_complex(field(v, "modulus")?)?;
    let coords = coords_from_json(field(v, "coords")?)?;
    EllipticParams::new(k, coords)
}

/// `{"1": [re, im], ...}`, either bare or under a `coords` field.
pub fn coords_from_json(v: &Value) -> Result<BTreeMap<Vertex, C64>> {
    let obj = match v.get("coords") {
        Some(inner) => inner,
        None => v,
    };
    obj.as_object()
        .ok_or_else(|| bad("coords must be an object"))?
        .iter()
        .map(|(k, z)| {
            let vtx = k.trim().parse::<Vertex>().map_err(|_| bad(format!("bad vertex {k:?}")))?;
            Ok((vtx, parse_complex(z)?))
        })
        .collect()
}

pub fn report_to_json(r: &PachnerReport) -> Value {
    let loops: Vec<Value> = r.loop_residuals.iter().map(|(t, x)| json!({"tet": key(t), "residual": float(*x)})).collect();
    let gauges: Map<String, Value> = r
        .gauges
        .iter()
        .map(|(t, g)| {
            (
                key(t),
                json!({
                    "simplex": key(&g.simplex),
                    "scale": complex(g.scale),
                    "interchange": g.interchange,
                    "sign": g.sign,
                    "fit_residual": float(g.fit_residual),
                }),
            )
        })
        .collect();
    let scales: Map<String, Value> = r.scales.iter().map(|(u, c)| (key(u), complex(*c))).collect();
    json!({
        "const": complex(r.konst),
        "max_residual": float(r.max_residual),
        "annihilator_angle": float(r.annihilator_angle),
        "annihilator_dims": [r.annihilator_dims.0, r.annihilator_dims.1],
        "loop_residuals": loops,
        "gauges": gauges,
        "simplex_scales": scales,
        "composition_mismatch": float(r.composition_mismatch),
        "composition_dims": [r.composition_dims.0, r.composition_dims.1],
        "composition_annihilation": float(r.composition_annihilation),
        "partial_product_residual": float(r.partial_product_residual),
    })
}

/// Writes floats as `{:.16e}`, everything else as compact JSON.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Serialized text with sorted keys and 17 significant digits.
pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value into memory");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn from_str(s: &str) -> Result<Value> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeops::normalize_family;
    use crate::sampling::{random_elliptic_params, random_weight_matrix};
    use crate::weights::gaussian_weight;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rt(v: &Value) -> Value {
        from_str(&to_string(v)).unwrap()
    }

    #[test]
    fn floats_have_17_digits_and_roundtrip() {
        let x = 0.1 + 0.2;
        let s = to_string(&json!({"b": x, "a": [1.0, -2.5e-300]}));
        assert_eq!(s, "{\"a\":[1.0000000000000000e0,-2.5000000000000000e-300],\"b\":3.0000000000000004e-1}");
        assert_eq!(rt(&json!(x)).as_f64().unwrap(), x);
    }

    #[test]
    fn element_roundtrip_and_reordered_monomials() {
        let f = random_weight_matrix(&mut ChaCha8Rng::seed_from_u64(1), [1, 2, 3, 4, 5]);
        let w = gaussian_weight(&f).unwrap();
        let back = element_from_json(&rt(&element_to_json(&w))).unwrap();
        assert_eq!(back.max_abs_diff(&w).unwrap(), 0.0);

        let v = json!({"generators": [[1,2,3,4],[1,2,3,5]], "coeffs": [{"mono": [[1,2,3,5],[1,2,3,4]], "re": 2.0, "im": 0.0}]});
        let e = element_from_json(&v).unwrap();
        assert_eq!(e.coeff(0b11), C64::new(-2.0, 0.0));
        let rep = json!({"generators": [[1,2,3,4]], "coeffs": [{"mono": [[1,2,3,4],[1,2,3,4]], "re": 1.0, "im": 0.0}]});
        assert!(matches!(element_from_json(&rep), Err(Error::RepeatedVariable(_))));
    }

    #[test]
    fn matrix_family_and_elliptic_roundtrip() {
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let f = random_weight_matrix(&mut r, [1, 2, 3, 4, 5]);
        let f2 = weight_matrix_from_json(&rt(&weight_matrix_to_json(&f))).unwrap();
        assert_eq!(f2.entries(), f.entries());

        let fam = normalize_family(&f).unwrap();
        let fam2 = family_from_json(&rt(&family_to_json(&fam))).unwrap();
        assert!(fam2.is_normalized());
        for (e, d) in fam.operators() {
            assert_eq!(fam2.operator(e).unwrap().coefficients(), d.coefficients());
        }

        let p = random_elliptic_params(&mut r, &[1, 2, 3, 4, 5, 6]);
        let p2 = elliptic_from_json(&rt(&elliptic_to_json(&p))).unwrap();
        assert_eq!(p2.modulus(), p.modulus());
        assert_eq!(p2.coords(), p.coords());
    }

    #[test]
    fn cochain_format() {
        let v = json!({"degree": 2, "values": {"1,2,3": [1.0, -1.0], "2,3,4": [0.0, 0.5]}});
        let c = cochain_from_json(&v).unwrap();
        assert_eq!(c.get(&[1, 2, 3]), C64::new(1.0, -1.0));
        assert_eq!(cochain_to_json(&c), v);
        assert!(cochain_from_json(&json!({"degree": 2, "values": {"1,x,3": [0, 0]}})).is_err());
        assert!(cochain_from_json(&json!({"degree": 2, "values": {"1,2,3": [0]}})).is_err());
    }
}
