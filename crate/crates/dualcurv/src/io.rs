//! Body files, report JSON, and CSV emission.
//!
//! The on-disk body schema is a single JSON object:
//!
//! ```text
//! {"name": str, "dim": int, "kind": "hpolytope"|"vpolytope"|"product_ball",
//!  "A": [[f64]], "b": [f64],        // hpolytope: rows and offsets
//!  "vertices": [[f64]],             // vpolytope
//!  "k": int}                        // product_ball: split
//! ```
//!
//! Loading re-normalizes constraint rows and re-runs every body invariant,
//! so a file is either rejected with a message naming the violated
//! invariant or yields a body indistinguishable from a generated one.
//!
//! Every floating-point number — JSON and CSV alike — is written with 17
//! significant digits (`{:.16e}`), which round-trips f64 exactly; output
//! is therefore byte-stable across runs, platforms, and thread counts.
//! Non-finite values are refused rather than smuggled out as `null`.

use std::fs;
use std::io;
use std::path::Path;

use nalgebra::DVector;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Number, Value};

use crate::body::{Body, BodyKind};
use crate::bounds::{SweepReport, VerificationRecord};
use crate::error::{Error, Result};
use crate::measures::Measured;
use crate::slicing::{DivergenceReport, SliceSample};

// ---------------------------------------------------------------------------
// Float formatting

/// One f64 as text: 17 significant digits, scientific. Errors on NaN/inf.
pub fn format_float(x: f64, what: &str) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::config(format!(
            "refusing to serialize non-finite value for {what}: {x}"
        )));
    }
    Ok(format!("{x:.16e}"))
}

/// A finite f64 as a JSON number. Errors on NaN/inf instead of emitting null.
pub fn json_num(x: f64, what: &str) -> Result<Value> {
    if !x.is_finite() {
        return Err(Error::config(format!(
            "refusing to serialize non-finite value for {what}: {x}"
        )));
    }
    Ok(Number::from_f64(x).map(Value::Number).expect("finite f64"))
}

fn json_opt(x: Option<f64>, what: &str) -> Result<Value> {
    match x {
        Some(v) => json_num(v, what),
        None => Ok(Value::Null),
    }
}

/// Compact-JSON formatter writing every f64 with 17 significant digits.
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "non-finite float reached the JSON writer",
            ));
        }
        write!(writer, "{value:.16e}")
    }
}

/// Serialize a JSON value on one line (17-digit floats, trailing newline).
/// Object keys come out in sorted order, so equal values give equal bytes.
pub fn to_json_string(value: &Value) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser)?;
    let mut text = String::from_utf8(buf).expect("JSON writer emits UTF-8");
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// Body files

/// Serialize a body into the file schema.
pub fn body_to_json(body: &Body) -> Result<Value> {
    let mut map = Map::new();
    map.insert("name".into(), Value::String(body.name().to_string()));
    map.insert("dim".into(), Value::Number(body.dim().into()));
    match body.kind() {
        BodyKind::HPolytope(_) => {
            map.insert("kind".into(), Value::String("hpolytope".into()));
            let facets = body.facets()?;
            let rows: Result<Vec<Value>> = facets
                .iter()
                .map(|f| vector_json(&f.normal, "facet normal"))
                .collect();
            let offs: Result<Vec<Value>> = facets
                .iter()
                .map(|f| json_num(f.offset, "facet offset"))
                .collect();
            map.insert("A".into(), Value::Array(rows?));
            map.insert("b".into(), Value::Array(offs?));
        }
        BodyKind::VPolytope(_) => {
            map.insert("kind".into(), Value::String("vpolytope".into()));
            let verts: Result<Vec<Value>> = body
                .vertices()?
                .iter()
                .map(|v| vector_json(v, "vertex"))
                .collect();
            map.insert("vertices".into(), Value::Array(verts?));
        }
        BodyKind::ProductBall(pb) => {
            map.insert("kind".into(), Value::String("product_ball".into()));
            map.insert("k".into(), Value::Number(pb.split.into()));
        }
        BodyKind::Ball => {
            return Err(Error::unsupported(
                "the body file schema covers polytopes and product balls; \
                 the unit ball has no parameters to store",
            ));
        }
    }
    Ok(Value::Object(map))
}

fn vector_json(v: &DVector<f64>, what: &str) -> Result<Value> {
    let items: Result<Vec<Value>> = v.iter().map(|&x| json_num(x, what)).collect();
    Ok(Value::Array(items?))
}

/// Rebuild a body from the file schema, re-validating every invariant.
pub fn body_from_json(value: &Value) -> Result<Body> {
    let name = get_str(value, "name")?;
    let dim = get_usize(value, "dim")?;
    let kind = get_str(value, "kind")?;
    match kind.as_str() {
        "hpolytope" => {
            let rows = get_matrix(value, "A", dim)?;
            let offsets = get_floats(value, "b")?;
            Body::hpolytope(name, rows, offsets, dim)
        }
        "vpolytope" => {
            let vertices = get_matrix(value, "vertices", dim)?;
            Body::vpolytope(name, vertices, dim)
        }
        "product_ball" => {
            let split = get_usize(value, "k")?;
            Body::product_ball(name, dim, split)
        }
        other => Err(Error::invalid_body(format!(
            "unknown body kind {other:?} (expected hpolytope, vpolytope, or product_ball)"
        ))),
    }
}

/// Load a body file from disk.
pub fn load_body(path: &Path) -> Result<Body> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    body_from_json(&value)
}

/// Write a body file to disk.
pub fn save_body(body: &Body, path: &Path) -> Result<()> {
    let text = to_json_string(&body_to_json(body)?)?;
    fs::write(path, text)?;
    Ok(())
}

fn get_field<'a>(value: &'a Value, name: &str) -> Result<&'a Value> {
    value
        .get(name)
        .ok_or_else(|| Error::invalid_body(format!("body file is missing the {name:?} field")))
}

fn get_str(value: &Value, name: &str) -> Result<String> {
    get_field(value, name)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::invalid_body(format!("the {name:?} field must be a string")))
}

fn get_usize(value: &Value, name: &str) -> Result<usize> {
    get_field(value, name)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| {
            Error::invalid_body(format!("the {name:?} field must be a nonnegative integer"))
        })
}

fn get_floats(value: &Value, name: &str) -> Result<Vec<f64>> {
    let arr = get_field(value, name)?
        .as_array()
        .ok_or_else(|| Error::invalid_body(format!("the {name:?} field must be an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64().ok_or_else(|| {
                Error::invalid_body(format!("{name}[{i}] must be a number"))
            })
        })
        .collect()
}

fn get_matrix(value: &Value, name: &str, dim: usize) -> Result<Vec<DVector<f64>>> {
    let arr = get_field(value, name)?
        .as_array()
        .ok_or_else(|| Error::invalid_body(format!("the {name:?} field must be an array of rows")))?;
    arr.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row.as_array().ok_or_else(|| {
                Error::invalid_body(format!("{name}[{i}] must be an array of numbers"))
            })?;
            if row.len() != dim {
                return Err(Error::invalid_body(format!(
                    "{name}[{i}] has {} entries in dimension {dim}",
                    row.len()
                )));
            }
            let items: Result<Vec<f64>> = row
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_f64().ok_or_else(|| {
                        Error::invalid_body(format!("{name}[{i}][{j}] must be a number"))
                    })
                })
                .collect();
            Ok(DVector::from_vec(items?))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Report JSON

fn measured_json(m: &Measured, what: &str) -> Result<Value> {
    let mut map = Map::new();
    map.insert("value".into(), json_num(m.value, what)?);
    map.insert("stderr".into(), json_opt(m.stderr, what)?);
    Ok(Value::Object(map))
}

/// The concentration-ratio report (numerator, denominator, quotient).
pub fn ratio_json(rr: &crate::measures::RatioReport) -> Result<Value> {
    let mut map = Map::new();
    map.insert(
        "total_measure".into(),
        measured_json(&rr.total, "total measure")?,
    );
    map.insert(
        "subspace_measure".into(),
        measured_json(&rr.subspace, "subspace measure")?,
    );
    map.insert("ratio".into(), json_num(rr.ratio, "ratio")?);
    map.insert("method".into(), Value::String(rr.method.name().into()));
    map.insert(
        "flagged_fraction".into(),
        json_num(rr.flagged_fraction, "flagged_fraction")?,
    );
    Ok(Value::Object(map))
}

/// The divergence-identity report, gradient levels included.
pub fn divergence_json(dr: &DivergenceReport) -> Result<Value> {
    let mut grad = Map::new();
    let levels: Result<Vec<Value>> = dr
        .gradient
        .levels
        .iter()
        .map(|lv| {
            let mut m = Map::new();
            m.insert("m".into(), Value::Number(lv.m.into()));
            m.insert("alpha".into(), json_num(lv.alpha, "level alpha")?);
            m.insert("value".into(), json_num(lv.value, "level value")?);
            Ok(Value::Object(m))
        })
        .collect();
    grad.insert("levels".into(), Value::Array(levels?));
    grad.insert(
        "extrapolated".into(),
        json_num(dr.gradient.extrapolated, "extrapolated limit")?,
    );
    grad.insert("grid".into(), Value::Number(dr.gradient.grid.into()));
    grad.insert("points".into(), Value::Number(dr.gradient.points.into()));
    grad.insert(
        "one_sided_fraction".into(),
        json_num(dr.gradient.one_sided_fraction, "one_sided_fraction")?,
    );
    grad.insert(
        "mc_stderr".into(),
        json_opt(dr.gradient.mc_stderr, "gradient mc_stderr")?,
    );

    let mut map = Map::new();
    map.insert("body".into(), Value::String(dr.body.clone()));
    map.insert("n".into(), Value::Number(dr.n.into()));
    map.insert("k".into(), Value::Number(dr.k.into()));
    map.insert("q".into(), json_num(dr.q, "q")?);
    map.insert("ratio".into(), json_num(dr.ratio, "ratio")?);
    map.insert("kq_term".into(), json_num(dr.kq_term, "kq_term")?);
    map.insert("correction".into(), json_num(dr.correction, "correction")?);
    map.insert("rhs".into(), json_num(dr.rhs, "rhs")?);
    map.insert("residual".into(), json_num(dr.residual, "residual")?);
    map.insert(
        "total_measure".into(),
        json_num(dr.total_measure, "total_measure")?,
    );
    map.insert("proven_range".into(), Value::Bool(dr.proven_range));
    map.insert(
        "measure_method".into(),
        Value::String(dr.measure_method.clone()),
    );
    map.insert(
        "flagged_fraction".into(),
        json_num(dr.flagged_fraction, "flagged_fraction")?,
    );
    map.insert("gradient".into(), Value::Object(grad));
    Ok(Value::Object(map))
}

/// One bound-verification row.
pub fn verification_json(rec: &VerificationRecord) -> Result<Value> {
    let mut map = Map::new();
    map.insert("body".into(), Value::String(rec.body.clone()));
    map.insert("subspace".into(), Value::String(rec.subspace.clone()));
    map.insert("n".into(), Value::Number(rec.n.into()));
    map.insert("k".into(), Value::Number(rec.k.into()));
    map.insert("q".into(), json_num(rec.q, "q")?);
    map.insert("gamma".into(), json_num(rec.gamma, "gamma")?);
    map.insert("centered".into(), Value::Bool(rec.centered));
    map.insert("ratio".into(), json_num(rec.ratio, "ratio")?);
    map.insert(
        "ratio_stderr".into(),
        json_opt(rec.ratio_stderr, "ratio_stderr")?,
    );
    map.insert("bound".into(), json_opt(rec.bound, "bound")?);
    map.insert(
        "bound_kind".into(),
        match rec.bound_kind {
            Some(k) => Value::String(k.as_str().into()),
            None => Value::Null,
        },
    );
    map.insert("margin".into(), json_opt(rec.margin, "margin")?);
    map.insert(
        "pass".into(),
        match rec.pass {
            Some(p) => Value::Bool(p),
            None => Value::Null,
        },
    );
    map.insert("method".into(), Value::String(rec.method.clone()));
    map.insert("note".into(), Value::String(rec.note.clone()));
    Ok(Value::Object(map))
}

/// A family sweep: all sampled points plus the tightest one.
pub fn sweep_json(sr: &SweepReport) -> Result<Value> {
    let point_json = |p: &crate::bounds::SweepPoint| -> Result<Value> {
        let mut m = Map::new();
        m.insert("param".into(), json_num(p.param, "param")?);
        m.insert("q".into(), json_num(p.q, "q")?);
        m.insert("gamma".into(), json_num(p.gamma, "gamma")?);
        m.insert("ratio".into(), json_num(p.ratio, "ratio")?);
        m.insert("bound".into(), json_opt(p.bound, "bound")?);
        m.insert(
            "bound_kind".into(),
            match p.bound_kind {
                Some(k) => Value::String(k.as_str().into()),
                None => Value::Null,
            },
        );
        m.insert("margin".into(), json_opt(p.margin, "margin")?);
        Ok(Value::Object(m))
    };
    let mut map = Map::new();
    map.insert("family".into(), Value::String(sr.family.clone()));
    map.insert("subspace".into(), Value::String(sr.subspace.clone()));
    map.insert("q".into(), json_num(sr.q, "q")?);
    let points: Result<Vec<Value>> = sr.points.iter().map(&point_json).collect();
    map.insert("points".into(), Value::Array(points?));
    map.insert(
        "tightest".into(),
        match &sr.tightest {
            Some(p) => point_json(p)?,
            None => Value::Null,
        },
    );
    map.insert(
        "refined".into(),
        match sr.refined {
            Some((param, margin)) => {
                let mut m = Map::new();
                m.insert("param".into(), json_num(param, "refined param")?);
                m.insert("margin".into(), json_num(margin, "refined margin")?);
                Value::Object(m)
            }
            None => Value::Null,
        },
    );
    Ok(Value::Object(map))
}

/// A tabulated slice profile.
pub fn slice_json(samples: &[SliceSample]) -> Result<Value> {
    let rows: Result<Vec<Value>> = samples
        .iter()
        .map(|s| {
            let mut m = Map::new();
            let x: Result<Vec<Value>> =
                s.x.iter().map(|&c| json_num(c, "sample coordinate")).collect();
            m.insert("x".into(), Value::Array(x?));
            m.insert("g".into(), json_num(s.g, "g")?);
            m.insert("grad_dot".into(), json_num(s.grad_dot, "grad_dot")?);
            m.insert("one_sided".into(), Value::Bool(s.one_sided));
            Ok(Value::Object(m))
        })
        .collect();
    let mut map = Map::new();
    map.insert("samples".into(), Value::Array(rows?));
    Ok(Value::Object(map))
}

// ---------------------------------------------------------------------------
// CSV

/// Quote a CSV field when it holds a comma, quote, or newline.
fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_opt_float(x: Option<f64>, what: &str) -> Result<String> {
    match x {
        Some(v) => format_float(v, what),
        None => Ok(String::new()),
    }
}

/// Verification rows as CSV: one row per (body, subspace, q), with the
/// ratio, bound, and margin columns plotting tools want.
pub fn verification_csv(records: &[VerificationRecord]) -> Result<String> {
    let mut out = String::from(
        "body,subspace,n,k,q,gamma,centered,ratio,ratio_stderr,bound,bound_kind,margin,pass,method,note\n",
    );
    for r in records {
        let pass = match r.pass {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        let kind = r.bound_kind.map_or("none", |k| k.as_str());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&r.body),
            csv_escape(&r.subspace),
            r.n,
            r.k,
            format_float(r.q, "q")?,
            format_float(r.gamma, "gamma")?,
            r.centered,
            format_float(r.ratio, "ratio")?,
            csv_opt_float(r.ratio_stderr, "ratio_stderr")?,
            csv_opt_float(r.bound, "bound")?,
            kind,
            csv_opt_float(r.margin, "margin")?,
            pass,
            csv_escape(&r.method),
            csv_escape(&r.note),
        ));
    }
    Ok(out)
}

/// Sweep points as CSV (param column first after the identifiers).
pub fn sweep_csv(sr: &SweepReport) -> Result<String> {
    let mut out = String::from("family,subspace,q,param,gamma,ratio,bound,bound_kind,margin\n");
    for p in &sr.points {
        let kind = p.bound_kind.map_or("none", |k| k.as_str());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&sr.family),
            csv_escape(&sr.subspace),
            format_float(sr.q, "q")?,
            format_float(p.param, "param")?,
            format_float(p.gamma, "gamma")?,
            format_float(p.ratio, "ratio")?,
            csv_opt_float(p.bound, "bound")?,
            kind,
            csv_opt_float(p.margin, "margin")?,
        ));
    }
    Ok(out)
}

/// Slice-profile rows as CSV: x_1..x_k, g, the radial derivative, and
/// whether the derivative fell back to a one-sided difference.
pub fn slice_csv(samples: &[SliceSample], k: usize) -> Result<String> {
    let mut out = String::new();
    for i in 1..=k {
        out.push_str(&format!("x{i},"));
    }
    out.push_str("g,grad_dot,one_sided\n");
    for s in samples {
        if s.x.len() != k {
            return Err(Error::config(format!(
                "slice sample has {} coordinates, expected {k}",
                s.x.len()
            )));
        }
        for &c in &s.x {
            out.push_str(&format_float(c, "sample coordinate")?);
            out.push(',');
        }
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(s.g, "g")?,
            format_float(s.grad_dot, "grad_dot")?,
            s.one_sided,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundKind;
    use crate::generate;

    #[test]
    fn floats_print_17_digits_and_round_trip() {
        assert_eq!(format_float(0.1, "x").unwrap(), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0, "x").unwrap(), "1.0000000000000000e0");
        for &x in &[
            0.1,
            -3.25,
            5.0347116210262497,
            1.0 / 3.0,
            1e-300,
            2.5580414074812441,
        ] {
            let text = format_float(x, "x").unwrap();
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x, "{text} failed to round-trip");
        }
        assert!(format_float(f64::NAN, "x").is_err());
        assert!(format_float(f64::INFINITY, "x").is_err());
        assert!(json_num(f64::NAN, "x").is_err());
    }

    #[test]
    fn json_writer_uses_17_digit_floats() {
        let mut map = Map::new();
        map.insert("a".into(), json_num(0.1, "a").unwrap());
        map.insert("b".into(), Value::Number(7usize.into()));
        let text = to_json_string(&Value::Object(map)).unwrap();
        assert_eq!(text, "{\"a\":1.0000000000000001e-1,\"b\":7}\n");
    }

    #[test]
    fn body_round_trip_hpolytope() {
        for body in [
            generate::cube(3).unwrap(),
            generate::shifted_cube(3, 0.3).unwrap(),
            generate::random_tangent(3, 8, 7).unwrap(),
        ] {
            let value = body_to_json(&body).unwrap();
            let text = to_json_string(&value).unwrap();
            let back = body_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back.name(), body.name());
            assert_eq!(back.dim(), body.dim());
            let fa = body.facets().unwrap();
            let fb = back.facets().unwrap();
            assert_eq!(fa.len(), fb.len());
            for (a, b) in fa.iter().zip(&fb) {
                assert!((&a.normal - &b.normal).amax() <= 1e-15, "{}", body.name());
                assert!((a.offset - b.offset).abs() <= 1e-15, "{}", body.name());
            }
        }
    }

    #[test]
    fn body_round_trip_vpolytope_and_product() {
        let simplex = generate::simplex_centered(3).unwrap();
        let text = to_json_string(&body_to_json(&simplex).unwrap()).unwrap();
        let back = body_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        let va = simplex.vertices().unwrap();
        let vb = back.vertices().unwrap();
        assert_eq!(va.len(), vb.len());
        for v in va {
            assert!(
                vb.iter().any(|u| (u - v).amax() <= 1e-15),
                "vertex {v:?} lost in round trip"
            );
        }

        let pb = generate::product_ball(3, 1).unwrap();
        let text = to_json_string(&body_to_json(&pb).unwrap()).unwrap();
        let back = body_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.kind_name(), "product_ball");
        assert_eq!(back.dim(), 3);
        match back.kind() {
            BodyKind::ProductBall(p) => assert_eq!(p.split, 1),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn save_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube3.json");
        let body = generate::cube(3).unwrap();
        save_body(&body, &path).unwrap();
        let back = load_body(&path).unwrap();
        assert_eq!(back.name(), "cube3");
        assert_eq!(back.facets().unwrap().len(), 6);
        assert!(load_body(&dir.path().join("missing.json")).is_err());
    }

    #[test]
    fn loader_names_the_problem() {
        let missing: Value =
            serde_json::from_str(r#"{"name":"x","dim":3,"kind":"hpolytope"}"#).unwrap();
        let err = body_from_json(&missing).unwrap_err().to_string();
        assert!(err.contains("\"A\""), "message was: {err}");

        let unknown: Value =
            serde_json::from_str(r#"{"name":"x","dim":3,"kind":"zonotope"}"#).unwrap();
        let err = body_from_json(&unknown).unwrap_err().to_string();
        assert!(err.contains("zonotope"), "message was: {err}");

        // A structurally fine file whose body breaks an invariant: the
        // origin is outside the halfspace intersection.
        let degenerate: Value = serde_json::from_str(
            r#"{"name":"x","dim":2,"kind":"hpolytope",
                "A":[[1,0],[-1,0],[0,1],[0,-1]],"b":[1,-2,1,1]}"#,
        )
        .unwrap();
        let err = body_from_json(&degenerate).unwrap_err().to_string();
        assert!(err.contains("origin"), "message was: {err}");
    }

    #[test]
    fn ball_has_no_file_form() {
        let ball = crate::body::Body::ball("ball3", 3).unwrap();
        assert!(body_to_json(&ball).is_err());
    }

    #[test]
    fn verification_csv_golden() {
        let rows = vec![
            VerificationRecord {
                body: "cube3".into(),
                subspace: "e1".into(),
                n: 3,
                k: 1,
                q: 3.0,
                gamma: 1.0,
                centered: true,
                ratio: 1.0 / 3.0,
                ratio_stderr: None,
                bound: Some(1.0 / 3.0),
                bound_kind: Some(BoundKind::ConeVolume),
                margin: Some(0.0),
                pass: Some(true),
                method: "facet".into(),
                note: String::new(),
            },
            VerificationRecord {
                body: "cube2".into(),
                subspace: "e1".into(),
                n: 2,
                k: 1,
                q: 2.5,
                gamma: 1.0,
                centered: true,
                ratio: 0.5,
                ratio_stderr: None,
                bound: None,
                bound_kind: None,
                margin: None,
                pass: None,
                method: "facet".into(),
                note: "no bound, band".into(),
            },
        ];
        let csv = verification_csv(&rows).unwrap();
        let expect = "body,subspace,n,k,q,gamma,centered,ratio,ratio_stderr,bound,bound_kind,margin,pass,method,note\n\
            cube3,e1,3,1,3.0000000000000000e0,1.0000000000000000e0,true,3.3333333333333331e-1,,3.3333333333333331e-1,cone_volume,0.0000000000000000e0,true,facet,\n\
            cube2,e1,2,1,2.5000000000000000e0,1.0000000000000000e0,true,5.0000000000000000e-1,,,none,,,facet,\"no bound, band\"\n";
        assert_eq!(csv, expect);
    }

    #[test]
    fn slice_csv_shape() {
        let samples = vec![SliceSample {
            x: vec![0.25, -0.5],
            g: 1.5,
            grad_dot: -0.25,
            one_sided: false,
        }];
        let csv = slice_csv(&samples, 2).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "x1,x2,g,grad_dot,one_sided");
        assert!(lines[1].starts_with("2.5000000000000000e-1,-5.0000000000000000e-1,"));
        assert!(slice_csv(&samples, 1).is_err(), "coordinate count mismatch");
    }
}
