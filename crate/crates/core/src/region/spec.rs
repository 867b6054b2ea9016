//! JSON region specs: {"kind": ..., "params": {...}, "norm": ..., "measure_class": ...}.
//! Composite kinds nest further {"kind", "params"} objects; `norm` and
//! `measure_class` are only read at the top level.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{MeasureClass, Norm, Region, RegionParams};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    kind: String,
    #[serde(default)]
    params: Value,
    norm: Option<Norm>,
    measure_class: Option<MeasureClass>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Nested {
    kind: String,
    #[serde(default)]
    params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Dim {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StripP {
    h: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeP {
    #[serde(default = "one")]
    x0: f64,
    b: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TentP {
    q: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StackedP {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnionP {
    parts: Vec<Nested>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslateP {
    inner: Nested,
    offset: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleP {
    inner: Nested,
    factor: f64,
}

fn typed<T: for<'de> Deserialize<'de>>(params: Value, path: &str, kind: &str) -> Result<T> {
    serde_json::from_value(params).map_err(|e| Error::Spec(format!("{path}: bad params for kind \"{kind}\": {e}")))
}

fn convert(kind: &str, params: Value, path: &str) -> Result<RegionParams> {
    Ok(match kind {
        "full_space" => RegionParams::FullSpace { dim: typed::<Dim>(params, path, kind)?.dim },
        "half_space" => RegionParams::HalfSpace { dim: typed::<Dim>(params, path, kind)?.dim },
        "strip" => RegionParams::Strip { h: typed::<StripP>(params, path, kind)?.h },
        "envelope" => {
            let p: EnvelopeP = typed(params, path, kind)?;
            RegionParams::Envelope { x0: p.x0, b: p.b }
        }
        "tent" => RegionParams::Tent { q: typed::<TentP>(params, path, kind)?.q },
        "stacked_two_param" => {
            let p: StackedP = typed(params, path, kind)?;
            RegionParams::StackedTwoParam { a: p.a, b: p.b }
        }
        "disjoint_union" => {
            let p: UnionP = typed(params, path, kind)?;
            let parts = p
                .parts
                .into_iter()
                .enumerate()
                .map(|(i, n)| convert(&n.kind, n.params, &format!("{path}.params.parts[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            RegionParams::DisjointUnion(parts)
        }
        "translate" => {
            let p: TranslateP = typed(params, path, kind)?;
            let inner = convert(&p.inner.kind, p.inner.params, &format!("{path}.params.inner"))?;
            RegionParams::Translate { inner: Box::new(inner), offset: p.offset }
        }
        "scale" => {
            let p: ScaleP = typed(params, path, kind)?;
            let inner = convert(&p.inner.kind, p.inner.params, &format!("{path}.params.inner"))?;
            RegionParams::Scale { inner: Box::new(inner), factor: p.factor }
        }
        other => {
            return Err(Error::Spec(format!(
                "{path}: unknown kind \"{other}\" (expected full_space, half_space, strip, envelope, tent, \
                 stacked_two_param, disjoint_union, translate or scale)"
            )))
        }
    })
}

/// Parses and builds a region from spec text. Syntax errors report line and
/// column; parameter errors report the JSON path.
pub fn parse_region(text: &str) -> Result<Region> {
    let doc: Doc = serde_json::from_str(text)
        .map_err(|e| Error::Spec(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let params = convert(&doc.kind, doc.params, "$")?;
    let region = Region::build(params, doc.norm)?;
    Ok(match doc.measure_class {
        Some(c) => region.with_measure_class(c),
        None => region,
    })
}

fn node(p: &RegionParams) -> Value {
    match p {
        RegionParams::FullSpace { dim } => json!({"kind": "full_space", "params": {"dim": dim}}),
        RegionParams::HalfSpace { dim } => json!({"kind": "half_space", "params": {"dim": dim}}),
        RegionParams::Strip { h } => json!({"kind": "strip", "params": {"h": h}}),
        RegionParams::Envelope { x0, b } => json!({"kind": "envelope", "params": {"x0": x0, "b": b}}),
        RegionParams::Tent { q } => json!({"kind": "tent", "params": {"q": q}}),
        RegionParams::StackedTwoParam { a, b } => json!({"kind": "stacked_two_param", "params": {"a": a, "b": b}}),
        RegionParams::DisjointUnion(parts) => {
            json!({"kind": "disjoint_union", "params": {"parts": parts.iter().map(node).collect::<Vec<_>>()}})
        }
        RegionParams::Translate { inner, offset } => {
            json!({"kind": "translate", "params": {"inner": node(inner), "offset": offset}})
        }
        RegionParams::Scale { inner, factor } => {
            json!({"kind": "scale", "params": {"inner": node(inner), "factor": factor}})
        }
    }
}

/// Spec document for a region; `parse_region` reads it back to an equal region.
pub fn region_to_json(region: &Region) -> Value {
    let mut v = node(region.params());
    v["norm"] = json!(region.norm());
    v["measure_class"] = json!(region.measure_class());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"kind": "disjoint_union", "params": {"parts": [
            {"kind": "strip", "params": {"h": 1}},
            {"kind": "scale", "params": {"factor": 2, "inner": {"kind": "envelope", "params": {"b": 3}}}}
        ]}, "measure_class": "infinite"}"#;
        let r = parse_region(text).unwrap();
        assert_eq!(r.measure_class(), MeasureClass::Infinite);
        let back = parse_region(&region_to_json(&r).to_string()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_region("{\n  \"kind\": \"strip\",\n  \"params\": {\"h\": }\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("column"), "{msg}");
    }

    #[test]
    fn parameter_errors_name_the_path() {
        let err = parse_region(r#"{"kind": "translate", "params": {"offset": [1], "inner": {"kind": "tent", "params": {}}}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("$.params.inner"), "{err}");
        let err = parse_region(r#"{"kind": "sphere", "params": {}}"#).unwrap_err();
        assert!(err.to_string().contains("unknown kind"));
        assert!(matches!(parse_region(r#"{"kind": "stacked_two_param", "params": {"a": 0.7, "b": 2}}"#), Err(Error::Constraint(_))));
    }

    #[test]
    fn stacked_defaults_to_sup_norm() {
        let r = parse_region(r#"{"kind": "stacked_two_param", "params": {"a": 0.3333333333333333, "b": 2}}"#).unwrap();
        assert_eq!(r.norm(), Norm::Sup);
    }
}
