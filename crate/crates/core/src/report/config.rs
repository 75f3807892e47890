//! JSON geometry config files.
//!
//! ```json
//! {
//!   "id": "my-sphere",
//!   "dim": 2,
//!   "metric": [["4/(1+x1^2+x2^2)^2", "0"], ["0", "4/(1+x1^2+x2^2)^2"]],
//!   "poisson": [["0", "(1+x1^2+x2^2)^2/4"], ["-(1+x1^2+x2^2)^2/4", "0"]],
//!   "connection": "levi-civita",
//!   "box": 0.8,
//!   "seed": 3
//! }
//! ```
//!
//! `connection` is either `"levi-civita"` or a `dim×dim×dim` array with
//! entry `[i][j][k]` = `Γ^i_{jk}`. Entries are expression strings or
//! numbers. Optional: `inverse_metric`, `lambda_im`, `contorsion_lowering`
//! (`"first-slot"` / `"last-slot"`).

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::expr::{parse, FieldExpr};
use crate::geometry::{
    Chart, ConnectionSpec, ContorsionLowering, DerivativeMode, GeometryData, TensorProvider,
};
use crate::tensor::Tensor;
use crate::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default = "default_id")]
    pub id: String,
    pub dim: usize,
    pub metric: Value,
    pub poisson: Value,
    #[serde(default = "default_connection")]
    pub connection: Value,
    #[serde(default)]
    pub inverse_metric: Option<Value>,
    #[serde(default, rename = "box")]
    pub box_half_width: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub lambda_im: Option<f64>,
    #[serde(default)]
    pub contorsion_lowering: Option<String>,
}

fn default_id() -> String {
    "config".into()
}

fn default_connection() -> Value {
    Value::String("levi-civita".into())
}

/// Parse a config document; syntax errors carry line and column.
pub fn parse_config(text: &str) -> Result<GeometryConfig, Error> {
    serde_json::from_str(text).map_err(|e| {
        Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

fn entry(v: &Value, path: &str, dim: usize) -> Result<FieldExpr, Error> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::Config(format!("{path}: expected expression string or number"))),
    };
    parse(&text, dim).map_err(|e| Error::Config(format!("{path}: {e}")))
}

/// Nested arrays of the given rank into a flat list of expressions.
fn component_table(v: &Value, rank: usize, dim: usize, name: &str) -> Result<Vec<FieldExpr>, Error> {
    fn walk(
        v: &Value,
        depth: usize,
        dim: usize,
        path: String,
        out: &mut Vec<FieldExpr>,
    ) -> Result<(), Error> {
        if depth == 0 {
            out.push(entry(v, &path, dim)?);
            return Ok(());
        }
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Config(format!("{path}: expected an array")))?;
        if arr.len() != dim {
            return Err(Error::Config(format!(
                "{path}: expected {dim} entries, got {}",
                arr.len()
            )));
        }
        for (k, x) in arr.iter().enumerate() {
            walk(x, depth - 1, dim, format!("{path}[{k}]"), out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(v, rank, dim, name.to_string(), &mut out)?;
    Ok(out)
}

fn provider(exprs: Vec<FieldExpr>, rank: usize, dim: usize) -> TensorProvider<f64> {
    let exprs = Arc::new(exprs);
    Arc::new(move |p: &[f64]| {
        let mut k = 0;
        Tensor::try_from_fn(dim, rank, |_| {
            let j = exprs[k].eval_jet(p);
            k += 1;
            j
        })
    })
}

impl GeometryConfig {
    pub fn build(&self) -> Result<GeometryData<f64>, Error> {
        let d = self.dim;
        let chart = Chart::new(d, false)?;
        let metric = provider(component_table(&self.metric, 2, d, "metric")?, 2, d);
        let poisson = provider(component_table(&self.poisson, 2, d, "poisson")?, 2, d);
        let connection = match &self.connection {
            Value::String(s) if s == "levi-civita" => ConnectionSpec::LeviCivita,
            Value::String(s) => {
                return Err(Error::Config(format!("connection: unknown directive `{s}`")))
            }
            v => ConnectionSpec::Explicit(provider(component_table(v, 3, d, "connection")?, 3, d)),
        };
        let mut geo = GeometryData::new(self.id.clone(), chart, metric, poisson, connection)
            .with_mode(DerivativeMode::Jet);
        if let Some(inv) = &self.inverse_metric {
            geo = geo.with_inverse_metric(provider(component_table(inv, 2, d, "inverse_metric")?, 2, d));
        }
        if let Some(w) = self.box_half_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config("box: must be positive".into()));
            }
            geo = geo.with_box(w);
        }
        if let Some(l) = self.lambda_im {
            geo = geo.with_lambda_value(Complex::new(0.0, l));
        }
        geo.contorsion_lowering = match self.contorsion_lowering.as_deref() {
            None | Some("first-slot") => ContorsionLowering::FirstSlot,
            Some("last-slot") => ContorsionLowering::LastSlot,
            Some(s) => return Err(Error::Config(format!("contorsion_lowering: unknown `{s}`"))),
        };
        Ok(geo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"{
        "id": "sphere",
        "dim": 2,
        "metric": [["4/(1+x1^2+x2^2)^2", 0], [0, "4/(1+x1^2+x2^2)^2"]],
        "poisson": [[0, "(1+x1^2+x2^2)^2/4"], ["-(1+x1^2+x2^2)^2/4", 0]],
        "box": 0.5
    }"#;

    #[test]
    fn builds_levi_civita_geometry() {
        let geo = parse_config(SPHERE).unwrap().build().unwrap();
        assert!(geo.is_levi_civita());
        assert_eq!(geo.box_half_width, 0.5);
        let pg = geo.at(&[0.1, 0.2]).unwrap();
        assert!((pg.g.value(&[0, 0]).re - 4.0 / 1.05f64.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_config("{\n \"dim\": 2,\n oops }").unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("line 3")), "{e}");
    }

    #[test]
    fn expression_error_names_component() {
        let bad = SPHERE.replace("\"4/(1+x1^2+x2^2)^2\", 0]", "\"4/(1+y^2)\", 0]");
        let e = parse_config(&bad).unwrap().build().unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.starts_with("metric[0][0]") && m.contains("offset")), "{e}");
    }

    #[test]
    fn shape_mismatch_rejected() {
        let bad = SPHERE.replace("\"dim\": 2", "\"dim\": 3");
        assert!(parse_config(&bad).unwrap().build().is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let bad = SPHERE.replace("\"box\"", "\"bxo\"");
        assert!(parse_config(&bad).is_err());
    }
}
