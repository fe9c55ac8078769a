//! State descriptors. Inline forms:
//!   mixed | coherent:REALS | cat:BITS:REALS | fock:INDEX
//! where REALS is x1,y1[,x2,y2,...] and BITS is one parity bit per chart
//! coordinate. A descriptor starting with '{' is the JSON equivalent,
//! which additionally accepts a raw density matrix.

use quditphase::combinatorics::ModelParams;
use quditphase::geometry::PhasePoint;
use quditphase::scalar::C64;
use quditphase::states::{cat_state, coherent_state, CatSpec};
use quditphase::sw::OperatorMatrix;
use serde::Deserialize;

use crate::error::CliError;

pub fn parse_reals(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|piece| {
            let v: f64 = piece
                .trim()
                .parse()
                .map_err(|_| format!("bad coordinate '{piece}'"))?;
            if !v.is_finite() {
                return Err(format!("coordinate '{piece}' is not finite"));
            }
            Ok(v)
        })
        .collect()
}

pub fn point_from_reals(reals: &[f64], chart_dim: usize) -> Result<PhasePoint, String> {
    if reals.len() != 2 * chart_dim {
        return Err(format!(
            "expected {} reals (x1,y1,...), got {}",
            2 * chart_dim,
            reals.len()
        ));
    }
    Ok(PhasePoint(
        reals
            .chunks(2)
            .map(|p| C64::new(p[0], p[1]))
            .collect(),
    ))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StateJson {
    Coherent { z: Vec<f64> },
    Cat { z: Vec<f64>, parity: Vec<u8> },
    Fock { index: usize },
    Mixed,
    Density { entries: Vec<[f64; 2]> },
}

fn parse_bits(text: &str) -> Result<Vec<u8>, String> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            _ => Err(format!("parity bits must be 0/1, got '{c}'")),
        })
        .collect()
}

fn usage(msg: String) -> CliError {
    CliError::Usage(format!("state descriptor: {msg}"))
}

fn build_coherent(params: &ModelParams, reals: &[f64]) -> Result<OperatorMatrix, CliError> {
    let z = point_from_reals(reals, params.chart_dim()).map_err(usage)?;
    Ok(OperatorMatrix::pure(&coherent_state(params, &z)))
}

fn build_cat(params: &ModelParams, reals: &[f64], parity: Vec<u8>) -> Result<OperatorMatrix, CliError> {
    let z = point_from_reals(reals, params.chart_dim()).map_err(usage)?;
    let spec = CatSpec::new(params.clone(), z, parity)?;
    Ok(OperatorMatrix::pure(&cat_state(&spec)?))
}

fn build_fock(params: &ModelParams, index: usize) -> Result<OperatorMatrix, CliError> {
    if index >= params.fock_dim() {
        return Err(CliError::Input(format!(
            "occupancy index {index} is outside the basis (dimension {})",
            params.fock_dim()
        )));
    }
    Ok(OperatorMatrix::fock_projector(params, index))
}

fn build_density(params: &ModelParams, entries: &[[f64; 2]]) -> Result<OperatorMatrix, CliError> {
    let d = params.fock_dim();
    if entries.len() != d * d {
        return Err(usage(format!(
            "density needs {} row-major entries, got {}",
            d * d,
            entries.len()
        )));
    }
    if entries.iter().flatten().any(|v| !v.is_finite()) {
        return Err(usage("density entries must be finite".into()));
    }
    let mut m = OperatorMatrix::zeros(params);
    for a in 0..d {
        for b in 0..d {
            let [re, im] = entries[a * d + b];
            m.set(a, b, C64::new(re, im));
        }
    }
    Ok(m)
}

pub fn parse_state(text: &str, params: &ModelParams) -> Result<OperatorMatrix, CliError> {
    if text.trim_start().starts_with('{') {
        let parsed: StateJson = serde_json::from_str(text)
            .map_err(|e| usage(format!("bad JSON descriptor: {e}")))?;
        return match parsed {
            StateJson::Coherent { z } => build_coherent(params, &z),
            StateJson::Cat { z, parity } => build_cat(params, &z, parity),
            StateJson::Fock { index } => build_fock(params, index),
            StateJson::Mixed => Ok(OperatorMatrix::maximally_mixed(params)),
            StateJson::Density { entries } => build_density(params, &entries),
        };
    }
    if text == "mixed" {
        return Ok(OperatorMatrix::maximally_mixed(params));
    }
    if let Some(rest) = text.strip_prefix("coherent:") {
        return build_coherent(params, &parse_reals(rest).map_err(usage)?);
    }
    if let Some(rest) = text.strip_prefix("cat:") {
        let (bits, coords) = rest
            .split_once(':')
            .ok_or_else(|| usage("cat wants cat:BITS:REALS".into()))?;
        return build_cat(
            params,
            &parse_reals(coords).map_err(usage)?,
            parse_bits(bits).map_err(usage)?,
        );
    }
    if let Some(rest) = text.strip_prefix("fock:") {
        let index: usize = rest
            .parse()
            .map_err(|_| usage(format!("bad occupancy index '{rest}'")))?;
        return build_fock(params, index);
    }
    Err(usage(format!(
        "unknown form '{text}'; use mixed, coherent:..., cat:..., fock:..., or JSON"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(2, 2).unwrap()
    }

    #[test]
    fn inline_forms_build_unit_trace_operators() {
        let p = params();
        for text in ["mixed", "coherent:0.5,-0.3", "cat:0:1,0", "fock:1"] {
            let rho = parse_state(text, &p).unwrap();
            assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-12, "{text}");
        }
    }

    #[test]
    fn json_forms_match_inline_forms() {
        let p = params();
        let a = parse_state("cat:1:1,0", &p).unwrap();
        let b = parse_state(r#"{"kind":"cat","z":[1,0],"parity":[1]}"#, &p).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn density_entries_fill_row_major() {
        let p = params();
        let mut entries = vec![[0.0, 0.0]; 9];
        entries[1] = [0.25, -0.5];
        let text = serde_json::json!({"kind": "density", "entries": entries}).to_string();
        let rho = parse_state(&text, &p).unwrap();
        assert_eq!(rho.get(0, 1), C64::new(0.25, -0.5));
    }

    #[test]
    fn malformed_descriptors_are_usage_errors() {
        let p = params();
        for text in [
            "unknown",
            "coherent:0.5",
            "cat:2:1,0",
            "cat:0",
            "fock:x",
            "{\"kind\":\"nope\"}",
            r#"{"kind":"density","entries":[[1,0]]}"#,
        ] {
            match parse_state(text, &p) {
                Err(CliError::Usage(_)) => {}
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn out_of_model_requests_are_input_errors() {
        let p = params();
        for text in ["fock:9", "cat:1:0,0"] {
            match parse_state(text, &p) {
                Err(CliError::Input(_)) => {}
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
