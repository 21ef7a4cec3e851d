//! JSON metadata emission mirroring `RunResult`, with floats rendered at 17
//! significant digits (via serde_json's arbitrary-precision numbers) for
//! bit-stable round-trips.

use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::experiment::RunResult;

fn num(x: f64) -> Value {
    debug_assert!(x.is_finite());
    Value::Number(Number::from_string_unchecked(super::csv::fmt_f64(x)))
}

fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn result_to_json(result: &RunResult) -> Value {
    let mut root = Map::new();
    root.insert("artifact_version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));

    let mut config = Map::new();
    for (k, v) in result.config.echo() {
        config.insert(k, Value::String(v));
    }
    root.insert("config".into(), Value::Object(config));

    let c = &result.constants;
    let mut constants = Map::new();
    constants.insert("m_smooth".into(), num(c.m_smooth));
    constants.insert("alpha".into(), num(c.alpha));
    constants.insert("beta".into(), num(c.beta));
    constants.insert("ratio_a".into(), opt_num(c.ratio_a));
    constants.insert("eta1".into(), num(c.eta1));
    constants.insert("t0".into(), c.t0.map_or(Value::Null, |t| Value::Number(t.into())));
    constants.insert("t0_lambert".into(), c.t0_lambert.map_or(Value::Null, Value::Bool));
    constants.insert("loss_star".into(), opt_num(c.loss_star));
    constants.insert("theta_star_norm".into(), opt_num(c.theta_star_norm));
    constants.insert("r_theta".into(), opt_num(c.r_theta));
    constants.insert(
        "reference_method".into(),
        c.reference_method.map_or(Value::Null, |m| Value::String(m.into())),
    );
    constants.insert("train_n".into(), Value::Number(c.train_n.into()));
    constants.insert("test_n".into(), Value::Number(c.test_n.into()));
    constants.insert("dim".into(), Value::Number(c.dim.into()));
    root.insert("constants".into(), Value::Object(constants));

    root.insert(
        "warnings".into(),
        Value::Array(result.warnings.iter().map(|w| Value::String(w.clone())).collect()),
    );

    let aggregate: Vec<Value> = result
        .aggregate
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert("t".into(), Value::Number(row.t.into()));
            m.insert("gap_mean".into(), opt_num(row.gap_mean));
            m.insert("gap_std".into(), opt_num(row.gap_std));
            m.insert("accuracy_mean".into(), opt_num(row.accuracy_mean));
            m.insert("accuracy_std".into(), opt_num(row.accuracy_std));
            m.insert("bound".into(), opt_num(row.bound));
            Value::Object(m)
        })
        .collect();
    root.insert("aggregate".into(), Value::Array(aggregate));

    let trials: Vec<Value> = result
        .trials
        .iter()
        .map(|traces| {
            Value::Array(
                traces
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        m.insert("t".into(), Value::Number(row.t.into()));
                        m.insert("gap".into(), opt_num(row.gap));
                        m.insert("c_t".into(), num(row.c_t));
                        m.insert("budget_spent".into(), num(row.budget_spent));
                        m.insert("accuracy".into(), opt_num(row.accuracy));
                        m.insert("bound".into(), opt_num(row.bound));
                        Value::Object(m)
                    })
                    .collect(),
            )
        })
        .collect();
    root.insert("trials".into(), Value::Array(trials));

    Value::Object(root)
}

pub fn result_to_json_string(result: &RunResult) -> Result<String> {
    serde_json::to_string_pretty(&result_to_json(result))
        .map_err(|e| Error::ConfigGeneral(format!("serializing run result: {e}")))
}

pub fn emit_json(result: &RunResult, path: &Path) -> Result<()> {
    let text = result_to_json_string(result)?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
