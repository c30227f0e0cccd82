//! Text output: trajectory CSV, JSON metadata sidecars and sweep tables.
//!
//! All numbers go through [`format_number`] (CSV) or are rounded to the
//! same 12 significant digits (JSON), so repeated runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::format::{format_number, round_significant};
use super::{ScenarioBundle, ScenarioConfig, SweepRow, DEVIATION_TOLERANCE};
use crate::error::{NjcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Round every float in a JSON tree. serde_json turns non-finite floats
/// into `null`, so callers check finiteness before serializing.
fn rounded(value: Value) -> Result<Value> {
    Ok(match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            json!(round_significant(x)?)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect::<Result<_>>()?),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| Ok((k, rounded(v)?)))
                .collect::<Result<Map<_, _>>>()?,
        ),
        other => other,
    })
}

fn pretty(value: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(NjcError::NonFiniteOutput(format!("{what} = {x}")))
    }
}

fn check_metrics(m: &super::Metrics) -> Result<()> {
    for (name, x) in [
        ("rabi_frequency", m.rabi_frequency),
        ("theta", m.theta),
        ("short_time_rate", m.short_time_rate),
        ("fitted_short_time_rate", m.fitted_short_time_rate),
    ] {
        finite(x, name)?;
    }
    Ok(())
}

/// `t,pe_analytic,pe_numeric` with one column per solver that ran.
pub fn bundle_csv(bundle: &ScenarioBundle) -> Result<String> {
    let mut columns: Vec<(&str, &[f64])> = vec![("t", &bundle.times)];
    if let Some(a) = &bundle.pe_analytic {
        columns.push(("pe_analytic", a));
    }
    if let Some(n) = &bundle.pe_numeric {
        columns.push(("pe_numeric", n));
    }
    let mut out = columns.iter().map(|c| c.0).collect::<Vec<_>>().join(",");
    out.push('\n');
    for i in 0..bundle.times.len() {
        let row = columns
            .iter()
            .map(|c| format_number(c.1[i]))
            .collect::<Result<Vec<_>>>()?;
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Run description written next to the CSV: the scenario itself (in
/// config form), solver agreement, physicality and summary metrics.
pub fn bundle_metadata(bundle: &ScenarioBundle) -> Result<Value> {
    check_metrics(&bundle.metrics)?;
    let mut meta = serde_json::to_value(ScenarioConfig::from_scenario(&bundle.scenario))?;
    let extra = json!({
        "points": bundle.times.len(),
        "deviation": bundle.deviation.map(|d| finite(d, "deviation")).transpose()?,
        "deviation_tolerance": DEVIATION_TOLERANCE,
        "deviation_ok": bundle.deviation_ok(),
        "weak_nonlinearity_exceeded": bundle.scenario.params.exceeds_weak_nonlinearity(),
        "sanity_analytic": bundle.sanity_analytic,
        "sanity_numeric": bundle.sanity_numeric,
        "metrics": bundle.metrics,
    });
    let map = meta
        .as_object_mut()
        .expect("config serializes to an object");
    for (k, v) in extra.as_object().expect("object literal") {
        map.insert(k.clone(), v.clone());
    }
    rounded(meta)
}

/// Metadata plus the series, as one JSON document.
pub fn bundle_json(bundle: &ScenarioBundle) -> Result<String> {
    let mut meta = bundle_metadata(bundle)?;
    let series = rounded(json!({
        "t": bundle.times,
        "pe_analytic": bundle.pe_analytic,
        "pe_numeric": bundle.pe_numeric,
    }))?;
    for name in ["t", "pe_analytic", "pe_numeric"] {
        if let Some(arr) = series[name].as_array() {
            if arr.iter().any(Value::is_null) {
                return Err(NjcError::NonFiniteOutput(format!("{name} series")));
            }
        }
    }
    meta["series"] = series;
    pretty(&meta)
}

/// Write `bundle` to `path` in the given format.
pub fn export_bundle(bundle: &ScenarioBundle, format: ExportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => bundle_csv(bundle)?,
        ExportFormat::Json => bundle_json(bundle)?,
    };
    fs::write(path, text)?;
    Ok(())
}

/// Write the trajectory CSV at `csv_path` and its metadata sidecar with the
/// same stem and a `.json` extension. Both are rendered before either file
/// is touched.
pub fn write_with_sidecar(bundle: &ScenarioBundle, csv_path: &Path) -> Result<(PathBuf, PathBuf)> {
    let csv = bundle_csv(bundle)?;
    let meta = pretty(&bundle_metadata(bundle)?)?;
    let json_path = csv_path.with_extension("json");
    fs::write(csv_path, csv)?;
    fs::write(&json_path, meta)?;
    Ok((csv_path.to_path_buf(), json_path))
}

const SWEEP_HEADER: [&str; 11] = [
    "omega",
    "g",
    "chi",
    "gamma_plus",
    "gamma_minus",
    "rabi_frequency",
    "theta",
    "short_time_rate",
    "fitted_short_time_rate",
    "first_min_t",
    "first_min_value",
];

/// One row per grid point; a missing first minimum is an empty field.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut out = SWEEP_HEADER.join(",");
    out.push('\n');
    for r in rows {
        let (p, m) = (&r.params, &r.metrics);
        let mut fields = [
            p.omega(),
            p.g(),
            p.chi(),
            p.gamma_plus(),
            p.gamma_minus(),
            m.rabi_frequency,
            m.theta,
            m.short_time_rate,
            m.fitted_short_time_rate,
        ]
        .into_iter()
        .map(format_number)
        .collect::<Result<Vec<_>>>()?;
        for opt in [m.first_min_t, m.first_min_value] {
            fields.push(opt.map(format_number).transpose()?.unwrap_or_default());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Array of `{params, metrics}` objects; `[]` when empty.
pub fn sweep_json(rows: &[SweepRow]) -> Result<String> {
    for r in rows {
        check_metrics(&r.metrics)?;
    }
    pretty(&rounded(serde_json::to_value(rows)?)?)
}

pub fn export_sweep(rows: &[SweepRow], format: ExportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => sweep_csv(rows)?,
        ExportFormat::Json => sweep_json(rows)?,
    };
    fs::write(path, text)?;
    Ok(())
}
