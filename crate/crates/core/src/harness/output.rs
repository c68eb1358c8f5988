//! CSV/JSON writers. Every float goes through [`fmt_f64`] so that repeated
//! runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::sweep::SweepRecord;
use crate::cv::CVLevel;
use crate::exact::{AmplitudeGrid, Spectrum};
use crate::semiclassical::Trajectory;
use crate::Result;

/// Formats like C's `%.15g`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `W,index,exact_rel,cv_rel,regime`; failed points are written with an
/// `error` regime column and empty level columns.
pub fn write_levels_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> Result<()> {
    writeln!(out, "W,index,exact_rel,cv_rel,regime")?;
    for r in records {
        let w = fmt_f64(r.w);
        if let Some(err) = &r.error {
            writeln!(out, "{w},,,,error: {}", err.replace(',', ";"))?;
            continue;
        }
        let tag = r.regime.map(|g| g.tag()).unwrap_or("asymmetric");
        for (i, ex) in r.exact_rel.iter().enumerate() {
            let cv = r
                .cv_rel
                .as_ref()
                .and_then(|c| c.get(i))
                .map(|v| fmt_f64(*v))
                .unwrap_or_default();
            writeln!(out, "{w},{i},{},{cv},{tag}", fmt_f64(*ex))?;
        }
    }
    Ok(())
}

/// `index,energy,relative`.
pub fn write_spectrum_csv<W: Write>(mut out: W, spectrum: &Spectrum) -> Result<()> {
    writeln!(out, "index,energy,relative")?;
    let e0 = spectrum.eigenvalues[0];
    for (i, e) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(out, "{i},{},{}", fmt_f64(*e), fmt_f64(e - e0))?;
    }
    Ok(())
}

/// `n,m,energy,degeneracy,regime`.
pub fn write_cv_levels_csv<W: Write>(mut out: W, levels: &[CVLevel]) -> Result<()> {
    writeln!(out, "n,m,energy,degeneracy,regime")?;
    for l in levels {
        writeln!(
            out,
            "{},{},{},{},{}",
            l.n,
            l.m,
            fmt_f64(l.energy),
            l.degeneracy,
            l.regime.tag()
        )?;
    }
    Ok(())
}

/// `(N_a + 1)` rows of `(N_b + 1)` comma-separated probabilities; row `i`
/// is `n_L = i`.
pub fn write_grid_csv<W: Write>(mut out: W, grid: &AmplitudeGrid) -> Result<()> {
    for i in 0..grid.rows() {
        let row: Vec<String> = (0..grid.cols()).map(|j| fmt_f64(grid.get(i, j))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// `t,x,y,theta_x,theta_y,energy`.
pub fn write_trajectory_csv<W: Write>(mut out: W, tr: &Trajectory) -> Result<()> {
    writeln!(out, "t,x,y,theta_x,theta_y,energy")?;
    for s in &tr.samples {
        let p = s.point;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.theta_x),
            fmt_f64(p.theta_y),
            fmt_f64(s.energy)
        )?;
    }
    Ok(())
}

/// Pretty JSON with floats rounded through [`fmt_f64`].
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = round_floats(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)?)
}

fn round_floats(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = fmt_f64(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{}", to_json_string(value)?)?;
    f.flush()?;
    Ok(())
}

/// Opens `path` for writing, creating parent directories.
pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    create(path)
}
