//! Pattern CSV files.
//!
//! ```text
//! # frequency_hz=4.065e9
//! # normalization=field-unnormalized
//! # <key>=<value>            (optional, order preserved)
//! theta_deg,phi_deg,re_Etheta,im_Etheta,re_Ephi,im_Ephi
//! 0.0000000000000000e0,0.0000000000000000e0,...
//! ```
//!
//! Rows are sorted by theta then phi. Every number is written with 17
//! significant digits, so `f64` values round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;

use super::pattern::{FieldSample, Normalization, PatternGrid};
use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

pub const HEADER: &str = "theta_deg,phi_deg,re_Etheta,im_Etheta,re_Ephi,im_Ephi";

fn num<T: Real>(out: &mut String, x: T) {
    write!(out, "{x:.16e}").expect("writing to a String cannot fail");
}

/// Serializes a pattern to the CSV text format.
pub fn to_csv_string<T: Real>(p: &PatternGrid<T>) -> String {
    let mut out = String::with_capacity(p.samples().len() * 150 + 256);
    out.push_str("# frequency_hz=");
    num(&mut out, p.frequency());
    out.push('\n');
    let _ = writeln!(out, "# normalization={}", p.normalization().as_str());
    for (k, v) in p.metadata() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(HEADER);
    out.push('\n');
    for i in 0..p.n_theta() {
        for j in 0..p.n_phi() {
            let s = p.sample(i, j);
            num(&mut out, p.theta_deg(i));
            for x in [
                p.phi_deg(j),
                s.e_theta.re,
                s.e_theta.im,
                s.e_phi.re,
                s.e_phi.im,
            ] {
                out.push(',');
                num(&mut out, x);
            }
            out.push('\n');
        }
    }
    out
}

pub fn save_pattern<T: Real>(p: &PatternGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv_string(p)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

pub fn load_pattern<T: Real>(path: impl AsRef<Path>) -> Result<PatternGrid<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    parse_csv(&text)
}

fn schema(line: usize, detail: impl Into<String>) -> Error {
    Error::Schema {
        line: Some(line),
        detail: detail.into(),
    }
}

struct Row<T> {
    line: usize,
    theta: T,
    phi: T,
    sample: FieldSample<T>,
}

/// Parses the CSV text format, validating the grid node by node.
pub fn parse_csv<T: Real>(text: &str) -> Result<PatternGrid<T>> {
    let mut frequency: Option<T> = None;
    let mut normalization: Option<Normalization> = None;
    let mut metadata = Vec::new();
    let mut rows: Vec<Row<T>> = Vec::new();
    let mut header_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if header_seen {
                return Err(schema(line, "comment after the column header"));
            }
            let (key, value) = comment
                .trim()
                .split_once('=')
                .ok_or_else(|| schema(line, "metadata comment must be `# key=value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "frequency_hz" => {
                    let f: T = value
                        .parse()
                        .map_err(|_| schema(line, format!("bad frequency `{value}`")))?;
                    if !(f > T::zero()) || !f.is_finite() {
                        return Err(schema(
                            line,
                            format!("frequency must be positive, got {value}"),
                        ));
                    }
                    frequency = Some(f);
                }
                "normalization" => {
                    normalization =
                        Some(Normalization::parse(value).ok_or_else(|| {
                            schema(line, format!("unknown normalization `{value}`"))
                        })?);
                }
                _ => metadata.push((key.to_string(), value.to_string())),
            }
            continue;
        }
        if !header_seen {
            if trimmed != HEADER {
                return Err(schema(
                    line,
                    format!("expected header `{HEADER}`, found `{trimmed}`"),
                ));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 6 {
            return Err(schema(
                line,
                format!("expected 6 columns, found {}", fields.len()),
            ));
        }
        let mut vals = [T::zero(); 6];
        for (k, f) in fields.iter().enumerate() {
            let v: T = f
                .trim()
                .parse()
                .map_err(|_| schema(line, format!("column {} is not a number: `{f}`", k + 1)))?;
            if !v.is_finite() {
                return Err(schema(
                    line,
                    format!("column {} is not finite: `{f}`", k + 1),
                ));
            }
            vals[k] = v;
        }
        rows.push(Row {
            line,
            theta: vals[0],
            phi: vals[1],
            sample: FieldSample::new(
                Complex::new(vals[2], vals[3]),
                Complex::new(vals[4], vals[5]),
            ),
        });
    }

    if !header_seen {
        return Err(Error::Schema {
            line: None,
            detail: "missing column header".into(),
        });
    }
    let frequency = frequency.ok_or_else(|| Error::Schema {
        line: None,
        detail: "missing `# frequency_hz=` metadata".into(),
    })?;
    let normalization = normalization.ok_or_else(|| Error::Schema {
        line: None,
        detail: "missing `# normalization=` metadata".into(),
    })?;
    if rows.is_empty() {
        return Err(Error::Schema {
            line: None,
            detail: "no data rows".into(),
        });
    }

    let (theta_step, n_theta) = infer_axis(rows.iter().map(|r| r.theta), "theta")?;
    let phi_step = {
        let mut step: Option<T> = None;
        for w in rows.windows(2) {
            if w[0].theta == w[1].theta {
                let d = w[1].phi - w[0].phi;
                if d > T::zero() {
                    step = Some(step.map_or(d, |s: T| s.min(d)));
                }
            }
        }
        step.unwrap_or(lit(360.0))
    };
    let phi_max = rows.iter().map(|r| r.phi).fold(T::zero(), T::max);
    let n_phi = (phi_max / phi_step).round().to_usize().unwrap_or(0) + 1;

    let tol = lit::<T>(1e-9);
    let mut it = rows.iter();
    let mut last_line = 0;
    for i in 0..n_theta {
        for j in 0..n_phi {
            let th = count::<T>(i) * theta_step;
            let ph = count::<T>(j) * phi_step;
            match it.next() {
                Some(r)
                    if (r.theta - th).abs() <= tol * theta_step
                        && (r.phi - ph).abs() <= tol * phi_step =>
                {
                    last_line = r.line;
                }
                Some(r) => {
                    return Err(schema(
                        r.line,
                        format!(
                            "missing or out-of-order node theta={th}, phi={ph} (found theta={}, phi={})",
                            r.theta, r.phi
                        ),
                    ));
                }
                None => {
                    return Err(schema(
                        last_line,
                        format!("missing node theta={th}, phi={ph} after the last row"),
                    ));
                }
            }
        }
    }
    if let Some(r) = it.next() {
        return Err(schema(r.line, "row beyond the regular grid"));
    }

    let samples = rows.into_iter().map(|r| r.sample).collect();
    let mut grid = PatternGrid::new(
        theta_step,
        phi_step,
        n_theta,
        n_phi,
        frequency,
        normalization,
        samples,
    )
    .map_err(|e| Error::Schema {
        line: None,
        detail: e.to_string(),
    })?;
    grid.set_metadata(metadata);
    Ok(grid)
}

/// Step and node count of a regular axis starting at zero.
fn infer_axis<T: Real>(values: impl Iterator<Item = T>, name: &str) -> Result<(T, usize)> {
    let mut distinct: Vec<T> = Vec::new();
    for v in values {
        if distinct.last() != Some(&v) {
            distinct.push(v);
        }
    }
    if distinct[0] != T::zero() {
        return Err(Error::Schema {
            line: None,
            detail: format!("{name} axis must start at 0, starts at {}", distinct[0]),
        });
    }
    let step = distinct
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > T::zero())
        .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.min(d))));
    match step {
        None => Ok((lit(180.0), 1)),
        Some(step) => {
            let max = distinct.iter().copied().fold(T::zero(), T::max);
            let n = (max / step).round().to_usize().unwrap_or(0) + 1;
            Ok((step, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_grid() -> PatternGrid<f64> {
        PatternGrid::from_fn(30.0, 45.0, 4.065e9, |t: f64, p: f64| {
            FieldSample::new(
                Complex::new(t.to_radians().sin() / 3.0, 1e-17 * p),
                Complex::new(-p / 7.0, 1.0 / 3.0),
            )
        })
        .unwrap()
        .with_metadata("config_sha256", "abc")
    }

    #[test]
    fn round_trip_is_exact_for_f64() {
        let p = sample_grid();
        let text = to_csv_string(&p);
        let q: PatternGrid<f64> = parse_csv(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(to_csv_string(&q), text);
    }

    #[test]
    fn missing_node_is_named() {
        let text = to_csv_string(&sample_grid());
        let mut lines: Vec<&str> = text.lines().collect();
        // drop theta=60, phi=90: rows start after 3 comment lines + header
        let idx = 4 + 2 * 8 + 2;
        assert!(lines[idx].starts_with("6.0000000000000000e1,9.0000000000000000e1"));
        lines.remove(idx);
        let e = parse_csv::<f64>(&lines.join("\n")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("theta=60") && msg.contains("phi=90"), "{msg}");
    }

    #[test]
    fn header_and_values_are_validated() {
        let text = to_csv_string(&sample_grid());
        let bad = text.replace("re_Ephi", "reEphi");
        assert!(matches!(parse_csv::<f64>(&bad), Err(Error::Schema { .. })));
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[6] = lines[6].replacen(",", ",NaN,", 1).replacen(",", "", 0);
        let e = parse_csv::<f64>(&lines.join("\n")).unwrap_err();
        assert!(matches!(e, Error::Schema { line: Some(7), .. }), "{e}");
        let no_freq: String = text.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert!(parse_csv::<f64>(&no_freq).is_err());
    }

    #[test]
    fn seven_degree_grid_loads_but_cannot_rotate() {
        let mut text = String::from("# frequency_hz=1e9\n# normalization=peak-normalized\n");
        text.push_str(HEADER);
        text.push('\n');
        for t in [0, 90, 180] {
            for k in 0..51 {
                let _ = writeln!(text, "{t},{},1,0,0,0", 7 * k);
            }
        }
        let p: PatternGrid<f64> = parse_csv(&text).unwrap();
        assert_eq!(p.n_phi(), 51);
        assert!(matches!(
            crate::radiator::rotate_pattern(&p, 1),
            Err(Error::Grid(_))
        ));
    }
}
