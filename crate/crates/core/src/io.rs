//! CSV output. Floats carry 17 significant digits so that files can be
//! compared byte for byte.

use std::collections::HashMap;
use std::io::Write;

use crate::error::Result;
use crate::sim::EnsembleResult;
use crate::trajectory::{MarkKind, Trajectory};

pub const ANALYTIC_HEADER: [&str; 7] = ["n", "p", "sigma2", "step", "sq_mean", "mean_sq", "variance"];
pub const SINGLE_HEADER: [&str; 9] = [
    "t", "n", "sq_mean", "mean_sq", "variance", "mean", "event", "departed", "arrived",
];
pub const ENSEMBLE_HEADER: [&str; 10] = [
    "t",
    "n",
    "sq_mean",
    "sq_mean_se",
    "mean_sq",
    "mean_sq_se",
    "variance",
    "variance_se",
    "mean",
    "mean_se",
];
pub const OVERLAY_HEADER: [&str; 3] = ["sq_mean_analytic", "mean_sq_analytic", "variance_analytic"];
pub const VALUES_HEADER: [&str; 3] = ["t", "slot", "value"];
pub const BOUND_HEADER: [&str; 6] = ["n", "p", "sigma2", "w_n", "bound", "w_n_over_n"];

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Integral times print as integers; ensemble-averaged times keep 17 digits.
pub fn fmt_time(t: f64) -> String {
    if t.fract() == 0.0 && t.abs() < 9.0e15 {
        format!("{}", t as i64)
    } else {
        fmt_num(t)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Analytic series: `step` is the sample index, `p` the event probability
/// in force at that sample's size.
pub fn write_analytic_csv<W: Write>(
    w: W,
    traj: &Trajectory,
    p_at: impl Fn(usize) -> f64,
    sigma2: f64,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ANALYTIC_HEADER)?;
    for (step, s) in traj.samples.iter().enumerate() {
        out.write_record([
            s.n.to_string(),
            fmt_num(p_at(s.n)),
            fmt_num(sigma2),
            step.to_string(),
            fmt_num(s.sq_mean),
            fmt_num(s.mean_sq),
            fmt_num(s.variance),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Single realization. `overlay`, when given, is read index-aligned with
/// the realization's samples.
pub fn write_single_csv<W: Write>(w: W, traj: &Trajectory, overlay: Option<&Trajectory>) -> Result<()> {
    let marks: HashMap<u64, _> = traj.marks.iter().map(|m| (m.t, m)).collect();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = SINGLE_HEADER.to_vec();
    if overlay.is_some() {
        header.extend(OVERLAY_HEADER);
    }
    out.write_record(&header)?;
    for (k, s) in traj.samples.iter().enumerate() {
        let mark = marks.get(&(s.t as u64)).filter(|_| s.t.fract() == 0.0);
        let event = mark.map(|m| match m.kind {
            MarkKind::Replacement => "replacement",
            MarkKind::Arrival => "arrival",
            MarkKind::Departure => "departure",
        });
        let mut row = vec![
            fmt_time(s.t),
            s.n.to_string(),
            fmt_num(s.sq_mean),
            fmt_num(s.mean_sq),
            fmt_num(s.variance),
            opt(s.mean),
            event.unwrap_or("").to_string(),
            opt(mark.and_then(|m| m.departed)),
            opt(mark.and_then(|m| m.arrived)),
        ];
        push_overlay(&mut row, overlay, k);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

fn push_overlay(row: &mut Vec<String>, overlay: Option<&Trajectory>, k: usize) {
    match overlay.map(|o| o.samples.get(k)) {
        Some(Some(a)) => row.extend([fmt_num(a.sq_mean), fmt_num(a.mean_sq), fmt_num(a.variance)]),
        Some(None) => row.extend([String::new(), String::new(), String::new()]),
        None => {}
    }
}

/// Long-format agent values: one row per agent per recorded event.
pub fn write_values_csv<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(VALUES_HEADER)?;
    for (s, values) in traj.samples.iter().zip(&traj.values) {
        for (slot, v) in values.iter().enumerate() {
            out.write_record([fmt_time(s.t), slot.to_string(), fmt_num(*v)])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_ensemble_csv<W: Write>(w: W, ens: &EnsembleResult, overlay: Option<&Trajectory>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = ENSEMBLE_HEADER.to_vec();
    if overlay.is_some() {
        header.extend(OVERLAY_HEADER);
    }
    out.write_record(&header)?;
    for (k, (m, e)) in ens
        .mean_trajectory
        .samples
        .iter()
        .zip(&ens.stderr_trajectory.samples)
        .enumerate()
    {
        let mut row = vec![
            fmt_time(m.t),
            m.n.to_string(),
            fmt_num(m.sq_mean),
            fmt_num(e.sq_mean),
            fmt_num(m.mean_sq),
            fmt_num(e.mean_sq),
            fmt_num(m.variance),
            fmt_num(e.variance),
            opt(m.mean),
            opt(e.mean),
        ];
        push_overlay(&mut row, overlay, k);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Rows of `(n, W_n, bound)` for the growing-system bound check.
pub fn write_bound_csv<W: Write>(w: W, p: f64, sigma2: f64, rows: &[(usize, f64, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(BOUND_HEADER)?;
    for &(n, w_n, bound) in rows {
        out.write_record([
            n.to_string(),
            fmt_num(p),
            fmt_num(sigma2),
            fmt_num(w_n),
            fmt_num(bound),
            fmt_num(w_n / n as f64),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::fixed_trajectory;
    use crate::moments::MomentVector;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(4.0), "4.0000000000000000e0");
        assert_eq!(fmt_time(12.0), "12");
        assert_eq!(fmt_time(12.5), "1.2500000000000000e1");
        let x = 4.077_471_967_380_224e-3;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn analytic_csv_shape() {
        let traj = fixed_trajectory(4, 0.5, 1.0, MomentVector::new(0.25, 1.0), 3).unwrap();
        let mut buf = Vec::new();
        write_analytic_csv(&mut buf, &traj, |_| 0.5, 1.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,p,sigma2,step,sq_mean,mean_sq,variance");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("4,5.0000000000000000e-1,1.0000000000000000e0,0,2.5"));
    }
}
