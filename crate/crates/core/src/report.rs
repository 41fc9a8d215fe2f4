//! Locale-free number formatting and the CSV bodies emitted by the CLI.
//!
//! Every number is printed with 12 significant digits, `.` as decimal
//! separator and no thousands grouping, so equal inputs give byte-equal
//! output.

use std::fmt::Write;

use crate::dissipop::FourierReport;
use crate::interconnect::PassivationSweep;
use crate::smib::{RegionSweep, Trajectory};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style formatting: fixed notation for exponents in `[−5, 12)`,
/// scientific otherwise, trailing zeros stripped.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), fmt_num)
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Columns `theta,true_passive,<label>_cert...`, then a `threshold` footer
/// row with the bisection-refined values.
pub fn passivation_sweep_csv(sweep: &PassivationSweep) -> String {
    let mut out = String::from("theta,true_passive");
    for l in &sweep.labels {
        let _ = write!(out, ",{l}_cert");
    }
    out.push('\n');
    for row in &sweep.rows {
        let _ = write!(out, "{},{}", fmt_num(row.theta), fmt_bool(row.true_passive));
        for &c in &row.certified {
            let _ = write!(out, ",{}", fmt_bool(c));
        }
        out.push('\n');
    }
    let _ = write!(out, "threshold,{}", fmt_opt(sweep.true_threshold));
    for &t in &sweep.certified_thresholds {
        let _ = write!(out, ",{}", fmt_opt(t));
    }
    out.push('\n');
    out
}

pub fn region_csv(sweep: &RegionSweep) -> String {
    let mut out = String::from("K11,K22,scalar_cert,matrix_cert,eig_stable\n");
    for c in &sweep.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(c.k11),
            fmt_num(c.k22),
            fmt_bool(c.scalar_cert),
            fmt_bool(c.matrix_cert),
            fmt_bool(c.eig_stable)
        );
    }
    out
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,delta,omega,Eqp,Pe,H\n");
    for i in 0..traj.len() {
        let s = traj.states[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(traj.times[i]),
            fmt_num(s.delta),
            fmt_num(s.omega),
            fmt_num(s.eqp),
            fmt_num(traj.electrical_power[i]),
            fmt_num(traj.hamiltonian[i])
        );
    }
    out
}

/// One row per matched eigenpair.
pub fn spectral_csv(report: &FourierReport) -> String {
    let mut out = String::from("index,lambda,omega,port_index,deviation,alignment\n");
    for m in &report.matches {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            m.index,
            fmt_num(m.value),
            fmt_num(m.omega),
            m.port_index,
            fmt_num(m.deviation),
            fmt_num(m.alignment)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.1095), "-0.1095");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(1e-7), "1e-7");
        assert_eq!(fmt_num(2.5e15), "2.5e15");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_opt(None), "none");
        let x = std::f64::consts::PI * 1e3;
        assert_eq!(fmt_num(x), "3141.59265359");
    }
}
