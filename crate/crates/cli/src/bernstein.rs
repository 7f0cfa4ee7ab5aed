use std::fmt::Write as _;
use std::path::Path;

use realgap_core::invprob::{BernsteinApprox, DEFAULT_DEGREE_CAP};
use realgap_core::number::Rational;

use crate::error::CliError;
use crate::io::{emit, show};
use crate::solve::invprob_error;

pub fn parse_degrees(text: &str) -> Result<Vec<u64>, CliError> {
    let degrees: Vec<u64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|e| CliError::usage(format!("--degrees: '{s}': {e}"))))
        .collect::<Result<_, _>>()?;
    if degrees.is_empty() {
        return Err(CliError::usage("--degrees: degree list is empty"));
    }
    if degrees.contains(&0) {
        return Err(CliError::usage("--degrees: degrees must be positive"));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::usage("--degrees: degrees must be strictly ascending"));
    }
    Ok(degrees)
}

pub struct CurveRow {
    pub degree: u64,
    /// `None` when the degree exceeds the cap and the row was skipped.
    pub values: Option<CurveValues>,
}

pub struct CurveValues {
    pub coordinate_error: f64,
    pub total_error: f64,
    pub envelope: f64,
    pub certified: f64,
    pub at_zero: Rational,
}

pub fn curve(dim: usize, beta: &Rational, degrees: &[u64], step: &Rational) -> Result<Vec<CurveRow>, CliError> {
    if step.signum() <= 0 {
        return Err(CliError::usage("--step must be positive"));
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        if degree > DEFAULT_DEGREE_CAP {
            rows.push(CurveRow { degree, values: None });
            continue;
        }
        let p = BernsteinApprox::with_degree(dim, beta, degree).map_err(invprob_error)?;
        let coordinate_error = p.measured_sup_error(step);
        let n = dim as f64;
        rows.push(CurveRow {
            degree,
            values: Some(CurveValues {
                coordinate_error,
                total_error: coordinate_error * n,
                envelope: p.envelope() * n,
                certified: p.grid_certificate(step).total_error,
                at_zero: p.eval(&vec![Rational::zero(); dim]),
            }),
        });
    }
    Ok(rows)
}

pub fn to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("degree,status,coordinate_error,total_error,envelope,certified_bound,error_at_zero\n");
    for r in rows {
        match &r.values {
            Some(v) => writeln!(
                out,
                "{},ok,{:.9e},{:.9e},{:.9e},{:.9e},{}",
                r.degree,
                v.coordinate_error,
                v.total_error,
                v.envelope,
                v.certified,
                show(&v.at_zero)
            ),
            None => writeln!(out, "{},degree_cap_exceeded,,,,,", r.degree),
        }
        .expect("write to string");
    }
    out
}

/// Log-log plot of measured total error and the `n^{-1/2}` envelope.
pub fn to_svg(rows: &[CurveRow]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 48.0;
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| r.values.as_ref().map(|v| ((r.degree as f64).log10(), v.total_error.log10(), v.envelope.log10())))
        .filter(|p| p.1.is_finite())
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1).min(p.2), b.max(p.1).max(p.2)));
    let (x1, y1) = (if x1 > x0 { x1 } else { x0 + 1.0 }, if y1 > y0 { y1 } else { y0 + 1.0 });
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let line = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
        pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(f(p)))).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(
        svg,
        "<line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{ty}\" font-size=\"12\" text-anchor=\"middle\">log10 degree</text>\n\
         <text x=\"14\" y=\"{cy}\" font-size=\"12\" transform=\"rotate(-90 14 {cy})\" text-anchor=\"middle\">log10 sup error</text>",
        b = H - M,
        r = W - M,
        cx = W / 2.0,
        ty = H - 12.0,
        cy = H / 2.0,
    );
    let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"{}\"/>", line(&|p| p.2));
    let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>", line(&|p| p.1));
    for p in &pts {
        let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>", sx(p.0), sy(p.1));
    }
    let _ = writeln!(
        svg,
        "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" fill=\"steelblue\">measured</text>\n\
         <text x=\"{x}\" y=\"{y2}\" font-size=\"11\" fill=\"gray\">envelope R·N/√n</text>",
        x = W - M - 110.0,
        y = M,
        y2 = M + 14.0
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn cmd_bernstein_curve(
    dim: usize,
    beta: &Rational,
    degrees: &[u64],
    step: &Rational,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<bool, CliError> {
    let rows = curve(dim, beta, degrees, step)?;
    emit(csv, &to_csv(&rows))?;
    if let Some(path) = svg {
        emit(Some(path), &to_svg(&rows))?;
    }
    // capped rows are flagged in the CSV, not fatal
    Ok(true)
}
