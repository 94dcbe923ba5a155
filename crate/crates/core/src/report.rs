//! Text exchange format for sampled functions and CSV/JSON tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dyadic::{Resolution, SampledFunction};
use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::experiments::{ApproxRecord, LemmaReport};
use crate::kernels::KernelNorms;
use crate::walsh::Spectrum;
use crate::weights::ValidationReport;

pub const SPECTRUM_HEADER: &str = "SPECTRUM";

pub const APPROX_HEADER: &str = "n,p,error,modulus,ratio,bound,bound_ok";
pub const LEMMA_HEADER: &str = "lemma,instances,worst_margin,pass";
pub const KERNEL_NORMS_HEADER: &str = "n,l1_dirichlet,l1_fejer";
pub const VALIDATION_HEADER: &str =
    "block,sum,sum_ok,monotonicity,c2_constant,c2_cap,case_a_ok,case_b_ok,theorem_applies";
pub const MODULUS_HEADER: &str = "n,p,modulus";

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_samples(header: Option<&str>, resolution: Resolution, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    if let Some(h) = header {
        out.push_str(h);
        out.push('\n');
    }
    let _ = writeln!(out, "N={}", resolution.bits());
    for v in values {
        let _ = writeln!(out, "{v:?}");
    }
    out
}

/// `N=<bits>` followed by one sample per line, shortest round-trip decimals.
pub fn write_function(f: &SampledFunction) -> String {
    write_samples(None, f.resolution(), f.values())
}

pub fn write_spectrum(s: &Spectrum) -> String {
    write_samples(Some(SPECTRUM_HEADER), s.resolution(), s.coeffs())
}

fn parse_samples(text: &str, spectrum: bool) -> Result<(Resolution, Vec<f64>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_err = |line, message: String| Error::Parse { line, message };
    let (mut line, mut first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input".into()))?;
    if first == SPECTRUM_HEADER {
        if !spectrum {
            return Err(parse_err(
                line,
                "spectrum given where samples expected".into(),
            ));
        }
        (line, first) = lines
            .next()
            .ok_or_else(|| parse_err(line, "missing N= line".into()))?;
    } else if spectrum {
        return Err(parse_err(line, format!("expected {SPECTRUM_HEADER}")));
    }
    let bits: u32 = first
        .strip_prefix("N=")
        .and_then(|b| b.trim().parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected N=<int>, found {first:?}")))?;
    let resolution = Resolution::new(bits)?;
    let values = lines
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| parse_err(i, format!("{l:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != resolution.len() {
        return Err(Error::LengthMismatch {
            expected: resolution.len(),
            found: values.len(),
        });
    }
    Ok((resolution, values))
}

pub fn parse_function(text: &str) -> Result<SampledFunction> {
    let (res, values) = parse_samples(text, false)?;
    SampledFunction::new(res, values)
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let (res, values) = parse_samples(text, true)?;
    Spectrum::new(res, values)
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 fields")
}

pub fn approx_csv(records: &[ApproxRecord]) -> String {
    csv_table(
        APPROX_HEADER,
        records.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.p.to_string(),
                sig12(r.error),
                sig12(r.modulus),
                sig12(r.ratio),
                r.bound.map(sig12).unwrap_or_default(),
                r.bound_ok.to_string(),
            ]
        }),
    )
}

pub fn lemma_csv(report: &LemmaReport) -> String {
    csv_table(
        LEMMA_HEADER,
        report.rows.iter().map(|r| {
            vec![
                r.lemma.clone(),
                r.instances.to_string(),
                sig12(r.worst_margin),
                r.pass.to_string(),
            ]
        }),
    )
}

pub fn kernel_norms_csv(rows: &[KernelNorms]) -> String {
    csv_table(
        KERNEL_NORMS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                sig12(rational_to_f64(&r.l1_dirichlet)),
                sig12(rational_to_f64(&r.l1_fejer)),
            ]
        }),
    )
}

pub fn validation_csv(report: &ValidationReport) -> String {
    csv_table(
        VALIDATION_HEADER,
        [vec![
            report.block.to_string(),
            sig12(report.sum),
            report.sum_ok.to_string(),
            serde_json::to_value(report.monotonicity)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            sig12(report.c2_constant),
            sig12(report.c2_cap),
            report.case_a_ok.to_string(),
            report.case_b_ok.to_string(),
            report.theorem_applies().to_string(),
        ]],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusRow {
    pub n: u32,
    pub p: crate::dyadic::LpExponent,
    pub modulus: f64,
}

pub fn modulus_csv(rows: &[ModulusRow]) -> String {
    csv_table(
        MODULUS_HEADER,
        rows.iter()
            .map(|r| vec![r.n.to_string(), r.p.to_string(), sig12(r.modulus)]),
    )
}

/// JSON mirror of a table; non-finite numbers become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable table");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::fwht_forward;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(47.0 / 30.0), "1.56666666667");
        assert_eq!(sig12(-0.125), "-0.125");
        assert_eq!(sig12(1.0 / 3.0 * 1e-7), "3.33333333333e-08");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(sig12(0.99999999999999), "1");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(2.0f64.powi(-10)), "0.0009765625");
    }

    #[test]
    fn exchange_round_trip() {
        let r = Resolution::new(3).unwrap();
        let f = SampledFunction::from_fn(r, |j| (j as f64).sqrt() - 0.1).unwrap();
        let text = write_function(&f);
        assert!(text.starts_with("N=3\n"));
        assert_eq!(text.lines().count(), 9);
        assert_eq!(parse_function(&text).unwrap(), f);

        let s = fwht_forward(&f);
        let text = write_spectrum(&s);
        assert!(text.starts_with("SPECTRUM\nN=3\n"));
        assert_eq!(parse_spectrum(&text).unwrap(), s);
        assert!(parse_function(&text).is_err());
        assert!(parse_spectrum(&write_function(&f)).is_err());
    }

    #[test]
    fn exchange_errors() {
        assert!(matches!(parse_function(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_function("N=2\n1\n2\n3\n"),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            parse_function("N=1\n1\nx\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_function("N=1\n1\ninf\n").is_err());
        assert!(parse_function("M=1\n1\n2\n").is_err());
    }

    #[test]
    fn table_headers() {
        let csv = kernel_norms_csv(&[]);
        assert_eq!(csv, "n,l1_dirichlet,l1_fejer\n");
        assert_eq!(approx_csv(&[]).trim_end(), APPROX_HEADER);
    }
}
