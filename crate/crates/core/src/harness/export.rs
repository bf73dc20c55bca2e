//! Sampled curves as `x,value,width` CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use super::build::Construction;
use super::HarnessError;
use crate::numerics::{CirclePoint, Dyadic, PrecisionReal, Round};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportKind {
    /// Truncated cocycle `φ`.
    Phi,
    /// Lift of `F`.
    F,
    /// Predicted derivative `exp(φ(h(x)))`.
    Derivative,
    /// `h^{-1}`.
    Cdf,
}

impl FromStr for ExportKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi" => Ok(ExportKind::Phi),
            "F" => Ok(ExportKind::F),
            "derivative" => Ok(ExportKind::Derivative),
            "cdf" => Ok(ExportKind::Cdf),
            other => Err(HarnessError::UnknownExport(other.to_string())),
        }
    }
}

/// `samples + 1` rows on `x = j/samples`, `j = 0..=samples`.
pub fn export_csv(c: &Construction, kind: ExportKind, samples: usize) -> Result<String, HarnessError> {
    if samples < 2 {
        return Err(HarnessError::Config("samples must be at least 2".into()));
    }
    let d = &c.conjugacy;
    let mp = d.mass_precision();
    let stack = c.stack.with_precision(mp);
    let rows: Vec<(f64, PrecisionReal)> = (0..=samples)
        .into_par_iter()
        .map(|j| -> Result<(f64, PrecisionReal), HarnessError> {
            let x = Dyadic::from_ratio(&j.into(), &samples.into(), 64, Round::Down);
            let xr = PrecisionReal::exact(x.clone());
            let v = match kind {
                ExportKind::Phi => stack.phi_truncated(&CirclePoint::from_dyadic(x.clone())),
                ExportKind::F => d.f_lift(&xr)?,
                ExportKind::Derivative => {
                    let y = d.h_lift(&xr)?;
                    stack.phi_truncated(&CirclePoint::new(y)).exp(mp)
                }
                ExportKind::Cdf => d.cdf_lift(&xr),
            };
            Ok((x.to_f64(), v))
        })
        .collect::<Result<_, _>>()?;
    let mut out = String::from("x,value,width\n");
    for (x, v) in rows {
        writeln!(out, "{x},{},{:e}", v.mid_f64(), v.width_f64()).expect("string write");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{build, BuildConfig};

    #[test]
    fn rows_and_shapes() {
        let c = build(&BuildConfig { depth: 3, i_max: 8, n_max: 3, check_radius: 4, ..BuildConfig::default() }).unwrap();
        let parse = |s: &str| -> Vec<(f64, f64)> {
            s.lines()
                .skip(1)
                .map(|l| {
                    let f: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
                    (f[0], f[1])
                })
                .collect()
        };
        let f = export_csv(&c, ExportKind::F, 200).unwrap();
        assert!(f.starts_with("x,value,width\n"));
        let f = parse(&f);
        assert_eq!(f.len(), 201);
        assert!(f.windows(2).all(|w| w[1].1 > w[0].1));
        assert!((f[200].1 - f[0].1 - 1.0).abs() < 1e-9);
        let der = parse(&export_csv(&c, ExportKind::Derivative, 100).unwrap());
        assert!(der.iter().all(|r| r.1 > 0.0));
        let cdf = parse(&export_csv(&c, ExportKind::Cdf, 100).unwrap());
        assert_eq!(cdf[0].1, 0.0);
        assert!((cdf[100].1 - 1.0).abs() < 1e-12);
        assert_eq!(parse(&export_csv(&c, ExportKind::Phi, 50).unwrap()).len(), 51);
        assert!(matches!("psi".parse::<ExportKind>(), Err(HarnessError::UnknownExport(_))));
        assert!(export_csv(&c, ExportKind::Phi, 1).is_err());
    }
}
