//! Verification suites over a loaded construction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::build::{digit_sequence, Construction};
use super::HarnessError;
use crate::cantor::{point_from_code, verify_translate_disjointness, CylinderCode};
use crate::cocycle::{amplitude, bound_m};
use crate::conjugacy::{
    f_derivative_check, fundamental_domain_report, grid_point, pushforward_check, rotation_number_estimate,
    ConjugacyDescriptor, DerivativeReport,
};
use crate::numerics::{dist_to_grid, CirclePoint, Dyadic, PrecisionReal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub values: BTreeMap<String, Value>,
    pub budgets: BTreeMap<String, Value>,
    pub wall_ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Disjointness,
    Diophantine,
    Lemma,
    Summability,
    Conjugacy,
    Derivative,
    FundamentalDomain,
    RotationNumber,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Conjugacy,
        Suite::Derivative,
        Suite::Diophantine,
        Suite::Disjointness,
        Suite::FundamentalDomain,
        Suite::Lemma,
        Suite::RotationNumber,
        Suite::Summability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Disjointness => "disjointness",
            Suite::Diophantine => "diophantine",
            Suite::Lemma => "lemma",
            Suite::Summability => "summability",
            Suite::Conjugacy => "conjugacy",
            Suite::Derivative => "derivative",
            Suite::FundamentalDomain => "fundamental-domain",
            Suite::RotationNumber => "rotation-number",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub version: String,
    pub alpha: String,
    pub suites: Vec<String>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub wall_ms: u64,
}

impl VerificationReport {
    /// 0 when every check passes, 1 on any failure, else 3 on any
    /// undecided check.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecided => 3,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

type Values = BTreeMap<String, Value>;
type Outcome = Result<(Status, Values), HarnessError>;

fn vals(v: Value) -> Values {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run<F: FnOnce() -> Outcome>(name: &str, budgets: Value, f: F) -> Check {
    let t = Instant::now();
    let (status, values) = match f() {
        Ok(r) => r,
        Err(e) => {
            let status = if e.exit_code() == 3 { Status::Undecided } else { Status::Fail };
            (status, vals(json!({ "error": e.to_string() })))
        }
    };
    Check { name: name.to_string(), status, values, budgets: vals(budgets), wall_ms: t.elapsed().as_millis() as u64 }
}

fn enc(x: &PrecisionReal) -> Value {
    json!({ "lo": x.lo().to_string(), "hi": x.hi().to_string(), "approx": x.mid_f64() })
}

/// Left ends of `samples` random depth-`d` cylinders: points of the
/// Cantor set.
pub(crate) fn cantor_samples(c: &Construction, samples: usize, seed: u64) -> Vec<CirclePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = c.config.depth;
    let prec = c.seq.geometry_precision(d, 64);
    (0..samples)
        .map(|_| {
            let code = CylinderCode::new((0..d).map(|_| rng.gen()).collect());
            point_from_code(&c.seq, &code, d, prec)
        })
        .collect()
}

pub fn run_suites(c: &Construction, suites: &[Suite]) -> VerificationReport {
    let t = Instant::now();
    let mut wanted: Vec<Suite> = suites.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut checks: Vec<Check> = wanted.par_iter().flat_map(|s| suite_checks(c, *s)).collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let status = if checks.iter().any(|k| k.status == Status::Fail) {
        Status::Fail
    } else if checks.iter().any(|k| k.status == Status::Undecided) {
        Status::Undecided
    } else {
        Status::Pass
    };
    VerificationReport {
        version: super::DESCRIPTOR_VERSION.to_string(),
        alpha: c.alpha.spec().to_string(),
        suites: wanted.iter().map(|s| s.name().to_string()).collect(),
        status,
        checks,
        wall_ms: t.elapsed().as_millis() as u64,
    }
}

fn suite_checks(c: &Construction, s: Suite) -> Vec<Check> {
    let jobs: Vec<fn(&Construction) -> Check> = match s {
        Suite::Disjointness => vec![check_translates, check_level_neighbourhoods],
        Suite::Diophantine => vec![check_digits, check_conditions, check_lemma_one, check_lemma_two],
        Suite::Lemma => vec![check_lemma_equality, check_lemma_decay],
        Suite::Summability => vec![check_m_bound, check_summable_samples],
        Suite::Conjugacy => {
            vec![check_normalization, check_atoms_recomputed, check_monotone, check_inverse, check_pushforward, check_lift]
        }
        Suite::Derivative => vec![check_derivative],
        Suite::FundamentalDomain => vec![check_fundamental_domain],
        Suite::RotationNumber => vec![check_rotation, check_rotation_identity],
    };
    jobs.par_iter().map(|f| f(c)).collect()
}

// disjointness

fn check_translates(c: &Construction) -> Check {
    let cfg = &c.config;
    run("disjointness.translates", json!({ "range": cfg.disjointness_range, "d_max": cfg.d_max }), || {
        let r = verify_translate_disjointness(&c.alpha, &c.seq, cfg.disjointness_range, cfg.d_max, &cfg.ladder())?;
        let ok = r.min_gap.is_positive() && r.max_depth_used <= cfg.d_max;
        Ok((
            pass_if(ok),
            vals(json!({ "pairs": r.pairs.len(), "min_gap": enc(&r.min_gap), "max_depth_used": r.max_depth_used })),
        ))
    })
}

fn check_level_neighbourhoods(c: &Construction) -> Check {
    run("disjointness.level_neighbourhoods", json!({ "n_max": c.config.n_max }), || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (n, ch) in c.choices.iter().enumerate() {
            // Two ε-neighbourhoods fit inside every certified gap.
            let twice = ch.epsilon.shl(1);
            ok &= ch.gap.is_positive() && &twice < ch.gap.lo();
            rows.push(json!({ "n": n + 1, "depth": ch.depth, "epsilon": ch.epsilon.to_f64(), "gap": ch.gap.mid_f64() }));
        }
        Ok((pass_if(ok), vals(json!({ "levels": rows }))))
    })
}

// diophantine

fn check_digits(c: &Construction) -> Check {
    run("diophantine.digits", json!({ "terms": c.seq.len() + 1 }), || {
        let fresh = digit_sequence(&c.config, &c.profile)?;
        Ok((pass_if(fresh == c.seq), vals(json!({ "bits": c.seq.values().iter().map(|q| q.bits()).collect::<Vec<_>>() }))))
    })
}

fn check_conditions(c: &Construction) -> Check {
    run("diophantine.conditions", json!({ "terms": c.seq.len() + 1 }), || {
        let r = c.seq.check_conditions(&c.profile);
        let status = match r.p_condition {
            None => Status::Undecided,
            Some(_) => pass_if(r.all_hold()),
        };
        Ok((
            status,
            vals(json!({
                "starts_at_one": r.starts_at_one,
                "divisibility": r.divisibility,
                "ratio_at_most_third": r.ratio_at_most_third,
                "p_condition": r.p_condition,
                "p_failures": r.p_failures,
            })),
        ))
    })
}

/// `p(q)·dist(mα, (1/q)Z) >= 1` for `1 <= m <= 8`, `m <= q <= 200`.
fn check_lemma_one(c: &Construction) -> Check {
    run("diophantine.lemma1", json!({ "m_max": 8, "q_max": 200 }), || {
        let mut min = f64::INFINITY;
        let mut undecided = 0usize;
        let mut failed = Vec::new();
        for m in 1i64..=8 {
            for q in m as u64..=200 {
                let qb = BigUint::from(q);
                let p = BigInt::from(c.profile.p(&qb)?);
                let mut verdict = None;
                for &guard in c.config.ladder.iter() {
                    let prec = 64 + guard;
                    let x = c.alpha.enclosure(prec + 16).mul_int(m, prec);
                    let v = dist_to_grid(&x, &qb, prec).mul_int(p.clone(), prec);
                    if v.lo() >= &Dyadic::one() {
                        verdict = Some((true, v));
                        break;
                    }
                    if v.hi() < &Dyadic::one() {
                        verdict = Some((false, v));
                        break;
                    }
                }
                match verdict {
                    Some((true, v)) => min = min.min(v.lo().to_f64()),
                    Some((false, _)) => failed.push((m, q)),
                    None => undecided += 1,
                }
            }
        }
        let status = if !failed.is_empty() {
            Status::Fail
        } else if undecided > 0 {
            Status::Undecided
        } else {
            Status::Pass
        };
        Ok((status, vals(json!({ "min_product": min, "failed": failed, "undecided": undecided }))))
    })
}

/// `p(q_i)·dist(β, (1/q_i)Z) <= 3/2^{i+1}` for truncated `β ∈ C - C`,
/// in exact rational arithmetic.
fn check_lemma_two(c: &Construction) -> Check {
    let codes = 20usize;
    run("diophantine.lemma2", json!({ "codes": codes, "i_max": 4 }), || {
        let n = c.seq.len();
        let top = 4.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(c.config.seed ^ 0x1e2);
        let mut worst = 0.0f64;
        let mut ok = true;
        for _ in 0..codes {
            let eps: Vec<i32> = (1..=n).map(|_| rng.gen_range(-1..=1)).collect();
            let beta = eps.iter().enumerate().fold(BigRational::zero(), |s, (j, &e)| {
                s + BigRational::new(e.into(), c.seq.q(j + 1).clone().into())
            });
            for i in 1..=top {
                let qi: BigInt = c.seq.q(i).clone().into();
                let scaled = &beta * BigRational::from_integer(qi.clone());
                let frac = &scaled - scaled.floor();
                let d = frac.clone().min(BigRational::one() - frac) / BigRational::from_integer(qi);
                let p = BigRational::from_integer(c.profile.p(c.seq.q(i))?.into());
                let lhs = p * d;
                let bound = BigRational::new(3.into(), BigInt::from(2).pow(i as u32 + 1));
                ok &= lhs <= bound;
                worst = worst.max((&lhs / &bound).abs().to_f64().unwrap_or(f64::INFINITY));
            }
        }
        Ok((pass_if(ok), vals(json!({ "worst_ratio_to_bound": worst, "depths": top, "tail_slack": 0 }))))
    })
}

// lemma

fn check_lemma_equality(c: &Construction) -> Check {
    let cfg = &c.config;
    run("lemma.equality", json!({ "samples": cfg.samples, "n_max": cfg.n_max, "precision": cfg.precision }), || {
        let xs = cantor_samples(c, cfg.samples, cfg.seed);
        let rows: Vec<(bool, f64)> = xs
            .par_iter()
            .flat_map_iter(|x| {
                (1..=cfg.n_max).flat_map(move |n| {
                    let r = 1i64 << n;
                    (-r..=r).map(move |i| {
                        let v = c.stack.level_birkhoff(n, x, i);
                        let expect = -(&amplitude(n) * &Dyadic::from_int(i.abs()));
                        (v.contains(&expect) && v.width_f64() <= 1e-9, v.width_f64())
                    })
                })
            })
            .collect();
        let ok = rows.iter().all(|r| r.0);
        let max_width = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        Ok((pass_if(ok), vals(json!({ "evaluations": rows.len(), "max_width": max_width }))))
    })
}

fn check_lemma_decay(c: &Construction) -> Check {
    let cfg = &c.config;
    run("lemma.decay", json!({ "samples": cfg.samples, "n_range": [0, 3] }), || {
        let xs = cantor_samples(c, cfg.samples, cfg.seed);
        let sums: Vec<Vec<PrecisionReal>> = xs.par_iter().map(|x| c.stack.orbit_sums(x, 15)).collect();
        let mut status = Status::Pass;
        let mut worst_margin = f64::INFINITY;
        let mut max_slack_ratio = 0.0f64;
        for s in &sums {
            for n in 0..=3u32 {
                // -(3/4)(3/2)^n
                let bound = -Dyadic::new(BigInt::from(3).pow(n + 1), -(n as i64) - 2);
                for i in (1i64 << n)..(1i64 << (n + 1)) {
                    for v in [&s[(15 + i) as usize], &s[(15 - i) as usize]] {
                        // The truncated sum bounds the full one from above
                        // on the Cantor set; the slack is its width.
                        let slack = v.width_f64();
                        max_slack_ratio = max_slack_ratio.max(slack / bound.to_f64().abs());
                        if v.hi() <= &bound {
                            worst_margin = worst_margin.min((&bound - v.hi()).to_f64());
                        } else if v.lo() <= &bound {
                            status = status.max(Status::Undecided);
                        } else {
                            status = Status::Fail;
                        }
                    }
                }
            }
        }
        if max_slack_ratio >= 0.1 {
            status = Status::Fail;
        }
        Ok((status, vals(json!({ "worst_margin": worst_margin, "max_slack_ratio": max_slack_ratio }))))
    })
}

// summability

/// Plain double-precision sum of the `M` series.
fn m_oracle() -> f64 {
    1.0 + (0..60).map(|n| 2f64.powi(n + 1) * (-(0.75) * 1.5f64.powi(n)).exp()).sum::<f64>()
}

fn check_m_bound(_c: &Construction) -> Check {
    run("summability.m_bound", json!({ "precision": 128 }), || {
        let m = bound_m(128);
        let o = m_oracle();
        let ok = (m.value.lo().to_f64() - 1e-12..=m.value.hi().to_f64() + 1e-12).contains(&o);
        Ok((pass_if(ok), vals(json!({ "m": enc(&m.value), "terms": m.terms, "oracle": o }))))
    })
}

fn check_summable_samples(c: &Construction) -> Check {
    let cfg = &c.config;
    run("summability.samples", json!({ "samples": cfg.samples, "i_max": cfg.i_max }), || {
        let m = bound_m(128);
        let xs = cantor_samples(c, cfg.samples, cfg.seed);
        let p = cfg.precision;
        let totals: Vec<PrecisionReal> = xs
            .par_iter()
            .map(|x| c.stack.orbit_sums(x, cfg.i_max).iter().fold(PrecisionReal::zero(), |s, v| s.add(&v.exp(p), p)))
            .collect();
        let ok = totals.iter().all(|t| t.hi() <= m.value.hi());
        let max = totals.iter().map(|t| t.hi().to_f64()).fold(0.0, f64::max);
        Ok((pass_if(ok), vals(json!({ "max_sum": max, "m_hi": m.value.hi().to_f64() }))))
    })
}

// conjugacy

fn check_normalization(c: &Construction) -> Check {
    let m = c.conjugacy.measure();
    run("conjugacy.normalization", json!({ "mass_prec": m.params.mass_prec }), || {
        let positive = m.atoms.iter().all(|a| a.mass.is_positive());
        let total = m.total_mass();
        let slack = Dyadic::pow2(-(m.params.mass_prec as i64) + 32);
        let target = m.target_mass();
        let close = total.inflate(&slack).contains(&target);
        Ok((
            pass_if(positive && close),
            vals(json!({ "all_positive": positive, "total": enc(&total), "target": target.to_f64(), "atoms": m.atoms.len() })),
        ))
    })
}

fn check_atoms_recomputed(c: &Construction) -> Check {
    let m = c.conjugacy.measure();
    run("conjugacy.atoms_recomputed", json!({ "depth": m.params.depth, "i_max": m.params.i_max }), || {
        let fresh = crate::conjugacy::assemble_mu(&c.stack, &c.seq, &m.params)?;
        let same_layout = fresh.atoms.len() == m.atoms.len()
            && fresh.atoms.iter().zip(&m.atoms).all(|(a, b)| a.i == b.i && a.code == b.code && a.location == b.location);
        let mismatched = fresh.atoms.iter().zip(&m.atoms).filter(|(a, b)| !a.mass.overlaps(&b.mass)).count();
        Ok((
            pass_if(same_layout && mismatched == 0 && fresh.z.overlaps(&m.z)),
            vals(json!({ "same_layout": same_layout, "mismatched_masses": mismatched })),
        ))
    })
}

fn check_monotone(c: &Construction) -> Check {
    run("conjugacy.monotone", json!({}), || {
        let d = &c.conjugacy;
        let zero = d.cdf(&PrecisionReal::zero()) == PrecisionReal::zero();
        let one = d.total().contains(&Dyadic::one());
        let slopes = d.segments().iter().all(|s| s.slope.is_positive() && s.y1 > s.y0);
        Ok((
            pass_if(zero && one && slopes),
            vals(json!({ "cdf_at_zero": zero, "total_contains_one": one, "positive_slopes": slopes, "segments": d.segments().len() })),
        ))
    })
}

fn check_inverse(c: &Construction) -> Check {
    let n = 1000usize;
    let tol = c.config.tolerance.clone();
    run("conjugacy.inverse", json!({ "grid": n, "tolerance": tol.to_f64() }), || {
        let d = &c.conjugacy;
        let errs: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| -> Result<f64, HarnessError> {
                let x = PrecisionReal::exact(grid_point(j, n));
                let y = d.h(&x)?;
                let a = d.cdf(&y).sub(&x, 256).abs().hi().to_f64();
                // The other composition, on the y side.
                let back = d.h(&d.cdf(&x))?;
                let b = back.sub(&x, d.geometry_precision()).abs().hi().to_f64();
                Ok(a.max(b))
            })
            .collect::<Result<_, _>>()?;
        let max = errs.iter().copied().fold(0.0, f64::max);
        let h0 = d.h(&PrecisionReal::zero())?;
        let fixes_zero = h0.contains(&Dyadic::zero()) && h0.hi() <= &tol;
        Ok((pass_if(max <= tol.to_f64() && fixes_zero), vals(json!({ "max_error": max, "h_fixes_zero": fixes_zero }))))
    })
}

fn check_pushforward(c: &Construction) -> Check {
    run("conjugacy.pushforward", json!({ "arcs": 100 }), || {
        let p = pushforward_check(&c.conjugacy, 100, c.config.seed);
        Ok((pass_if(p.max_error <= p.resolution), vals(json!({ "max_error": p.max_error, "resolution": p.resolution }))))
    })
}

/// The lift is strictly increasing on a grid and has degree one.
fn check_lift(c: &Construction) -> Check {
    let n = 1000usize;
    run("conjugacy.lift", json!({ "grid": n }), || {
        let d = &c.conjugacy;
        let gp = d.geometry_precision();
        let images: Vec<PrecisionReal> = (0..n)
            .into_par_iter()
            .map(|j| d.f_lift(&PrecisionReal::exact(grid_point(j, n))))
            .collect::<Result<_, _>>()?;
        let increasing = images.windows(2).all(|w| w[0].hi() < w[1].lo());
        let x = PrecisionReal::exact(grid_point(0, n));
        let shifted = d.f_lift(&x.add(&PrecisionReal::one(), gp))?;
        let degree = shifted.sub(&images[0], gp).overlaps(&PrecisionReal::one());
        Ok((pass_if(increasing && degree), vals(json!({ "increasing": increasing, "degree_one": degree }))))
    })
}

// derivative

fn check_derivative(c: &Construction) -> Check {
    let cfg = &c.config;
    let depths: Vec<usize> = (cfg.depth - 2..=cfg.depth).collect();
    let steps: Vec<Dyadic> = depths.iter().map(|&d| Dyadic::pow2(-24 - d as i64)).collect();
    run(
        "derivative.refinement",
        json!({ "grid": cfg.grid, "depths": depths, "steps": steps.iter().map(Dyadic::to_f64).collect::<Vec<_>>() }),
        || {
            let stages = depths
                .iter()
                .zip(&steps)
                .map(|(&d, s)| {
                    let desc: ConjugacyDescriptor =
                        if d == c.config.depth { c.conjugacy.clone() } else { c.conjugacy_at(d)? };
                    Ok(f_derivative_check(&desc, &c.stack, cfg.grid, s)?)
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let r = DerivativeReport::new(stages);
            let positive = r.stages.iter().all(|s| s.min_predicted >= (-3f64).exp());
            let integral_ok = r.stages.iter().all(|s| (s.integral - 1.0).abs() <= 0.05);
            let ok = r.decreasing && r.final_gap() < 0.05 && positive && integral_ok;
            Ok((
                pass_if(ok),
                vals(json!({
                    "max_gaps": r.stages.iter().map(|s| s.max_gap).collect::<Vec<_>>(),
                    "decreasing": r.decreasing,
                    "final_gap": r.final_gap(),
                    "min_predicted": r.stages.iter().map(|s| s.min_predicted).fold(f64::INFINITY, f64::min),
                    "integrals": r.stages.iter().map(|s| s.integral).collect::<Vec<_>>(),
                })),
            ))
        },
    )
}

// fundamental domain

fn check_fundamental_domain(c: &Construction) -> Check {
    let cfg = &c.config;
    run("fundamental_domain.mass_and_disjointness", json!({ "i_max": cfg.i_max, "check_radius": cfg.check_radius }), || {
        let r = fundamental_domain_report(&c.conjugacy, cfg.check_radius, cfg.seed);
        let nondecreasing = r.coverage_by_radius.windows(2).all(|w| w[1] >= w[0]);
        let tail_ok = r.tail_certified.hi() <= r.tail_budget.lo();
        let ok = r.disjoint && r.coverage_lower >= 0.99 && tail_ok && nondecreasing;
        Ok((
            pass_if(ok),
            vals(json!({
                "disjoint": r.disjoint,
                "min_image_gap": r.min_image_gap,
                "coverage": enc(&r.coverage),
                "coverage_lower": r.coverage_lower,
                "tail_certified": enc(&r.tail_certified),
                "tail_budget": enc(&r.tail_budget),
                "ratio_bound": r.ratio_bound,
                "a0": r.block_masses[r.i_max as usize],
            })),
        ))
    })
}

// rotation number

fn rotation_outcome(desc: &ConjugacyDescriptor, c: &Construction, starts: &[f64]) -> Outcome {
    let n = c.config.rotation_iters;
    let alpha = c.alpha.enclosure(128);
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut ests = Vec::new();
    for &s in starts {
        let x0 = Dyadic::from_f64(s).expect("finite start");
        let e = rotation_number_estimate(desc, &x0, n)?;
        let err = e.value.sub(&alpha, 128).abs();
        ok &= err.hi().to_f64() <= e.bound + e.value.width_f64();
        worst = worst.max(err.hi().to_f64());
        ests.push(e.value.mid_f64());
    }
    let spread = ests.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ests.iter().copied().fold(f64::INFINITY, f64::min);
    ok &= spread <= 2.0 / n as f64;
    Ok((pass_if(ok), vals(json!({ "estimates": ests, "max_error": worst, "bound": 1.0 / n as f64, "spread": spread }))))
}

fn check_rotation(c: &Construction) -> Check {
    run("rotation_number.estimate", json!({ "iterations": c.config.rotation_iters }), || {
        rotation_outcome(&c.conjugacy, c, &[0.0, 0.375])
    })
}

fn check_rotation_identity(c: &Construction) -> Check {
    run("rotation_number.identity", json!({ "iterations": c.config.rotation_iters }), || {
        let id = ConjugacyDescriptor::identity(&c.alpha, 256);
        rotation_outcome(&id, c, &[0.0])
    })
}
