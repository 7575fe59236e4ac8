use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::{coprime_dist, ApproxError, RealTarget};
use crate::pseudo_norm::{inverse_norm_product, PseudoValueSequence, SequenceFamily};
use crate::psi::{PsiSpec, PsiValue};
use crate::scalar::ratio_to_f64;
use crate::text::{format_float, format_rational};

const U: f64 = f64::EPSILON / 2.0;
const CHUNK: u64 = 1 << 12;

/// Widest candidate window tested at a single `n`.
const MAX_WINDOW: u64 = 10_000_000;

pub const SOLUTION_CSV_HEADER: &str = "n,p,product_norm,dist,value,psi_n,slack,flag";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionFlag {
    Ok,
    /// The precision of `α` or `ψ(n)` does not decide the inequality.
    Indeterminate,
}

/// A coprime pair `(n, p)` with `∏|n|_{D_i} · |nα - p| <= ψ(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRecord {
    pub n: u64,
    pub p: BigInt,
    /// `∏ |n|_{D_i}`.
    #[serde(with = "crate::text::rational_string")]
    pub product_norm: BigRational,
    pub dist: f64,
    #[serde(with = "crate::text::rational_opt")]
    pub dist_exact: Option<BigRational>,
    /// `∏|n|_{D_i} · |nα - p|`.
    pub value: f64,
    #[serde(with = "crate::text::rational_opt")]
    pub value_exact: Option<BigRational>,
    pub psi_n: f64,
    /// `ψ(n) - value`.
    pub slack: f64,
    pub flag: SolutionFlag,
}

impl SolutionRecord {
    pub fn csv_row(&self) -> String {
        let exact_or = |e: &Option<BigRational>, f: f64| e.as_ref().map_or_else(|| format_float(f), format_rational);
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.p,
            format_rational(&self.product_norm),
            exact_or(&self.dist_exact, self.dist),
            exact_or(&self.value_exact, self.value),
            format_float(self.psi_n),
            format_float(self.slack),
            match self.flag {
                SolutionFlag::Ok => "ok",
                SolutionFlag::Indeterminate => "indeterminate",
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionScan {
    pub n_start: u64,
    pub n_max: u64,
    /// Certified and indeterminate records, ascending in `(n, p)`.
    pub records: Vec<SolutionRecord>,
}

impl SolutionScan {
    pub fn solutions(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.flag == SolutionFlag::Ok)
    }

    pub fn count(&self) -> usize {
        self.solutions().count()
    }

    pub fn indeterminate_count(&self) -> usize {
        self.records.len() - self.count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SOLUTION_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Exact bounds `lo <= ψ₀(n) <= hi`; equal for exact values.
fn bound_enclosure(v: &PsiValue) -> (BigRational, BigRational) {
    match v {
        PsiValue::Exact(r) => (r.clone(), r.clone()),
        PsiValue::Float { value, rel_err } => {
            let slack = rel_err + 2.0 * U;
            let lo = BigRational::from_float(value * (1.0 - slack)).expect("finite");
            let hi = BigRational::from_float(value * (1.0 + slack)).expect("finite");
            (lo, hi)
        }
    }
}

fn coprime_to(p: &BigInt, n: u64) -> bool {
    p.mod_floor(&BigInt::from(n)).to_u64().expect("residue below n").gcd(&n) == 1
}

fn scan_n(
    alpha: &RealTarget,
    psi: &PsiSpec,
    family: &SequenceFamily,
    n: u64,
) -> Result<Vec<SolutionRecord>, ApproxError> {
    let psi_n = psi.eval(n)?;
    let weight: BigUint = inverse_norm_product(n, family)?;
    let psi0 = psi_n.scale(&weight);
    let (lo, hi) = bound_enclosure(&psi0);
    let reach = hi.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
    let width = reach.saturating_mul(2).saturating_add(4);
    if width > MAX_WINDOW {
        return Err(ApproxError::WindowTooLarge { n, width });
    }
    let guess = alpha.floor_guess(n);
    let weight_r = BigRational::from_integer(weight.into());
    let product_norm = weight_r.recip();
    let psi_f = psi_n.to_f64();
    let mut out = Vec::new();
    let first = &guess - BigInt::from(reach) - 1;
    for i in 0..width {
        let p = &first + BigInt::from(i);
        if !coprime_to(&p, n) {
            continue;
        }
        let off = alpha.offset(n, &p);
        let flag = match off.abs_le(&lo) {
            Some(true) => SolutionFlag::Ok,
            _ => match off.abs_le(&hi) {
                Some(false) => continue,
                _ if lo == hi => match off.abs_le(&hi) {
                    Some(true) => SolutionFlag::Ok,
                    _ => SolutionFlag::Indeterminate,
                },
                _ => SolutionFlag::Indeterminate,
            },
        };
        let dist = off.approx().abs();
        let dist_exact = off.exact().map(|v| v.abs());
        let value_exact = dist_exact.as_ref().map(|d| d / &weight_r);
        let value = value_exact
            .as_ref()
            .map_or(dist / ratio_to_f64(&weight_r), ratio_to_f64);
        out.push(SolutionRecord {
            n,
            p,
            product_norm: product_norm.clone(),
            dist,
            dist_exact,
            value,
            value_exact,
            psi_n: psi_f,
            slack: psi_f - value,
            flag,
        });
    }
    Ok(out)
}

/// Every coprime `(n, p)` with `start <= n <= n_max` and
/// `∏|n|_{D_i} · |nα - p| <= ψ(n)`.
///
/// Only `p` in the window `|nα - p| <= ψ(n)/∏|n|_{D_i}` are tested.
pub fn enumerate_solutions(
    alpha: &RealTarget,
    psi: &PsiSpec,
    family: &SequenceFamily,
    n_max: u64,
) -> Result<SolutionScan, ApproxError> {
    let start = psi.start_index();
    if n_max < start {
        return Err(ApproxError::InvalidRange { lo: start, hi: n_max });
    }
    let chunks: Vec<(u64, u64)> = (start..=n_max)
        .step_by(CHUNK as usize)
        .map(|c| (c, (c + CHUNK - 1).min(n_max)))
        .collect();
    let parts = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut v = Vec::new();
            for n in a..=b {
                v.extend(scan_n(alpha, psi, family, n)?);
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, ApproxError>>()?;
    Ok(SolutionScan {
        n_start: start,
        n_max,
        records: parts.into_iter().flatten().collect(),
    })
}

/// `n 𝔐(n) (ln n)^{1+ε} |n|_D ‖nα‖′` from its ingredients.
pub fn liminf_quantity(n: u64, frak_m: f64, norm_element: u64, coprime_dist: f64, epsilon: f64) -> f64 {
    let ln = (n as f64).ln();
    n as f64 * frak_m * ln.powf(1.0 + epsilon) / norm_element as f64 * coprime_dist
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfCheckpoint {
    pub n: u64,
    pub running_min: f64,
    /// Enclosure of the true running minimum.
    pub lower: f64,
    pub upper: f64,
    /// Some `n` up to here could not be evaluated exactly enough.
    pub indeterminate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfTrace {
    pub checkpoints: Vec<LiminfCheckpoint>,
    /// Where the final running minimum was attained.
    pub argmin: u64,
}

impl LiminfTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,running_min\n");
        for c in &self.checkpoints {
            out.push_str(&format!("{},{}\n", c.n, format_float(c.running_min)));
        }
        out
    }
}

struct Sample {
    value: f64,
    lower: f64,
    upper: f64,
    indeterminate: bool,
}

/// Running minimum of `n 𝔐(n) (ln n)^{1+ε} |n|_D ‖nα‖′` over `3 <= n <= n_max`,
/// checkpointed at powers of two and at `n_max`.
pub fn running_liminf(
    alpha: &RealTarget,
    seq: &PseudoValueSequence,
    epsilon: &BigRational,
    n_max: u64,
    scan_cap: u64,
) -> Result<LiminfTrace, ApproxError> {
    if n_max < 3 {
        return Err(ApproxError::InvalidRange { lo: 3, hi: n_max });
    }
    let eps = ratio_to_f64(epsilon);
    let chunks: Vec<(u64, u64)> = (3..=n_max)
        .step_by(CHUNK as usize)
        .map(|c| (c, (c + CHUNK - 1).min(n_max)))
        .collect();
    let parts = chunks
        .par_iter()
        .map(|&(a, b)| {
            (a..=b)
                .map(|n| {
                    let frak = seq.frak_m_f64(n)?;
                    let element = seq.pseudo_norm(n)?.element;
                    match coprime_dist(n, alpha, scan_cap) {
                        Ok(d) => {
                            let q = liminf_quantity(n, frak, element, d.value, eps);
                            let rel = if d.value == 0.0 { 0.0 } else { d.abs_err / d.value } + (16.0 + 4.0 * eps) * U;
                            Ok(Sample {
                                value: q,
                                lower: q * (1.0 - rel),
                                upper: q * (1.0 + rel),
                                indeterminate: false,
                            })
                        }
                        Err(ApproxError::PrecisionInsufficient { .. }) => Ok(Sample {
                            value: f64::INFINITY,
                            lower: 0.0,
                            upper: f64::INFINITY,
                            indeterminate: true,
                        }),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>, ApproxError>>()
        })
        .collect::<Result<Vec<_>, ApproxError>>()?;

    let mut checkpoints = Vec::new();
    let (mut min, mut lower, mut upper) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut argmin = 3;
    let mut indeterminate = false;
    for (i, s) in parts.iter().flatten().enumerate() {
        let n = 3 + i as u64;
        if s.value < min {
            min = s.value;
            argmin = n;
        }
        lower = lower.min(s.lower);
        upper = upper.min(s.upper);
        indeterminate |= s.indeterminate;
        if n.is_power_of_two() || n == n_max {
            checkpoints.push(LiminfCheckpoint {
                n,
                running_min: min,
                lower,
                upper,
                indeterminate,
            });
        }
    }
    Ok(LiminfTrace { checkpoints, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::DEFAULT_SCAN_CAP;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn two() -> SequenceFamily {
        SequenceFamily::single(PseudoValueSequence::constant_ratio(2).unwrap())
    }

    #[test]
    fn zero_psi_irrational() {
        let psi = PsiSpec::constant(r(0, 1)).unwrap();
        let scan = enumerate_solutions(&RealTarget::golden_ratio(), &psi, &two(), 200).unwrap();
        assert!(scan.records.is_empty());
    }

    #[test]
    fn third_at_three() {
        let psi = PsiSpec::constant(r(1, 6)).unwrap();
        let scan = enumerate_solutions(&RealTarget::rational(1, 3).unwrap(), &psi, &two(), 3).unwrap();
        assert_eq!(scan.count(), 1);
        let rec = &scan.records[0];
        assert_eq!((rec.n, rec.p.clone()), (3, BigInt::from(1)));
        assert_eq!(rec.value_exact, Some(r(0, 1)));
        assert_eq!(
            rec.csv_row(),
            "3,1,1/1,0/1,0/1,1.6666666666666666e-1,1.6666666666666666e-1,ok"
        );
    }

    #[test]
    fn liminf_rational_hits_zero() {
        let seq = PseudoValueSequence::constant_ratio(2).unwrap();
        let trace = running_liminf(
            &RealTarget::rational(1, 3).unwrap(),
            &seq,
            &r(0, 1),
            100,
            DEFAULT_SCAN_CAP,
        )
        .unwrap();
        assert!(trace.checkpoints.iter().all(|c| c.running_min == 0.0));
        assert_eq!(trace.argmin, 3);
        assert!(trace
            .checkpoints
            .windows(2)
            .all(|w| w[1].running_min <= w[0].running_min));
        assert_eq!(trace.checkpoints.last().unwrap().n, 100);
    }
}
