//! Two-sample pooled-variance (Student's) t-test, two-tailed at alpha = 0.05.
//! The p-value comes from the regularized incomplete beta function evaluated
//! by continued fraction, accurate well past 1e-8.

use std::f64::consts::PI;

use crate::error::{DafdError, Result};

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

// Lanczos coefficients, g = 7
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued-fraction core of the incomplete beta (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn betai(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Independent two-sample t-test with pooled variance, two-tailed.
/// Samples that are all identical across both groups give `t = 0, p = 1`.
pub fn ttest(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(DafdError::InvalidArgument(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * sample_var(a, ma) + (nb - 1.0) * sample_var(b, mb)) / df;
    if pooled <= 0.0 {
        // zero within-group variance: identical means are indistinguishable,
        // different means are separated with certainty
        return Ok(if ma == mb {
            TTestResult {
                t: 0.0,
                p: 1.0,
                significant: false,
            }
        } else {
            TTestResult {
                t: (ma - mb).signum() * f64::INFINITY,
                p: 0.0,
                significant: true,
            }
        });
    }
    let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let p = betai(df / 2.0, 0.5, df / (df + t * t));
    Ok(TTestResult {
        t,
        p,
        significant: p < ALPHA,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_are_not_significant() {
        let a = [1.0, 2.0, 3.0];
        let r = ttest(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn shifted_ramp_gives_t_minus_one() {
        // means 3 and 4, pooled variance 2.5, se = 1 => t = -1, df = 8;
        // two-tailed p = 0.34659 by the closed-form pooled computation
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let r = ttest(&a, &b).unwrap();
        assert!((r.t + 1.0).abs() < 1e-12, "t = {}", r.t);
        assert!((r.p - 0.34659).abs() < 1e-4, "p = {}", r.p);
        assert!(!r.significant);
    }

    #[test]
    fn extreme_separation_is_significant() {
        let a = [0.0, 0.0, 0.0, 0.0, 0.0];
        let b = [10.0, 10.0, 10.0, 10.0, 10.0001];
        let r = ttest(&a, &b).unwrap();
        assert!(r.significant);
        assert!(r.p < 1e-10);
    }

    #[test]
    fn constant_but_different_groups_are_significant() {
        let a = [1.0, 1.0, 1.0];
        let b = [2.0, 2.0, 2.0];
        let r = ttest(&a, &b).unwrap();
        assert!(r.significant);
        assert_eq!(r.p, 0.0);
    }

    #[test]
    fn swapping_samples_negates_t_and_keeps_p() {
        let a = [0.3, 0.9, 0.4, 0.8];
        let b = [0.5, 0.6, 0.95, 1.2, 0.7];
        let ab = ttest(&a, &b).unwrap();
        let ba = ttest(&b, &a).unwrap();
        assert!((ab.t + ba.t).abs() < 1e-12);
        assert!((ab.p - ba.p).abs() < 1e-12);
    }

    #[test]
    fn too_small_samples_error() {
        assert!(ttest(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn p_values_match_the_reference_t_distribution() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        for df in [3.0_f64, 8.0, 15.0, 40.0] {
            let dist = StudentsT::new(0.0, 1.0, df).unwrap();
            for t in [0.1_f64, 0.5, 1.0, 1.96, 2.5, 4.0] {
                let mine = betai(df / 2.0, 0.5, df / (df + t * t));
                let reference = 2.0 * (1.0 - dist.cdf(t));
                assert!(
                    (mine - reference).abs() < 1e-8,
                    "df={df} t={t}: {mine} vs {reference}"
                );
            }
        }
    }
}
