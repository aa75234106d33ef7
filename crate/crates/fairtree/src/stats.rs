//! Two-sample pooled-variance t-test, t-distribution tail probabilities,
//! and percent-improvement arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a two-sample Student's t-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Set when the pooled variance is zero and the means differ, in which
    /// case `t_statistic` is infinite and `p_value` is 0 by convention.
    pub zero_variance: bool,
}

/// Pooled-variance (classical Student) two-sample t-test.
///
/// `t = (mean_a - mean_b) / (s_p * sqrt(1/n1 + 1/n2))` with
/// `s_p^2 = ((n1-1)s1^2 + (n2-1)s2^2) / (n1 + n2 - 2)` and
/// `df = n1 + n2 - 2`. The p-value is two-sided.
///
/// Degenerate inputs: identical constant samples give `t = 0, p = 1`;
/// constant samples with unequal means give `p = 0` with the
/// `zero_variance` flag set.
pub fn t_test_pooled(sample_a: &[f64], sample_b: &[f64]) -> Result<TTestResult> {
    if sample_a.len() < 2 {
        return Err(Error::SampleTooSmall {
            which: "a",
            len: sample_a.len(),
        });
    }
    if sample_b.len() < 2 {
        return Err(Error::SampleTooSmall {
            which: "b",
            len: sample_b.len(),
        });
    }
    let n1 = sample_a.len() as f64;
    let n2 = sample_b.len() as f64;
    let mean_a = mean(sample_a);
    let mean_b = mean(sample_b);
    let ss_a = sum_sq_dev(sample_a, mean_a);
    let ss_b = sum_sq_dev(sample_b, mean_b);
    let df = sample_a.len() + sample_b.len() - 2;
    let pooled_var = (ss_a + ss_b) / df as f64;

    if pooled_var <= 0.0 {
        return Ok(if mean_a == mean_b {
            TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: df,
                p_value: 1.0,
                zero_variance: false,
            }
        } else {
            TTestResult {
                t_statistic: if mean_a > mean_b {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                degrees_of_freedom: df,
                p_value: 0.0,
                zero_variance: true,
            }
        });
    }

    let t = (mean_a - mean_b) / (pooled_var * (1.0 / n1 + 1.0 / n2)).sqrt();
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: t_tail(t, df),
        zero_variance: false,
    })
}

/// Two-sided tail probability `P(|T_df| >= |t|)` of Student's t-distribution,
/// evaluated as the regularized incomplete beta `I_x(df/2, 1/2)` at
/// `x = df / (df + t^2)`.
pub fn t_tail(t: f64, df: usize) -> f64 {
    assert!(df >= 1, "degrees of freedom must be at least 1");
    if t == 0.0 {
        return 1.0;
    }
    if !t.is_finite() {
        return 0.0;
    }
    let nu = df as f64;
    let x = nu / (nu + t * t);
    reg_inc_beta(x, nu / 2.0, 0.5)
}

/// Percent improvement of a metric across mitigation:
/// `|before - after| / before * 100`.
pub fn percent_improvement(before: f64, after: f64) -> Result<f64> {
    if before == 0.0 {
        return Err(Error::ZeroDenominator {
            what: "metric value before mitigation",
        });
    }
    Ok((before - after).abs() / before * 100.0)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued-fraction evaluation (modified Lentz) with the symmetry switch at
/// `x > (a+1)/(a+b+2)`; at most 300 iterations, relative tolerance 1e-15.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - reg_inc_beta(1.0 - x, b, a);
    }

    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let front = ln_front.exp();

    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let mut c = 1.0_f64;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        // even step
        let numer = m_f * (b - m_f) * x / ((a + 2.0 * m_f - 1.0) * (a + 2.0 * m_f));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        h *= d * c;
        // odd step
        let numer = -(a + m_f) * (a + b + m_f) * x / ((a + 2.0 * m_f) * (a + 2.0 * m_f + 1.0));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }

    front * h / a
}

/// `ln B(a, b)` via the Lanczos approximation of `ln Gamma`.
fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn ln_gamma(z: f64) -> f64 {
    // Lanczos coefficients (g = 5, n = 6), valid for z > 0.
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    debug_assert!(z > 0.0);
    let mut sum = 1.000_000_000_190_015;
    for (i, coef) in COEF.iter().enumerate() {
        sum += coef / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.506_628_274_631_000_5 * sum / z).ln()
}
