//! Scores used while growing, pruning and stopping.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// FOIL information gain of refining a rule that covered `p0` positives and
/// `n0` negatives into one covering `p1` and `n1`. Zero when `p1 = 0`.
pub fn foil_gain(p0: i64, n0: i64, p1: i64, n1: i64) -> Result<f64> {
    if p0 < 0 || n0 < 0 || p1 < 0 || n1 < 0 {
        return Err(Error::InvalidArgument(format!(
            "coverage counts must be non-negative, got ({p0}, {n0}, {p1}, {n1})"
        )));
    }
    Ok(gain(p0 as usize, n0 as usize, p1 as usize, n1 as usize))
}

pub(crate) fn gain(p0: usize, n0: usize, p1: usize, n1: usize) -> f64 {
    if p1 == 0 || p0 == 0 {
        return 0.0;
    }
    let after = (p1 as f64 / (p1 + n1) as f64).log2();
    let before = (p0 as f64 / (p0 + n0) as f64).log2();
    p1 as f64 * (after - before)
}

/// `(P - N) / (P + N)` on the pruning set; -1 for a rule covering nothing.
pub fn rule_quality(p: usize, n: usize) -> f64 {
    if p + n == 0 {
        return -1.0;
    }
    (p as f64 - n as f64) / (p + n) as f64
}

/// Outcome counts of a rule set on a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl Confusion {
    pub fn covered(&self) -> usize {
        self.true_positives + self.false_positives
    }

    pub fn uncovered(&self) -> usize {
        self.true_negatives + self.false_negatives
    }

    pub fn f1(&self) -> f64 {
        let tp = self.true_positives as f64;
        let denom = 2.0 * tp + self.false_positives as f64 + self.false_negatives as f64;
        if denom == 0.0 {
            0.0
        } else {
            2.0 * tp / denom
        }
    }
}

/// Bits of the universal code for a positive integer; 0 for 0.
pub fn integer_code_bits(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    k.log2() + 2.0 * ((k + 1.0).log2() + 1.0).log2()
}

/// `log2 C(n, k)` via log-gamma.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k == 0 || k >= n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)) / std::f64::consts::LN_2
}

/// Description length in bits of a rule with `conditions` tests drawn from
/// `possible_conditions`, plus the exceptions in `counts`: false positives
/// among covered examples and false negatives among uncovered ones. The
/// total is halved to allow for redundancy in the encoding.
pub fn description_length(conditions: usize, possible_conditions: usize, counts: &Confusion) -> f64 {
    let rule_bits = if conditions == 0 {
        0.0
    } else {
        integer_code_bits(conditions) + conditions as f64 * (possible_conditions.max(1) as f64).log2()
    };
    let exception_bits = log2_binomial(counts.covered(), counts.false_positives)
        + log2_binomial(counts.uncovered(), counts.false_negatives);
    0.5 * (rule_bits + exception_bits)
}
