//! Sequential covering with incremental reduced-error pruning, MDL stopping
//! and rule-set optimization.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alto::ElementKind;
use crate::error::{Error, Result};
use crate::label::LogicalLabel;

use super::bits::Bits;
use super::data::{Dataset, FeatureSpec};
use super::discretize::{candidate_conditions, discretize, Binning, Condition, FeatureBins};
use super::metrics::{description_length, gain, rule_quality, Confusion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Fraction of the remaining examples held out for pruning.
    pub prune_size: f64,
    /// Number of optimization passes.
    pub k: usize,
    /// Bits a new rule set may exceed the smallest description length seen.
    pub dl_allowance: f64,
    pub n_discretize_bins: usize,
    #[serde(default)]
    pub binning: Binning,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            prune_size: 0.33,
            k: 2,
            dl_allowance: 64.0,
            n_discretize_bins: 10,
            binning: Binning::EqualFrequency,
        }
    }
}

/// A learned conjunction with its coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedRule {
    pub conditions: Vec<Condition>,
    /// Coverage on the growing set the rule was grown on.
    pub grow_positives: usize,
    pub grow_negatives: usize,
    /// Training examples this rule is the first to match.
    pub train_positives: usize,
    pub train_negatives: usize,
    /// Description length of the rule alone on the training data.
    pub dl: f64,
}

/// Rules for one positive class; anything matching no rule is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub positive: LogicalLabel,
    pub kind: ElementKind,
    pub features: Vec<FeatureSpec>,
    pub rules: Vec<InducedRule>,
    pub bins: Vec<FeatureBins>,
    pub params: Hyperparameters,
    /// Training examples matching no rule.
    pub uncovered_positives: usize,
    pub uncovered_negatives: usize,
}

/// A working rule: candidate indices plus its coverage of all training rows.
#[derive(Debug, Clone)]
struct Working {
    conds: Vec<usize>,
    cover: Bits,
    grow_p: usize,
    grow_n: usize,
}

struct Candidate {
    cond: Condition,
    bits: Bits,
}

struct Split {
    grow_pos: Bits,
    grow_neg: Bits,
    prune_pos: Bits,
    prune_neg: Bits,
}

pub(crate) struct Learner {
    cands: Vec<Candidate>,
    pos: Bits,
    neg: Bits,
    rows: usize,
    params: Hyperparameters,
}

impl Learner {
    pub(crate) fn new(data: &Dataset, labels: &[bool], params: Hyperparameters) -> Result<(Learner, Vec<FeatureBins>)> {
        if labels.len() != data.rows() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} rows",
                labels.len(),
                data.rows()
            )));
        }
        if !(0.0..1.0).contains(&params.prune_size) {
            return Err(Error::InvalidArgument(format!("prune_size must be in [0, 1), got {}", params.prune_size)));
        }
        let n_pos = labels.iter().filter(|l| **l).count();
        if n_pos == 0 || n_pos == labels.len() {
            return Err(Error::SingleClass);
        }
        let (_, bins) = discretize(data, params.n_discretize_bins, params.binning)?;
        let rows = data.rows();
        let mut cands = Vec::new();
        for cond in candidate_conditions(data, &bins) {
            let col = data.column(&cond.feature).expect("candidate from dataset");
            let mut bits = Bits::empty(rows);
            for i in 0..rows {
                if cond.holds(col, i)? {
                    bits.set(i);
                }
            }
            cands.push(Candidate { cond, bits });
        }
        let learner = Learner {
            cands,
            pos: Bits::from_fn(rows, |i| labels[i]),
            neg: Bits::from_fn(rows, |i| !labels[i]),
            rows,
            params,
        };
        Ok((learner, bins))
    }

    fn cover_of(&self, conds: &[usize]) -> Bits {
        conds.iter().fold(Bits::full(self.rows), |acc, &c| acc.and(&self.cands[c].bits))
    }

    fn split(&self, pos: &Bits, neg: &Bits, rng: &mut ChaCha8Rng) -> Split {
        let mut p: Vec<usize> = pos.ones().collect();
        let mut n: Vec<usize> = neg.ones().collect();
        p.shuffle(rng);
        n.shuffle(rng);
        let ps = self.params.prune_size;
        let np = ((p.len() as f64 * ps).round() as usize).min(p.len().saturating_sub(1));
        let nn = (n.len() as f64 * ps).round() as usize;
        let to_bits = |idx: &[usize]| {
            let mut b = Bits::empty(self.rows);
            for &i in idx {
                b.set(i);
            }
            b
        };
        Split {
            prune_pos: to_bits(&p[..np]),
            grow_pos: to_bits(&p[np..]),
            prune_neg: to_bits(&n[..nn]),
            grow_neg: to_bits(&n[nn..]),
        }
    }

    /// Greedily adds the condition with the highest FOIL gain until the rule
    /// covers no growing negatives or no condition has positive gain. The
    /// first condition added to an empty rule only needs to cover a positive.
    fn grow(&self, start: &[usize], gpos: &Bits, gneg: &Bits) -> Vec<usize> {
        let mut rule = start.to_vec();
        let mut cover = self.cover_of(&rule);
        loop {
            let p0 = cover.count_and(gpos);
            let n0 = cover.count_and(gneg);
            if n0 == 0 && !rule.is_empty() {
                break;
            }
            let mut best: Option<(usize, f64)> = None;
            for (ci, c) in self.cands.iter().enumerate() {
                if rule.contains(&ci) {
                    continue;
                }
                let p1 = cover.count_and3(&c.bits, gpos);
                if p1 == 0 {
                    continue;
                }
                let n1 = cover.count_and3(&c.bits, gneg);
                if p1 == p0 && n1 == n0 && !rule.is_empty() {
                    continue;
                }
                let g = gain(p0, n0, p1, n1);
                if best.is_none_or(|(_, bg)| g > bg) {
                    best = Some((ci, g));
                }
            }
            match best {
                Some((ci, g)) if g > 0.0 || rule.is_empty() => {
                    cover = cover.and(&self.cands[ci].bits);
                    rule.push(ci);
                }
                _ => break,
            }
        }
        rule
    }

    /// Keeps the prefix of `rule` scoring best on the pruning set; ties keep
    /// the longer rule and the rule is never emptied.
    fn prune(&self, rule: Vec<usize>, ppos: &Bits, pneg: &Bits, metric: impl Fn(usize, usize) -> f64) -> Vec<usize> {
        let mut best_len = rule.len();
        let cover = self.cover_of(&rule);
        let mut best = metric(cover.count_and(ppos), cover.count_and(pneg));
        for len in (1..rule.len()).rev() {
            let c = self.cover_of(&rule[..len]);
            let v = metric(c.count_and(ppos), c.count_and(pneg));
            if v > best {
                best = v;
                best_len = len;
            }
        }
        let mut rule = rule;
        rule.truncate(best_len);
        rule
    }

    fn confusion(&self, covered: &Bits) -> Confusion {
        let tp = covered.count_and(&self.pos);
        let fp = covered.count_and(&self.neg);
        Confusion {
            true_positives: tp,
            false_positives: fp,
            true_negatives: self.neg.count() - fp,
            false_negatives: self.pos.count() - tp,
        }
    }

    fn union(&self, rules: &[Working], skip: Option<usize>) -> Bits {
        rules
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .fold(Bits::empty(self.rows), |acc, (_, r)| acc.or(&r.cover))
    }

    /// Total description length of a rule set on the training data.
    fn ruleset_dl(&self, rules: &[Working]) -> f64 {
        let c = self.cands.len();
        let theory: f64 = rules
            .iter()
            .map(|r| description_length(r.conds.len(), c, &Confusion::default()))
            .sum();
        theory + description_length(0, c, &self.confusion(&self.union(rules, None)))
    }

    fn working(&self, conds: Vec<usize>, split: &Split) -> Working {
        let cover = self.cover_of(&conds);
        Working {
            grow_p: cover.count_and(&split.grow_pos),
            grow_n: cover.count_and(&split.grow_neg),
            conds,
            cover,
        }
    }

    /// Learns rules for positives not yet covered by `rules`.
    fn cover(&self, rules: &mut Vec<Working>, rng: &mut ChaCha8Rng) {
        let covered = self.union(rules, None);
        let mut rem_pos = self.pos.and_not(&covered);
        let mut rem_neg = self.neg.and_not(&covered);
        let mut min_dl = self.ruleset_dl(rules);
        while !rem_pos.is_empty() {
            let split = self.split(&rem_pos, &rem_neg, rng);
            let grown = self.grow(&[], &split.grow_pos, &split.grow_neg);
            if grown.is_empty() {
                break;
            }
            let pruned = self.prune(grown, &split.prune_pos, &split.prune_neg, rule_quality);
            let rule = self.working(pruned, &split);
            let (mut p, mut n) = (rule.cover.count_and(&split.prune_pos), rule.cover.count_and(&split.prune_neg));
            if p + n == 0 {
                (p, n) = (rule.grow_p, rule.grow_n);
            }
            if n as f64 / (p + n) as f64 > 0.5 {
                break;
            }
            let rule_cover = rule.cover.clone();
            rules.push(rule);
            let dl = self.ruleset_dl(rules);
            if dl > min_dl + self.params.dl_allowance {
                rules.pop();
                break;
            }
            min_dl = min_dl.min(dl);
            rem_pos = rem_pos.and_not(&rule_cover);
            rem_neg = rem_neg.and_not(&rule_cover);
        }
    }

    /// Drops rules, last first, whose removal does not increase the total
    /// description length.
    fn simplify(&self, rules: &mut Vec<Working>) {
        let mut i = rules.len();
        while i > 0 {
            i -= 1;
            let with = self.ruleset_dl(rules);
            let removed = rules.remove(i);
            if self.ruleset_dl(rules) > with {
                rules.insert(i, removed);
            }
        }
    }

    /// For each rule, builds a replacement grown from scratch and a revision
    /// grown from the rule, both pruned for rule-set accuracy on held-out
    /// data not covered by the other rules, and keeps whichever variant gives
    /// the smallest total description length.
    fn optimize(&self, rules: &mut [Working], rng: &mut ChaCha8Rng) {
        for i in 0..rules.len() {
            let others = self.union(rules, Some(i));
            let split = self.split(&self.pos.and_not(&others), &self.neg.and_not(&others), rng);
            if split.grow_pos.is_empty() {
                continue;
            }
            let (tp, tn) = (split.prune_pos.count(), split.prune_neg.count());
            let accuracy = |p: usize, n: usize| {
                if tp + tn == 0 {
                    0.0
                } else {
                    (p + tn - n) as f64 / (tp + tn) as f64
                }
            };
            let replacement = self.prune(
                self.grow(&[], &split.grow_pos, &split.grow_neg),
                &split.prune_pos,
                &split.prune_neg,
                accuracy,
            );
            let revision = self.prune(
                self.grow(&rules[i].conds, &split.grow_pos, &split.grow_neg),
                &split.prune_pos,
                &split.prune_neg,
                accuracy,
            );
            let mut best_dl = self.ruleset_dl(rules);
            let original = rules[i].clone();
            let mut best = original.clone();
            for variant in [replacement, revision] {
                if variant.is_empty() || variant == original.conds {
                    continue;
                }
                rules[i] = self.working(variant, &split);
                let dl = self.ruleset_dl(rules);
                if dl < best_dl {
                    best_dl = dl;
                    best = rules[i].clone();
                }
            }
            rules[i] = best;
        }
    }

    pub(crate) fn run(&self, seed: u64, stream: u64) -> Vec<(Vec<Condition>, usize, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut rules = Vec::new();
        self.cover(&mut rules, &mut rng);
        self.simplify(&mut rules);
        for _ in 0..self.params.k {
            self.optimize(&mut rules, &mut rng);
            self.cover(&mut rules, &mut rng);
            self.simplify(&mut rules);
        }
        rules
            .into_iter()
            .map(|r| (r.conds.iter().map(|&c| self.cands[c].cond.clone()).collect(), r.grow_p, r.grow_n))
            .collect()
    }

    /// Rules grown from an empty rule on the whole training set; used to
    /// check the greedy search in tests.
    #[cfg(test)]
    pub(crate) fn grow_all(&self) -> Vec<Condition> {
        self.grow(&[], &self.pos, &self.neg).iter().map(|&c| self.cands[c].cond.clone()).collect()
    }

    pub(crate) fn possible_conditions(&self) -> usize {
        self.cands.len()
    }
}

/// Trains a rule set for `positive` from binary `labels` (true = positive).
/// `stream` selects an independent random sequence for the same seed.
pub fn fit(
    data: &Dataset,
    labels: &[bool],
    positive: LogicalLabel,
    params: Hyperparameters,
    seed: u64,
) -> Result<BinaryModel> {
    fit_stream(data, labels, positive, params, seed, 0)
}

pub(crate) fn fit_stream(
    data: &Dataset,
    labels: &[bool],
    positive: LogicalLabel,
    params: Hyperparameters,
    seed: u64,
    stream: u64,
) -> Result<BinaryModel> {
    let (learner, bins) = Learner::new(data, labels, params)?;
    let learned = learner.run(seed, stream);
    let mut model = BinaryModel {
        positive,
        kind: data.kind(),
        features: data.specs(),
        rules: learned
            .into_iter()
            .map(|(conditions, gp, gn)| InducedRule {
                conditions,
                grow_positives: gp,
                grow_negatives: gn,
                train_positives: 0,
                train_negatives: 0,
                dl: 0.0,
            })
            .collect(),
        bins,
        params,
        uncovered_positives: 0,
        uncovered_negatives: 0,
    };
    model.recount(data, labels, learner.possible_conditions())?;
    Ok(model)
}

impl BinaryModel {
    /// Recomputes per-rule training coverage (first matching rule) and each
    /// rule's own description length.
    pub(crate) fn recount(&mut self, data: &Dataset, labels: &[bool], possible_conditions: usize) -> Result<()> {
        let matches = self.rule_matches(data)?;
        let first = self.first_match(data)?;
        for r in &mut self.rules {
            r.train_positives = 0;
            r.train_negatives = 0;
        }
        self.uncovered_positives = 0;
        self.uncovered_negatives = 0;
        for (i, m) in first.iter().enumerate() {
            match (m, labels[i]) {
                (Some(r), true) => self.rules[*r].train_positives += 1,
                (Some(r), false) => self.rules[*r].train_negatives += 1,
                (None, true) => self.uncovered_positives += 1,
                (None, false) => self.uncovered_negatives += 1,
            }
        }
        let total_pos = labels.iter().filter(|l| **l).count();
        let total_neg = labels.len() - total_pos;
        for (r, m) in self.rules.iter_mut().zip(&matches) {
            let tp = m.iter().zip(labels).filter(|(m, l)| **m && **l).count();
            let fp = m.iter().zip(labels).filter(|(m, l)| **m && !**l).count();
            let counts = Confusion {
                true_positives: tp,
                false_positives: fp,
                true_negatives: total_neg - fp,
                false_negatives: total_pos - tp,
            };
            r.dl = description_length(r.conditions.len(), possible_conditions, &counts);
        }
        Ok(())
    }
}
