//! Seeded synthetic data with a known rule: positive iff f1 > 0.7 and f2.

use lla_core::alto::ElementKind;
use lla_core::ripper::{Column, Dataset};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Planted {
    pub train: Dataset,
    pub train_labels: Vec<bool>,
    pub test: Dataset,
    pub test_labels: Vec<bool>,
}

fn truth(f1: f64, f2: bool) -> bool {
    f1 > 0.7 && f2
}

fn dataset(f1: Vec<f64>, f2: Vec<bool>, f3: Vec<f64>, f4: Vec<bool>) -> Dataset {
    Dataset::new(
        ElementKind::Line,
        vec!["f1".into(), "f2".into(), "f3".into(), "f4".into()],
        vec![Column::Numeric(f1), Column::Boolean(f2), Column::Numeric(f3), Column::Boolean(f4)],
    )
    .unwrap()
}

fn sample(rng: &mut ChaCha8Rng, n: usize, levels: bool, noise: f64) -> (Dataset, Vec<bool>) {
    let f1: Vec<f64> = if levels {
        // Ten values, each exactly n / 10 times.
        let mut v: Vec<f64> = (0..n).map(|i| 0.05 + 0.1 * (i % 10) as f64).collect();
        v.shuffle(rng);
        v
    } else {
        (0..n).map(|_| rng.random::<f64>()).collect()
    };
    let f2: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let f3: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 100.0).collect();
    let f4: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    let labels: Vec<bool> = (0..n)
        .map(|i| {
            let y = truth(f1[i], f2[i]);
            if rng.random_bool(noise) {
                !y
            } else {
                y
            }
        })
        .collect();
    (dataset(f1, f2, f3, f4), labels)
}

/// 500 training rows with `noise` label flips and 200 clean test rows.
pub fn planted(seed: u64, noise: f64, levels: bool) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, train_labels) = sample(&mut rng, 500, levels, noise);
    let (test, test_labels) = sample(&mut rng, 200, levels, 0.0);
    Planted { train, train_labels, test, test_labels }
}

pub fn f1_score(predicted: &[bool], truth: &[bool]) -> f64 {
    let tp = predicted.iter().zip(truth).filter(|(p, t)| **p && **t).count() as f64;
    let fp = predicted.iter().zip(truth).filter(|(p, t)| **p && !**t).count() as f64;
    let fneg = predicted.iter().zip(truth).filter(|(p, t)| !**p && **t).count() as f64;
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fneg)
    }
}
