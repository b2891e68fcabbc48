mod common;

use common::{names, oracle, random_metric, rng};
use finmet::genericity::min_distortion;
use finmet::scalar::rat;
use finmet::transmissible::{
    anti_witness, is_witness, Doubling, DoublingQ, Exponent, Hyperbolicity, Ptolemy, TransParam, Ultrametric,
    UniformDisconnected,
};
use finmet::{FinMetric, Metric, Rational};
use num_traits::{Signed, Zero};
use rand::Rng;

fn spaces(seed: u64, count: usize) -> Vec<Metric> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(1..=7);
            random_metric(&mut r, names("p", n))
        })
        .collect()
}

/// `anti_witness` finds something exactly when the oracle says so, and what
/// it finds verifies.
fn agrees<W: TransParam<Rational>>(p: &W, d: &Metric, q: &W::Q, violated: bool) {
    if p.arity(q, d.len()).is_empty() {
        return;
    }
    let w = anti_witness(p, d, q).unwrap();
    assert_eq!(w.is_some(), violated, "{} on {d:?} with {q:?}", p.name());
    if let Some(w) = w {
        assert!(is_witness(p, d, &w).unwrap());
        let mut sorted = w.tuple.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), w.tuple.len(), "witness tuple repeats a point");
    }
}

#[test]
fn ultrametric_and_ptolemy_witnesses() {
    for d in spaces(11, 300) {
        agrees(&Ultrametric, &d, &(), oracle::ultrametric(&d).is_positive());
        agrees(&Ptolemy, &d, &(), oracle::ptolemy(&d).is_positive());
    }
}

#[test]
fn hyperbolicity_witnesses() {
    for d in spaces(12, 300) {
        let delta = oracle::hyperbolicity(&d);
        for q in [rat(0, 1), rat(1, 4), rat(1, 2), delta.clone()] {
            agrees(&Hyperbolicity, &d, &q, delta > q);
        }
    }
}

#[test]
fn doubling_witnesses() {
    let qs = [(rat(1, 1), 1, 1), (rat(2, 1), 1, 1), (rat(3, 2), 1, 2), (rat(3, 1), 2, 1)];
    for d in spaces(13, 200) {
        for (c, p, q) in &qs {
            let dq = DoublingQ { c: c.clone(), alpha: Exponent::new(*p, *q).unwrap() };
            agrees(&Doubling::default(), &d, &dq, oracle::doubling(&d, c, *p, *q, d.len()).is_positive());
        }
    }
}

#[test]
fn ud_witnesses() {
    for d in spaces(14, 200) {
        if d.len() < 2 {
            continue;
        }
        let modulus = oracle::ud_modulus(&d, d.len());
        for q in [rat(1, 2), rat(1, 3), rat(1, 5), modulus.clone()] {
            agrees(&UniformDisconnected::default(), &d, &q, modulus < q);
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    common::all_tuples(n, n)
}

#[test]
fn min_distortion_matches_permutation_scan() {
    let mut r = rng(15);
    for _ in 0..120 {
        let n = r.random_range(1..=6);
        let da = random_metric(&mut r, names("a", n));
        let df = random_metric(&mut r, names("f", n));
        let best = permutations(n)
            .into_iter()
            .map(|s| {
                let mut worst = Rational::zero();
                for i in 0..n {
                    for j in i + 1..n {
                        let v = (da.d(s[i], s[j]) - df.d(i, j)).abs();
                        if v > worst {
                            worst = v;
                        }
                    }
                }
                worst
            })
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap();
        let m = min_distortion(&da, &df).unwrap();
        assert_eq!(m.distortion, best);
        let relabeled = FinMetric::from_fn(names("f", n), |i, j| da.d(m.sigma[i], m.sigma[j])).unwrap();
        assert_eq!(relabeled.sup_dist(&df).unwrap(), best);
    }
}
