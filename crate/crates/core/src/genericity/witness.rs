//! Small violating spaces, block spaces built from them, and perturbation of
//! a metric into one that violates a parameter.


use crate::error::{Error, Result};
use crate::interpolation::interpolate_single;
use crate::metric::FinMetric;
use crate::scalar::Scalar;
use crate::transmissible::{evaluate, TransParam, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct SingularWitness<T: Scalar, Q, Z> {
    pub param: String,
    pub q: Q,
    pub z: Z,
    pub space: FinMetric<T>,
    /// The violating tuple, by label.
    pub tuple: Vec<String>,
}

pub type SingularWitnessOf<T, W> = SingularWitness<T, <W as TransParam<T>>::Q, <W as TransParam<T>>::Z>;

/// A space of diameter at most `eps` on which `q` fails.
pub fn singular_witness<T: Scalar, W: TransParam<T>>(
    param: &W,
    q: &W::Q,
    eps: &T,
) -> Result<SingularWitnessOf<T, W>> {
    sized_witness(param, q, eps, None)
}

fn sized_witness<T: Scalar, W: TransParam<T>>(
    param: &W,
    q: &W::Q,
    eps: &T,
    size: Option<usize>,
) -> Result<SingularWitnessOf<T, W>> {
    if !param.singular() {
        return Err(Error::NotSingular(param.name()));
    }
    if !eps.is_positive() {
        return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
    }
    let s = param.singular_space(q, eps, size)?;
    let value = param.phi(q, &s.tuple, &s.z, &s.space);
    assert!(
        !param.in_target(q, &value) && s.space.diameter() <= *eps,
        "generated space for {} does not violate",
        param.name()
    );
    Ok(SingularWitness {
        param: param.name(),
        q: q.clone(),
        z: s.z,
        tuple: s.tuple.iter().map(|&i| s.space.label(i).to_string()).collect(),
        space: s.space,
    })
}

/// Label of the hub point of a [`BlockSpace`].
pub const HUB: &str = "∞";

/// Shrinking violating blocks around a hub: block `i` (from 1) has
/// diameter at most `ε·2^{-i}` and sits at distance `ε·2^{-i}` from the hub.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpace<T: Scalar, Q, Z, P> {
    pub epsilon: T,
    pub hub: String,
    pub blocks: Vec<FinMetric<T>>,
    pub metric: FinMetric<T>,
    /// Per block, its violation with labels of `metric`.
    pub witnesses: Vec<Witness<Q, Z, P>>,
}

pub type BlockSpaceOf<T, W> =
    BlockSpace<T, <W as TransParam<T>>::Q, <W as TransParam<T>>::Z, <W as TransParam<T>>::P>;

/// `ε·2^{-i}`.
fn level<T: Scalar>(eps: &T, i: usize) -> T {
    eps.clone() / crate::scalar::ipow(&T::two(), i as u32)
}

/// Assembles `n_blocks` witnesses over the first enumerated indices (cycling
/// when the index set is finite).
pub fn block_space<T: Scalar, W: TransParam<T>>(
    param: &W,
    eps: &T,
    n_blocks: usize,
) -> Result<BlockSpaceOf<T, W>> {
    if !param.singular() {
        return Err(Error::NotSingular(param.name()));
    }
    if n_blocks == 0 {
        return Err(Error::NonpositiveParameter("blocks = 0".into()));
    }
    let qs: Vec<W::Q> = if param.q_is_finite() {
        let all: Vec<W::Q> = param.q_enum().collect();
        if all.is_empty() {
            return Err(Error::NotSingular(param.name()));
        }
        (0..n_blocks).map(|i| all[i % all.len()].clone()).collect()
    } else {
        param.q_enum().take(n_blocks).collect()
    };

    let mut blocks = Vec::with_capacity(n_blocks);
    let mut generated = Vec::with_capacity(n_blocks);
    for (k, q) in qs.iter().enumerate() {
        let i = k + 1;
        let w = singular_witness(param, q, &level(eps, i))?;
        let block = w.space.relabel(|l| {
            let idx = w.space.index_of(l).expect("own label");
            format!("R{i}.{idx}")
        })?;
        let tuple: Vec<String> = w
            .tuple
            .iter()
            .map(|l| block.label(w.space.index_of(l).expect("own label")).to_string())
            .collect();
        blocks.push(block);
        generated.push((w, tuple));
    }

    let mut labels = vec![HUB.to_string()];
    let mut owner = vec![(0usize, 0usize)];
    for (b, block) in blocks.iter().enumerate() {
        for p in 0..block.len() {
            labels.push(block.label(p).to_string());
            owner.push((b + 1, p));
        }
    }
    let metric = FinMetric::from_fn(labels, |x, y| {
        let ((bx, px), (by, py)) = (owner[x], owner[y]);
        match (bx, by) {
            (0, b) | (b, 0) => level(eps, b),
            _ if bx == by => blocks[bx - 1].d(px, py),
            _ => level(eps, bx.min(by)),
        }
    })?;

    let mut witnesses = Vec::with_capacity(n_blocks);
    for (w, tuple) in generated {
        let value = evaluate(param, &metric, &w.q, &tuple, &w.z)?;
        witnesses.push(Witness { q: w.q, z: w.z, tuple, value });
    }
    Ok(BlockSpace { epsilon: eps.clone(), hub: HUB.to_string(), blocks, metric, witnesses })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation<T: Scalar, Q, Z, P> {
    pub m: FinMetric<T>,
    /// The cluster that received the violating space.
    pub cluster: Vec<String>,
    pub eta: T,
    pub witness: Witness<Q, Z, P>,
}

pub type PerturbationOf<T, W> =
    Perturbation<T, <W as TransParam<T>>::Q, <W as TransParam<T>>::Z, <W as TransParam<T>>::P>;

/// The lexicographically first `k` points that are pairwise closer than `bound`.
pub fn find_cluster<T: Scalar>(d: &FinMetric<T>, k: usize, bound: &T) -> Option<Vec<usize>> {
    fn grow<T: Scalar>(d: &FinMetric<T>, k: usize, bound: &T, chosen: &mut Vec<usize>, from: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for p in from..d.len() {
            if d.len() - p < k - chosen.len() {
                return false;
            }
            if chosen.iter().all(|&c| d.d(c, p) < *bound) {
                chosen.push(p);
                if grow(d, k, bound, chosen, p + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(k);
    grow(d, k, bound, &mut chosen, 0).then_some(chosen)
}

/// Moves `d` by less than `eps` so that `q` (default: the first enumerated
/// index) fails, by interpolating a violating space of diameter `eps/2`
/// onto a cluster of diameter below `eps/2`.
pub fn perturb_to_anti<T: Scalar, W: TransParam<T>>(
    d: &FinMetric<T>,
    eps: &T,
    param: &W,
    q: Option<W::Q>,
) -> Result<PerturbationOf<T, W>> {
    if !param.singular() {
        return Err(Error::NotSingular(param.name()));
    }
    if !eps.is_positive() {
        return Err(Error::NonpositiveParameter(format!("eps = {}", eps.to_text())));
    }
    let q = match q {
        Some(q) => q,
        None => param.q_enum().next().ok_or_else(|| Error::NotSingular(param.name()))?,
    };
    let half = eps.half();
    let size = sized_witness(param, &q, &half, None)?.space.len();
    let cluster = find_cluster(d, size, &half)
        .ok_or_else(|| Error::NoSmallCluster { size, bound: half.to_text() })?;
    let w = sized_witness(param, &q, &half, Some(size))?;
    let cluster_labels: Vec<String> = cluster.iter().map(|&i| d.label(i).to_string()).collect();
    let transplanted = w.space.relabel(|l| cluster_labels[w.space.index_of(l).expect("own label")].clone())?;
    let tuple: Vec<String> = w
        .tuple
        .iter()
        .map(|l| cluster_labels[w.space.index_of(l).expect("own label")].clone())
        .collect();
    let res = interpolate_single(d, &cluster_labels, &transplanted)?;

    let value = evaluate(param, &res.m, &q, &tuple, &w.z)?;
    assert!(!param.in_target(&q, &value), "transplanted witness must survive interpolation");
    assert!(res.m.sup_dist(d)? < *eps, "perturbation must stay within eps");
    Ok(Perturbation {
        m: res.m,
        cluster: cluster_labels,
        eta: res.eta,
        witness: Witness { q, z: w.z, tuple, value },
    })
}
