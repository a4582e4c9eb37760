//! Reference implementations used as test oracles. They share no code with
//! the library beyond its data types.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use stackgrid::exact_geometry::{Point, Rat};
use stackgrid::tree_model::{NodeId, TreeRep, WeightedTree};

/// Determinant by cofactor expansion along the first row.
pub fn laplace(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Rat::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rat>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Bracket by cofactor expansion.
pub fn bracket_oracle(points: &[Point]) -> Rat {
    let m: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| p.coords().iter().cloned().chain(std::iter::once(Rat::one())).collect())
        .collect();
    laplace(&m)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Smallest `L` with `L^(d-1) >= r`, by counting up.
pub fn smallest_side(r: &BigInt, d: usize) -> BigInt {
    let mut l = BigInt::one();
    while Pow::pow(&l, (d - 1) as u32) < *r {
        l += 1;
    }
    l
}

fn subtree_size(t: &TreeRep, v: NodeId) -> usize {
    1 + t.children(v).iter().map(|&c| subtree_size(t, c)).sum::<usize>()
}

/// Child with the largest subtree, ties to the lowest index.
pub fn heavy_child(t: &TreeRep, v: NodeId) -> usize {
    let sizes: Vec<usize> = t.children(v).iter().map(|&c| subtree_size(t, c)).collect();
    let max = *sizes.iter().max().unwrap();
    sizes.iter().position(|&s| s == max).unwrap()
}

/// Node-by-node balanced predicate.
pub fn check_balanced(wt: &WeightedTree) -> Result<(), String> {
    let t = &wt.tree;
    for v in t.node_ids() {
        let w = wt.weight(v);
        let kids = t.children(v);
        if kids.is_empty() {
            if *w < BigInt::one() {
                return Err(format!("leaf {v} has weight {w}"));
            }
            continue;
        }
        let sum: BigInt = kids.iter().map(|&c| wt.weight(c)).sum();
        if sum != *w {
            return Err(format!("node {v}: weight {w} but children sum to {sum}"));
        }
        let h = heavy_child(t, v);
        let light: Vec<&BigInt> = kids.iter().enumerate().filter(|&(i, _)| i != h).map(|(_, &c)| wt.weight(c)).collect();
        if light.iter().any(|x| *x != light[0]) {
            return Err(format!("node {v}: light children differ"));
        }
        if wt.weight(kids[h]) < light[0] {
            return Err(format!("node {v}: heavy child lighter than light ones"));
        }
    }
    Ok(())
}

/// Largest number of light edges on a root-leaf path.
pub fn light_depth(t: &TreeRep) -> usize {
    fn go(t: &TreeRep, v: NodeId) -> usize {
        if t.is_leaf(v) {
            return 0;
        }
        let h = heavy_child(t, v);
        t.children(v)
            .iter()
            .enumerate()
            .map(|(i, &c)| go(t, c) + usize::from(i != h))
            .max()
            .unwrap()
    }
    go(t, t.root())
}

/// `floor(log2 n)`.
pub fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// `ceil(log2 n)`.
pub fn ceil_log2(n: usize) -> usize {
    let f = floor_log2(n);
    if n.is_power_of_two() {
        f
    } else {
        f + 1
    }
}
