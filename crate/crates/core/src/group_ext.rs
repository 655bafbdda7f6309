//! The central extension `L^` of `L` by `<kappa>`, its quotient `L^/K` with
//! `K = { a^{-1} theta(a) }`, central characters with `chi(kappa) = -1`, and
//! the irreducible modules `T_chi`.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::lattice::{LVector, LatticeData};
use crate::linalg::{self, Matrix};
use crate::scalars::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("lattice vector has non-integer coordinates")]
    NonInteger,
    #[error("rank {0} too large for the finite quotient (max 8)")]
    RankTooLarge(usize),
    #[error("no character of the center extends the requested values")]
    NoCharacter,
}

/// Bimultiplicative 2-cocycle fixed by `eps(a_i, a_j) = (-1)^{<a_i,a_j>}` for `i > j`
/// and `1` for `i <= j`.
#[derive(Clone, Debug)]
pub struct Cocycle {
    // parity of the exponent for i > j, zero elsewhere
    odd: Vec<Vec<bool>>,
}

impl Cocycle {
    pub fn new(lattice: &LatticeData) -> Self {
        let g = lattice.gram();
        let d = g.len();
        let odd = (0..d).map(|i| (0..d).map(|j| i > j && g[i][j].rem_euclid(2) == 1).collect()).collect();
        Cocycle { odd }
    }

    pub fn basis_value(&self, i: usize, j: usize) -> i8 {
        if self.odd[i][j] {
            -1
        } else {
            1
        }
    }

    pub fn epsilon(&self, a: &LVector, b: &LVector) -> Result<i8, GroupError> {
        let a = a.to_ints().ok_or(GroupError::NonInteger)?;
        let b = b.to_ints().ok_or(GroupError::NonInteger)?;
        Ok(self.epsilon_ints(&a, &b))
    }

    pub fn epsilon_ints(&self, a: &[i64], b: &[i64]) -> i8 {
        let mut parity = 0i64;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if self.odd[i][j] {
                    parity += ai * bj;
                }
            }
        }
        if parity.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    fn epsilon_bits(&self, a: u32, b: u32) -> i8 {
        let d = self.odd.len();
        let mut parity = false;
        for i in 0..d {
            if a >> i & 1 == 0 {
                continue;
            }
            for j in 0..d {
                if b >> j & 1 == 1 && self.odd[i][j] {
                    parity = !parity;
                }
            }
        }
        if parity {
            -1
        } else {
            1
        }
    }
}

/// Element of `L^`: `sign * e_alpha`, `alpha` in lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElement {
    pub sign: i8,
    pub vector: Vec<i64>,
}

impl ExtElement {
    pub fn mul(&self, o: &ExtElement, eps: &Cocycle) -> ExtElement {
        ExtElement {
            sign: self.sign * o.sign * eps.epsilon_ints(&self.vector, &o.vector),
            vector: self.vector.iter().zip(&o.vector).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inverse(&self, eps: &Cocycle) -> ExtElement {
        let neg: Vec<i64> = self.vector.iter().map(|a| -a).collect();
        // (s, a)(x, -a) = (s x eps(a,-a), 0)
        ExtElement { sign: self.sign * eps.epsilon_ints(&self.vector, &neg), vector: neg }
    }

    pub fn theta(&self) -> ExtElement {
        ExtElement { sign: self.sign, vector: self.vector.iter().map(|a| -a).collect() }
    }
}

/// Normal form of an element of `L^/K`: a sign and the coset `alpha mod 2L` as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QElem {
    pub sign: i8,
    pub coset: u32,
}

impl QElem {
    pub fn index(&self) -> usize {
        ((self.coset as usize) << 1) | (self.sign < 0) as usize
    }

    pub fn from_index(i: usize) -> Self {
        QElem { sign: if i & 1 == 1 { -1 } else { 1 }, coset: (i >> 1) as u32 }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientGroup {
    rank: usize,
    eps: Cocycle,
    // sign of the K-element (sign_k(i), 2 alpha_i), i.e. e_{2 alpha_i} == sign_k(i) mod K
    k_signs: Vec<i8>,
    gram_parity: Vec<Vec<bool>>,
    table: Vec<Vec<usize>>,
}

impl QuotientGroup {
    pub fn build(lattice: &LatticeData, eps: &Cocycle) -> Result<Self, GroupError> {
        let d = lattice.rank();
        if d > 8 {
            return Err(GroupError::RankTooLarge(d));
        }
        // generators of K: e_{a_i}^{-1} theta(e_{a_i}) = (s_i, -2 a_i)
        let k_signs: Vec<i8> = (0..d)
            .map(|i| {
                let mut v = vec![0; d];
                v[i] = 1;
                let e = ExtElement { sign: 1, vector: v };
                let k = e.inverse(eps).mul(&e.theta(), eps);
                debug_assert!(k.vector.iter().enumerate().all(|(j, c)| *c == if i == j { -2 } else { 0 }));
                // the character on 2L is multiplicative with values +-1, so the
                // sign for +2a_i equals the sign for -2a_i
                k.sign
            })
            .collect();
        let gram_parity = lattice.gram().iter().map(|r| r.iter().map(|x| x.rem_euclid(2) == 1).collect()).collect();
        let mut g = QuotientGroup { rank: d, eps: eps.clone(), k_signs, gram_parity, table: Vec::new() };
        let n = g.order();
        g.table = (0..n)
            .map(|i| (0..n).map(|j| g.mul_raw(QElem::from_index(i), QElem::from_index(j)).index()).collect())
            .collect();
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        1 << (self.rank + 1)
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.eps
    }

    pub fn identity(&self) -> QElem {
        QElem { sign: 1, coset: 0 }
    }

    pub fn kappa(&self) -> QElem {
        QElem { sign: -1, coset: 0 }
    }

    pub fn generator(&self, i: usize) -> QElem {
        QElem { sign: 1, coset: 1 << i }
    }

    pub fn elements(&self) -> Vec<QElem> {
        (0..self.order()).map(QElem::from_index).collect()
    }

    fn sigma(&self, gamma_bits: u32) -> i8 {
        let mut s = 1;
        for i in 0..self.rank {
            if gamma_bits >> i & 1 == 1 {
                s *= self.k_signs[i];
            }
        }
        s
    }

    fn mul_raw(&self, a: QElem, b: QElem) -> QElem {
        // e_a e_b = eps(a,b) e_{a+b}, a+b = r + 2 gamma with r = a xor b, gamma = a and b,
        // e_{r + 2 gamma} = e_r e_{2 gamma} (eps(r, 2 gamma) = 1) and e_{2 gamma} == sigma(gamma)
        let sign = a.sign * b.sign * self.eps.epsilon_bits(a.coset, b.coset) * self.sigma(a.coset & b.coset);
        QElem { sign, coset: a.coset ^ b.coset }
    }

    pub fn mul(&self, a: QElem, b: QElem) -> QElem {
        QElem::from_index(self.table[a.index()][b.index()])
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverse(&self, a: QElem) -> QElem {
        let id = self.identity().index();
        QElem::from_index((0..self.order()).find(|&j| self.table[a.index()][j] == id).expect("group"))
    }

    /// Image of `e_alpha` for an integral lattice vector.
    pub fn image_of(&self, alpha: &LVector) -> Result<QElem, GroupError> {
        let c = alpha.to_ints().ok_or(GroupError::NonInteger)?;
        Ok(self.image_of_ints(&c))
    }

    pub fn image_of_ints(&self, c: &[i64]) -> QElem {
        // e_alpha = e_r e_{2 gamma} with alpha = r + 2 gamma, r in {0,1}^d
        let mut coset = 0u32;
        let mut sign = 1i8;
        let mut parity_gamma = 0u32;
        for (i, &x) in c.iter().enumerate() {
            let r = x.rem_euclid(2);
            if r == 1 {
                coset |= 1 << i;
            }
            let gamma = (x - r) / 2;
            if gamma.rem_euclid(2) == 1 {
                parity_gamma |= 1 << i;
            }
        }
        sign *= self.sigma(parity_gamma);
        // eps(r, 2 gamma) = 1 always
        QElem { sign, coset }
    }

    /// Whether `a` and `b` commute: `(-1)^{<a,b>}`.
    pub fn commute(&self, a: QElem, b: QElem) -> bool {
        let mut parity = false;
        for i in 0..self.rank {
            if a.coset >> i & 1 == 0 {
                continue;
            }
            for j in 0..self.rank {
                if b.coset >> j & 1 == 1 && self.gram_parity[i][j] {
                    parity = !parity;
                }
            }
        }
        !parity
    }

    pub fn center(&self) -> Vec<QElem> {
        let gens: Vec<QElem> = (0..self.rank).map(|i| self.generator(i)).collect();
        self.elements().into_iter().filter(|&z| gens.iter().all(|&g| self.commute(z, g))).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.center().len() == self.order()
    }

    /// Closure of a generating set under multiplication.
    fn closure(&self, gens: &[QElem]) -> Vec<QElem> {
        let mut set = vec![self.identity()];
        let mut seen = vec![false; self.order()];
        seen[self.identity().index()] = true;
        let mut i = 0;
        while i < set.len() {
            for &g in gens {
                let p = self.mul(set[i], g);
                if !seen[p.index()] {
                    seen[p.index()] = true;
                    set.push(p);
                }
            }
            i += 1;
        }
        set.sort();
        set
    }
}

/// Fourth root of unity `i^k`; character values of these groups lie in `{1, i, -1, -i}`.
pub fn root_of_unity(k: u8) -> Scalar {
    match k % 4 {
        0 => Scalar::one(),
        1 => Scalar::i(),
        2 => Scalar::from_int(-1),
        _ => -Scalar::i(),
    }
}

/// A linear character on a subgroup, values as exponents of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCharacter {
    pub values: Vec<(QElem, u8)>,
}

impl CentralCharacter {
    pub fn value(&self, z: QElem) -> Option<u8> {
        self.values.iter().find(|(e, _)| *e == z).map(|(_, k)| *k)
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        for (e, k) in &self.values {
            if e.sign > 0 && e.coset != 0 {
                parts.push(format!("{:b}:{}", e.coset, ["1", "i", "-1", "-i"][*k as usize]));
            }
        }
        if parts.is_empty() {
            "trivial".into()
        } else {
            parts.join(",")
        }
    }
}

/// Extends a character from `sub` to the group generated by `sub` and `g`
/// (all elements assumed to commute), choosing the smallest admissible exponent.
fn extend_character(group: &QuotientGroup, chi: &[(QElem, u8)], g: QElem) -> Vec<(QElem, u8)> {
    let lookup = |x: QElem| chi.iter().find(|(e, _)| *e == x).map(|(_, k)| *k);
    // smallest m > 0 with g^m in sub
    let mut m = 1u8;
    let mut pow = g;
    while lookup(pow).is_none() {
        pow = group.mul(pow, g);
        m += 1;
    }
    let target = lookup(pow).expect("power in subgroup");
    let k = (0..4u8).find(|k| (k * m) % 4 == target).expect("fourth roots suffice");
    let mut out: Vec<(QElem, u8)> = chi.to_vec();
    let mut gj = g;
    for j in 1..m {
        for (h, v) in chi {
            let e = group.mul(*h, gj);
            if !out.iter().any(|(x, _)| *x == e) {
                out.push((e, (v + k * j) % 4));
            }
        }
        gj = group.mul(gj, g);
    }
    out.sort();
    out
}

pub fn central_characters(group: &QuotientGroup) -> Vec<CentralCharacter> {
    let center = group.center();
    // greedy generating set of the center, kappa first
    let mut gens = vec![group.kappa()];
    let mut span = group.closure(&gens);
    for &z in &center {
        if !span.contains(&z) {
            gens.push(z);
            span = group.closure(&gens);
        }
    }
    // kappa -> -1 ; enumerate extensions over remaining generators
    let mut chars: Vec<Vec<(QElem, u8)>> = vec![vec![(group.identity(), 0), (group.kappa(), 2)]];
    for &g in gens.iter().skip(1) {
        let mut next = Vec::new();
        for chi in &chars {
            let base = extend_character(group, chi, g);
            // all extensions differ from the minimal one by a character of <sub, g>/sub,
            // which is cyclic of order m; enumerate by multiplying g's value by i^{4/m * t}
            let lookup = |x: QElem| chi.iter().find(|(e, _)| *e == x).map(|(_, k)| *k);
            let mut m = 1u8;
            let mut pow = g;
            while lookup(pow).is_none() {
                pow = group.mul(pow, g);
                m += 1;
            }
            let step = 4 / m;
            for t in 0..m {
                let shift = step * t;
                let mut ext = base.clone();
                for (e, v) in ext.iter_mut() {
                    // exponent of g in e relative to sub
                    let mut j = 0u8;
                    let mut gj = group.identity();
                    while lookup(group.mul(*e, group.inverse(gj))).is_none() {
                        gj = group.mul(gj, g);
                        j += 1;
                    }
                    *v = (*v + shift * j) % 4;
                }
                next.push(ext);
            }
        }
        chars = next;
    }
    chars.into_iter().map(|values| CentralCharacter { values }).collect()
}

/// Irreducible representation `T_chi` of `L^/K`, given by matrices for every element.
#[derive(Clone, Debug)]
pub struct GroupRep {
    pub dim: usize,
    pub chi: CentralCharacter,
    matrices: Vec<Matrix>,
}

impl GroupRep {
    /// Induction from a maximal subgroup containing the center on which the
    /// commutator form vanishes (greedy in index order), with a deterministic
    /// extension of `chi`.
    pub fn irreducible(group: &QuotientGroup, chi: &CentralCharacter) -> Self {
        let mut sub_gens: Vec<QElem> = Vec::new();
        let mut abelian = chi.values.iter().map(|(e, _)| *e).collect::<Vec<_>>();
        abelian.sort();
        let mut psi: Vec<(QElem, u8)> = chi.values.clone();
        for g in group.elements() {
            if abelian.contains(&g) || !abelian.iter().all(|&a| group.commute(a, g)) {
                continue;
            }
            psi = extend_character(group, &psi, g);
            sub_gens.push(g);
            abelian = psi.iter().map(|(e, _)| *e).collect();
        }
        let psi_of = |x: QElem| psi.iter().find(|(e, _)| *e == x).map(|(_, k)| *k);
        // left transversal
        let mut reps: Vec<QElem> = Vec::new();
        for g in group.elements() {
            let covered = reps.iter().any(|&r| psi_of(group.mul(group.inverse(r), g)).is_some());
            if !covered {
                reps.push(g);
            }
        }
        let dim = reps.len();
        let matrices = group
            .elements()
            .into_iter()
            .map(|g| {
                let mut m = linalg::zeros(dim, dim);
                for (j, &rj) in reps.iter().enumerate() {
                    let grj = group.mul(g, rj);
                    for (i, &ri) in reps.iter().enumerate() {
                        if let Some(k) = psi_of(group.mul(group.inverse(ri), grj)) {
                            m[i][j] = root_of_unity(k);
                        }
                    }
                }
                m
            })
            .collect();
        GroupRep { dim, chi: chi.clone(), matrices }
    }

    /// One-dimensional trivial action, used for the twisted Heisenberg module alone.
    pub fn trivial() -> Self {
        GroupRep { dim: 1, chi: CentralCharacter { values: Vec::new() }, matrices: vec![linalg::identity(1)] }
    }

    pub fn matrix(&self, g: QElem) -> &Matrix {
        &self.matrices[g.index()]
    }

    /// Matrix of `e_alpha` for an integral `alpha`.
    pub fn e_alpha(&self, group: &QuotientGroup, alpha: &LVector) -> Result<Matrix, GroupError> {
        Ok(self.matrix(group.image_of(alpha)?).clone())
    }

    pub fn satisfies_table(&self, group: &QuotientGroup) -> bool {
        let els = group.elements();
        els.iter().all(|&a| {
            els.iter().all(|&b| linalg::mat_mul(self.matrix(a), self.matrix(b)) == *self.matrix(group.mul(a, b)))
        })
    }

    /// Dimension of the commutant `{X : X rho(g) = rho(g) X}` over all elements.
    pub fn endomorphism_dimension(&self, group: &QuotientGroup) -> usize {
        let n = self.dim;
        let mut rows: Matrix = Vec::new();
        for g in group.elements() {
            let m = self.matrix(g);
            // (X M - M X)_{ij} = sum_k X_ik M_kj - M_ik X_kj, unknown X_ab at a*n+b
            for i in 0..n {
                for j in 0..n {
                    let mut row = vec![Scalar::zero(); n * n];
                    for k in 0..n {
                        row[i * n + k] += &m[k][j];
                        row[k * n + j] -= &m[i][k];
                    }
                    rows.push(row);
                }
            }
        }
        linalg::nullity(&rows)
    }
}

/// Ordered list of `(chi, T_chi)` for the quotient of `L`.
pub fn irreducible_modules(group: &QuotientGroup) -> Vec<GroupRep> {
    central_characters(group).iter().map(|chi| GroupRep::irreducible(group, chi)).collect()
}

pub fn sign_as_scalar(s: i8) -> Scalar {
    Scalar::from_int(s.to_i64().unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(gram: Vec<Vec<i64>>) -> (LatticeData, Cocycle, QuotientGroup) {
        let l = LatticeData::load(gram).unwrap();
        let e = Cocycle::new(&l);
        let g = QuotientGroup::build(&l, &e).unwrap();
        (l, e, g)
    }

    #[test]
    fn epsilon_examples() {
        let (_, e, _) = setup(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(e.epsilon_ints(&[1, 0], &[1, 0]), 1);
        assert_eq!(e.epsilon_ints(&[0, 1], &[1, 0]), -1);
        assert_eq!(e.epsilon_ints(&[2, 0], &[0, 1]), 1);
        assert_eq!(
            e.epsilon(
                &LVector(vec![crate::scalars::rat(1, 2), crate::scalars::rat_int(0)]),
                &LVector::from_ints(&[1, 0])
            ),
            Err(GroupError::NonInteger)
        );
    }

    #[test]
    fn quotient_orders() {
        let (_, _, g) = setup(vec![vec![-2]]);
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        let (_, _, g) = setup(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        let (_, _, g) = setup(vec![vec![2]]);
        assert_eq!(g.order(), 4);
    }

    #[test]
    fn k_contains_all_twisted_commutators() {
        let (l, e, g) = setup(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, -2]]);
        for v in l.box_vectors(2) {
            let c = v.to_ints().unwrap();
            for s in [1i8, -1] {
                let a = ExtElement { sign: s, vector: c.clone() };
                let k = a.inverse(&e).mul(&a.theta(), &e);
                let img = g.image_of_ints(&k.vector);
                let img = QElem { sign: img.sign * k.sign, coset: img.coset };
                assert_eq!(img, g.identity(), "a = {c:?}");
            }
        }
    }

    #[test]
    fn character_counts_and_dimensions() {
        for (gram, n, dim) in
            [(vec![vec![-2]], 2, 1), (vec![vec![0, 1], vec![1, 0]], 1, 2), (vec![vec![-2, 0], vec![0, -2]], 4, 1)]
        {
            let (_, _, g) = setup(gram);
            let chars = central_characters(&g);
            assert_eq!(chars.len(), n);
            for chi in &chars {
                assert_eq!(chi.value(g.kappa()), Some(2));
                let rep = GroupRep::irreducible(&g, chi);
                assert_eq!(rep.dim, dim);
                assert!(rep.satisfies_table(&g));
                assert_eq!(rep.endomorphism_dimension(&g), 1);
                assert_eq!(*rep.matrix(g.kappa()), linalg::mat_scale(&linalg::identity(dim), &Scalar::from_int(-1)));
            }
        }
    }

    #[test]
    fn rank_one_negative_modules_are_signs() {
        let (_, _, g) = setup(vec![vec![-2]]);
        let reps = irreducible_modules(&g);
        let vals: Vec<Scalar> = reps.iter().map(|r| r.matrix(g.generator(0))[0][0].clone()).collect();
        assert_eq!(vals, vec![Scalar::one(), Scalar::from_int(-1)]);
    }

    #[test]
    fn hyperbolic_generators_anticommute() {
        let (_, _, g) = setup(vec![vec![0, 1], vec![1, 0]]);
        let rep = &irreducible_modules(&g)[0];
        let a = rep.matrix(g.generator(0));
        let b = rep.matrix(g.generator(1));
        assert_eq!(linalg::mat_mul(a, b), linalg::mat_scale(&linalg::mat_mul(b, a), &Scalar::from_int(-1)));
    }

    #[test]
    fn dimension_sum_is_half_the_order() {
        for gram in [
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]],
            vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, -4]],
            vec![vec![-2, 1], vec![1, -2]],
        ] {
            let (_, _, g) = setup(gram);
            let total: usize = irreducible_modules(&g).iter().map(|r| r.dim * r.dim).sum();
            assert_eq!(total, g.order() / 2);
        }
    }
}
