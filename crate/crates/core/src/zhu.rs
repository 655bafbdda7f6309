//! Zhu-algebra products, the named generators, zero-mode matrices on top levels and
//! one-sided `O(V)` membership certificates.

use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fock::{change_basis, monomials_of_degree, FockElement, Ground, Heisenberg, Momentum, Monomial, Sector};
use crate::lattice::{LVector, LatticeError};
use crate::linalg::{self, Matrix};
use crate::scalars::{rat, rat_int, Rational, Scalar};
use crate::vertex::{binom, pow2, Module, VertexEngine, VertexError};

#[derive(Debug, Error)]
pub enum ZhuError {
    #[error("index out of range for rank {0}")]
    Index(usize),
    #[error("{0} needs a lattice")]
    NoLattice(&'static str),
    #[error("alpha is isotropic; use the isotropic variant")]
    Isotropic,
    #[error("alpha is not isotropic")]
    NotIsotropic,
    #[error("image is not in the span of the top level")]
    NotInvariant,
    #[error("direction-wise operator only acts on h(-1/2) ⊗ T")]
    NotTwistedMinus,
    #[error("cutoff {cutoff} below the weight {weight} of the target")]
    Cutoff { cutoff: i64, weight: String },
    #[error(transparent)]
    Vertex(#[from] VertexError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Element of `A(V)` kept symbolic in `*` until it acts.
#[derive(Clone, Debug)]
pub enum ZhuExpr {
    Vector(FockElement),
    Star(Box<ZhuExpr>, Box<ZhuExpr>),
    Sum(Vec<(Scalar, ZhuExpr)>),
    /// operator on `h(-1/2) ⊗ T` given direction by direction in a second basis
    PerDirection(PerDirection),
}

#[derive(Clone, Debug)]
pub struct PerDirection {
    /// `p[c][e] = <h'_c, h_e>`
    pub change: Matrix,
    /// `X(h'_c t) = sum_k coeffs_k[c] o(expr_k)(h'_c t)`
    pub terms: Vec<(Vec<Scalar>, ZhuExpr)>,
}

impl ZhuExpr {
    pub fn vector(v: FockElement) -> Self {
        ZhuExpr::Vector(v)
    }

    pub fn constant(c: Scalar, d: usize) -> Self {
        ZhuExpr::Vector(FockElement::vacuum(d).scale(&c))
    }

    pub fn star(&self, o: &ZhuExpr) -> ZhuExpr {
        ZhuExpr::Star(Box::new(self.clone()), Box::new(o.clone()))
    }

    pub fn lin(terms: Vec<(Scalar, ZhuExpr)>) -> ZhuExpr {
        ZhuExpr::Sum(terms)
    }

    pub fn add(&self, o: &ZhuExpr) -> ZhuExpr {
        ZhuExpr::Sum(vec![(Scalar::one(), self.clone()), (Scalar::one(), o.clone())])
    }

    pub fn sub(&self, o: &ZhuExpr) -> ZhuExpr {
        ZhuExpr::Sum(vec![(Scalar::one(), self.clone()), (Scalar::from_int(-1), o.clone())])
    }

    pub fn scale(&self, c: &Scalar) -> ZhuExpr {
        ZhuExpr::Sum(vec![(c.clone(), self.clone())])
    }

    /// `self - c 1`
    pub fn shift(&self, c: &Scalar, d: usize) -> ZhuExpr {
        self.sub(&ZhuExpr::constant(c.clone(), d))
    }

    /// Materializes the expression as a vector (not available for direction-wise operators).
    pub fn expand(&self, eng: &VertexEngine) -> Result<FockElement, ZhuError> {
        match self {
            ZhuExpr::Vector(v) => Ok(v.clone()),
            ZhuExpr::Star(a, b) => star(eng, &a.expand(eng)?, &b.expand(eng)?),
            ZhuExpr::Sum(t) => {
                let mut out = FockElement::zero(Sector::Untwisted);
                for (c, e) in t {
                    out.add_scaled(&e.expand(eng)?, c);
                }
                Ok(out)
            }
            ZhuExpr::PerDirection(_) => Err(ZhuError::NotTwistedMinus),
        }
    }
}

impl From<FockElement> for ZhuExpr {
    fn from(v: FockElement) -> Self {
        ZhuExpr::Vector(v)
    }
}

/// Applies `f(wt, part)` to each homogeneous part of `u`.
fn by_weight(
    u: &FockElement,
    mut f: impl FnMut(&Rational, &FockElement) -> Result<FockElement, ZhuError>,
) -> Result<FockElement, ZhuError> {
    let mut out = FockElement::zero(Sector::Untwisted);
    for (wt, part) in u.homogeneous_parts().map_err(VertexError::from)? {
        out.add_scaled(&f(&wt, &part)?, &Scalar::one());
    }
    Ok(out)
}

/// `Res_z (1+z)^{wt u + a} z^{-1-s} Y(u,z) v = sum_k C(wt u + a, k) u_{k-1-s} v`.
pub fn residue(eng: &VertexEngine, u: &FockElement, v: &FockElement, a: i64, s: i64) -> Result<FockElement, ZhuError> {
    by_weight(u, |wt, part| {
        let mut out = FockElement::zero(Sector::Untwisted);
        let Some(bound) = eng.product_bound(part, v)? else { return Ok(out) };
        let top = wt + rat_int(a);
        let mut k = 0i64;
        while k - 1 - s <= bound {
            let c = binom(&top, k as u32);
            if !c.is_zero() {
                let m = eng.untwisted_mode(part, &rat_int(k - 1 - s), v)?;
                out.add_scaled(&m, &Scalar::from_rational(c));
            }
            k += 1;
        }
        Ok(out)
    })
}

/// `u * v`
pub fn star(eng: &VertexEngine, u: &FockElement, v: &FockElement) -> Result<FockElement, ZhuError> {
    residue(eng, u, v, 0, 0)
}

/// `u ∘ v`
pub fn circ(eng: &VertexEngine, u: &FockElement, v: &FockElement) -> Result<FockElement, ZhuError> {
    residue(eng, u, v, 0, 1)
}

/// Named elements. Indices are 0-based against the engine's orthonormal basis.
#[derive(Clone, Debug)]
pub enum Named {
    Omega(usize),
    J(usize),
    H(usize),
    S(usize, usize, u32, u32),
    Eu(usize, usize),
    Et(usize, usize),
    Lambda(usize, usize),
    EAlpha(LVector),
    FAlpha(LVector),
    B(LVector),
    BTilde(LVector),
    BTildeIsotropic(LVector),
}

fn s_vec(d: usize, a: usize, b: usize, m: u32, n: u32) -> FockElement {
    FockElement::vacuum(d).create(b, 2 * n).create(a, 2 * m)
}

fn combo(d: usize, a: usize, b: usize, c: [i64; 4]) -> FockElement {
    let mut out = FockElement::zero(Sector::Untwisted);
    for (i, ci) in c.iter().enumerate() {
        out.add_scaled(&s_vec(d, a, b, 1, i as u32 + 2), &Scalar::from_int(*ci));
    }
    out
}

pub fn omega_vec(d: usize, a: usize) -> FockElement {
    FockElement::vacuum(d).create(a, 2).create(a, 2).scale(&Scalar::from_frac(1, 2))
}

pub fn j_vec(d: usize, a: usize) -> FockElement {
    let one = FockElement::vacuum(d);
    let mut j = one.create(a, 2).create(a, 2).create(a, 2).create(a, 2);
    j.add_scaled(&one.create(a, 2).create(a, 6), &Scalar::from_int(-2));
    j.add_scaled(&one.create(a, 4).create(a, 4), &Scalar::from_frac(3, 2));
    j
}

/// Named elements over a Heisenberg space of rank `d` in its own basis.
fn heisenberg_named(d: usize, name: &Named) -> Result<ZhuExpr, ZhuError> {
    let check = |i: usize| if i < d { Ok(()) } else { Err(ZhuError::Index(d)) };
    let omega = |a: usize| ZhuExpr::vector(omega_vec(d, a));
    let h_expr = |a: usize| {
        // H = J + omega - 4 omega * omega
        ZhuExpr::lin(vec![
            (Scalar::one(), ZhuExpr::vector(j_vec(d, a))),
            (Scalar::one(), omega(a)),
            (Scalar::from_int(-4), omega(a).star(&omega(a))),
        ])
    };
    Ok(match *name {
        Named::Omega(a) => {
            check(a)?;
            omega(a)
        }
        Named::J(a) => {
            check(a)?;
            ZhuExpr::vector(j_vec(d, a))
        }
        Named::H(a) => {
            check(a)?;
            h_expr(a)
        }
        Named::S(a, b, m, n) => {
            check(a)?;
            check(b)?;
            ZhuExpr::vector(s_vec(d, a, b, m, n))
        }
        Named::Lambda(a, b) => {
            check(a)?;
            check(b)?;
            ZhuExpr::vector(combo(d, a, b, [45, 190, 240, 96]))
        }
        Named::Eu(a, b) | Named::Et(a, b) => {
            check(a)?;
            check(b)?;
            let tw = matches!(name, Named::Et(..));
            let off = |x: usize, y: usize| {
                if tw {
                    ZhuExpr::vector(combo(d, x, y, [3, 14, 19, 8]).scale(&Scalar::from_int(-16)))
                } else {
                    ZhuExpr::vector(combo(d, x, y, [5, 25, 36, 16]))
                }
            };
            if a != b {
                off(a, b)
            } else if d >= 2 {
                let c = if a == 0 { 1 } else { 0 };
                off(a, c).star(&off(c, a))
            } else {
                // rank one: the projector onto the matching top level, written through H and omega
                let w = omega(0);
                if tw {
                    h_expr(0)
                        .star(&w.shift(&Scalar::one(), 1))
                        .star(&w.shift(&Scalar::from_frac(1, 16), 1))
                        .scale(&Scalar::from_frac(4096, 945))
                } else {
                    h_expr(0)
                        .star(&w.shift(&Scalar::from_frac(1, 16), 1))
                        .star(&w.shift(&Scalar::from_frac(9, 16), 1))
                        .scale(&Scalar::from_frac(-256, 945))
                }
            }
        }
        _ => unreachable!("lattice names handled by the caller"),
    })
}

fn map_vectors(e: &ZhuExpr, f: &dyn Fn(&FockElement) -> FockElement) -> ZhuExpr {
    match e {
        ZhuExpr::Vector(v) => ZhuExpr::Vector(f(v)),
        ZhuExpr::Star(a, b) => ZhuExpr::Star(Box::new(map_vectors(a, f)), Box::new(map_vectors(b, f))),
        ZhuExpr::Sum(t) => ZhuExpr::Sum(t.iter().map(|(c, x)| (c.clone(), map_vectors(x, f))).collect()),
        ZhuExpr::PerDirection(p) => ZhuExpr::PerDirection(PerDirection {
            change: p.change.clone(),
            terms: p.terms.iter().map(|(c, x)| (c.clone(), map_vectors(x, f))).collect(),
        }),
    }
}

/// Named element built against another orthonormal basis and rewritten in the engine basis.
pub fn named_in_basis(eng: &VertexEngine, other: &Heisenberg, name: &Named) -> Result<ZhuExpr, ZhuError> {
    let p = basis_change(eng, other)?;
    let e = heisenberg_named(eng.rank(), name)?;
    Ok(map_vectors(&e, &|v| change_basis(v, &p)))
}

/// `p[c][e] = <h'_c, h_e>`
pub fn basis_change(eng: &VertexEngine, other: &Heisenberg) -> Result<Matrix, ZhuError> {
    let l = eng.heis.lattice().ok_or(ZhuError::NoLattice("a second basis"))?;
    Ok(other.basis().iter().map(|hc| eng.heis.basis().iter().map(|he| l.pair_h(hc, he)).collect()).collect())
}

pub fn e_alpha_vec(eng: &VertexEngine, alpha: &LVector, minus: bool) -> FockElement {
    let a = eng.e(alpha);
    let b = eng.e(&alpha.neg());
    if minus {
        a.sub(&b)
    } else {
        a.add(&b)
    }
}

pub fn named_element(eng: &VertexEngine, name: &Named) -> Result<ZhuExpr, ZhuError> {
    let d = eng.rank();
    let lattice = || eng.heis.lattice().ok_or(ZhuError::NoLattice("E^alpha"));
    match name {
        Named::EAlpha(a) | Named::FAlpha(a) => {
            lattice()?;
            Ok(ZhuExpr::vector(e_alpha_vec(eng, a, matches!(name, Named::FAlpha(_)))))
        }
        Named::B(a) => {
            let l = lattice()?;
            if a.is_zero() {
                return Ok(ZhuExpr::constant(Scalar::one(), d));
            }
            let n = norm_i64(&l.norm(a));
            Ok(ZhuExpr::vector(e_alpha_vec(eng, a, false).scale(&Scalar::from_rational(pow2(n - 1)))))
        }
        Named::BTilde(a) => {
            let l = lattice()?;
            if a.is_zero() {
                return Ok(ZhuExpr::constant(Scalar::one(), d));
            }
            let n = norm_i64(&l.norm(a));
            if n == 0 {
                return Err(ZhuError::Isotropic);
            }
            let other = Heisenberg::for_lattice(l, std::slice::from_ref(a)).map_err(VertexError::from)?;
            let et11 = named_in_basis(eng, &other, &Named::Et(0, 0))?;
            let ea = ZhuExpr::vector(e_alpha_vec(eng, a, false));
            let f = Scalar::from_rational(pow2(n - 1));
            let g = Scalar::from_rational(rat(2 * n, 2 * n - 1));
            Ok(ZhuExpr::lin(vec![(f.clone(), ea.clone()), (-(&f * &g), et11.star(&ea))]))
        }
        Named::BTildeIsotropic(a) => {
            let l = lattice()?;
            if !l.norm(a).is_zero() {
                return Err(ZhuError::NotIsotropic);
            }
            // alpha = gamma + beta, gamma ⟂ beta, <gamma,gamma> > 0 > <beta,beta>
            // <gamma,gamma> = 1/2 makes the coefficients blow up, so skip such partners
            let beta = isotropic_split(l, a)?;
            let gamma = a.sub(&beta);
            let g = l.norm(&gamma);
            let b = l.norm(&beta);
            let other = Heisenberg::for_lattice(l, &[gamma, beta]).map_err(VertexError::from)?;
            let p = basis_change(eng, &other)?;
            let et11 = named_in_basis(eng, &other, &Named::Et(0, 0))?;
            let et22 = named_in_basis(eng, &other, &Named::Et(1, 1))?;
            let ea = ZhuExpr::vector(e_alpha_vec(eng, a, false));
            let one = rat_int(1);
            let coef = |c1: Rational, c2: Rational| {
                (0..d)
                    .map(|c| match c {
                        0 => Scalar::from_rational(c1.clone()),
                        1 => Scalar::from_rational(c2.clone()),
                        _ => Scalar::zero(),
                    })
                    .collect::<Vec<_>>()
            };
            let half = rat(1, 2);
            Ok(ZhuExpr::PerDirection(PerDirection {
                change: p,
                terms: vec![
                    (vec![Scalar::from_frac(1, 2); d], ea.clone()),
                    (coef(&g / (&one - &g * rat_int(2)), -half.clone()), et11.star(&ea)),
                    (coef(-half.clone(), &b / (&one - &b * rat_int(2))), et22.star(&ea)),
                ],
            }))
        }
        other => heisenberg_named(d, other),
    }
}

/// `beta` in the split `alpha = gamma + beta`, with `beta` a multiple of a negative vector.
fn isotropic_split(l: &crate::lattice::LatticeData, a: &LVector) -> Result<LVector, ZhuError> {
    let bad = rat(-1, 2);
    let first = l.find_negative_partner(a, 6)?;
    let split = |rho: &LVector| rho.scale(&(l.pair(a, rho) / l.norm(rho)));
    let beta = split(&first);
    if l.norm(&beta) != bad {
        return Ok(beta);
    }
    for r in 1..=6 {
        for rho in l.box_vectors(r) {
            if l.norm(&rho).is_negative() && l.pair(a, &rho).is_negative() {
                let beta = split(&rho);
                if l.norm(&beta) != bad {
                    return Ok(beta);
                }
            }
        }
    }
    Err(LatticeError::NoPartner(6).into())
}

fn norm_i64(q: &Rational) -> i64 {
    q.to_integer().to_i64().expect("small norm")
}

/// A top level `M(0)` with its basis and the module it sits in.
#[derive(Clone, Debug)]
pub struct TopSpace<'a> {
    pub label: String,
    pub basis: Vec<FockElement>,
    pub module: Module<'a>,
}

/// Coordinates of `x` in `basis` (exact solve over the union of monomials).
pub fn coordinates(basis: &[FockElement], x: &FockElement) -> Option<Vec<Scalar>> {
    let mut keys: Vec<&Monomial> = basis.iter().flat_map(|b| b.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    if x.terms.keys().any(|k| keys.binary_search(&k).is_err()) {
        return None;
    }
    // single-monomial basis vectors: read coefficients directly
    if basis.iter().all(|b| b.len() == 1) && keys.len() == basis.len() {
        return Some(
            basis
                .iter()
                .map(|b| {
                    let (m, c) = b.terms.iter().next().expect("nonempty");
                    x.terms.get(m).map_or_else(Scalar::zero, |v| v / c)
                })
                .collect(),
        );
    }
    let a: Matrix = keys
        .iter()
        .map(|k| basis.iter().map(|b| b.terms.get(*k).cloned().unwrap_or_else(Scalar::zero)).collect())
        .collect();
    let rhs: Vec<Scalar> = keys.iter().map(|k| x.terms.get(*k).cloned().unwrap_or_else(Scalar::zero)).collect();
    linalg::solve(&a, &rhs)
}

fn vector_matrix(eng: &VertexEngine, v: &FockElement, top: &TopSpace) -> Result<Matrix, ZhuError> {
    let n = top.basis.len();
    let mut m = linalg::zeros(n, n);
    for (j, b) in top.basis.iter().enumerate() {
        let img = eng.zero_mode(v, b, top.module)?;
        let c = coordinates(&top.basis, &img).ok_or(ZhuError::NotInvariant)?;
        for (i, x) in c.into_iter().enumerate() {
            m[i][j] = x;
        }
    }
    Ok(m)
}

/// Matrix of `o(u)` on a top level, columns are images of basis vectors.
pub fn o_action_matrix(eng: &VertexEngine, u: &ZhuExpr, top: &TopSpace) -> Result<Matrix, ZhuError> {
    let n = top.basis.len();
    match u {
        ZhuExpr::Vector(v) => vector_matrix(eng, v, top),
        ZhuExpr::Star(a, b) => Ok(linalg::mat_mul(&o_action_matrix(eng, a, top)?, &o_action_matrix(eng, b, top)?)),
        ZhuExpr::Sum(t) => {
            let mut m = linalg::zeros(n, n);
            for (c, e) in t {
                m = linalg::mat_add(&m, &linalg::mat_scale(&o_action_matrix(eng, e, top)?, c));
            }
            Ok(m)
        }
        ZhuExpr::PerDirection(p) => per_direction_matrix(eng, p, top),
    }
}

fn per_direction_matrix(eng: &VertexEngine, p: &PerDirection, top: &TopSpace) -> Result<Matrix, ZhuError> {
    let d = eng.rank();
    let n = top.basis.len();
    let Module::Twisted(rep) = top.module else { return Err(ZhuError::NotTwistedMinus) };
    let t = rep.dim;
    if n != d * t {
        return Err(ZhuError::NotTwistedMinus);
    }
    for (idx, b) in top.basis.iter().enumerate() {
        let (c, j) = (idx / t, idx % t);
        if *b != FockElement::twisted_ground(j).create(c, 1) {
            return Err(ZhuError::NotTwistedMinus);
        }
    }
    // primed basis vector (c, j) in engine coordinates: column of Q
    let q = linalg::kron(&linalg::transpose(&p.change), &linalg::identity(t));
    let qi = linalg::inverse(&q).ok_or(ZhuError::NotInvariant)?;
    let mut x_primed = linalg::zeros(n, n);
    for (coeffs, expr) in &p.terms {
        let o = linalg::mat_mul(&qi, &linalg::mat_mul(&o_action_matrix(eng, expr, top)?, &q));
        for col in 0..n {
            let c = &coeffs[col / t];
            if c.is_zero() {
                continue;
            }
            for row in 0..n {
                x_primed[row][col] += &(&o[row][col] * c);
            }
        }
    }
    Ok(linalg::mat_mul(&q, &linalg::mat_mul(&x_primed, &qi)))
}

/// Outcome of an `O(V)` membership search.
#[derive(Clone, Debug)]
pub enum Membership {
    Found(MembershipCertificate),
    Inconclusive { cutoff: i64 },
}

#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub target: FockElement,
    pub cutoff: i64,
    pub terms: Vec<(FockElement, FockElement, Scalar)>,
}

impl MembershipCertificate {
    /// Re-evaluates `sum c_i u_i ∘ v_i` and compares with the target.
    pub fn verify(&self, eng: &VertexEngine) -> Result<bool, ZhuError> {
        let mut acc = FockElement::zero(Sector::Untwisted);
        for (u, v, c) in &self.terms {
            acc.add_scaled(&circ(eng, u, v)?, c);
        }
        Ok(acc == self.target)
    }
}

/// Monomial basis of the Heisenberg algebra `M(1)` of rank `d` up to a weight, graded order.
pub fn heisenberg_basis(d: usize, max_weight: i64) -> Vec<FockElement> {
    let vac = Arc::new(Momentum::zero(d));
    let mut out = Vec::new();
    for w in 0..=max_weight.max(-1) {
        for modes in monomials_of_degree(d, 2 * w as u32, false) {
            out.push(FockElement::from_monomial(
                Monomial { modes, ground: Ground::Momentum(vac.clone()) },
                Scalar::one(),
            ));
        }
    }
    out
}

/// Factored span of `{u ∘ v}` over monomials `u, v` of `M(1)` with `wt u + wt v + 1 <= cutoff`.
/// Columns are ordered by total weight, then `u`, then `v`; rows are monomials of weight
/// at most `cutoff`, highest weight first. Reduction happens once, targets are cheap.
pub struct MembershipSolver {
    cutoff: i64,
    basis: Vec<FockElement>,
    pairs: Vec<(usize, usize)>,
    rows: Vec<Monomial>,
    /// `E` with `E A` in reduced echelon form
    transform: Matrix,
    pivots: Vec<usize>,
}

impl MembershipSolver {
    pub fn new(eng: &VertexEngine, cutoff: i64) -> Result<Self, ZhuError> {
        let d = eng.rank();
        let basis = heisenberg_basis(d, cutoff.max(0));
        let wt = |b: &FockElement| b.terms.keys().next().map_or(0, |m| (m.degree2() / 2) as i64);
        let mut pairs: Vec<(i64, usize, usize)> = Vec::new();
        for (i, u) in basis.iter().enumerate() {
            if wt(u) == 0 {
                continue;
            }
            for (j, v) in basis.iter().enumerate() {
                let tot = wt(u) + wt(v) + 1;
                if tot <= cutoff {
                    pairs.push((tot, i, j));
                }
            }
        }
        pairs.sort();
        let cols: Vec<FockElement> =
            pairs.iter().map(|&(_, i, j)| circ(eng, &basis[i], &basis[j])).collect::<Result<_, _>>()?;
        let mut rows: Vec<Monomial> = basis.iter().flat_map(|b| b.terms.keys().cloned()).collect();
        rows.sort_by(|a, b| b.degree2().cmp(&a.degree2()).then_with(|| a.cmp(b)));
        let n = rows.len();
        let m = cols.len();
        let mut aug: Matrix = rows
            .iter()
            .enumerate()
            .map(|(r, k)| {
                let mut row: Vec<Scalar> =
                    cols.iter().map(|c| c.terms.get(k).cloned().unwrap_or_else(Scalar::zero)).collect();
                row.extend((0..n).map(|j| if j == r { Scalar::one() } else { Scalar::zero() }));
                row
            })
            .collect();
        let pivots: Vec<usize> = linalg::rref(&mut aug).into_iter().filter(|&c| c < m).collect();
        let transform = aug.into_iter().map(|r| r[m..].to_vec()).collect();
        Ok(Self { cutoff, basis, pairs: pairs.into_iter().map(|(_, i, j)| (i, j)).collect(), rows, transform, pivots })
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn solve(&self, x: &FockElement) -> Result<Membership, ZhuError> {
        let top_weight =
            x.homogeneous_parts().map_err(VertexError::from)?.keys().max().cloned().unwrap_or_else(Rational::zero);
        if top_weight > rat_int(self.cutoff) {
            return Err(ZhuError::Cutoff { cutoff: self.cutoff, weight: top_weight.to_string() });
        }
        let found = |terms| Membership::Found(MembershipCertificate { target: x.clone(), cutoff: self.cutoff, terms });
        if x.is_zero() {
            return Ok(found(Vec::new()));
        }
        let mut b = Vec::with_capacity(self.rows.len());
        let mut seen = 0;
        for k in &self.rows {
            match x.terms.get(k) {
                Some(c) => {
                    seen += 1;
                    b.push(c.clone());
                }
                None => b.push(Scalar::zero()),
            }
        }
        if seen != x.len() {
            // target leaves the ambient algebra
            return Ok(Membership::Inconclusive { cutoff: self.cutoff });
        }
        let eb: Vec<Scalar> = self
            .transform
            .iter()
            .map(|row| row.iter().zip(&b).filter(|(e, _)| !e.is_zero()).map(|(e, y)| e * y).sum())
            .collect();
        if eb[self.pivots.len()..].iter().any(|v: &Scalar| !v.is_zero()) {
            return Ok(Membership::Inconclusive { cutoff: self.cutoff });
        }
        let terms = self
            .pivots
            .iter()
            .zip(&eb)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&col, c)| {
                let (i, j) = self.pairs[col];
                (self.basis[i].clone(), self.basis[j].clone(), c.clone())
            })
            .collect();
        Ok(found(terms))
    }
}

/// One-shot membership search; see [`MembershipSolver`].
pub fn o_span_membership(eng: &VertexEngine, x: &FockElement, cutoff: i64) -> Result<Membership, ZhuError> {
    MembershipSolver::new(eng, cutoff)?.solve(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TopLevel;
    use crate::group_ext::{irreducible_modules, GroupRep};
    use crate::lattice::LatticeData;

    fn top<'a>(d: usize, desc: TopLevel, module: Module<'a>) -> TopSpace<'a> {
        TopSpace { label: String::new(), basis: crate::fock::top_level_basis(&desc, d), module }
    }

    fn scalar_matrix(n: usize, c: Scalar) -> Matrix {
        linalg::mat_scale(&linalg::identity(n), &c)
    }

    #[test]
    fn unit_and_circ_examples() {
        let eng = VertexEngine::free(1);
        let one = eng.vacuum();
        let h = one.create(0, 2);
        assert_eq!(star(&eng, &one, &h).unwrap(), h);
        assert!(circ(&eng, &one, &h).unwrap().is_zero());
        assert_eq!(circ(&eng, &h, &one).unwrap(), one.create(0, 4).add(&h));
        // u ∘ 1 = (L(-1) + L(0)) u
        let w = eng.virasoro();
        let expect = eng.l_mode(-1, &w, Module::Untwisted).unwrap().add(&w.scale(&Scalar::from_int(2)));
        assert_eq!(circ(&eng, &w, &one).unwrap(), expect);
    }

    #[test]
    fn j_matches_definition() {
        let j = j_vec(1, 0);
        assert_eq!(j.len(), 3);
    }

    #[test]
    fn table_one_twisted_minus_values() {
        let eng = VertexEngine::free(2);
        let rep = GroupRep::trivial();
        let t = top(2, TopLevel::Twisted { t_dim: 1, plus: false }, Module::Twisted(&rep));
        let h = named_element(&eng, &Named::H(0)).unwrap();
        let m = o_action_matrix(&eng, &h, &t).unwrap();
        assert_eq!(m[0][0], Scalar::from_frac(9, 128) - Scalar::from_frac(9, 8));
        assert_eq!(m[1][1], Scalar::from_frac(9, 128));
        let et = named_element(&eng, &Named::Et(0, 1)).unwrap();
        let m = o_action_matrix(&eng, &et, &t).unwrap();
        // E^t_ab h_c(-1/2) = delta_bc h_a(-1/2)
        assert_eq!(m, vec![vec![Scalar::zero(), Scalar::one()], vec![Scalar::zero(), Scalar::zero()]]);
    }

    #[test]
    fn rank_one_projectors() {
        let eng = VertexEngine::free(1);
        let rep = GroupRep::trivial();
        let et = named_element(&eng, &Named::Et(0, 0)).unwrap();
        let eu = named_element(&eng, &Named::Eu(0, 0)).unwrap();
        let tm = top(1, TopLevel::Twisted { t_dim: 1, plus: false }, Module::Twisted(&rep));
        let mm = top(1, TopLevel::HeisenbergMinus, Module::Untwisted);
        assert_eq!(o_action_matrix(&eng, &et, &tm).unwrap(), linalg::identity(1));
        assert_eq!(o_action_matrix(&eng, &eu, &mm).unwrap(), linalg::identity(1));
        assert_eq!(o_action_matrix(&eng, &et, &mm).unwrap(), scalar_matrix(1, Scalar::zero()));
    }

    #[test]
    fn btilde_acts_as_group_element() {
        let l = LatticeData::load(vec![vec![-2, 0], vec![0, -2]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let g = eng.group.clone().unwrap();
        let rep = &irreducible_modules(&g)[1];
        let t = top(2, TopLevel::Twisted { t_dim: rep.dim, plus: false }, Module::Twisted(rep));
        let a = LVector::from_ints(&[1, 1]);
        let bt = named_element(&eng, &Named::BTilde(a.clone())).unwrap();
        let m = o_action_matrix(&eng, &bt, &t).unwrap();
        let expected = linalg::kron(&linalg::identity(2), &rep.e_alpha(&g, &a).unwrap());
        assert_eq!(m, expected);
    }

    #[test]
    fn isotropic_btilde_acts_as_group_element() {
        let l = LatticeData::hyperbolic();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let g = eng.group.clone().unwrap();
        let rep = &irreducible_modules(&g)[0];
        let t = top(2, TopLevel::Twisted { t_dim: rep.dim, plus: false }, Module::Twisted(rep));
        let a = LVector::from_ints(&[1, 0]);
        let bt = named_element(&eng, &Named::BTildeIsotropic(a.clone())).unwrap();
        let m = o_action_matrix(&eng, &bt, &t).unwrap();
        let expected = linalg::kron(&linalg::identity(2), &rep.e_alpha(&g, &a).unwrap());
        assert_eq!(m, expected);
    }

    #[test]
    fn membership_examples() {
        let eng = VertexEngine::free(1);
        let h = eng.vacuum().create(0, 2);
        let x = circ(&eng, &h, &eng.vacuum()).unwrap();
        let Membership::Found(c) = o_span_membership(&eng, &x, 4).unwrap() else { panic!("not found") };
        assert!(c.verify(&eng).unwrap());
        // L(-1)v + L(0)v for v = h(-1)1
        let y = eng.l_mode(-1, &h, Module::Untwisted).unwrap().add(&eng.l_mode(0, &h, Module::Untwisted).unwrap());
        let Membership::Found(c) = o_span_membership(&eng, &y, 4).unwrap() else { panic!("not found") };
        assert!(c.verify(&eng).unwrap());
        let z = FockElement::zero(Sector::Untwisted);
        assert!(matches!(o_span_membership(&eng, &z, 4).unwrap(), Membership::Found(c) if c.terms.is_empty()));
        assert!(matches!(o_span_membership(&eng, &eng.virasoro(), 1), Err(ZhuError::Cutoff { .. })));
    }
}
