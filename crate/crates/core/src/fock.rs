//! Heisenberg Fock spaces: `M(1)`, `M(1, lambda)`, the lattice space `V_L` (and its
//! cosets `V_{L+lambda}`), and the twisted space `M(1)(theta) ⊗ T`.
//!
//! Creation modes are stored against a fixed orthonormal basis `h_1..h_d` of `h`.
//! Mode numbers are doubled so that twisted half-odd modes stay integral.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::lattice::{HVec, LVector, LatticeData, LatticeError};
use crate::linalg::{self, Matrix};
use crate::scalars::{rat, rat_int, Rational, Scalar};

#[derive(Debug, Error)]
pub enum FockError {
    #[error("sector mismatch")]
    SectorMismatch,
    #[error("mode {0}/2 has the wrong parity for this sector")]
    ModeParity(i64),
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("value is not rational")]
    NotRational,
    #[error("no lattice attached to this Heisenberg space")]
    NoLattice,
    #[error("momentum is not in Q ⊗ L")]
    NotRationalMomentum,
    #[error("direction index {0} out of range")]
    Direction(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Untwisted,
    Twisted,
}

/// `h` with a chosen orthonormal basis, optionally attached to a lattice.
#[derive(Clone, Debug)]
pub struct Heisenberg {
    d: usize,
    lattice: Option<LatticeData>,
    basis: Vec<HVec>,
    // alpha_h[i][a] = <alpha_i, h_a>
    alpha_h: Matrix,
    // h coordinates -> lattice coordinates
    h_to_lat: Matrix,
}

impl Heisenberg {
    /// `M(1)` of rank `d` with no lattice; vectors of `h` are given by coordinates.
    pub fn free(d: usize) -> Self {
        Heisenberg {
            d,
            lattice: None,
            basis: (0..d).map(|i| HVec(linalg::identity(d)[i].clone())).collect(),
            alpha_h: linalg::identity(d),
            h_to_lat: linalg::identity(d),
        }
    }

    pub fn for_lattice(lattice: &LatticeData, preferred: &[LVector]) -> Result<Self, FockError> {
        let basis = lattice.orthonormal_basis(preferred)?;
        Ok(Self::with_basis(lattice, basis))
    }

    pub fn with_basis(lattice: &LatticeData, basis: Vec<HVec>) -> Self {
        let d = lattice.rank();
        let alpha_h: Matrix = (0..d)
            .map(|i| {
                let ai = LVector::basis(d, i).to_h();
                basis.iter().map(|h| lattice.pair_h(&ai, h)).collect()
            })
            .collect();
        // A[a][i] = alpha_h[i][a]; h = A c, so c = A^{-1} h
        let a: Matrix = (0..d).map(|r| (0..d).map(|i| alpha_h[i][r].clone()).collect()).collect();
        let cols: Vec<Vec<Scalar>> = (0..d)
            .map(|k| {
                let mut e = vec![Scalar::zero(); d];
                e[k] = Scalar::one();
                linalg::solve(&a, &e).expect("orthonormal basis is invertible")
            })
            .collect();
        let h_to_lat = (0..d).map(|i| (0..d).map(|k| cols[k][i].clone()).collect()).collect();
        Heisenberg { d, lattice: Some(lattice.clone()), basis, alpha_h, h_to_lat }
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn lattice(&self) -> Option<&LatticeData> {
        self.lattice.as_ref()
    }

    pub fn basis(&self) -> &[HVec] {
        &self.basis
    }

    /// Coordinates `<v, h_a>` of a lattice-coordinate vector.
    pub fn lattice_to_h(&self, v: &LVector) -> Vec<Scalar> {
        (0..self.d)
            .map(|a| {
                v.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| self.alpha_h[i][a].scale(c)).sum()
            })
            .collect()
    }

    /// Coordinates of an `HVec` (lattice coordinates over the scalar field).
    pub fn hvec_to_h(&self, v: &HVec) -> Vec<Scalar> {
        (0..self.d).map(|a| v.0.iter().enumerate().map(|(i, c)| c * &self.alpha_h[i][a]).sum()).collect()
    }

    pub fn h_to_lattice(&self, h: &[Scalar]) -> Option<LVector> {
        let mut out = Vec::with_capacity(self.d);
        for row in &self.h_to_lat {
            let c: Scalar = row.iter().zip(h).map(|(x, y)| x * y).sum();
            out.push(c.to_rational()?);
        }
        Some(LVector(out))
    }

    pub fn momentum(&self, v: &LVector) -> Momentum {
        Momentum { h: self.lattice_to_h(v), lat: Some(v.clone()) }
    }

    pub fn momentum_h(&self, h: Vec<Scalar>) -> Momentum {
        let lat = if self.lattice.is_some() { self.h_to_lattice(&h) } else { None };
        Momentum { h, lat }
    }
}

/// Ground momentum of an untwisted monomial; equality and order use `h` only.
#[derive(Clone, Debug)]
pub struct Momentum {
    pub h: Vec<Scalar>,
    pub lat: Option<LVector>,
}

impl Momentum {
    pub fn zero(d: usize) -> Self {
        Momentum { h: vec![Scalar::zero(); d], lat: Some(LVector::zero(d)) }
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(Scalar::is_zero)
    }

    pub fn neg(&self) -> Momentum {
        Momentum { h: self.h.iter().map(|x| -x).collect(), lat: self.lat.as_ref().map(LVector::neg) }
    }

    pub fn add(&self, o: &Momentum) -> Momentum {
        Momentum {
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
            lat: match (&self.lat, &o.lat) {
                (Some(a), Some(b)) => Some(a.add(b)),
                _ => None,
            },
        }
    }

    pub fn norm(&self) -> Scalar {
        self.h.iter().map(|x| x * x).sum()
    }
}

impl PartialEq for Momentum {
    fn eq(&self, o: &Self) -> bool {
        self.h == o.h
    }
}
impl Eq for Momentum {}
impl PartialOrd for Momentum {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Momentum {
    fn cmp(&self, o: &Self) -> Ordering {
        self.h.cmp(&o.h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ground {
    Momentum(Arc<Momentum>),
    /// basis vector `t_j` of the group module
    Twisted(usize),
}

/// Creation mode `h_dir(-n2/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub n2: u32,
    pub dir: u16,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    /// sorted nonincreasing
    pub modes: Vec<Mode>,
    pub ground: Ground,
}

impl Monomial {
    pub fn degree2(&self) -> u32 {
        self.modes.iter().map(|m| m.n2).sum()
    }

    fn insert(&mut self, m: Mode) {
        let pos = self.modes.iter().position(|x| *x < m).unwrap_or(self.modes.len());
        self.modes.insert(pos, m);
    }

    fn count(&self, m: Mode) -> usize {
        self.modes.iter().filter(|x| **x == m).count()
    }

    fn remove_one(&mut self, m: Mode) {
        let pos = self.modes.iter().position(|x| *x == m).expect("mode present");
        self.modes.remove(pos);
    }
}

/// Finite linear combination of monomials in one sector.
#[derive(Clone, PartialEq, Eq)]
pub struct FockElement {
    pub sector: Sector,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl FockElement {
    pub fn zero(sector: Sector) -> Self {
        FockElement { sector, terms: BTreeMap::new() }
    }

    pub fn from_monomial(m: Monomial, c: Scalar) -> Self {
        let sector = match m.ground {
            Ground::Momentum(_) => Sector::Untwisted,
            Ground::Twisted(_) => Sector::Twisted,
        };
        let mut x = Self::zero(sector);
        x.add_term(m, c);
        x
    }

    pub fn vacuum(d: usize) -> Self {
        Self::ground(Arc::new(Momentum::zero(d)))
    }

    /// `e^mu`
    pub fn ground(mu: Arc<Momentum>) -> Self {
        Self::from_monomial(Monomial { modes: Vec::new(), ground: Ground::Momentum(mu) }, Scalar::one())
    }

    /// `t_j`
    pub fn twisted_ground(j: usize) -> Self {
        Self::from_monomial(Monomial { modes: Vec::new(), ground: Ground::Twisted(j) }, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &FockElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &o.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn add(&self, o: &FockElement) -> FockElement {
        let mut r = self.clone();
        r.add_scaled(o, &Scalar::one());
        r
    }

    pub fn sub(&self, o: &FockElement) -> FockElement {
        let mut r = self.clone();
        r.add_scaled(o, &Scalar::from_int(-1));
        r
    }

    pub fn scale(&self, c: &Scalar) -> FockElement {
        if c.is_zero() {
            return FockElement::zero(self.sector);
        }
        FockElement { sector: self.sector, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn neg(&self) -> FockElement {
        self.scale(&Scalar::from_int(-1))
    }

    /// Applies `h_dir(-n2/2)` (creation) to every term.
    pub fn create(&self, dir: usize, n2: u32) -> FockElement {
        let mode = Mode { n2, dir: dir as u16 };
        let mut out = FockElement::zero(self.sector);
        for (m, c) in &self.terms {
            let mut m = m.clone();
            m.insert(mode);
            out.terms.insert(m, c.clone());
        }
        out
    }

    /// Applies `h_dir(n2/2)`, `n2 > 0`: `[h_a(n), h_a(-n)] = n`.
    pub fn annihilate(&self, dir: usize, n2: u32) -> FockElement {
        let mode = Mode { n2, dir: dir as u16 };
        let mut out = FockElement::zero(self.sector);
        for (m, c) in &self.terms {
            let k = m.count(mode);
            if k == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.remove_one(mode);
            out.add_term(m2, c.scale(&rat(k as i64 * n2 as i64, 2)));
        }
        out
    }

    /// Zero mode `h_dir(0)` on untwisted terms: multiplication by `<h_dir, mu>`.
    pub fn zero_mode(&self, dir: usize) -> FockElement {
        let mut out = FockElement::zero(self.sector);
        for (m, c) in &self.terms {
            if let Ground::Momentum(mu) = &m.ground {
                out.add_term(m.clone(), c * &mu.h[dir]);
            }
        }
        out
    }

    /// Splits by ground label.
    pub fn by_ground(&self) -> BTreeMap<Ground, FockElement> {
        let mut out: BTreeMap<Ground, FockElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.ground.clone())
                .or_insert_with(|| FockElement::zero(self.sector))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Largest doubled Heisenberg degree among terms.
    pub fn max_degree2(&self) -> u32 {
        self.terms.keys().map(Monomial::degree2).max().unwrap_or(0)
    }

    /// Splits into homogeneous components keyed by weight.
    pub fn homogeneous_parts(&self) -> Result<BTreeMap<Rational, FockElement>, FockError> {
        let mut out: BTreeMap<Rational, FockElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            let w = monomial_weight(m)?;
            out.entry(w).or_insert_with(|| FockElement::zero(self.sector)).terms.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn to_ascii(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut s = String::new();
            for md in &m.modes {
                if md.n2 % 2 == 0 {
                    s.push_str(&format!("h{}(-{})", md.dir + 1, md.n2 / 2));
                } else {
                    s.push_str(&format!("h{}(-{}/2)", md.dir + 1, md.n2));
                }
            }
            match &m.ground {
                Ground::Momentum(mu) if mu.is_zero() => s.push('1'),
                Ground::Momentum(mu) => {
                    let v: Vec<String> = mu.h.iter().map(Scalar::to_ascii).collect();
                    s.push_str(&format!("e^[{}]", v.join(",")));
                }
                Ground::Twisted(j) => s.push_str(&format!("t{}", j + 1)),
            }
            parts.push(format!("({})*{}", c.to_ascii(), s));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for FockElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

fn check_parity(sector: Sector, n2: i64) -> Result<(), FockError> {
    let odd = n2.rem_euclid(2) == 1;
    match sector {
        Sector::Untwisted if odd => Err(FockError::ModeParity(n2)),
        Sector::Twisted if !odd => Err(FockError::ModeParity(n2)),
        _ => Ok(()),
    }
}

/// `h_dir(n2/2) x` for a basis direction.
pub fn basis_mode_action(dir: usize, n2: i64, x: &FockElement) -> Result<FockElement, FockError> {
    check_parity(x.sector, n2)?;
    Ok(match n2.cmp(&0) {
        Ordering::Less => x.create(dir, (-n2) as u32),
        Ordering::Greater => x.annihilate(dir, n2 as u32),
        Ordering::Equal => x.zero_mode(dir),
    })
}

/// `h(n2/2) x` for `h` given by orthonormal-basis coordinates.
pub fn mode_action(h: &[Scalar], n2: i64, x: &FockElement) -> Result<FockElement, FockError> {
    check_parity(x.sector, n2)?;
    let mut out = FockElement::zero(x.sector);
    for (a, c) in h.iter().enumerate() {
        if !c.is_zero() {
            out.add_scaled(&basis_mode_action(a, n2, x)?, c);
        }
    }
    Ok(out)
}

/// `theta`: sign `(-1)^{#modes}`, `e^mu -> e^{-mu}`, `t -> t`.
pub fn theta(x: &FockElement) -> FockElement {
    let mut out = FockElement::zero(x.sector);
    for (m, c) in &x.terms {
        let ground = match &m.ground {
            Ground::Momentum(mu) => Ground::Momentum(Arc::new(mu.neg())),
            g => g.clone(),
        };
        let c = if m.modes.len() % 2 == 1 { -c } else { c.clone() };
        out.add_term(Monomial { modes: m.modes.clone(), ground }, c);
    }
    out
}

/// `(x ± theta x)/2`
pub fn project_eigen(x: &FockElement, plus: bool) -> FockElement {
    let t = theta(x);
    let s = if plus { x.add(&t) } else { x.sub(&t) };
    s.scale(&Scalar::from_frac(1, 2))
}

pub fn monomial_weight(m: &Monomial) -> Result<Rational, FockError> {
    let deg = rat(m.degree2() as i64, 2);
    Ok(match &m.ground {
        Ground::Momentum(mu) => {
            let n = mu.norm().to_rational().ok_or(FockError::NotRational)?;
            deg + n / rat_int(2)
        }
        // the d/16 shift is added by `grade`, which knows d
        Ground::Twisted(_) => deg,
    })
}

/// Weight of a homogeneous element; twisted weights include `d/16`.
pub fn grade(x: &FockElement, d: usize) -> Result<Rational, FockError> {
    let mut w: Option<Rational> = None;
    for m in x.terms.keys() {
        let mut wm = monomial_weight(m)?;
        if x.sector == Sector::Twisted {
            wm += rat(d as i64, 16);
        }
        match &w {
            None => w = Some(wm),
            Some(v) if *v != wm => return Err(FockError::Inhomogeneous),
            _ => {}
        }
    }
    Ok(w.unwrap_or_else(Rational::zero))
}

/// Rewrites modes given against another orthonormal basis: `h'_c(-n) = sum_e p[c][e] h_e(-n)`.
pub fn change_basis(x: &FockElement, p: &Matrix) -> FockElement {
    let mut out = FockElement::zero(x.sector);
    for (m, c) in &x.terms {
        let mut partial: Vec<(Vec<Mode>, Scalar)> = vec![(Vec::new(), c.clone())];
        for md in &m.modes {
            let mut next = Vec::new();
            for (modes, coeff) in &partial {
                for (e, pe) in p[md.dir as usize].iter().enumerate() {
                    if pe.is_zero() {
                        continue;
                    }
                    let mut mm = modes.clone();
                    let new = Mode { n2: md.n2, dir: e as u16 };
                    let pos = mm.iter().position(|x| *x < new).unwrap_or(mm.len());
                    mm.insert(pos, new);
                    next.push((mm, coeff * pe));
                }
            }
            partial = next;
        }
        for (modes, coeff) in partial {
            out.add_term(Monomial { modes, ground: m.ground.clone() }, coeff);
        }
    }
    out
}

/// Lowest-weight spaces of the modules appearing in the tables.
#[derive(Clone, Debug)]
pub enum TopLevel {
    /// `M(1)^+`, `V_L^+`: `{1}`
    Vacuum,
    /// `M(1)^-`: `{h_c(-1) 1}`
    HeisenbergMinus,
    /// `M(1, lambda)`: `{e^lambda}`
    Momentum(Arc<Momentum>),
    /// `V_L^{T,+}(0) = {t_j}` and `V_L^{T,-}(0) = {h_c(-1/2) t_j}`, `j` fastest
    Twisted { t_dim: usize, plus: bool },
    /// any explicit basis (lattice cosets)
    Custom(Vec<FockElement>),
}

pub fn top_level_basis(desc: &TopLevel, d: usize) -> Vec<FockElement> {
    match desc {
        TopLevel::Vacuum => vec![FockElement::vacuum(d)],
        TopLevel::HeisenbergMinus => (0..d).map(|c| FockElement::vacuum(d).create(c, 2)).collect(),
        TopLevel::Momentum(mu) => vec![FockElement::ground(mu.clone())],
        TopLevel::Twisted { t_dim, plus: true } => (0..*t_dim).map(FockElement::twisted_ground).collect(),
        TopLevel::Twisted { t_dim, plus: false } => {
            (0..d).flat_map(|c| (0..*t_dim).map(move |j| FockElement::twisted_ground(j).create(c, 1))).collect()
        }
        TopLevel::Custom(b) => b.clone(),
    }
}

/// Monomials `h_{a1}(-n1)...h_{ar}(-nr) 1` of a given doubled degree in `M(1)` (or twisted
/// with odd modes), nonincreasing.
pub fn monomials_of_degree(d: usize, deg2: u32, twisted: bool) -> Vec<Vec<Mode>> {
    fn rec(d: usize, left: u32, max: Mode, twisted: bool, cur: &mut Vec<Mode>, out: &mut Vec<Vec<Mode>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        let mut n2 = left.min(max.n2);
        loop {
            let valid = if twisted { n2 % 2 == 1 } else { n2.is_multiple_of(2) };
            if valid && n2 > 0 {
                for dir in (0..d).rev() {
                    let m = Mode { n2, dir: dir as u16 };
                    if m > max {
                        continue;
                    }
                    cur.push(m);
                    rec(d, left - n2, m, twisted, cur, out);
                    cur.pop();
                }
            }
            if n2 == 0 {
                break;
            }
            n2 -= 1;
        }
    }
    let mut out = Vec::new();
    rec(d, deg2, Mode { n2: u32::MAX, dir: u16::MAX }, twisted, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(c: &[i64]) -> Vec<Scalar> {
        c.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn heisenberg_commutator_examples() {
        let v = FockElement::vacuum(1);
        let x = mode_action(&h(&[3]), -2, &v).unwrap();
        let y = mode_action(&h(&[3]), 2, &x).unwrap();
        assert_eq!(y, v.scale(&Scalar::from_int(9)));
        // twisted: h(1/2) h(-1/2)^2 1 = 2 * (1/2) <h,h> h(-1/2) 1
        let t = FockElement::twisted_ground(0);
        let x = mode_action(&h(&[1]), -1, &mode_action(&h(&[1]), -1, &t).unwrap()).unwrap();
        let y = mode_action(&h(&[1]), 1, &x).unwrap();
        assert_eq!(y, t.create(0, 1));
        assert!(mode_action(&h(&[1]), 2, &v).unwrap().is_zero());
        assert!(matches!(mode_action(&h(&[1]), 2, &t), Err(FockError::ModeParity(2))));
    }

    #[test]
    fn zero_mode_on_momentum() {
        let hz = Heisenberg::free(2);
        let mu = Arc::new(hz.momentum_h(vec![Scalar::from_frac(1, 3), Scalar::from_int(2)]));
        let e = FockElement::ground(mu);
        let r = mode_action(&h(&[3, 1]), 0, &e).unwrap();
        assert_eq!(r, e.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn theta_and_projection() {
        let l = LatticeData::load(vec![vec![-2]]).unwrap();
        let hz = Heisenberg::for_lattice(&l, &[]).unwrap();
        let ea = FockElement::ground(Arc::new(hz.momentum(&LVector::from_ints(&[1]))));
        let eb = FockElement::ground(Arc::new(hz.momentum(&LVector::from_ints(&[-1]))));
        assert_eq!(theta(&ea), eb);
        assert_eq!(project_eigen(&ea, true), ea.add(&eb).scale(&Scalar::from_frac(1, 2)));
        let v = FockElement::vacuum(1).create(0, 2);
        assert!(project_eigen(&v, true).is_zero());
        assert_eq!(theta(&v), v.neg());
        assert_eq!(grade(&ea, 1).unwrap(), rat_int(-1));
    }

    #[test]
    fn grading() {
        let v = FockElement::vacuum(2).create(0, 2).create(1, 4);
        assert_eq!(grade(&v, 2).unwrap(), rat_int(3));
        assert_eq!(grade(&FockElement::twisted_ground(0), 1).unwrap(), rat(1, 16));
        let mixed = v.add(&FockElement::vacuum(2));
        assert!(matches!(grade(&mixed, 2), Err(FockError::Inhomogeneous)));
    }

    #[test]
    fn top_levels() {
        let b = top_level_basis(&TopLevel::Twisted { t_dim: 1, plus: false }, 2);
        assert_eq!(b, vec![FockElement::twisted_ground(0).create(0, 1), FockElement::twisted_ground(0).create(1, 1)]);
        assert_eq!(top_level_basis(&TopLevel::Vacuum, 3), vec![FockElement::vacuum(3)]);
    }

    #[test]
    fn lattice_coordinates_round_trip() {
        let l = LatticeData::hyperbolic();
        let hz = Heisenberg::for_lattice(&l, &[]).unwrap();
        let v = LVector::from_ints(&[2, -3]);
        let hv = hz.lattice_to_h(&v);
        assert_eq!(hz.h_to_lattice(&hv), Some(v.clone()));
        let n: Scalar = hv.iter().map(|x| x * x).sum();
        assert_eq!(n.to_rational(), Some(l.norm(&v)));
    }

    #[test]
    fn monomial_enumeration_counts() {
        // partitions of 4 in one colour: 5; twisted degree 2 (= 4 half units): (3/2,1/2)? no,
        // odd parts of 4: 3+1, 1+1+1+1
        assert_eq!(monomials_of_degree(1, 8, false).len(), 5);
        assert_eq!(monomials_of_degree(1, 4, true).len(), 2);
        assert_eq!(monomials_of_degree(2, 2, false).len(), 2);
    }
}
