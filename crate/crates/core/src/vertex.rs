//! Modes of vertex operators on untwisted and `theta`-twisted modules.
//!
//! For a monomial `v = h_{a1}(-n1)...h_{ar}(-nr) e^alpha` the normally ordered field is
//! expanded as a sum over which factors sit on the annihilation side; only finitely many
//! annihilators act on a fixed `w`, and the creation side is read off at one power of `z`.
//! All `z` exponents are tracked doubled so that twisted half-integers stay integral.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::fock::{
    basis_mode_action, grade, mode_action, FockElement, FockError, Ground, Heisenberg, Mode, Momentum, Sector,
};
use crate::group_ext::{Cocycle, GroupError, GroupRep, QuotientGroup};
use crate::lattice::{LVector, LatticeData};
use crate::scalars::{rat, rat_int, Rational, Scalar};

#[derive(Debug, Error)]
pub enum VertexError {
    #[error("sector mismatch")]
    SectorMismatch,
    #[error("mode {0} has the wrong parity for this vector")]
    ModeParity(Rational),
    #[error("vector is not homogeneous")]
    Inhomogeneous,
    #[error("lattice data required for e^alpha")]
    NoLattice,
    #[error("momentum pairing {0} is not a half-integer")]
    Exponent(String),
    #[error("Delta-correction table exhausted at total degree {0}")]
    DeltaTable(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Which module the modes act on.
#[derive(Clone, Copy, Debug)]
pub enum Module<'a> {
    Untwisted,
    Twisted(&'a GroupRep),
}

/// Falling-factorial binomial `C(x, k)` at rational `x`.
pub fn binom(x: &Rational, k: u32) -> Rational {
    let mut num = Rational::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= x - rat_int(i as i64);
        den *= BigInt::from(i + 1);
    }
    num / Rational::from_integer(den)
}

pub fn pow2(k: i64) -> Rational {
    let p = Rational::from_integer(BigInt::from(2).pow(k.unsigned_abs() as u32));
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

const DELTA_DEGREE: usize = 24;

/// Coefficients `c_mn` of `-log(((1+x)^{1/2} + (1+y)^{1/2})/2)`, total degree `<= 24`.
pub fn delta_coefficients() -> &'static Vec<Vec<Rational>> {
    static TABLE: OnceLock<Vec<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = DELTA_DEGREE;
        let zero = || vec![vec![Rational::zero(); n + 1]; n + 1];
        // g = ((1+x)^{1/2} - 1 + (1+y)^{1/2} - 1)/2
        let mut g = zero();
        let half = rat(1, 2);
        for k in 1..=n {
            let b = binom(&half, k as u32) * &half;
            g[k][0] += &b;
            g[0][k] += &b;
        }
        let mul = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| {
            let mut c = zero();
            for i in 0..=n {
                for j in 0..=(n - i) {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    for k in 0..=(n - i - j) {
                        for l in 0..=(n - i - j - k) {
                            if b[k][l].is_zero() {
                                continue;
                            }
                            c[i + k][j + l] += &a[i][j] * &b[k][l];
                        }
                    }
                }
            }
            c
        };
        // -log(1+g) = sum_{j>=1} (-1)^j g^j / j
        let mut out = zero();
        let mut p = g.clone();
        for j in 1..=n {
            let s = if j % 2 == 0 { rat(1, j as i64) } else { rat(-1, j as i64) };
            for a in 0..=n {
                for b in 0..=(n - a) {
                    if !p[a][b].is_zero() {
                        out[a][b] += &p[a][b] * &s;
                    }
                }
            }
            p = mul(&p, &g);
        }
        out
    })
}

type CPoly = BTreeMap<Vec<Mode>, Scalar>;

fn insert_mode(modes: &mut Vec<Mode>, m: Mode) {
    let pos = modes.iter().position(|x| *x < m).unwrap_or(modes.len());
    modes.insert(pos, m);
}

fn apply_creation(poly: &CPoly, y: &FockElement) -> FockElement {
    let mut out = FockElement::zero(y.sector);
    for (pm, pc) in poly {
        for (m, c) in &y.terms {
            let mut m = m.clone();
            for md in pm {
                insert_mode(&mut m.modes, *md);
            }
            out.add_term(m, pc * c);
        }
    }
    out
}

/// Coefficients of `exp(sum_n alpha(-n)/n z^n)` by doubled degree, cached per momentum.
#[derive(Default)]
struct CreationCache {
    series: BTreeMap<(Vec<Scalar>, bool), Vec<CPoly>>,
}

impl CreationCache {
    fn get(&mut self, alpha: &[Scalar], twisted: bool, d2: usize) -> &CPoly {
        let s = self.series.entry((alpha.to_vec(), twisted)).or_insert_with(|| {
            let mut one = CPoly::new();
            one.insert(Vec::new(), Scalar::one());
            vec![one]
        });
        while s.len() <= d2 {
            let big_d = s.len();
            let mut next = CPoly::new();
            // D r_D = sum_n alpha(-n) r_{D-n}
            for n2 in 1..=big_d {
                let valid = if twisted { n2 % 2 == 1 } else { n2 % 2 == 0 };
                if !valid {
                    continue;
                }
                for (pm, pc) in &s[big_d - n2] {
                    for (a, ca) in alpha.iter().enumerate() {
                        if ca.is_zero() {
                            continue;
                        }
                        let mut m = pm.clone();
                        insert_mode(&mut m, Mode { n2: n2 as u32, dir: a as u16 });
                        let e = next.entry(m).or_insert_with(Scalar::zero);
                        *e += &(pc * ca);
                    }
                }
            }
            let inv = rat(2, big_d as i64);
            next.retain(|_, c| {
                *c = c.scale(&inv);
                !c.is_zero()
            });
            s.push(next);
        }
        &s[d2]
    }
}

/// The vertex algebra context: Heisenberg data, cocycle and quotient group.
#[derive(Clone, Debug)]
pub struct VertexEngine {
    pub heis: Heisenberg,
    pub cocycle: Option<Cocycle>,
    pub group: Option<QuotientGroup>,
}

impl VertexEngine {
    pub fn free(d: usize) -> Self {
        VertexEngine { heis: Heisenberg::free(d), cocycle: None, group: None }
    }

    pub fn lattice(l: &LatticeData, preferred: &[LVector]) -> Result<Self, VertexError> {
        let heis = Heisenberg::for_lattice(l, preferred)?;
        Ok(Self::with_heisenberg(heis))
    }

    pub fn with_heisenberg(heis: Heisenberg) -> Self {
        let (cocycle, group) = match heis.lattice() {
            Some(l) => {
                let e = Cocycle::new(l);
                let g = QuotientGroup::build(l, &e).ok();
                (Some(e), g)
            }
            None => (None, None),
        };
        VertexEngine { heis, cocycle, group }
    }

    pub fn rank(&self) -> usize {
        self.heis.rank()
    }

    pub fn vacuum(&self) -> FockElement {
        FockElement::vacuum(self.rank())
    }

    /// `e^v` for a lattice (or rational) vector.
    pub fn e(&self, v: &LVector) -> FockElement {
        FockElement::ground(Arc::new(self.heis.momentum(v)))
    }

    pub fn weight(&self, x: &FockElement) -> Result<Rational, VertexError> {
        Ok(grade(x, self.rank())?)
    }

    /// `v_n w` for rational `n`.
    pub fn mode(
        &self,
        v: &FockElement,
        n: &Rational,
        w: &FockElement,
        module: Module,
    ) -> Result<FockElement, VertexError> {
        match module {
            Module::Untwisted => self.untwisted_mode(v, n, w),
            Module::Twisted(rep) => self.twisted_mode(v, n, w, rep),
        }
    }

    pub fn untwisted_mode(&self, v: &FockElement, n: &Rational, w: &FockElement) -> Result<FockElement, VertexError> {
        if v.sector != Sector::Untwisted || w.sector != Sector::Untwisted {
            return Err(VertexError::SectorMismatch);
        }
        let target2 = doubled(&(-n - rat_int(1))).ok_or_else(|| VertexError::ModeParity(n.clone()))?;
        let mut cache = CreationCache::default();
        let mut out = FockElement::zero(Sector::Untwisted);
        for (m, c) in &v.terms {
            let r = self.field_coefficient(&m.modes, &m.ground, w, target2, Module::Untwisted, &mut cache)?;
            out.add_scaled(&r, c);
        }
        self.debug_grading(v, n, w, &out);
        Ok(out)
    }

    pub fn twisted_mode(
        &self,
        v: &FockElement,
        n: &Rational,
        w: &FockElement,
        rep: &GroupRep,
    ) -> Result<FockElement, VertexError> {
        if v.sector != Sector::Untwisted || w.sector != Sector::Twisted {
            return Err(VertexError::SectorMismatch);
        }
        let target2 = doubled(&(-n - rat_int(1))).ok_or_else(|| VertexError::ModeParity(n.clone()))?;
        let mut cache = CreationCache::default();
        let mut out = FockElement::zero(Sector::Twisted);
        for (shift, vj) in self.delta_correction(v)? {
            // e^{Delta_z} v = sum_j v_j z^{shift}: need coefficient z^{target - shift} of W(v_j, z)
            for (m, c) in &vj.terms {
                let r = self.field_coefficient(
                    &m.modes,
                    &m.ground,
                    w,
                    target2 - 2 * shift,
                    Module::Twisted(rep),
                    &mut cache,
                )?;
                out.add_scaled(&r, c);
            }
        }
        self.debug_grading(v, n, w, &out);
        Ok(out)
    }

    /// `o(v) w = v_{wt v - 1} w`.
    pub fn zero_mode(&self, v: &FockElement, w: &FockElement, module: Module) -> Result<FockElement, VertexError> {
        let mut out = FockElement::zero(w.sector);
        for (wt, part) in v.homogeneous_parts()? {
            let r = self.mode(&part, &(wt - rat_int(1)), w, module)?;
            out.add_scaled(&r, &Scalar::one());
        }
        Ok(out)
    }

    /// `e^{Delta_z} v` as a map from the power of `z` (always `<= 0`) to vectors.
    pub fn delta_correction(&self, v: &FockElement) -> Result<BTreeMap<i64, FockElement>, VertexError> {
        let table = delta_coefficients();
        let d = self.rank();
        let mut total: BTreeMap<i64, FockElement> = BTreeMap::new();
        let mut term: BTreeMap<i64, FockElement> = BTreeMap::new();
        term.insert(0, v.clone());
        total.insert(0, v.clone());
        let mut k = 1i64;
        while !term.is_empty() {
            let mut next: BTreeMap<i64, FockElement> = BTreeMap::new();
            for (p, x) in &term {
                let deg = (x.max_degree2() / 2) as usize;
                if deg > DELTA_DEGREE {
                    return Err(VertexError::DeltaTable(deg));
                }
                for mm in 0..=deg {
                    for nn in 0..=(deg - mm) {
                        if mm + nn == 0 || table[mm][nn].is_zero() {
                            continue;
                        }
                        let c = Scalar::from_rational(&table[mm][nn] / rat_int(k));
                        let mut acc = FockElement::zero(x.sector);
                        for a in 0..d {
                            let y = basis_mode_action(a, 2 * nn as i64, x)?;
                            if y.is_zero() {
                                continue;
                            }
                            let y = basis_mode_action(a, 2 * mm as i64, &y)?;
                            acc.add_scaled(&y, &Scalar::one());
                        }
                        if !acc.is_zero() {
                            next.entry(p - (mm + nn) as i64)
                                .or_insert_with(|| FockElement::zero(x.sector))
                                .add_scaled(&acc, &c);
                        }
                    }
                }
            }
            next.retain(|_, x| !x.is_zero());
            for (p, x) in &next {
                total.entry(*p).or_insert_with(|| FockElement::zero(x.sector)).add_scaled(x, &Scalar::one());
            }
            total.retain(|_, x| !x.is_zero());
            term = next;
            k += 1;
        }
        Ok(total)
    }

    /// Coefficient at doubled `z`-power `target2` of `Y(v_mono, z) w` (untwisted) or
    /// `W(v_mono, z) w` (twisted, without the Delta correction).
    fn field_coefficient(
        &self,
        modes: &[Mode],
        vground: &Ground,
        w: &FockElement,
        target2: i64,
        module: Module,
        cache: &mut CreationCache,
    ) -> Result<FockElement, VertexError> {
        let twisted = matches!(module, Module::Twisted(_));
        let alpha = match vground {
            Ground::Momentum(a) => a.clone(),
            Ground::Twisted(_) => return Err(VertexError::SectorMismatch),
        };
        let r = modes.len();
        let mut out = FockElement::zero(w.sector);
        for (ground, wg) in w.by_ground() {
            let (ew, shift2) = self.e_alpha(&alpha, &ground, module)?;
            for s in 0u32..(1 << r) {
                let mut ann: BTreeMap<i64, FockElement> = BTreeMap::new();
                ann.insert(0, wg.clone());
                for (i, md) in modes.iter().enumerate() {
                    if s >> i & 1 == 0 {
                        continue;
                    }
                    let n = (md.n2 / 2);
                    let mut next: BTreeMap<i64, FockElement> = BTreeMap::new();
                    for (e, x) in &ann {
                        let maxd = x.max_degree2() as i64;
                        let mut m2 = if twisted { 1 } else { 0 };
                        while m2 <= maxd {
                            let c = binom(&(rat(-m2, 2) - rat_int(1)), n - 1);
                            if !c.is_zero() {
                                let y = basis_mode_action(md.dir as usize, m2, x)?;
                                if !y.is_zero() {
                                    next.entry(e - m2 - 2 * n as i64)
                                        .or_insert_with(|| FockElement::zero(x.sector))
                                        .add_scaled(&y, &Scalar::from_rational(c));
                                }
                            }
                            m2 += 2;
                        }
                    }
                    next.retain(|_, x| !x.is_zero());
                    ann = next;
                }
                if !alpha.is_zero() {
                    let mut next: BTreeMap<i64, FockElement> = BTreeMap::new();
                    for (e, x) in &ann {
                        for (d2, q) in e_plus_series(&alpha.h, x, twisted)? {
                            next.entry(e - d2)
                                .or_insert_with(|| FockElement::zero(x.sector))
                                .add_scaled(&q, &Scalar::one());
                        }
                    }
                    next.retain(|_, x| !x.is_zero());
                    ann = next;
                }
                let comp: Vec<Mode> =
                    modes.iter().enumerate().filter(|(i, _)| s >> i & 1 == 0).map(|(_, m)| *m).collect();
                for (e, y) in ann {
                    let x2 = target2 - e - shift2;
                    let ey = ew(&y);
                    if ey.is_zero() {
                        continue;
                    }
                    let created = self.creation_side(&comp, &alpha.h, x2, twisted, &ey, cache);
                    out.add_scaled(&created, &Scalar::one());
                }
            }
        }
        Ok(out)
    }

    /// Action of `e_alpha z^alpha` (untwisted) or `2^{-<a,a>} e_alpha z^{-<a,a>/2}` (twisted) on
    /// vectors over one ground: returns the map on vectors and the doubled `z` shift.
    #[allow(clippy::type_complexity)]
    fn e_alpha<'a>(
        &'a self,
        alpha: &Arc<Momentum>,
        ground: &Ground,
        module: Module<'a>,
    ) -> Result<(Box<dyn Fn(&FockElement) -> FockElement + 'a>, i64), VertexError> {
        match (module, ground) {
            (Module::Untwisted, Ground::Momentum(mu)) => {
                if alpha.is_zero() {
                    return Ok((Box::new(|y: &FockElement| y.clone()), 0));
                }
                let pairing: Scalar = alpha.h.iter().zip(&mu.h).map(|(a, b)| a * b).sum();
                let shift2 = pairing
                    .to_rational()
                    .and_then(|q| doubled(&q))
                    .ok_or_else(|| VertexError::Exponent(pairing.to_ascii()))?;
                let eps = self.cocycle.as_ref().ok_or(VertexError::NoLattice)?;
                let a_lat = alpha.lat.as_ref().ok_or(VertexError::NoLattice)?;
                let m_lat = mu.lat.as_ref().ok_or(VertexError::NoLattice)?;
                let sign = eps.epsilon(a_lat, &m_lat.sub(&m_lat.coset_rep()))?;
                let new_ground = Ground::Momentum(Arc::new(alpha.as_ref().add(mu)));
                let sign = Scalar::from_int(sign as i64);
                Ok((
                    Box::new(move |y: &FockElement| {
                        let mut out = FockElement::zero(y.sector);
                        for (m, c) in &y.terms {
                            let mut m = m.clone();
                            m.ground = new_ground.clone();
                            out.add_term(m, c * &sign);
                        }
                        out
                    }),
                    shift2,
                ))
            }
            (Module::Twisted(rep), Ground::Twisted(_)) => {
                if alpha.is_zero() {
                    return Ok((Box::new(|y: &FockElement| y.clone()), 0));
                }
                let norm = alpha.norm().to_rational().ok_or(VertexError::Exponent(alpha.norm().to_ascii()))?;
                if !norm.is_integer() {
                    return Err(VertexError::Exponent(norm.to_string()));
                }
                let norm = norm.to_integer().to_i64().expect("small norm");
                let group = self.group.as_ref().ok_or(VertexError::NoLattice)?;
                let a_lat = alpha.lat.as_ref().ok_or(VertexError::NoLattice)?;
                let mat = rep.e_alpha(group, a_lat)?;
                let factor = Scalar::from_rational(pow2(-norm));
                Ok((
                    Box::new(move |y: &FockElement| {
                        let mut out = FockElement::zero(y.sector);
                        for (m, c) in &y.terms {
                            let Ground::Twisted(j) = m.ground else { continue };
                            for (i, row) in mat.iter().enumerate() {
                                if row[j].is_zero() {
                                    continue;
                                }
                                let mut m2 = m.clone();
                                m2.ground = Ground::Twisted(i);
                                out.add_term(m2, &(c * &row[j]) * &factor);
                            }
                        }
                        out
                    }),
                    -norm,
                ))
            }
            _ => Err(VertexError::SectorMismatch),
        }
    }

    /// Coefficient at doubled power `x2` of `prod_{i in comp} C_i(z) E^-(z)` applied to `y`.
    fn creation_side(
        &self,
        comp: &[Mode],
        alpha: &[Scalar],
        x2: i64,
        twisted: bool,
        y: &FockElement,
        cache: &mut CreationCache,
    ) -> FockElement {
        // minimal doubled exponent of each remaining factor
        let mins: Vec<i64> = comp.iter().map(|m| if twisted { 1 - m.n2 as i64 } else { 0 }).collect();
        let mut suffix = vec![0i64; comp.len() + 1];
        for i in (0..comp.len()).rev() {
            suffix[i] = suffix[i + 1] + mins[i];
        }
        let alpha_zero = alpha.iter().all(Scalar::is_zero);
        let mut out = FockElement::zero(y.sector);
        #[allow(clippy::too_many_arguments)]
        fn rec(
            idx: usize,
            left: i64,
            comp: &[Mode],
            suffix: &[i64],
            twisted: bool,
            alpha: &[Scalar],
            alpha_zero: bool,
            y: FockElement,
            cache: &mut CreationCache,
            out: &mut FockElement,
        ) {
            if idx == comp.len() {
                if left < 0 {
                    return;
                }
                if alpha_zero {
                    if left == 0 {
                        out.add_scaled(&y, &Scalar::one());
                    }
                    return;
                }
                if !twisted && left % 2 != 0 {
                    return;
                }
                let poly = cache.get(alpha, twisted, left as usize);
                out.add_scaled(&apply_creation(poly, &y), &Scalar::one());
                return;
            }
            let md = comp[idx];
            let n2 = md.n2 as i64;
            let n = (md.n2 / 2);
            let mut j2 = if twisted { 1 } else { n2 };
            // exponent j - n; remaining must cover the later minima
            while left - (j2 - n2) >= suffix[idx + 1] {
                let c = binom(&(rat(j2, 2) - rat_int(1)), n - 1);
                if !c.is_zero() {
                    let y2 = y.create(md.dir as usize, j2 as u32).scale(&Scalar::from_rational(c));
                    rec(idx + 1, left - (j2 - n2), comp, suffix, twisted, alpha, alpha_zero, y2, cache, out);
                }
                j2 += 2;
            }
        }
        rec(0, x2, comp, &suffix, twisted, alpha, alpha_zero, y.clone(), cache, &mut out);
        out
    }

    fn debug_grading(&self, v: &FockElement, n: &Rational, w: &FockElement, out: &FockElement) {
        if cfg!(debug_assertions) && !out.is_zero() {
            if let (Ok(wv), Ok(ww)) = (self.weight(v), self.weight(w)) {
                let expected = wv + ww - n - rat_int(1);
                let got = self.weight(out).expect("mode output must be homogeneous");
                assert_eq!(got, expected, "grading law v_n M(k) in M(k + wt v - n - 1)");
            }
        }
    }

    /// Upper bound for `i` with `u_i v != 0`.
    pub fn product_bound(&self, u: &FockElement, v: &FockElement) -> Result<Option<i64>, VertexError> {
        let mut best: Option<i64> = None;
        for mu in u.terms.keys() {
            for mv in v.terms.keys() {
                let (Ground::Momentum(a), Ground::Momentum(b)) = (&mu.ground, &mv.ground) else {
                    return Err(VertexError::SectorMismatch);
                };
                let wu =
                    rat(mu.degree2() as i64, 2) + a.norm().to_rational().ok_or(FockError::NotRational)? / rat_int(2);
                let wv =
                    rat(mv.degree2() as i64, 2) + b.norm().to_rational().ok_or(FockError::NotRational)? / rat_int(2);
                let s = a.as_ref().add(b).norm().to_rational().ok_or(FockError::NotRational)? / rat_int(2);
                let bound = (wu + wv - rat_int(1) - s).floor().to_integer().to_i64().expect("small");
                best = Some(best.map_or(bound, |x: i64| x.max(bound)));
            }
        }
        Ok(best)
    }

    /// Checks `[u_m, v_n] w = sum_i C(m,i) (u_i v)_{m+n-i} w`.
    pub fn commutator_check(
        &self,
        u: &FockElement,
        v: &FockElement,
        m: &Rational,
        n: &Rational,
        w: &FockElement,
        module: Module,
    ) -> Result<CommutatorReport, VertexError> {
        let vn_w = self.mode(v, n, w, module)?;
        let um_w = self.mode(u, m, w, module)?;
        let lhs = self.mode(u, m, &vn_w, module)?.sub(&self.mode(v, n, &um_w, module)?);
        let mut rhs = FockElement::zero(w.sector);
        if let Some(b) = self.product_bound(u, v)? {
            for i in 0..=b.max(-1) {
                let c = binom(m, i as u32);
                if c.is_zero() {
                    continue;
                }
                let uiv = self.untwisted_mode(u, &rat_int(i), v)?;
                if uiv.is_zero() {
                    continue;
                }
                let t = self.mode(&uiv, &(m + n - rat_int(i)), w, module)?;
                rhs.add_scaled(&t, &Scalar::from_rational(c));
            }
        }
        let pass = lhs == rhs;
        Ok(CommutatorReport { lhs, rhs, pass })
    }

    /// `L(n) = omega_{n+1}` with `omega = 1/2 sum_a h_a(-1)^2 1`.
    pub fn virasoro(&self) -> FockElement {
        let mut omega = FockElement::zero(Sector::Untwisted);
        for a in 0..self.rank() {
            omega.add_scaled(&self.vacuum().create(a, 2).create(a, 2), &Scalar::from_frac(1, 2));
        }
        omega
    }

    pub fn l_mode(&self, n: i64, w: &FockElement, module: Module) -> Result<FockElement, VertexError> {
        self.mode(&self.virasoro(), &rat_int(n + 1), w, module)
    }

    /// `h(n)` on a module element, `h` in orthonormal coordinates.
    pub fn heisenberg_mode(&self, h: &[Scalar], n: &Rational, w: &FockElement) -> Result<FockElement, VertexError> {
        let n2 = doubled(n).ok_or_else(|| VertexError::ModeParity(n.clone()))?;
        Ok(mode_action(h, n2, w)?)
    }
}

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub lhs: FockElement,
    pub rhs: FockElement,
    pub pass: bool,
}

/// `2q` as an integer, if `q` is a half-integer.
pub fn doubled(q: &Rational) -> Option<i64> {
    let t = q * rat_int(2);
    if t.is_integer() {
        t.to_integer().to_i64()
    } else {
        None
    }
}

/// Terms of `exp(-sum_n alpha(n)/n z^{-n}) x` keyed by doubled degree drop.
fn e_plus_series(alpha: &[Scalar], x: &FockElement, twisted: bool) -> Result<Vec<(i64, FockElement)>, VertexError> {
    let maxd = x.max_degree2() as usize;
    let mut q: Vec<FockElement> = vec![x.clone()];
    for big_d in 1..=maxd {
        let mut acc = FockElement::zero(x.sector);
        for n2 in 1..=big_d {
            let valid = if twisted { n2 % 2 == 1 } else { n2 % 2 == 0 };
            if !valid || q[big_d - n2].is_zero() {
                continue;
            }
            acc.add_scaled(&mode_action(alpha, n2 as i64, &q[big_d - n2])?, &Scalar::one());
        }
        q.push(acc.scale(&Scalar::from_rational(rat(-2, big_d as i64))));
    }
    Ok(q.into_iter().enumerate().filter(|(_, y)| !y.is_zero()).map(|(d, y)| (d as i64, y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ext::{irreducible_modules, GroupRep};

    fn r(n: i64) -> Rational {
        rat_int(n)
    }

    #[test]
    fn delta_table_values() {
        let t = delta_coefficients();
        assert!(t[0][0].is_zero());
        assert_eq!(t[1][1], rat(1, 16));
        assert_eq!(t[1][0], rat(-1, 4));
        assert_eq!(t[2][0], rat(3, 32));
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(t[i][j], t[j][i]);
            }
        }
    }

    #[test]
    fn heisenberg_vector_modes_are_heisenberg_modes() {
        let eng = VertexEngine::free(2);
        let v = eng.vacuum().create(0, 2);
        let w = eng.vacuum().create(0, 2).create(1, 4).create(0, 6);
        for n in -3..=4 {
            let a = eng.untwisted_mode(&v, &r(n), &w).unwrap();
            let b = mode_action(&[Scalar::one(), Scalar::zero()], 2 * n, &w).unwrap();
            assert_eq!(a, b, "n = {n}");
        }
    }

    #[test]
    fn lattice_vertex_leading_term() {
        let l = LatticeData::load(vec![vec![2, 1], vec![1, 4]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let a = LVector::from_ints(&[0, 1]);
        let b = LVector::from_ints(&[1, 0]);
        let ab = l.norm(&a.add(&b)); // unused but exercises pairing
        assert!(ab > r(0));
        let n = -l.pair(&a, &b) - r(1);
        let got = eng.untwisted_mode(&eng.e(&a), &n, &eng.e(&b)).unwrap();
        let eps = eng.cocycle.as_ref().unwrap().epsilon(&a, &b).unwrap();
        assert_eq!(got, eng.e(&a.add(&b)).scale(&Scalar::from_int(eps as i64)));
        // eps(alpha_2, alpha_1) = (-1)^1
        assert_eq!(eps, -1);
        // above the leading mode everything vanishes
        assert!(eng.untwisted_mode(&eng.e(&a), &(n + r(1)), &eng.e(&b)).unwrap().is_zero());
    }

    #[test]
    fn omega_on_lattice_vector() {
        let l = LatticeData::load(vec![vec![-2]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let ea = eng.e(&LVector::from_ints(&[1]));
        let o = eng.zero_mode(&eng.virasoro(), &ea, Module::Untwisted).unwrap();
        assert_eq!(o, ea.scale(&Scalar::from_int(-1)));
    }

    #[test]
    fn delta_on_small_vectors() {
        let eng = VertexEngine::free(1);
        let one = eng.vacuum();
        let d = eng.delta_correction(&one).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&0], one);
        let h = one.create(0, 2);
        assert_eq!(eng.delta_correction(&h).unwrap().len(), 1);
        let omega = eng.virasoro();
        let d = eng.delta_correction(&omega).unwrap();
        assert_eq!(d[&0], omega);
        assert_eq!(d[&-2], one.scale(&Scalar::from_frac(1, 16)));
    }

    #[test]
    fn twisted_omega_and_heisenberg() {
        let eng = VertexEngine::free(1);
        let rep = GroupRep::trivial();
        let t = FockElement::twisted_ground(0);
        let o = eng.zero_mode(&eng.virasoro(), &t, Module::Twisted(&rep)).unwrap();
        assert_eq!(o, t.scale(&Scalar::from_frac(1, 16)));
        let x = t.create(0, 1).create(0, 3);
        let h = eng.vacuum().create(0, 2);
        for n2 in [-3i64, -1, 1, 3] {
            let a = eng.twisted_mode(&h, &rat(n2, 2), &x, &rep).unwrap();
            let b = mode_action(&[Scalar::one()], n2, &x).unwrap();
            assert_eq!(a, b);
        }
        assert!(eng.twisted_mode(&h, &r(0), &x, &rep).unwrap().is_zero());
    }

    #[test]
    fn twisted_e_alpha_table_value() {
        // gram [[-2]], o(E^alpha) on t_1 = 2^{2k+1} = 8
        let l = LatticeData::load(vec![vec![-2]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let reps = irreducible_modules(eng.group.as_ref().unwrap());
        let a = LVector::from_ints(&[1]);
        let ea = eng.e(&a).add(&eng.e(&a.neg()));
        let t = FockElement::twisted_ground(0);
        let o = eng.zero_mode(&ea, &t, Module::Twisted(&reps[0])).unwrap();
        assert_eq!(o, t.scale(&Scalar::from_int(8)));
    }

    #[test]
    fn virasoro_bracket() {
        let eng = VertexEngine::free(2);
        let w = eng.vacuum().create(0, 2).create(1, 4);
        let a = eng.l_mode(1, &eng.l_mode(-1, &w, Module::Untwisted).unwrap(), Module::Untwisted).unwrap();
        let b = eng.l_mode(-1, &eng.l_mode(1, &w, Module::Untwisted).unwrap(), Module::Untwisted).unwrap();
        let c = eng.l_mode(0, &w, Module::Untwisted).unwrap().scale(&Scalar::from_int(2));
        assert_eq!(a.sub(&b), c);
        // central term: [L(2), L(-2)] 1 = (8-2)/12 * d = d/2
        let one = eng.vacuum();
        let x = eng.l_mode(2, &eng.l_mode(-2, &one, Module::Untwisted).unwrap(), Module::Untwisted).unwrap();
        assert_eq!(x, one);
    }

    #[test]
    fn commutator_formula_lattice() {
        let l = LatticeData::load(vec![vec![2]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let a = LVector::from_ints(&[1]);
        let u = eng.e(&a);
        let v = eng.vacuum().create(0, 2).create(0, 2);
        let w = eng.e(&a.neg()).create(0, 4);
        for (m, n) in [(0, 0), (1, -1), (-2, 1), (2, -3)] {
            let rep = eng.commutator_check(&u, &v, &r(m), &r(n), &w, Module::Untwisted).unwrap();
            assert!(rep.pass, "m={m} n={n}: {:?} vs {:?}", rep.lhs, rep.rhs);
        }
    }

    #[test]
    fn commutator_formula_twisted() {
        let l = LatticeData::load(vec![vec![-2]]).unwrap();
        let eng = VertexEngine::lattice(&l, &[]).unwrap();
        let rep = &irreducible_modules(eng.group.as_ref().unwrap())[1];
        let a = LVector::from_ints(&[1]);
        let ea = eng.e(&a).add(&eng.e(&a.neg()));
        let fa = eng.e(&a).sub(&eng.e(&a.neg()));
        let omega = eng.virasoro();
        let w = FockElement::twisted_ground(0).create(0, 1);
        let checks: Vec<(&FockElement, &FockElement, Rational, Rational)> = vec![
            (&ea, &omega, r(0), r(1)),
            (&omega, &ea, r(1), r(-2)),
            (&fa, &ea, rat(1, 2), r(-1)),
            (&ea, &fa, r(-1), rat(-3, 2)),
        ];
        for (u, v, m, n) in checks {
            let c = eng.commutator_check(u, v, &m, &n, &w, Module::Twisted(rep)).unwrap();
            assert!(c.pass, "m={m} n={n}: {:?} vs {:?}", c.lhs, c.rhs);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(binom(&r(5), 2), r(10));
        assert_eq!(binom(&r(-1), 3), r(-1));
        assert_eq!(binom(&r(2), 0), r(1));
        assert_eq!(pow2(-3), rat(1, 8));
    }
}
