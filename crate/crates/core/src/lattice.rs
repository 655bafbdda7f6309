//! Even nondegenerate lattices given by integer Gram matrices.

use std::fmt;
use std::path::Path;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{rat_int, Rational, Scalar, ScalarError};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("gram matrix is empty or not square")]
    NotSquare,
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry {0} is odd, lattice is not even")]
    OddDiagonal(usize),
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not in the lattice (non-integer coordinates)")]
    NotInLattice,
    #[error("no vector with negative norm pairing negatively with the target (searched radius {0})")]
    NoPartner(i64),
    #[error("preferred direction is isotropic")]
    IsotropicPivot,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("lattice file: {0}")]
    Io(#[from] std::io::Error),
    #[error("lattice file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A vector of `L ⊗ Q` in lattice-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LVector(pub Vec<Rational>);

impl LVector {
    pub fn zero(d: usize) -> Self {
        LVector(vec![Rational::zero(); d])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        LVector(c.iter().map(|&x| rat_int(x)).collect())
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.0[i] = rat_int(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    pub fn add(&self, o: &LVector) -> LVector {
        LVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &LVector) -> LVector {
        LVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LVector {
        LVector(self.0.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, q: &Rational) -> LVector {
        LVector(self.0.iter().map(|a| a * q).collect())
    }

    /// Fractional part in `[0,1)` per coordinate: the fixed representative of `self + L`.
    pub fn coset_rep(&self) -> LVector {
        LVector(self.0.iter().map(|a| a - a.floor()).collect())
    }

    pub fn to_h(&self) -> HVec {
        HVec(self.0.iter().map(|c| Scalar::from_rational(c.clone())).collect())
    }
}

impl fmt::Debug for LVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A vector of `h = C ⊗ L` with coordinates in the scalar field, in lattice-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVec(pub Vec<Scalar>);

impl HVec {
    pub fn scale(&self, s: &Scalar) -> HVec {
        HVec(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, o: &HVec) -> HVec {
        HVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &HVec) -> HVec {
        HVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

#[derive(Deserialize)]
struct LatticeFile {
    gram: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeData {
    gram: Vec<Vec<i64>>,
    signature: (usize, usize),
}

impl LatticeData {
    /// Validates symmetry, evenness and nondegeneracy.
    pub fn load(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let d = gram.len();
        if d == 0 || gram.iter().any(|r| r.len() != d) {
            return Err(LatticeError::NotSquare);
        }
        for i in 0..d {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            if row[i] % 2 != 0 {
                return Err(LatticeError::OddDiagonal(i));
            }
        }
        let norms = orthogonal_norms(&gram).ok_or(LatticeError::Degenerate)?;
        let pos = norms.iter().filter(|q| q.is_positive()).count();
        Ok(LatticeData { gram, signature: (pos, d - pos) })
    }

    pub fn from_json_str(s: &str) -> Result<Self, LatticeError> {
        let f: LatticeFile = serde_json::from_str(s)?;
        Self::load(f.gram)
    }

    pub fn from_file(path: &Path) -> Result<Self, LatticeError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn diagonal(entries: &[i64]) -> Result<Self, LatticeError> {
        let d = entries.len();
        let mut g = vec![vec![0; d]; d];
        for (i, e) in entries.iter().enumerate() {
            g[i][i] = *e;
        }
        Self::load(g)
    }

    pub fn hyperbolic() -> Self {
        Self::load(vec![vec![0, 1], vec![1, 0]]).expect("hyperbolic plane is valid")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature.0 == 0
    }

    fn check_dim(&self, n: usize) -> Result<(), LatticeError> {
        if n != self.rank() {
            return Err(LatticeError::DimensionMismatch { expected: self.rank(), got: n });
        }
        Ok(())
    }

    pub fn pairing(&self, u: &LVector, v: &LVector) -> Result<Rational, LatticeError> {
        self.check_dim(u.dim())?;
        self.check_dim(v.dim())?;
        Ok(self.pair(u, v))
    }

    /// Unchecked pairing for internal use.
    pub fn pair(&self, u: &LVector, v: &LVector) -> Rational {
        let mut acc = Rational::zero();
        for (i, ui) in u.0.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.0.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !vj.is_zero() {
                    acc += ui * vj * rat_int(g);
                }
            }
        }
        acc
    }

    pub fn norm(&self, u: &LVector) -> Rational {
        self.pair(u, u)
    }

    pub fn pair_h(&self, u: &HVec, v: &HVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, ui) in u.0.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.0.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !vj.is_zero() {
                    acc += &(ui * vj).scale(&rat_int(g));
                }
            }
        }
        acc
    }

    /// Orthonormal basis of `h` over the scalar field: `<h_a, h_b> = delta_ab`.
    ///
    /// The `preferred` rational directions (pairwise orthogonal, non-isotropic) are
    /// used as the first pivots, so `h_1` is proportional to `preferred[0]` and so on.
    pub fn orthonormal_basis(&self, preferred: &[LVector]) -> Result<Vec<HVec>, LatticeError> {
        let d = self.rank();
        let mut orth: Vec<(LVector, Rational)> = Vec::new();
        for p in preferred {
            self.check_dim(p.dim())?;
            let r = self.project_out(p, &orth);
            let q = self.norm(&r);
            if q.is_zero() {
                return Err(LatticeError::IsotropicPivot);
            }
            orth.push((r, q));
        }
        while orth.len() < d {
            let cands: Vec<LVector> = (0..d).map(|i| self.project_out(&LVector::basis(d, i), &orth)).collect();
            let pick = cands
                .iter()
                .find(|c| !self.norm(c).is_zero())
                .cloned()
                .or_else(|| {
                    // all residual basis vectors are isotropic: some pair sums to a
                    // non-isotropic vector since the form is nondegenerate
                    for i in 0..d {
                        for j in (i + 1)..d {
                            let s = cands[i].add(&cands[j]);
                            if !self.norm(&s).is_zero() {
                                return Some(s);
                            }
                        }
                    }
                    None
                })
                .ok_or(LatticeError::Degenerate)?;
            let q = self.norm(&pick);
            orth.push((pick, q));
        }
        orth.into_iter()
            .map(|(v, q)| {
                let s = Scalar::sqrt_rational(&q)?.inv()?;
                Ok(v.to_h().scale(&s))
            })
            .collect()
    }

    fn project_out(&self, v: &LVector, orth: &[(LVector, Rational)]) -> LVector {
        let mut r = v.clone();
        for (o, q) in orth {
            let c = self.pair(&r, o) / q;
            if !c.is_zero() {
                r = r.sub(&o.scale(&c));
            }
        }
        r
    }

    /// Exhaustive search over integer balls of growing max-norm radius, lexicographic
    /// within each shell, for `beta` with `<beta,beta> < 0` and `<alpha,beta> < 0`.
    pub fn find_negative_partner(&self, alpha: &LVector, max_radius: i64) -> Result<LVector, LatticeError> {
        self.check_dim(alpha.dim())?;
        if self.is_positive_definite() {
            return Err(LatticeError::NoPartner(0));
        }
        let d = self.rank();
        for r in 1..=max_radius {
            let mut c = vec![-r; d];
            loop {
                if c.iter().any(|x| x.abs() == r) {
                    let b = LVector::from_ints(&c);
                    if self.norm(&b).is_negative() && self.pair(alpha, &b).is_negative() {
                        return Ok(b);
                    }
                }
                // odometer increment
                let mut k = d;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if c[k] < r {
                        c[k] += 1;
                        for x in c.iter_mut().skip(k + 1) {
                            *x = -r;
                        }
                        break;
                    } else if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
        Err(LatticeError::NoPartner(max_radius))
    }

    /// All integer vectors with coordinates in `[-r, r]`, lexicographic.
    pub fn box_vectors(&self, r: i64) -> Vec<LVector> {
        let d = self.rank();
        let mut out = Vec::new();
        let mut c = vec![-r; d];
        loop {
            out.push(LVector::from_ints(&c));
            let mut k = d;
            let mut done = true;
            while k > 0 {
                k -= 1;
                if c[k] < r {
                    c[k] += 1;
                    for x in c.iter_mut().skip(k + 1) {
                        *x = -r;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
        out
    }
}

/// Norms of a rational Gram–Schmidt orthogonalization, `None` if degenerate.
fn orthogonal_norms(gram: &[Vec<i64>]) -> Option<Vec<Rational>> {
    let d = gram.len();
    let mut m: Vec<Vec<Rational>> = gram.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect();
    let mut norms = Vec::with_capacity(d);
    // symmetric elimination with pivoting that tolerates isotropic diagonals
    let mut k = 0;
    while k < d {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..d).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else {
                let j = (k + 1..d).find(|&j| !m[k][j].is_zero())?;
                // replace e_k by e_k + e_j, whose norm is 2 m[k][j] != 0
                for c in 0..d {
                    let v = m[j][c].clone();
                    m[k][c] += v;
                }
                for r in 0..d {
                    let v = m[r][j].clone();
                    m[r][k] += v;
                }
            }
        }
        let p = m[k][k].clone();
        norms.push(p.clone());
        for i in k + 1..d {
            let f = &m[i][k] / &p;
            if f.is_zero() {
                continue;
            }
            for j in k..d {
                let v = &m[k][j] * &f;
                m[i][j] -= v;
            }
            for r in k..d {
                let v = &m[r][k] * &f;
                m[r][i] -= v;
            }
        }
        k += 1;
    }
    Some(norms)
}
