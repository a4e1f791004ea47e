//! Points and morphisms of the double cover of the σ-twisted circle.
//!
//! Coordinates are rationals in units of π. A positive point `(x, i)` is
//! identified with `(x + 2, σ^{-2}(i))`; the negative point `[x, i, -]` is the
//! positive point `(x - 1, σ(i))`. Canonical positive points have `x ∈ [0, 2)`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cn::MonomialLift;
use crate::scalars::{Cyclotomic, MonomialCoefficient, RootOfUnity};

pub type Coord = Ratio<i64>;

/// Power series in `t` are kept modulo `t^TRUNC`.
pub const TRUNC: usize = 16;

pub fn coord(p: i64, q: i64) -> Coord {
    Ratio::new(p, q)
}

fn floor_half(x: Coord) -> i64 {
    (x / 2).floor().to_integer()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A canonical positive point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverPoint {
    pub x: Coord,
    pub sheet: usize,
}

impl fmt::Display for CoverPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, +]", self.x, self.sheet + 1)
    }
}

/// Truncated power series in `t` over the cyclotomic numbers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Series(Vec<Cyclotomic>);

impl Series {
    pub fn zero() -> Self {
        Series(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(Cyclotomic::one())
    }

    pub fn constant(c: Cyclotomic) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Cyclotomic, k: usize) -> Self {
        let mut v = vec![Cyclotomic::zero(); k + 1];
        v[k] = c;
        Self::trimmed(v)
    }

    fn trimmed(mut v: Vec<Cyclotomic>) -> Self {
        v.truncate(TRUNC);
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Series(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Cyclotomic {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Cyclotomic] {
        &self.0
    }

    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// Leading term as a monomial coefficient (`upower = 2 * valuation`).
    pub fn leading(&self) -> MonomialCoefficient {
        match self.valuation() {
            Some(k) => MonomialCoefficient::t_power(self.0[k].clone(), k as u32),
            None => MonomialCoefficient::zero(),
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.0.iter().filter(|c| !c.is_zero()).count() <= 1
    }

    pub fn add(&self, o: &Series) -> Series {
        let n = self.0.len().max(o.0.len());
        Self::trimmed((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Series {
        Series(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Cyclotomic) -> Series {
        Self::trimmed(self.0.iter().map(|c| c * s).collect())
    }

    pub fn shift(&self, k: usize) -> Series {
        if self.is_zero() {
            return Series::zero();
        }
        let mut v = vec![Cyclotomic::zero(); k];
        v.extend(self.0.iter().cloned());
        Self::trimmed(v)
    }

    pub fn mul(&self, o: &Series) -> Series {
        if self.is_zero() || o.is_zero() {
            return Series::zero();
        }
        let n = (self.0.len() + o.0.len() - 1).min(TRUNC);
        let mut v = vec![Cyclotomic::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if i + j < n && !b.is_zero() {
                    v[i + j] = &v[i + j] + &(a * b);
                }
            }
        }
        Self::trimmed(v)
    }

    /// Inverse of a series with nonzero constant term.
    pub fn inv_unit(&self) -> Option<Series> {
        let a0 = self.coeff(0);
        let inv0 = a0.inv().ok()?;
        let mut out = vec![Cyclotomic::zero(); TRUNC];
        out[0] = inv0.clone();
        for k in 1..TRUNC {
            let mut s = Cyclotomic::zero();
            for j in 1..=k {
                let aj = self.coeff(j);
                if !aj.is_zero() {
                    s = &s + &(&aj * &out[k - j]);
                }
            }
            out[k] = -(&s * &inv0);
        }
        Some(Self::trimmed(out))
    }

    /// `q` with `self = o * q`, if `o` divides `self`.
    pub fn div(&self, o: &Series) -> Option<Series> {
        if self.is_zero() {
            return Some(Series::zero());
        }
        let vo = o.valuation()?;
        let vs = self.valuation()?;
        if vs < vo {
            return None;
        }
        let unit = Series(o.0[vo..].to_vec());
        let num = Series(self.0[vo..].to_vec());
        Some(num.mul(&unit.inv_unit()?))
    }
}

/// `coeff · f̃_{yx} ⊗ x_{ji}` with canonical endpoints. The generator is the
/// one whose target representative lies in `[x, x + 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverMorphism {
    pub source: CoverPoint,
    pub target: CoverPoint,
    pub coeff: Series,
}

impl CoverMorphism {
    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn monomial(&self) -> MonomialCoefficient {
        self.coeff.leading()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error("composition endpoints do not match: {0} vs {1}")]
    Domain(String, String),
    #[error("|y - x| = {0} exceeds 1")]
    Width(String),
    #[error("sheet functor does not commute with σ")]
    NotCommuting,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("bad input: {0}")]
    Input(String),
}

/// The cover determined by a monomial lift of σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub lift: MonomialLift,
    inv: Vec<usize>,
}

impl Cover {
    pub fn new(lift: MonomialLift) -> Self {
        let mut inv = vec![0; lift.perm.len()];
        for (i, &j) in lift.perm.iter().enumerate() {
            inv[j] = i;
        }
        Cover { lift, inv }
    }

    pub fn n(&self) -> usize {
        self.inv.len()
    }

    pub fn sigma(&self, i: usize) -> usize {
        self.lift.perm[i]
    }

    pub fn sigma_inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn sigma_pow(&self, mut i: usize, k: i64) -> usize {
        for _ in 0..k.unsigned_abs() {
            i = if k > 0 {
                self.sigma(i)
            } else {
                self.sigma_inv(i)
            };
        }
        i
    }

    pub fn c(&self, i: usize) -> RootOfUnity {
        self.lift.c(i)
    }

    /// `a_ji = c_j / c_i`.
    pub fn a(&self, j: usize, i: usize) -> RootOfUnity {
        self.c(j).div(self.c(i))
    }

    /// `d_j = c_{σ(j)} c_j`.
    pub fn d(&self, j: usize) -> RootOfUnity {
        self.c(self.sigma(j)).mul(self.c(j))
    }

    /// `b_ji = d_j / d_i`, the factor of a double relabeling.
    pub fn b2(&self, j: usize, i: usize) -> RootOfUnity {
        self.d(j).div(self.d(i))
    }

    pub fn point(&self, x: Coord, i: usize) -> CoverPoint {
        let m = floor_half(x);
        CoverPoint {
            x: x - Coord::from_integer(2 * m),
            sheet: self.sigma_pow(i, 2 * m),
        }
    }

    pub fn signed_point(&self, x: Coord, i: usize, s: Sign) -> CoverPoint {
        match s {
            Sign::Plus => self.point(x, i),
            Sign::Minus => self.point(x - 1, self.sigma(i)),
        }
    }

    /// Representative `(Q, J)` of `b` with `Q ∈ [a.x, a.x + 2)`.
    pub fn target_rep(&self, a: &CoverPoint, b: &CoverPoint) -> (Coord, usize) {
        let m = -floor_half(b.x - a.x);
        (
            b.x + Coord::from_integer(2 * m),
            self.sigma_pow(b.sheet, -2 * m),
        )
    }

    pub fn gen_length(&self, a: &CoverPoint, b: &CoverPoint) -> Coord {
        self.target_rep(a, b).0 - a.x
    }

    /// Canonical form of `s · f̃_{qp} ⊗ x_{ji} : (p, i) -> (q, j)`.
    pub fn raw(&self, p: Coord, i: usize, q: Coord, j: usize, s: Series) -> CoverMorphism {
        assert!(q >= p, "raw morphism needs q >= p ({p} > {q})");
        let (mut p, mut q, mut i, mut j) = (p, q, i, j);
        let mut scal = RootOfUnity::ONE;
        let m = floor_half(p);
        for _ in 0..m.max(0) {
            scal = scal.mul(self.b2(j, i));
            i = self.sigma_pow(i, 2);
            j = self.sigma_pow(j, 2);
        }
        for _ in 0..(-m).max(0) {
            i = self.sigma_pow(i, -2);
            j = self.sigma_pow(j, -2);
            scal = scal.div(self.b2(j, i));
        }
        p -= Coord::from_integer(2 * m);
        q -= Coord::from_integer(2 * m);
        let k = floor_half(q - p);
        for _ in 0..k {
            scal = scal.mul(self.d(j));
            j = self.sigma_pow(j, 2);
        }
        q -= Coord::from_integer(2 * k);
        let source = CoverPoint { x: p, sheet: i };
        let target = self.point(q, j);
        debug_assert_eq!(self.target_rep(&source, &target), (q, j));
        CoverMorphism {
            source,
            target,
            coeff: s.scale(&scal.into()).shift(k as usize),
        }
    }

    pub fn raw_scalar(
        &self,
        p: Coord,
        i: usize,
        q: Coord,
        j: usize,
        s: RootOfUnity,
    ) -> CoverMorphism {
        self.raw(p, i, q, j, Series::constant(s.into()))
    }

    pub fn zero(&self, a: CoverPoint, b: CoverPoint) -> CoverMorphism {
        CoverMorphism {
            source: a,
            target: b,
            coeff: Series::zero(),
        }
    }

    pub fn generator(&self, a: CoverPoint, b: CoverPoint) -> CoverMorphism {
        CoverMorphism {
            source: a,
            target: b,
            coeff: Series::one(),
        }
    }

    pub fn identity(&self, a: CoverPoint) -> CoverMorphism {
        self.generator(a, a)
    }

    /// Factor `F` with `gen(b, c) ∘ gen(a, b) = F · gen(a, c)`.
    pub fn gen_factor(&self, a: &CoverPoint, b: &CoverPoint, c: &CoverPoint) -> Series {
        let (q1, j1) = self.target_rep(a, b);
        let (q2, j2) = self.target_rep(b, c);
        let m = floor_half(q1 - b.x);
        // move gen(b, c) up by 2m so that its source is (q1, j1)
        let (mut bi, mut cj) = (b.sheet, j2);
        let mut scal = RootOfUnity::ONE;
        for _ in 0..m {
            bi = self.sigma_pow(bi, -2);
            cj = self.sigma_pow(cj, -2);
            scal = scal.div(self.b2(cj, bi));
        }
        debug_assert_eq!(bi, j1);
        let shift = Coord::from_integer(2 * m);
        let r = self.raw(a.x, a.sheet, q2 + shift, cj, Series::constant(scal.into()));
        debug_assert_eq!(r.target, *c);
        r.coeff
    }

    pub fn compose(
        &self,
        g: &CoverMorphism,
        f: &CoverMorphism,
    ) -> Result<CoverMorphism, FrobeniusError> {
        if g.source != f.target {
            return Err(FrobeniusError::Domain(
                g.source.to_string(),
                f.target.to_string(),
            ));
        }
        let k = self.gen_factor(&f.source, &f.target, &g.target);
        Ok(CoverMorphism {
            source: f.source,
            target: g.target,
            coeff: g.coeff.mul(&f.coeff).mul(&k),
        })
    }

    /// `u` with `p ∘ u = e` (`e : c' -> r`, `p : c -> r`).
    pub fn divide_right(&self, e: &CoverMorphism, p: &CoverMorphism) -> Option<CoverMorphism> {
        let k = self.gen_factor(&e.source, &p.source, &p.target);
        Some(CoverMorphism {
            source: e.source,
            target: p.source,
            coeff: e.coeff.div(&p.coeff.mul(&k))?,
        })
    }

    /// `v` with `v ∘ p = e` (`e : c -> r'`, `p : c -> r`).
    pub fn divide_left(&self, e: &CoverMorphism, p: &CoverMorphism) -> Option<CoverMorphism> {
        let k = self.gen_factor(&p.source, &p.target, &e.target);
        Some(CoverMorphism {
            source: p.target,
            target: e.target,
            coeff: e.coeff.div(&p.coeff.mul(&k))?,
        })
    }

    /// Total length in π-units of the leading term: generator length plus two per `t`.
    pub fn total_length(&self, f: &CoverMorphism) -> Option<Coord> {
        let v = f.coeff.valuation()?;
        Some(self.gen_length(&f.source, &f.target) + Coord::from_integer(2 * v as i64))
    }

    /// `F_τ` on a morphism: sheets relabeled by τ, coefficient times `b_ji`.
    pub fn apply_sheet(
        &self,
        tau: &crate::cn::Autoequivalence,
        f: &CoverMorphism,
    ) -> CoverMorphism {
        let (q, j) = self.target_rep(&f.source, &f.target);
        let i = f.source.sheet;
        self.raw(
            f.source.x,
            tau.map(i),
            q,
            tau.map(j),
            f.coeff.scale(&tau.a(j, i).into()),
        )
    }

    pub fn apply_sheet_point(
        &self,
        tau: &crate::cn::Autoequivalence,
        a: &CoverPoint,
    ) -> CoverPoint {
        CoverPoint {
            x: a.x,
            sheet: tau.map(a.sheet),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(perm: Vec<usize>, c: Vec<RootOfUnity>) -> Cover {
        Cover::new(MonomialLift { perm, diag: c })
    }

    #[test]
    fn identity_composition() {
        let cv = cover(vec![1, 0], vec![RootOfUnity::ONE, RootOfUnity::MINUS_ONE]);
        let f = cv.raw_scalar(coord(1, 4), 0, coord(5, 4), 1, RootOfUnity::ONE);
        let id = cv.identity(f.source);
        assert_eq!(cv.compose(&f, &id).unwrap(), f);
        assert_eq!(cv.compose(&cv.identity(f.target), &f).unwrap(), f);
    }

    #[test]
    fn full_weight_is_t() {
        let cv = cover(vec![0], vec![RootOfUnity::ONE]);
        let (x, y) = (coord(1, 4), coord(1, 2));
        let a = cv.raw_scalar(x - 1, 0, y, 0, RootOfUnity::ONE);
        let b = cv.raw_scalar(y, 0, x + 1, 0, RootOfUnity::ONE);
        let ba = cv.compose(&b, &a).unwrap();
        assert_eq!(ba.source, ba.target);
        assert_eq!(ba.coeff, Series::monomial(Cyclotomic::one(), 1));
    }

    #[test]
    fn full_turn_scalar_matches_half_shift_expansion() {
        // two half-shifts: f_{y+1,x} ⊗ x_ji = c_j u f_{yx} ⊗ x_{σ(j) i}
        let c = vec![RootOfUnity::ONE, RootOfUnity::MINUS_ONE];
        let cv = cover(vec![1, 0], c.clone());
        for j in 0..2 {
            let f = cv.raw_scalar(coord(1, 3), 0, coord(7, 3), j, RootOfUnity::ONE);
            let expect = c[j].mul(c[1 - j]);
            assert_eq!(
                f.target,
                CoverPoint {
                    x: coord(1, 3),
                    sheet: j
                }
            );
            assert_eq!(f.coeff, Series::monomial(expect.into(), 1));
        }
    }

    #[test]
    fn double_relabeling() {
        let z = |p, q| RootOfUnity::new(p, q);
        let cv = cover(vec![1, 2, 0], vec![RootOfUnity::ONE, z(1, 3), z(1, 4)]);
        for (i, j) in [(0, 1), (2, 0), (1, 1)] {
            let hi = cv.raw_scalar(coord(9, 4), i, coord(11, 4), j, RootOfUnity::ONE);
            let lo = cv.raw_scalar(
                coord(1, 4),
                cv.sigma_pow(i, 2),
                coord(3, 4),
                cv.sigma_pow(j, 2),
                cv.b2(j, i),
            );
            assert_eq!(hi, lo);
        }
    }

    #[test]
    fn series_inverse() {
        let s = Series::one().add(&Series::monomial(Cyclotomic::from_int(3), 1));
        let inv = s.inv_unit().unwrap();
        assert_eq!(s.mul(&inv), Series::one());
        let t2 = Series::monomial(Cyclotomic::one(), 2);
        assert_eq!(t2.mul(&s).div(&s).unwrap(), t2);
        assert!(Series::one().div(&t2).is_none());
    }
}
