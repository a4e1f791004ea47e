//! Matrix factorizations of `t` over the double cover and their morphisms.

use std::fmt;

use num_rational::Ratio;
use num_traits::Signed;

use super::cover::{Coord, Cover, CoverMorphism, CoverPoint, FrobeniusError, Series};
use crate::cn::Autoequivalence;
use crate::scalars::Cyclotomic;

/// Matrix of cover morphisms `cols[c] -> rows[r]`, stored as coefficients of
/// the canonical generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: Vec<CoverPoint>,
    pub cols: Vec<CoverPoint>,
    pub e: Vec<Vec<Series>>,
}

impl Mat {
    pub fn zero(rows: Vec<CoverPoint>, cols: Vec<CoverPoint>) -> Mat {
        let e = vec![vec![Series::zero(); cols.len()]; rows.len()];
        Mat { rows, cols, e }
    }

    pub fn identity(pts: Vec<CoverPoint>) -> Mat {
        let mut m = Mat::zero(pts.clone(), pts);
        for k in 0..m.rows.len() {
            m.e[k][k] = Series::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> CoverMorphism {
        CoverMorphism {
            source: self.cols[c],
            target: self.rows[r],
            coeff: self.e[r][c].clone(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, f: &CoverMorphism) {
        assert_eq!(f.source, self.cols[c], "column point mismatch");
        assert_eq!(f.target, self.rows[r], "row point mismatch");
        self.e[r][c] = f.coeff.clone();
    }

    pub fn add_at(&mut self, r: usize, c: usize, f: &CoverMorphism) {
        assert_eq!((f.source, f.target), (self.cols[c], self.rows[r]));
        self.e[r][c] = self.e[r][c].add(&f.coeff);
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().flatten().all(Series::is_zero)
    }

    pub fn mul(&self, cv: &Cover, f: &Mat) -> Mat {
        assert_eq!(self.cols, f.rows, "inner dimensions differ");
        let mut out = Mat::zero(self.rows.clone(), f.cols.clone());
        for r in 0..self.rows.len() {
            for c in 0..f.cols.len() {
                let mut acc = Series::zero();
                for k in 0..self.cols.len() {
                    let (a, b) = (&self.e[r][k], &f.e[k][c]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let fac = cv.gen_factor(&f.cols[c], &f.rows[k], &self.rows[r]);
                    acc = acc.add(&a.mul(b).mul(&fac));
                }
                out.e[r][c] = acc;
            }
        }
        out
    }

    fn zip(&self, o: &Mat, op: impl Fn(&Series, &Series) -> Series) -> Mat {
        assert_eq!(
            (&self.rows, &self.cols),
            (&o.rows, &o.cols),
            "shape mismatch"
        );
        let e = self
            .e
            .iter()
            .zip(&o.e)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
            .collect();
        Mat {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            e,
        }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        self.zip(o, Series::add)
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.zip(o, Series::sub)
    }

    pub fn scale(&self, s: &Cyclotomic) -> Mat {
        let e = self
            .e
            .iter()
            .map(|r| r.iter().map(|x| x.scale(s)).collect())
            .collect();
        Mat {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            e,
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(&-Cyclotomic::one())
    }

    pub fn block_diag(&self, o: &Mat) -> Mat {
        let rows = [self.rows.clone(), o.rows.clone()].concat();
        let cols = [self.cols.clone(), o.cols.clone()].concat();
        let mut m = Mat::zero(rows, cols);
        for (r, row) in self.e.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                m.e[r][c] = x.clone();
            }
        }
        let (r0, c0) = (self.rows.len(), self.cols.len());
        for (r, row) in o.e.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                m.e[r0 + r][c0 + c] = x.clone();
            }
        }
        m
    }

    pub fn vstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.cols);
        Mat {
            rows: [self.rows.clone(), o.rows.clone()].concat(),
            cols: self.cols.clone(),
            e: [self.e.clone(), o.e.clone()].concat(),
        }
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        Mat {
            rows: self.rows.clone(),
            cols: [self.cols.clone(), o.cols.clone()].concat(),
            e: self
                .e
                .iter()
                .zip(&o.e)
                .map(|(a, b)| [a.clone(), b.clone()].concat())
                .collect(),
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat {
            rows: rows.iter().map(|&r| self.rows[r]).collect(),
            cols: cols.iter().map(|&c| self.cols[c]).collect(),
            e: rows
                .iter()
                .map(|&r| cols.iter().map(|&c| self.e[r][c].clone()).collect())
                .collect(),
        }
    }

    pub fn apply_sheet(&self, cv: &Cover, tau: &Autoequivalence) -> Mat {
        let mut m = Mat::zero(
            self.rows
                .iter()
                .map(|p| cv.apply_sheet_point(tau, p))
                .collect(),
            self.cols
                .iter()
                .map(|p| cv.apply_sheet_point(tau, p))
                .collect(),
        );
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                if !self.e[r][c].is_zero() {
                    m.set(r, c, &cv.apply_sheet(tau, &self.get(r, c)));
                }
            }
        }
        m
    }

    /// `t · identity`.
    pub fn t_identity(pts: Vec<CoverPoint>) -> Mat {
        let mut m = Mat::zero(pts.clone(), pts);
        for k in 0..m.rows.len() {
            m.e[k][k] = Series::monomial(Cyclotomic::one(), 1);
        }
        m
    }

    /// Nonzero entries as `(col, row, leading monomial)` triples.
    pub fn components(&self) -> Vec<(usize, usize, CoverMorphism)> {
        let mut out = Vec::new();
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                if !self.e[r][c].is_zero() {
                    out.push((c, r, self.get(r, c)));
                }
            }
        }
        out
    }
}

/// `M(x, y, i) = ([x, i, -] ⊕ [y, i, +], d)` in a chosen representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MFObject {
    pub x: Coord,
    pub y: Coord,
    pub sheet: usize,
}

impl fmt::Display for MFObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}, {}, {})", self.x, self.y, self.sheet + 1)
    }
}

pub fn make_mf(x: Coord, y: Coord, i: usize, cv: &Cover) -> Result<MFObject, FrobeniusError> {
    if (y - x).abs() > Coord::from_integer(1) {
        return Err(FrobeniusError::Width((y - x).to_string()));
    }
    if i >= cv.n() {
        return Err(FrobeniusError::Input(format!(
            "sheet {} out of range",
            i + 1
        )));
    }
    let m = MFObject { x, y, sheet: i };
    let d = m.d(cv);
    if d.mul(cv, &d) != Mat::t_identity(m.ends(cv)) {
        return Err(FrobeniusError::Invariant(format!("d^2 != t for {m}")));
    }
    Ok(m)
}

impl MFObject {
    pub fn new(x: Coord, y: Coord, sheet: usize) -> Self {
        MFObject { x, y, sheet }
    }

    pub fn is_proj_inj(&self) -> bool {
        (self.y - self.x).abs() == Coord::from_integer(1)
    }

    /// The relabeling `M(x, y, i) = M(y - 1, x - 1, σ(i))`.
    pub fn swap(&self, cv: &Cover) -> MFObject {
        MFObject::new(self.y - 1, self.x - 1, cv.sigma(self.sheet))
    }

    /// `M(x, y, i) = M(x + 2m, y + 2m, σ^{-2m}(i))`.
    pub fn shift(&self, cv: &Cover, m: i64) -> MFObject {
        let s = Coord::from_integer(2 * m);
        MFObject::new(self.x + s, self.y + s, cv.sigma_pow(self.sheet, -2 * m))
    }

    fn moved_to(&self, cv: &Cover, lo: Coord) -> MFObject {
        let m = ((lo - self.x) / 2).ceil().to_integer();
        self.shift(cv, m)
    }

    /// Representatives with `x ∈ [0, 2)`, unswapped first.
    pub fn reps(&self, cv: &Cover) -> [MFObject; 2] {
        let z = Coord::from_integer(0);
        [self.moved_to(cv, z), self.swap(cv).moved_to(cv, z)]
    }

    /// Lexicographically least representative with `x ∈ [0, 2)`, and whether
    /// it exchanges the two ends.
    pub fn canonical(&self, cv: &Cover) -> (MFObject, bool) {
        let [a, b] = self.reps(cv);
        if b < a {
            (b, true)
        } else {
            (a, false)
        }
    }

    /// `Some(swapped)` when `o` is a representative of the same object.
    pub fn relation(&self, cv: &Cover, o: &MFObject) -> Option<bool> {
        for (k, base) in [*self, self.swap(cv)].iter().enumerate() {
            let d = o.x - base.x;
            if d.is_integer() && d.to_integer() % 2 == 0 && *o == base.shift(cv, d.to_integer() / 2)
            {
                return Some(k == 1);
            }
        }
        None
    }

    pub fn neg_end(&self, cv: &Cover) -> CoverPoint {
        cv.point(self.x - 1, cv.sigma(self.sheet))
    }

    pub fn pos_end(&self, cv: &Cover) -> CoverPoint {
        cv.point(self.y, self.sheet)
    }

    pub fn ends(&self, cv: &Cover) -> Vec<CoverPoint> {
        vec![self.neg_end(cv), self.pos_end(cv)]
    }

    /// `d_- = c_i^{-1} f_{y, x-1} ⊗ x_{i σ(i)}`.
    pub fn d_minus(&self, cv: &Cover) -> CoverMorphism {
        let i = self.sheet;
        cv.raw_scalar(self.x - 1, cv.sigma(i), self.y, i, cv.c(i).inv())
    }

    /// `d_+ = c_{σ^{-1}(i)}^{-1} f_{x+1, y} ⊗ x_{σ^{-1}(i) i}`.
    pub fn d_plus(&self, cv: &Cover) -> CoverMorphism {
        let i = self.sheet;
        let k = cv.sigma_inv(i);
        cv.raw_scalar(self.y, i, self.x + 1, k, cv.c(k).inv())
    }

    pub fn d(&self, cv: &Cover) -> Mat {
        let mut m = Mat::zero(self.ends(cv), self.ends(cv));
        m.set(1, 0, &self.d_minus(cv));
        m.set(0, 1, &self.d_plus(cv));
        m
    }

    /// Both ends coincide with ends of `o` (as points of the double cover, up to sheet).
    pub fn end_coords(&self) -> [Coord; 2] {
        let two = Coord::from_integer(2);
        let r = |v: Coord| v - two * (v / two).floor();
        [r(self.x - 1), r(self.y)]
    }

    pub fn shares_end(&self, o: &MFObject) -> bool {
        let a = self.end_coords();
        o.end_coords().iter().any(|e| a.contains(e))
    }
}

pub fn ends_of(cv: &Cover, obj: &[MFObject]) -> Vec<CoverPoint> {
    obj.iter().flat_map(|m| m.ends(cv)).collect()
}

pub fn d_of(cv: &Cover, obj: &[MFObject]) -> Mat {
    obj.iter()
        .fold(Mat::zero(vec![], vec![]), |acc, m| acc.block_diag(&m.d(cv)))
}

/// A morphism of matrix factorizations between formal sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MFMorphism {
    pub source: Vec<MFObject>,
    pub target: Vec<MFObject>,
    pub m: Mat,
}

impl MFMorphism {
    pub fn new(
        cv: &Cover,
        source: Vec<MFObject>,
        target: Vec<MFObject>,
        m: Mat,
    ) -> Result<Self, FrobeniusError> {
        let f = MFMorphism { source, target, m };
        f.check(cv)?;
        Ok(f)
    }

    pub fn check(&self, cv: &Cover) -> Result<(), FrobeniusError> {
        if self.m.cols != ends_of(cv, &self.source) || self.m.rows != ends_of(cv, &self.target) {
            return Err(FrobeniusError::Invariant(
                "morphism ends do not match objects".into(),
            ));
        }
        let lhs = self.m.mul(cv, &d_of(cv, &self.source));
        let rhs = d_of(cv, &self.target).mul(cv, &self.m);
        if lhs != rhs {
            return Err(FrobeniusError::Invariant(
                "morphism does not commute with d".into(),
            ));
        }
        Ok(())
    }

    pub fn identity(cv: &Cover, obj: Vec<MFObject>) -> Self {
        let m = Mat::identity(ends_of(cv, &obj));
        MFMorphism {
            source: obj.clone(),
            target: obj,
            m,
        }
    }

    pub fn zero(cv: &Cover, source: Vec<MFObject>, target: Vec<MFObject>) -> Self {
        let m = Mat::zero(ends_of(cv, &target), ends_of(cv, &source));
        MFMorphism { source, target, m }
    }

    pub fn compose(&self, cv: &Cover, f: &MFMorphism) -> MFMorphism {
        assert_eq!(self.source, f.target, "composition of mismatched morphisms");
        MFMorphism {
            source: f.source.clone(),
            target: self.target.clone(),
            m: self.m.mul(cv, &f.m),
        }
    }

    pub fn scale(&self, s: &Cyclotomic) -> MFMorphism {
        MFMorphism {
            m: self.m.scale(s),
            ..self.clone()
        }
    }

    pub fn add(&self, o: &MFMorphism) -> MFMorphism {
        assert_eq!((&self.source, &self.target), (&o.source, &o.target));
        MFMorphism {
            m: self.m.add(&o.m),
            ..self.clone()
        }
    }
}

/// Half-open support window: `x ≤ x' < y + 1` and `y ≤ y' < x + 1`.
pub fn fits(r: &MFObject, t: &MFObject) -> bool {
    r.x <= t.x && t.x < r.y + 1 && r.y <= t.y && t.y < r.x + 1
}

/// The representative of `n` inside the support window of `r`.
pub fn fit_rep(cv: &Cover, r: &MFObject, n: &MFObject) -> Option<MFObject> {
    [*n, n.swap(cv)]
        .into_iter()
        .map(|b| b.moved_to(cv, r.x))
        .find(|c| fits(r, c))
}

/// Basic morphism between representatives: `a_ji f ⊗ x` on the negative
/// ends and `f ⊗ x_ji` on the positive ends.
pub fn basic(cv: &Cover, r: &MFObject, t: &MFObject) -> Mat {
    let (i, j) = (r.sheet, t.sheet);
    let mut m = Mat::zero(t.ends(cv), r.ends(cv));
    let neg = cv.raw_scalar(r.x - 1, cv.sigma(i), t.x - 1, cv.sigma(j), cv.a(j, i));
    let pos = cv.raw_scalar(r.y, i, t.y, j, crate::scalars::RootOfUnity::ONE);
    m.set(0, 0, &neg);
    m.set(1, 1, &pos);
    m
}

/// Slots of `n` (0 = negative end, 1 = positive end) holding the ends of
/// the representative `f`.
fn slots(cv: &Cover, n: &MFObject, f: &MFObject) -> [usize; 2] {
    match n.relation(cv, f) {
        Some(false) => [0, 1],
        Some(true) => [1, 0],
        None => panic!("{f} is not a representative of {n}"),
    }
}

/// Basic morphism from `r` into the window representative of `n`, with rows
/// in the slot order of `n`.
pub fn basic_into(cv: &Cover, r: &MFObject, n: &MFObject) -> Option<Mat> {
    let f = fit_rep(cv, r, n)?;
    let b = basic(cv, r, &f);
    let s = slots(cv, n, &f);
    let mut m = Mat::zero(n.ends(cv), r.ends(cv));
    for (k, &slot) in s.iter().enumerate() {
        for c in 0..2 {
            if !b.e[k][c].is_zero() {
                m.set(slot, c, &b.get(k, c));
            }
        }
    }
    Some(m)
}

/// Stable scalar of the block `f : r -> n` relative to `basic_into`.
pub fn block_scalar(
    cv: &Cover,
    r: &MFObject,
    n: &MFObject,
    f: &Mat,
) -> Result<Cyclotomic, FrobeniusError> {
    if r.is_proj_inj() || n.is_proj_inj() {
        return Ok(Cyclotomic::zero());
    }
    let Some(b) = basic_into(cv, r, n) else {
        return Ok(Cyclotomic::zero());
    };
    let mut lam: Option<Cyclotomic> = None;
    for c in 0..2 {
        let row = (0..2)
            .find(|&k| !b.e[k][c].is_zero())
            .expect("basic has a component per column");
        let bc = b.e[row][c].coeff(0);
        let l = &f.e[row][c].coeff(0) * &bc.inv().expect("basic coefficient is a unit");
        match &lam {
            None => lam = Some(l),
            Some(prev) if *prev != l => {
                return Err(FrobeniusError::Invariant(format!(
                    "inconsistent stable scalar on {r} -> {n}"
                )))
            }
            _ => {}
        }
    }
    Ok(lam.unwrap())
}

pub fn block(m: &Mat, l: usize, k: usize) -> Mat {
    m.select(&[2 * l, 2 * l + 1], &[2 * k, 2 * k + 1])
}

/// A morphism of the stable category: scalars relative to `basic_into`,
/// between the non-projective-injective components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableMorphism {
    pub source: Vec<MFObject>,
    pub target: Vec<MFObject>,
    /// `s[l][k]` for source component `k` and target component `l`.
    pub s: Vec<Vec<Cyclotomic>>,
}

impl StableMorphism {
    pub fn is_zero(&self) -> bool {
        self.s.iter().flatten().all(Cyclotomic::is_zero)
    }

    pub fn scalar(&self, l: usize, k: usize) -> &Cyclotomic {
        &self.s[l][k]
    }

    pub fn neg(&self) -> StableMorphism {
        StableMorphism {
            s: self
                .s
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
            ..self.clone()
        }
    }
}

pub fn stable_objects(obj: &[MFObject]) -> Vec<MFObject> {
    obj.iter().filter(|m| !m.is_proj_inj()).copied().collect()
}

pub fn stable_reduce(cv: &Cover, f: &MFMorphism) -> Result<StableMorphism, FrobeniusError> {
    let src: Vec<usize> = (0..f.source.len())
        .filter(|&k| !f.source[k].is_proj_inj())
        .collect();
    let tgt: Vec<usize> = (0..f.target.len())
        .filter(|&l| !f.target[l].is_proj_inj())
        .collect();
    let mut s = vec![vec![Cyclotomic::zero(); src.len()]; tgt.len()];
    for (a, &l) in tgt.iter().enumerate() {
        for (b, &k) in src.iter().enumerate() {
            s[a][b] = block_scalar(cv, &f.source[k], &f.target[l], &block(&f.m, l, k))?;
        }
    }
    Ok(StableMorphism {
        source: src.iter().map(|&k| f.source[k]).collect(),
        target: tgt.iter().map(|&l| f.target[l]).collect(),
        s,
    })
}

/// A Frobenius-level representative of a stable morphism.
pub fn lift(cv: &Cover, s: &StableMorphism) -> MFMorphism {
    let mut m = Mat::zero(ends_of(cv, &s.target), ends_of(cv, &s.source));
    for (l, n) in s.target.iter().enumerate() {
        for (k, r) in s.source.iter().enumerate() {
            let lam = &s.s[l][k];
            if lam.is_zero() {
                continue;
            }
            let b = basic_into(cv, r, n).expect("nonzero stable scalar outside the window");
            for a in 0..2 {
                for c in 0..2 {
                    m.e[2 * l + a][2 * k + c] = b.e[a][c].scale(lam);
                }
            }
        }
    }
    MFMorphism {
        source: s.source.clone(),
        target: s.target.clone(),
        m,
    }
}

pub fn stable_compose(
    cv: &Cover,
    g: &StableMorphism,
    f: &StableMorphism,
) -> Result<StableMorphism, FrobeniusError> {
    stable_reduce(cv, &lift(cv, g).compose(cv, &lift(cv, f)))
}

pub fn stable_identity(obj: &[MFObject]) -> StableMorphism {
    let n = obj.len();
    let s = (0..n)
        .map(|l| {
            (0..n)
                .map(|k| {
                    if k == l {
                        Cyclotomic::one()
                    } else {
                        Cyclotomic::zero()
                    }
                })
                .collect()
        })
        .collect();
    StableMorphism {
        source: obj.to_vec(),
        target: obj.to_vec(),
        s,
    }
}

/// A generator of `Hom(M, N)` with its u-power grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomGenerator {
    pub morphism: MFMorphism,
    pub upower: u32,
}

/// Generators of the two rank-one families of `Hom(M, N)`: the one mapping
/// negative ends to negative ends and the one exchanging them.
pub fn hom_mf(cv: &Cover, m: &MFObject, n: &MFObject) -> Result<Vec<HomGenerator>, FrobeniusError> {
    let (dm, dn) = (m.d(cv), n.d(cv));
    let (ms, ns) = (m.ends(cv), n.ends(cv));
    let mut out = Vec::new();
    // (src slot, tgt slot) for the free component and the determined one
    for (a, b) in [((0, 0), (1, 1)), ((0, 1), (1, 0))] {
        let gen_a = cv.generator(ms[a.0], ns[a.1]);
        let gen_b = cv.generator(ms[b.0], ns[b.1]);
        // relation: comp_b ∘ d_M = d_N ∘ comp_a, with d_M from slot a.0 and d_N into slot b.1
        let dm_a = dm.get(b.0, a.0);
        let dn_b = dn.get(b.1, a.1);
        let rhs = cv.compose(&dn_b, &gen_a)?;
        let (ca, cb) = match cv.divide_left(&rhs, &dm_a) {
            Some(v) => (gen_a, v),
            None => {
                let lhs = cv.compose(&gen_b, &dm_a)?;
                let u = cv.divide_right(&lhs, &dn_b).ok_or_else(|| {
                    FrobeniusError::Invariant("hom family has no generator".into())
                })?;
                (u, gen_b)
            }
        };
        let mut mat = Mat::zero(ns.clone(), ms.clone());
        mat.set(a.1, a.0, &ca);
        mat.set(b.1, b.0, &cb);
        let f = MFMorphism::new(cv, vec![*m], vec![*n], mat)?;
        let stable = stable_reduce(cv, &f)?;
        let upower = if !stable.is_zero() {
            0
        } else {
            let len = [ca, cb]
                .iter()
                .filter_map(|c| cv.total_length(c))
                .min()
                .unwrap_or(Ratio::from_integer(0));
            len.floor().to_integer().max(1) as u32
        };
        out.push(HomGenerator {
            morphism: f,
            upower,
        });
    }
    Ok(out)
}

/// `θ_M : F_τ(M) -> M(x, y, τ(i))`, the scalar on the positive end.
pub fn shift_twist(cv: &Cover, tau: &Autoequivalence, m: &MFObject) -> Cyclotomic {
    let fd = cv.apply_sheet(tau, &m.d_minus(cv));
    let std = shift_object(tau, m).d_minus(cv);
    &std.coeff.coeff(0) * &fd.coeff.coeff(0).inv().expect("d_- is a unit multiple")
}

pub fn shift_object(tau: &Autoequivalence, m: &MFObject) -> MFObject {
    MFObject::new(m.x, m.y, tau.map(m.sheet))
}

/// `F_τ` on a Frobenius morphism, transported to the standard shifted objects.
pub fn shift_morphism(cv: &Cover, tau: &Autoequivalence, f: &MFMorphism) -> MFMorphism {
    let mut m = f.m.apply_sheet(cv, tau);
    let tw = |obj: &[MFObject]| -> Vec<Cyclotomic> {
        obj.iter()
            .flat_map(|o| [Cyclotomic::one(), shift_twist(cv, tau, o)])
            .collect()
    };
    let (ts, tt) = (tw(&f.source), tw(&f.target));
    for (r, row) in m.e.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = x.scale(&(&tt[r] * &ts[c].inv().unwrap()));
        }
    }
    MFMorphism {
        source: f.source.iter().map(|o| shift_object(tau, o)).collect(),
        target: f.target.iter().map(|o| shift_object(tau, o)).collect(),
        m,
    }
}

pub fn apply_sheet_functor(
    cv: &Cover,
    tau: &Autoequivalence,
    f: &MFMorphism,
) -> Result<MFMorphism, FrobeniusError> {
    if !commutes_sigma(cv, tau) {
        return Err(FrobeniusError::NotCommuting);
    }
    let g = shift_morphism(cv, tau, f);
    g.check(cv)?;
    Ok(g)
}

pub fn commutes_sigma(cv: &Cover, tau: &Autoequivalence) -> bool {
    let s = Autoequivalence::new(cv.lift.perm.clone(), cv.lift.diag.clone());
    match s {
        Ok(s) => crate::cn::commutes(&s, tau),
        Err(_) => false,
    }
}

pub fn shift_stable(
    cv: &Cover,
    tau: &Autoequivalence,
    f: &StableMorphism,
) -> Result<StableMorphism, FrobeniusError> {
    stable_reduce(cv, &shift_morphism(cv, tau, &lift(cv, f)))
}
