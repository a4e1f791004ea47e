//! Universal exact sequences, pushout triangles and the checks built on them.

use num_traits::Signed;
use rand::Rng;

use super::cover::{Coord, Cover, CoverMorphism, FrobeniusError};
use super::mf::*;
use crate::classify::TriangulationTriple;
use crate::cn::Autoequivalence;
use crate::scalars::{Cyclotomic, RootOfUnity};

/// The data `(σ-lift, τ, φ)` a triangulation is built from.
#[derive(Clone, Debug)]
pub struct Model {
    pub cv: Cover,
    pub tau: Autoequivalence,
    pub phi: Vec<RootOfUnity>,
}

impl Model {
    pub fn new(t: &TriangulationTriple) -> Result<Self, FrobeniusError> {
        t.validate()
            .map_err(|e| FrobeniusError::Invariant(e.to_string()))?;
        Ok(Model {
            cv: Cover::new(t.lift.clone()),
            tau: t.tau.clone(),
            phi: t.phi.c.clone(),
        })
    }

    pub fn shift(&self, m: &MFObject) -> MFObject {
        shift_object(&self.tau, m)
    }

    pub fn shift_all(&self, obj: &[MFObject]) -> Vec<MFObject> {
        obj.iter().map(|m| self.shift(m)).collect()
    }
}

/// `M -> I M -> F_τ M` with underlying splittings `ρ j = 1`, `p s = 1`.
#[derive(Clone, Debug)]
pub struct UniversalSequence {
    pub source: MFObject,
    pub middle: Vec<MFObject>,
    pub target: MFObject,
    pub j: MFMorphism,
    pub p: MFMorphism,
    pub retraction: Mat,
    pub section: Mat,
}

pub fn universal_sequence(md: &Model, m: &MFObject) -> Result<UniversalSequence, FrobeniusError> {
    let cv = &md.cv;
    let (x, y, i) = (m.x, m.y, m.sheet);
    let si = cv.sigma(i);
    let one = RootOfUnity::ONE;
    let i1 = MFObject::new(x, x + 1, i);
    let i2 = MFObject::new(y + 1, y, i);
    let mid = vec![i1, i2];
    let mid_ends = ends_of(cv, &mid);
    let (mneg, mpos) = (m.neg_end(cv), m.pos_end(cv));

    let mut j = Mat::zero(mid_ends.clone(), m.ends(cv));
    j.set(0, 0, &cv.identity(mneg));
    j.set(1, 1, &cv.raw_scalar(y, i, x + 1, i, one));
    j.set(2, 0, &cv.raw_scalar(x - 1, si, y, si, one));
    j.set(3, 1, &cv.identity(mpos));

    // q = (-q1, q2) into M(y+1, x+1, i) = M(x, y, σ(i))
    let qo = MFObject::new(y + 1, x + 1, i);
    let mut q = Mat::zero(qo.ends(cv), mid_ends.clone());
    let mone = RootOfUnity::MINUS_ONE;
    q.set(0, 0, &cv.raw_scalar(x - 1, si, y, si, mone));
    q.set(1, 1, &cv.identity(qo.pos_end(cv)).scaled(mone));
    q.set(0, 2, &cv.identity(qo.neg_end(cv)));
    q.set(1, 3, &cv.raw_scalar(y, i, x + 1, i, one));

    // φ on the ends [x, σ(i), -] = [x+1, i, +] and [y, σ(i), +] = [y+1, i, -]
    let to = md.shift(m);
    let ti = md.tau.map(i);
    let c = md.phi[i];
    let mut phi = Mat::zero(to.ends(cv), qo.ends(cv));
    let ssi = cv.sigma(si);
    phi.set(
        0,
        1,
        &cv.raw_scalar(x - 1, ssi, x - 1, cv.sigma(ti), c.mul(cv.a(ti, si))),
    );
    phi.set(1, 0, &cv.raw_scalar(y, si, y, ti, c));
    let p = phi.mul(cv, &q);

    let mut retraction = Mat::zero(m.ends(cv), mid_ends.clone());
    retraction.set(0, 0, &cv.identity(mneg));
    retraction.set(1, 3, &cv.identity(mpos));
    let mut section = Mat::zero(mid_ends, to.ends(cv));
    for (slot, r) in [(1usize, 0usize), (2, 1)] {
        let f = p.get(r, slot);
        let inv = cv
            .divide_right(&cv.identity(f.target), &f)
            .ok_or_else(|| FrobeniusError::Invariant("p is not split on ends".into()))?;
        section.set(slot, r, &inv);
    }
    let seq = UniversalSequence {
        source: *m,
        middle: mid.clone(),
        target: to,
        j: MFMorphism::new(cv, vec![*m], mid.clone(), j)?,
        p: MFMorphism::new(cv, mid, vec![to], p)?,
        retraction,
        section,
    };
    seq.check(cv)?;
    Ok(seq)
}

impl UniversalSequence {
    pub fn check(&self, cv: &Cover) -> Result<(), FrobeniusError> {
        let bad = |s: &str| Err(FrobeniusError::Invariant(s.into()));
        if !self.p.m.mul(cv, &self.j.m).is_zero() {
            return bad("p j != 0");
        }
        let (src, mid, tgt) = (
            self.source.ends(cv),
            ends_of(cv, &self.middle),
            self.target.ends(cv),
        );
        if self.retraction.mul(cv, &self.j.m) != Mat::identity(src) {
            return bad("ρ j != 1");
        }
        if self.p.m.mul(cv, &self.section) != Mat::identity(tgt) {
            return bad("p s != 1");
        }
        let sum = self
            .j
            .m
            .mul(cv, &self.retraction)
            .add(&self.section.mul(cv, &self.p.m));
        if sum != Mat::identity(mid) {
            return bad("j ρ + s p != 1");
        }
        if self.middle.iter().any(|o| !o.is_proj_inj()) {
            return bad("middle term is not projective-injective");
        }
        Ok(())
    }
}

impl CoverMorphism {
    pub fn scaled(&self, s: RootOfUnity) -> CoverMorphism {
        CoverMorphism {
            coeff: self.coeff.scale(&s.into()),
            ..self.clone()
        }
    }
}

/// Standard components of a matrix factorization with the change of basis
/// `G` (so that `G d G^{-1}` is block diagonal) and its inverse.
pub struct Decomposition {
    pub components: Vec<MFObject>,
    pub g: Mat,
    pub g_inv: Mat,
}

fn row_op(cv: &Cover, m: &mut Mat, a: usize, b: usize, w: &CoverMorphism) {
    for k in 0..m.cols.len() {
        if !m.e[b][k].is_zero() {
            let v = cv.compose(w, &m.get(b, k)).unwrap();
            m.add_at(a, k, &v);
        }
    }
}

fn col_op(cv: &Cover, m: &mut Mat, a: usize, b: usize, w: &CoverMorphism) {
    // col b -= col a ∘ w
    for k in 0..m.rows.len() {
        if !m.e[k][a].is_zero() {
            let v = cv.compose(&m.get(k, a), w).unwrap();
            m.add_at(
                k,
                b,
                &CoverMorphism {
                    coeff: v.coeff.neg(),
                    ..v
                },
            );
        }
    }
}

/// Conjugate by `T = 1 + w e_{ab}`, `w : end b -> end a`.
fn transvect(
    cv: &Cover,
    d: &mut Mat,
    g: &mut Mat,
    gi: &mut Mat,
    a: usize,
    b: usize,
    w: &CoverMorphism,
) {
    row_op(cv, d, a, b, w);
    col_op(cv, d, a, b, w);
    row_op(cv, g, a, b, w);
    col_op(cv, gi, a, b, w);
}

pub fn decompose(cv: &Cover, d0: &Mat) -> Result<Decomposition, FrobeniusError> {
    let bad = |s: String| FrobeniusError::Invariant(s);
    let ends = d0.rows.clone();
    let mut d = d0.clone();
    let mut g = Mat::identity(ends.clone());
    let mut gi = Mat::identity(ends.clone());
    let mut active: Vec<usize> = (0..ends.len()).collect();
    let mut blocks = Vec::new();
    while !active.is_empty() {
        let mut best: Option<(Coord, usize, usize)> = None;
        for &r in &active {
            for &c in &active {
                if r == c {
                    continue;
                }
                if let Some(l) = cv.total_length(&d.get(r, c)) {
                    if best.map_or(true, |(b, _, _)| l < b) {
                        best = Some((l, r, c));
                    }
                }
            }
        }
        let (_, r, c) = best.ok_or_else(|| bad("matrix factorization has a dead end".into()))?;
        for _round in 0..8 {
            let mut dirty = false;
            let p = d.get(r, c);
            for &k in &active {
                if k != c && !d.e[r][k].is_zero() {
                    let u = cv
                        .divide_right(&d.get(r, k), &p)
                        .ok_or_else(|| bad("pivot does not divide row".into()))?;
                    transvect(cv, &mut d, &mut g, &mut gi, c, k, &u);
                    dirty = true;
                }
            }
            let p = d.get(r, c);
            for &k in &active {
                if k != r && !d.e[k][c].is_zero() {
                    let v = cv
                        .divide_left(&d.get(k, c), &p)
                        .ok_or_else(|| bad("pivot does not divide column".into()))?;
                    let w = CoverMorphism {
                        coeff: v.coeff.neg(),
                        ..v
                    };
                    transvect(cv, &mut d, &mut g, &mut gi, k, r, &w);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        for &k in &active {
            let stray = (k != c && !d.e[r][k].is_zero())
                || (k != r && !d.e[k][c].is_zero())
                || (k != r && !d.e[c][k].is_zero())
                || (k != c && !d.e[k][r].is_zero());
            if stray {
                return Err(bad("elimination did not split a block".into()));
            }
        }
        blocks.push((c, r));
        active.retain(|&k| k != c && k != r);
    }

    // reorder into (neg, pos) pairs and normalize the positive ends
    let order: Vec<usize> = blocks.iter().flat_map(|&(c, r)| [c, r]).collect();
    let all: Vec<usize> = (0..ends.len()).collect();
    let d = d.select(&order, &order);
    let g = g.select(&order, &all);
    let gi = gi.select(&all, &order);
    let mut comps = Vec::new();
    let mut theta = Mat::zero(vec![], vec![]);
    let mut theta_inv = Mat::zero(vec![], vec![]);
    for (b, _) in blocks.iter().enumerate() {
        let p = d.get(2 * b + 1, 2 * b);
        let len = cv.total_length(&p).unwrap();
        let pc = p.source;
        let x = pc.x + 1;
        let i = cv.sigma_inv(pc.sheet);
        let m = MFObject::new(x, pc.x + len, i);
        let th = cv
            .divide_left(&m.d_minus(cv), &p)
            .ok_or_else(|| bad("positive end normalization failed".into()))?;
        let th_inv = cv
            .divide_right(&cv.identity(th.target), &th)
            .ok_or_else(|| bad("end normalization is not invertible".into()))?;
        let mut t = Mat::zero(m.ends(cv), vec![pc, p.target]);
        t.set(0, 0, &cv.identity(pc));
        t.set(1, 1, &th);
        let mut ti = Mat::zero(vec![pc, p.target], m.ends(cv));
        ti.set(0, 0, &cv.identity(pc));
        ti.set(1, 1, &th_inv);
        theta = theta.block_diag(&t);
        theta_inv = theta_inv.block_diag(&ti);
        comps.push(m);
    }
    let g = theta.mul(cv, &g);
    let g_inv = gi.mul(cv, &theta_inv);
    let check = g.mul(cv, d0).mul(cv, &g_inv);
    if check != d_of(cv, &comps) {
        return Err(bad(
            "decomposition does not conjugate d to standard form".into()
        ));
    }
    let _ = d;
    Ok(Decomposition {
        components: comps,
        g,
        g_inv,
    })
}

/// A triangle of the stable category with its shift `T = F_τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub x: Vec<MFObject>,
    pub y: Vec<MFObject>,
    pub z: Vec<MFObject>,
    pub f: StableMorphism,
    pub g: StableMorphism,
    pub h: StableMorphism,
    /// Projective-injective summands dropped from the pushout.
    pub dropped: Vec<MFObject>,
}

/// The pushout of `j : X -> IX` along `f`, decomposed and stably reduced.
pub fn triangle_from(md: &Model, f: &MFMorphism) -> Result<Triangle, FrobeniusError> {
    let cv = &md.cv;
    f.check(cv)?;
    let seqs = f
        .source
        .iter()
        .map(|m| universal_sequence(md, m))
        .collect::<Result<Vec<_>, _>>()?;
    let empty = || Mat::zero(vec![], vec![]);
    let (mut rho, mut s, mut p) = (empty(), empty(), empty());
    let mut mid = Vec::new();
    for q in &seqs {
        rho = rho.block_diag(&q.retraction);
        s = s.block_diag(&q.section);
        p = p.block_diag(&q.p.m);
        mid.extend(q.middle.iter().copied());
    }
    let tx: Vec<MFObject> = seqs.iter().map(|q| q.target).collect();
    let d_i = d_of(cv, &mid);
    let e = rho.mul(cv, &d_i).mul(cv, &s);
    let (yends, tends) = (ends_of(cv, &f.target), ends_of(cv, &tx));
    let d_y = d_of(cv, &f.target);
    let d_t = d_of(cv, &tx);
    let top = d_y.hstack(&f.m.mul(cv, &e));
    let bottom = Mat::zero(tends.clone(), yends.clone()).hstack(&d_t);
    let dz = top.vstack(&bottom);
    let zends = dz.rows.clone();
    if dz.mul(cv, &dz) != Mat::t_identity(zends.clone()) {
        return Err(FrobeniusError::Invariant(
            "pushout differential does not square to t".into(),
        ));
    }
    let push = f.m.mul(cv, &rho).vstack(&p);
    if dz.mul(cv, &push) != push.mul(cv, &d_i) {
        return Err(FrobeniusError::Invariant(
            "pushout map does not commute with d".into(),
        ));
    }
    let g0 = Mat::identity(yends.clone()).vstack(&Mat::zero(tends.clone(), yends.clone()));
    let h0 = Mat::zero(tends.clone(), yends).hstack(&Mat::identity(tends));
    let dec = decompose(cv, &dz)?;
    let gm = MFMorphism::new(
        cv,
        f.target.clone(),
        dec.components.clone(),
        dec.g.mul(cv, &g0),
    )?;
    let hm = MFMorphism::new(
        cv,
        dec.components.clone(),
        tx.clone(),
        h0.mul(cv, &dec.g_inv),
    )?;
    let fs = stable_reduce(cv, f)?;
    let gs = stable_reduce(cv, &gm)?;
    let hs = stable_reduce(cv, &hm)?;
    Ok(Triangle {
        x: fs.source.clone(),
        y: fs.target.clone(),
        z: gs.target.clone(),
        f: fs,
        g: gs,
        h: hs,
        dropped: dec
            .components
            .into_iter()
            .filter(|m| m.is_proj_inj())
            .collect(),
    })
}

/// `(Y, Z, TX, g, h, -T f)`.
pub fn rotate_triangle(md: &Model, t: &Triangle) -> Result<Triangle, FrobeniusError> {
    let tf = shift_stable(&md.cv, &md.tau, &t.f)?.neg();
    Ok(Triangle {
        x: t.y.clone(),
        y: t.z.clone(),
        z: tf.source.clone(),
        f: t.g.clone(),
        g: t.h.clone(),
        h: tf,
        dropped: vec![],
    })
}

/// Replace the representative of component `k` of `Z` by an isomorphic
/// object `rep` (same ends up to sheet), transporting `g` and `h`.
pub fn restate_z(
    md: &Model,
    t: &Triangle,
    k: usize,
    rep: MFObject,
) -> Result<Triangle, FrobeniusError> {
    let cv = &md.cv;
    let old = t.z[k];
    let fr = fit_rep(cv, &old, &rep).filter(|f| (f.x, f.y) == (old.x, old.y));
    if fr.is_none() {
        return Err(FrobeniusError::Input(format!(
            "{rep} is not isomorphic to {old}"
        )));
    }
    let mut z = t.z.clone();
    z[k] = rep;
    let n = z.len();
    let unit = |l: usize, c: usize| {
        if l == c {
            Cyclotomic::one()
        } else {
            Cyclotomic::zero()
        }
    };
    let theta = StableMorphism {
        source: t.z.clone(),
        target: z.clone(),
        s: (0..n)
            .map(|l| (0..n).map(|c| unit(l, c)).collect())
            .collect(),
    };
    let theta_inv = StableMorphism {
        source: z.clone(),
        target: t.z.clone(),
        s: theta.s.clone(),
    };
    let g = stable_compose(cv, &theta, &t.g)?;
    let h = stable_compose(cv, &t.h, &theta_inv)?;
    let back = stable_compose(cv, &theta_inv, &theta)?;
    if back != stable_identity(&t.z) {
        return Err(FrobeniusError::Invariant(
            "restatement is not an isomorphism".into(),
        ));
    }
    Ok(Triangle {
        z,
        g,
        h,
        ..t.clone()
    })
}

/// Solve `A v = b` over the cyclotomics: a particular solution and a kernel basis.
pub fn solve_linear(
    a: &[Vec<Cyclotomic>],
    b: &[Cyclotomic],
    nvars: usize,
) -> Option<(Vec<Cyclotomic>, Vec<Vec<Cyclotomic>>)> {
    let mut m: Vec<Vec<Cyclotomic>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].inv().ok()?;
        m[row] = m[row].iter().map(|x| x * &inv).collect();
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                m[r] = m[r]
                    .iter()
                    .zip(&pivot_row)
                    .map(|(x, y)| x - &(&f * y))
                    .collect();
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[nvars].is_zero()) {
        return None;
    }
    let mut x = vec![Cyclotomic::zero(); nvars];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][nvars].clone();
    }
    let mut kernel = Vec::new();
    for free in (0..nvars).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Cyclotomic::zero(); nvars];
        v[free] = Cyclotomic::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -&m[r][free];
        }
        kernel.push(v);
    }
    Some((x, kernel))
}

/// Stable homs `source -> target` supported in the window, one per entry.
fn hom_basis(cv: &Cover, source: &[MFObject], target: &[MFObject]) -> Vec<StableMorphism> {
    let mut out = Vec::new();
    for l in 0..target.len() {
        for k in 0..source.len() {
            if fit_rep(cv, &source[k], &target[l]).is_some() {
                let mut s = vec![vec![Cyclotomic::zero(); source.len()]; target.len()];
                s[l][k] = Cyclotomic::one();
                out.push(StableMorphism {
                    source: source.to_vec(),
                    target: target.to_vec(),
                    s,
                });
            }
        }
    }
    out
}

fn flat(s: &StableMorphism) -> Vec<Cyclotomic> {
    s.s.iter().flatten().cloned().collect()
}

fn combine(
    basis: &[StableMorphism],
    coef: &[Cyclotomic],
    source: &[MFObject],
    target: &[MFObject],
) -> StableMorphism {
    let mut s = vec![vec![Cyclotomic::zero(); source.len()]; target.len()];
    for (b, c) in basis.iter().zip(coef) {
        for l in 0..target.len() {
            for k in 0..source.len() {
                if !b.s[l][k].is_zero() {
                    s[l][k] = &s[l][k] + &(c * &b.s[l][k]);
                }
            }
        }
    }
    StableMorphism {
        source: source.to_vec(),
        target: target.to_vec(),
        s,
    }
}

/// A linear constraint `L(θ) = rhs` where `L` is given on basis elements.
type Constraint<'a> = (
    Box<dyn Fn(&StableMorphism) -> Result<StableMorphism, FrobeniusError> + 'a>,
    StableMorphism,
);

/// All `θ : source -> target` satisfying the constraints, as particular
/// solution plus kernel.
fn solve_morphism(
    cv: &Cover,
    source: &[MFObject],
    target: &[MFObject],
    cons: &[Constraint<'_>],
) -> Result<Option<(StableMorphism, Vec<StableMorphism>)>, FrobeniusError> {
    let basis = hom_basis(cv, source, target);
    let mut rows: Vec<Vec<Cyclotomic>> = Vec::new();
    let mut rhs = Vec::new();
    for (op, want) in cons {
        let effects = basis.iter().map(op).collect::<Result<Vec<_>, _>>()?;
        let cols: Vec<Vec<Cyclotomic>> = effects.iter().map(flat).collect();
        let w = flat(want);
        for (e, r) in w.iter().enumerate() {
            rows.push(cols.iter().map(|c| c[e].clone()).collect());
            rhs.push(r.clone());
        }
    }
    let Some((x, ker)) = solve_linear(&rows, &rhs, basis.len()) else {
        return Ok(None);
    };
    let part = combine(&basis, &x, source, target);
    let kern = ker
        .iter()
        .map(|k| combine(&basis, k, source, target))
        .collect();
    Ok(Some((part, kern)))
}

fn is_iso(cv: &Cover, th: &StableMorphism) -> Result<bool, FrobeniusError> {
    if th.source.len() != th.target.len() {
        return Ok(false);
    }
    let id_s = stable_identity(&th.source);
    let id_t = stable_identity(&th.target);
    let cons: Vec<Constraint<'_>> = vec![
        (
            Box::new(|psi: &StableMorphism| stable_compose(cv, psi, th)),
            id_s,
        ),
        (
            Box::new(|psi: &StableMorphism| stable_compose(cv, th, psi)),
            id_t,
        ),
    ];
    Ok(solve_morphism(cv, &th.target, &th.source, &cons)?.is_some())
}

/// An isomorphism `θ : C -> Z` with `θ g' = g` and `h θ = h'`, if any.
fn find_iso(
    cv: &Cover,
    oracle: &Triangle,
    t: &Triangle,
) -> Result<Option<StableMorphism>, FrobeniusError> {
    let cons: Vec<Constraint<'_>> = vec![
        (
            Box::new(|th: &StableMorphism| stable_compose(cv, th, &oracle.g)),
            t.g.clone(),
        ),
        (
            Box::new(|th: &StableMorphism| stable_compose(cv, &t.h, th)),
            oracle.h.clone(),
        ),
    ];
    let Some((part, ker)) = solve_morphism(cv, &oracle.z, &t.z, &cons)? else {
        return Ok(None);
    };
    for trial in 0..6i128 {
        let mut gens = vec![part.clone()];
        let mut coef = vec![Cyclotomic::one()];
        for (k, v) in ker.iter().enumerate() {
            gens.push(v.clone());
            coef.push(Cyclotomic::from_int(
                1 + trial + 2 * (k as i128) * (trial + 1),
            ));
        }
        let th = combine(&gens, &coef, &oracle.z, &t.z);
        if is_iso(cv, &th)? {
            return Ok(Some(th));
        }
        if ker.is_empty() {
            break;
        }
    }
    Ok(None)
}

/// Whether `t` is isomorphic (fixing `X`, `Y`, `f`) to the pushout triangle of `t.f`.
pub fn is_distinguished(md: &Model, t: &Triangle) -> Result<bool, FrobeniusError> {
    let oracle = triangle_from(md, &lift(&md.cv, &t.f))?;
    if oracle.z.len() != t.z.len() {
        return Ok(false);
    }
    Ok(find_iso(&md.cv, &oracle, t)?.is_some())
}

/// A fill-in `c : Z -> Z'` for a commuting square `b f = f' a`.
pub fn complete_morphism(
    md: &Model,
    t1: &Triangle,
    t2: &Triangle,
    a: &StableMorphism,
    b: &StableMorphism,
) -> Result<Option<StableMorphism>, FrobeniusError> {
    let cv = &md.cv;
    let bf = stable_compose(cv, b, &t1.f)?;
    let fa = stable_compose(cv, &t2.f, a)?;
    if bf != fa {
        return Err(FrobeniusError::Input("square does not commute".into()));
    }
    let want_g = stable_compose(cv, &t2.g, b)?;
    let ta = shift_stable(cv, &md.tau, a)?;
    let want_h = stable_compose(cv, &ta, &t1.h)?;
    let cons: Vec<Constraint<'_>> = vec![
        (
            Box::new(|c: &StableMorphism| stable_compose(cv, c, &t1.g)),
            want_g,
        ),
        (
            Box::new(|c: &StableMorphism| stable_compose(cv, &t2.h, c)),
            want_h,
        ),
    ];
    Ok(solve_morphism(cv, &t1.z, &t2.z, &cons)?.map(|(c, _)| c))
}

/// Scalars of a triangle with single `X` and `Z`, after rescaling `Z` so
/// that the last nonzero entry of `g` is 1. `h` is measured against
/// `φ_X ∘ (contractible Z -> F_σ X)`, with `F_σ X` written as `M(y+1, x+1, i)`;
/// that composite counts as `c_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleScalars {
    pub f: Vec<Cyclotomic>,
    pub g: Vec<Cyclotomic>,
    pub h: Cyclotomic,
}

pub fn normalized_scalars(md: &Model, t: &Triangle) -> Result<TriangleScalars, FrobeniusError> {
    if t.z.len() != 1 || t.x.len() != 1 {
        return Err(FrobeniusError::Input(
            "normalized scalars need single X and Z".into(),
        ));
    }
    let cv = &md.cv;
    let (x, w) = (t.x[0], t.z[0]);
    let q = MFObject::new(x.y + 1, x.x + 1, x.sheet);
    if !fits(&w, &q) {
        return Err(FrobeniusError::Input(format!(
            "{w} has no contractible map to {q}"
        )));
    }
    let b = MFMorphism::new(cv, vec![w], vec![q], basic(cv, &w, &q))?;
    let route = stable_reduce(cv, &phi_mor(md, &x).compose(cv, &b))?.s[0][0].clone();
    let f: Vec<Cyclotomic> = (0..t.y.len()).map(|l| t.f.s[l][0].clone()).collect();
    let g: Vec<Cyclotomic> = t.g.s[0].clone();
    let last = g
        .iter()
        .rev()
        .find(|c| !c.is_zero())
        .cloned()
        .ok_or_else(|| FrobeniusError::Invariant("g vanishes".into()))?;
    let inv = last.inv().unwrap();
    let c: Cyclotomic = md.phi[x.sheet].into();
    let h = &(&(&t.h.s[0][0] * &last) * &c)
        * &route
            .inv()
            .map_err(|_| FrobeniusError::Invariant("φ-route vanishes".into()))?;
    Ok(TriangleScalars {
        f,
        g: g.iter().map(|c| c * &inv).collect(),
        h,
    })
}

/// `M(x,y,i) -> M(x,z,i) -> M(y+1,z,i) -> M(x,y,τ(i))` for `0 < x < y < z < 1`.
pub fn positive_triangle(
    md: &Model,
    x: Coord,
    y: Coord,
    z: Coord,
    i: usize,
) -> Result<Triangle, FrobeniusError> {
    let (zero, one) = (Coord::from_integer(0), Coord::from_integer(1));
    if !(zero < x && x < y && y < z && z < one) {
        return Err(FrobeniusError::Input("need 0 < x < y < z < 1".into()));
    }
    let cv = &md.cv;
    let a = MFObject::new(x, y, i);
    let b = MFObject::new(x, z, i);
    let f = MFMorphism::new(cv, vec![a], vec![b], basic(cv, &a, &b))?;
    let t = triangle_from(md, &f)?;
    if t.z.len() != 1 {
        return Err(FrobeniusError::Invariant(format!(
            "positive triangle has {} components",
            t.z.len()
        )));
    }
    restate_z(md, &t, 0, MFObject::new(y + 1, z, i))
}

/// `X -> I_1 X ⊕ I_2 X -> Y -> TX` with `I_1 = M(y+1-ε₁, y, i)`,
/// `I_2 = M(x, x+1-ε₂, i)` and `Y = M(y+1-ε₁, x+1-ε₂, i)`.
///
/// Admissibility `0 < ε₁ < y+1-x`, `0 < ε₂ < x+1-y` is the ends-coordinate
/// bound rewritten for `M(x, y, i)`: the ends object `E(a, b)` is `M(a+1, b)`.
pub fn universal_virtual_triangle(
    md: &Model,
    m: &MFObject,
    e1: Coord,
    e2: Coord,
) -> Result<Triangle, FrobeniusError> {
    let cv = &md.cv;
    let (x, y, i) = (m.x, m.y, m.sheet);
    let zero = Coord::from_integer(0);
    if m.is_proj_inj() || (y - x).abs() > Coord::from_integer(1) {
        return Err(FrobeniusError::Input(format!(
            "{m} must satisfy |y - x| < 1"
        )));
    }
    if !(zero < e1 && e1 < y + 1 - x && zero < e2 && e2 < x + 1 - y) {
        return Err(FrobeniusError::Input(
            "ε out of the admissible range".into(),
        ));
    }
    let i1 = MFObject::new(y + 1 - e1, y, i);
    let i2 = MFObject::new(x, x + 1 - e2, i);
    let mat = basic(cv, m, &i1).vstack(&basic(cv, m, &i2));
    let f = MFMorphism::new(cv, vec![*m], vec![i1, i2], mat)?;
    let t = triangle_from(md, &f)?;
    if t.z.len() != 1 {
        return Err(FrobeniusError::Invariant(format!(
            "virtual triangle has {} components",
            t.z.len()
        )));
    }
    restate_z(md, &t, 0, MFObject::new(y + 1 - e1, x + 1 - e2, i))
}

/// Outcome of the sampled axiom checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct AxiomReport {
    pub generic_samples: usize,
    pub generic_failures: Vec<String>,
    pub shared_end_samples: usize,
    pub shared_end_failures: Vec<String>,
    pub rotation_samples: usize,
    pub rotation_failures: Vec<String>,
    pub completion_samples: usize,
    pub completion_failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.generic_failures.is_empty()
            && self.shared_end_failures.is_empty()
            && self.rotation_failures.is_empty()
            && self.completion_failures.is_empty()
    }
}

const GRID: i64 = 24;

fn rand_coord<R: Rng>(rng: &mut R, lo: Coord, hi: Coord) -> Option<Coord> {
    let a = (lo * GRID).floor().to_integer() + 1;
    let b = (hi * GRID).ceil().to_integer() - 1;
    (a <= b).then(|| Coord::new(rng.gen_range(a..=b), GRID))
}

/// A random object with `|y - x| < 1`.
pub fn random_object<R: Rng>(rng: &mut R, n: usize) -> MFObject {
    let x = Coord::new(rng.gen_range(0..2 * GRID), GRID);
    let w = Coord::new(rng.gen_range(-GRID + 1..GRID), GRID);
    MFObject::new(x, x + w, rng.gen_range(0..n))
}

/// A random target in the window of `m`, not sharing its ends when `generic`.
pub fn random_window_target<R: Rng>(
    rng: &mut R,
    cv: &Cover,
    m: &MFObject,
    generic: bool,
) -> Option<MFObject> {
    for _ in 0..64 {
        let xp = rand_coord(rng, m.x, m.y + 1)?;
        let lo = m.y.max(xp - 1);
        let hi = (m.x + 1).min(xp + 1);
        let yp = if generic {
            rand_coord(rng, lo, hi)
        } else if rng.gen_bool(0.5) {
            Some(m.y)
        } else {
            rand_coord(rng, lo, hi)
        };
        let Some(yp) = yp else { continue };
        let xp = if generic || yp == m.y { xp } else { m.x };
        let n = MFObject::new(xp, yp, rng.gen_range(0..cv.n()));
        if n.is_proj_inj() || !fits(m, &n) || (n.y - n.x).abs() >= Coord::from_integer(1) {
            continue;
        }
        if generic == m.shares_end(&n) {
            continue;
        }
        return Some(n);
    }
    None
}

fn random_unit<R: Rng>(rng: &mut R) -> Cyclotomic {
    RootOfUnity::new(rng.gen_range(0..12), 12).into()
}

fn generic_triangle<R: Rng>(
    md: &Model,
    rng: &mut R,
    generic: bool,
) -> Result<Option<(MFObject, MFObject, Triangle)>, FrobeniusError> {
    let cv = &md.cv;
    let m = random_object(rng, cv.n());
    let Some(n) = random_window_target(rng, cv, &m, generic) else {
        return Ok(None);
    };
    let f = MFMorphism::new(
        cv,
        vec![m],
        vec![n],
        basic_into(cv, &m, &n).unwrap().scale(&random_unit(rng)),
    )?;
    Ok(Some((m, n, triangle_from(md, &f)?)))
}

fn end_multiset(obj: &[MFObject]) -> Vec<Coord> {
    let mut v: Vec<Coord> = obj.iter().flat_map(|m| m.end_coords()).collect();
    v.sort();
    v
}

pub fn verify_axiom_samples<R: Rng>(
    t: &TriangulationTriple,
    sample_size: usize,
    rng: &mut R,
) -> Result<AxiomReport, FrobeniusError> {
    let md = Model::new(t)?;
    let cv = &md.cv;
    let mut rep = AxiomReport::default();
    let mut attempts = 0;
    while rep.generic_samples < sample_size && attempts < 20 * sample_size {
        attempts += 1;
        let Some((m, n, tri)) = generic_triangle(&md, rng, true)? else {
            continue;
        };
        rep.generic_samples += 1;
        let tag = format!("{m} -> {n}");
        let mut ends_y = end_multiset(&[n, md.shift(&m)]);
        ends_y.sort();
        if tri.z.len() != 2 || !tri.dropped.is_empty() || end_multiset(&tri.z) != ends_y {
            rep.generic_failures.push(format!("{tag}: Z = {:?}", tri.z));
            continue;
        }
        rep.rotation_samples += 1;
        let rot = rotate_triangle(&md, &tri)?;
        if !is_distinguished(&md, &rot)? {
            rep.rotation_failures.push(tag.clone());
        }
        // square with a = 1 and b a random window morphism out of Y
        let coin = rng.gen_bool(0.5);
        let Some(n2) = random_window_target(rng, cv, &n, coin) else {
            continue;
        };
        let b = StableMorphism {
            source: vec![n],
            target: vec![n2],
            s: vec![vec![random_unit(rng)]],
        };
        let bf = lift(cv, &b).compose(cv, &lift(cv, &tri.f));
        let t2 = triangle_from(&md, &bf)?;
        rep.completion_samples += 1;
        if complete_morphism(&md, &tri, &t2, &stable_identity(&tri.x), &b)?.is_none() {
            rep.completion_failures.push(format!("{tag} -> {n2}"));
        }
    }
    attempts = 0;
    while rep.shared_end_samples < sample_size.div_ceil(5) && attempts < 20 * sample_size {
        attempts += 1;
        let Some((m, n, tri)) = generic_triangle(&md, rng, false)? else {
            continue;
        };
        rep.shared_end_samples += 1;
        if tri.z.len() >= 2 {
            rep.shared_end_failures
                .push(format!("{m} -> {n}: Z = {:?}", tri.z));
        }
    }
    if rep.generic_samples < sample_size {
        rep.generic_failures
            .push(format!("only {} samples drawn", rep.generic_samples));
    }
    Ok(rep)
}

/// `φ_X : M(y+1, x+1, i) = F_σ X -> F_τ X`.
pub fn phi_mor(md: &Model, m: &MFObject) -> MFMorphism {
    let cv = &md.cv;
    let (x, y, i) = (m.x, m.y, m.sheet);
    let si = cv.sigma(i);
    let ti = md.tau.map(i);
    let qo = MFObject::new(y + 1, x + 1, i);
    let to = md.shift(m);
    let c = md.phi[i];
    let mut phi = Mat::zero(to.ends(cv), qo.ends(cv));
    phi.set(
        0,
        1,
        &cv.raw_scalar(
            x - 1,
            cv.sigma(si),
            x - 1,
            cv.sigma(ti),
            c.mul(cv.a(ti, si)),
        ),
    );
    phi.set(1, 0, &cv.raw_scalar(y, si, y, ti, c));
    MFMorphism::new(cv, vec![qo], vec![to], phi).expect("φ commutes with d")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::par::Exec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(p: i64, q: i64) -> Coord {
        Coord::new(p, q)
    }

    fn models() -> Vec<(TriangulationTriple, Model)> {
        classify(2, 2, Exec::Sequential)
            .unwrap()
            .into_iter()
            .map(|r| {
                let m = Model::new(&r.representative).unwrap();
                (r.representative, m)
            })
            .collect()
    }

    #[test]
    fn make_mf_squares_to_t() {
        let cv = Cover::new(crate::cn::MonomialLift {
            perm: vec![0],
            diag: vec![RootOfUnity::ONE],
        });
        make_mf(c(1, 4), c(1, 2), 0, &cv).unwrap();
        assert!(make_mf(c(0, 1), c(3, 2), 0, &cv).is_err());
        let pi = make_mf(c(1, 1), c(0, 1), 0, &cv).unwrap();
        assert!(pi.is_proj_inj());
        let lens: Vec<Coord> = [pi.d_minus(&cv), pi.d_plus(&cv)]
            .iter()
            .map(|f| cv.total_length(f).unwrap())
            .collect();
        assert!(lens.contains(&c(0, 1)));
    }

    #[test]
    fn canonical_representatives() {
        let (_, md) = &models()[2];
        let cv = &md.cv;
        let m = MFObject::new(c(1, 4), c(1, 2), 0);
        assert_eq!(m.canonical(cv), (m, false));
        let w = MFObject::new(c(3, 2), c(3, 4), 1);
        let (k, _) = w.canonical(cv);
        assert_eq!(w.relation(cv, &k).is_some(), true);
        assert_eq!(w.swap(cv).swap(cv), w.shift(cv, -1));
        for x in [c(1, 3), c(3, 2)] {
            for i in 0..2 {
                let a = MFObject::new(x, x - 1, cv.sigma(i));
                let b = MFObject::new(x + 2, x + 1, cv.sigma_inv(i));
                assert_eq!(a.canonical(cv).0, b.canonical(cv).0);
            }
        }
    }

    #[test]
    fn hom_generators() {
        for (_, md) in models() {
            let cv = &md.cv;
            let m = MFObject::new(c(1, 4), c(1, 2), 0);
            let gens = hom_mf(cv, &m, &m).unwrap();
            let id = MFMorphism::identity(cv, vec![m]);
            assert!(gens.iter().any(|g| g.morphism == id && g.upower == 0));
            let n = MFObject::new(c(1, 2), c(3, 4), 1);
            let gens = hom_mf(cv, &m, &n).unwrap();
            assert_eq!(gens.iter().filter(|g| g.upower == 0).count(), 1);
            let far = MFObject::new(c(3, 2), c(7, 4), 0);
            assert!(
                hom_mf(cv, &n, &far).unwrap().iter().all(|g| g.upower > 0)
                    || fit_rep(cv, &n, &far).is_some()
            );
            let outside = MFObject::new(c(1, 1), c(1, 2), 0);
            assert!(fit_rep(cv, &n, &outside).is_none());
            assert!(hom_mf(cv, &n, &outside)
                .unwrap()
                .iter()
                .all(|g| g.upower > 0));
        }
    }

    #[test]
    fn sheet_functor_cases() {
        for (t, md) in models() {
            let cv = &md.cv;
            let m = MFObject::new(c(1, 3), c(5, 6), 1);
            let n = MFObject::new(c(1, 2), c(5, 6), 0);
            let f = MFMorphism::new(cv, vec![m], vec![n], basic_into(cv, &m, &n).unwrap()).unwrap();
            let id = Autoequivalence::identity(2);
            assert_eq!(apply_sheet_functor(cv, &id, &f).unwrap(), f);
            let fs = apply_sheet_functor(cv, &t.sigma, &f).unwrap();
            assert_eq!(fs.source, vec![MFObject::new(m.x, m.y, t.sigma.map(1))]);
            let ft = apply_sheet_functor(cv, &t.tau, &f).unwrap();
            // shift continuity
            let a = apply_sheet_functor(cv, &t.sigma, &ft).unwrap();
            let b = apply_sheet_functor(cv, &t.tau, &fs).unwrap();
            assert_eq!(
                stable_reduce(cv, &a).unwrap(),
                stable_reduce(cv, &b).unwrap()
            );
            // both representatives of M shift to representatives of one object
            let s1 = md.shift(&m);
            let s2 = md.shift(&m.swap(cv));
            assert!(s1.relation(cv, &s2).is_some());
        }
    }

    #[test]
    fn universal_sequence_relabeling() {
        for (_, md) in models() {
            let cv = &md.cv;
            for i in 0..2 {
                let m = MFObject::new(c(1, 4), c(2, 3), i);
                let a = universal_sequence(&md, &m).unwrap();
                let b = universal_sequence(&md, &m.swap(cv)).unwrap();
                assert_eq!(b.j.m.select(&[3, 2, 1, 0], &[1, 0]), a.j.m);
                assert_eq!(b.p.m.select(&[1, 0], &[3, 2, 1, 0]), a.p.m);
            }
            let pi = MFObject::new(c(3, 2), c(1, 2), 0);
            let s = universal_sequence(&md, &pi).unwrap();
            let iso =
                s.j.m
                    .components()
                    .into_iter()
                    .any(|(_, _, f)| cv.total_length(&f) == Some(c(0, 1)));
            assert!(iso);
        }
    }

    #[test]
    fn positive_and_virtual_scalars() {
        for (t, md) in models() {
            for i in 0..2 {
                let ci: Cyclotomic = t.c(i).into();
                let p = normalized_scalars(
                    &md,
                    &positive_triangle(&md, c(1, 4), c(1, 2), c(3, 4), i).unwrap(),
                )
                .unwrap();
                assert_eq!(
                    (p.f, p.g, p.h),
                    (vec![Cyclotomic::one()], vec![Cyclotomic::one()], ci.clone())
                );
                let m = MFObject::new(c(1, 4), c(1, 2), i);
                let v = normalized_scalars(
                    &md,
                    &universal_virtual_triangle(&md, &m, c(1, 3), c(1, 5)).unwrap(),
                )
                .unwrap();
                assert_eq!(v.f, vec![Cyclotomic::one(), Cyclotomic::one()]);
                assert_eq!(v.g, vec![-Cyclotomic::one(), Cyclotomic::one()]);
                assert_eq!(v.h, ci);
            }
        }
    }

    #[test]
    fn negated_h_is_not_distinguished() {
        let (_, md) = &models()[0];
        let m = MFObject::new(c(1, 4), c(1, 2), 0);
        let t = universal_virtual_triangle(md, &m, c(1, 3), c(1, 5)).unwrap();
        assert!(is_distinguished(md, &t).unwrap());
        let bad = Triangle { h: t.h.neg(), ..t };
        assert!(!is_distinguished(md, &bad).unwrap());
    }

    #[test]
    fn skew_sign_law_on_virtual_triangles() {
        for (t, md) in models() {
            let cv = &md.cv;
            for i in 0..2 {
                let si = cv.sigma(i);
                let h = |k: usize| {
                    let m = MFObject::new(c(1, 3), c(1, 2), k);
                    normalized_scalars(
                        &md,
                        &universal_virtual_triangle(&md, &m, c(1, 4), c(1, 4)).unwrap(),
                    )
                    .unwrap()
                    .h
                };
                let a: Cyclotomic = t.sigma.a(t.tau.map(i), si).into();
                assert_eq!(h(si), -(&a * &h(i)));
            }
        }
    }

    #[test]
    fn degenerate_triangles() {
        for (_, md) in models() {
            let cv = &md.cv;
            let m = MFObject::new(c(1, 4), c(1, 2), 1);
            let t = triangle_from(&md, &MFMorphism::identity(cv, vec![m])).unwrap();
            assert!(t.z.is_empty());
            let n = MFObject::new(c(5, 4), c(3, 2), 0);
            let t = triangle_from(&md, &MFMorphism::zero(cv, vec![m], vec![n])).unwrap();
            let mut got: Vec<MFObject> = t.z.iter().map(|o| o.canonical(cv).0).collect();
            let mut want = vec![n.canonical(cv).0, md.shift(&m).canonical(cv).0];
            got.sort();
            want.sort();
            assert_eq!(got, want);
            let t = triangle_from(&md, &MFMorphism::zero(cv, vec![], vec![])).unwrap();
            assert!(t.x.is_empty() && t.y.is_empty() && t.z.is_empty());
        }
    }

    #[test]
    fn rotations() {
        for (_, md) in models() {
            let t = positive_triangle(&md, c(1, 4), c(1, 2), c(3, 4), 0).unwrap();
            let r = rotate_triangle(&md, &t).unwrap();
            assert!(is_distinguished(&md, &r).unwrap());
            let r3 = rotate_triangle(&md, &rotate_triangle(&md, &r).unwrap()).unwrap();
            let sh = |f: &StableMorphism| shift_stable(&md.cv, &md.tau, f).unwrap().neg();
            assert_eq!((r3.f, r3.g, r3.h), (sh(&t.f), sh(&t.g), sh(&t.h)));
        }
    }

    #[test]
    fn shared_end_drops_a_component() {
        let (_, md) = &models()[1];
        let cv = &md.cv;
        let m = MFObject::new(c(1, 4), c(1, 2), 0);
        let n = MFObject::new(c(1, 4), c(3, 4), 1);
        let f = MFMorphism::new(cv, vec![m], vec![n], basic_into(cv, &m, &n).unwrap()).unwrap();
        let t = triangle_from(md, &f).unwrap();
        assert_eq!(t.z.len(), 1);
        assert_eq!(t.dropped.len(), 1);
    }

    #[test]
    fn axiom_samples_small() {
        for (t, _) in models() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let r = verify_axiom_samples(&t, 6, &mut rng).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
