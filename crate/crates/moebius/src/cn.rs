//! The category `C_n`: `n` objects, one-dimensional hom spaces spanned by
//! basic morphisms `x_ij : j -> i` with `x_ij x_jk = x_ik`.
//!
//! Indices are 0-based internally and 1-based in JSON.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalars::{Cyclotomic, RootOfUnity};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CnError {
    #[error("cannot compose: source {source_obj} of the outer morphism differs from target {target_obj}")]
    CompositionDomain {
        source_obj: usize,
        target_obj: usize,
    },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("object map is not a bijection")]
    NotAutomorphism,
    #[error("the two functors do not commute")]
    NotCommuting,
    #[error("invalid object map entry {0} for n = {1}")]
    BadObjectMap(usize, usize),
    #[error("coefficient vector has length {0}, expected {1}")]
    BadCoefficients(usize, usize),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

/// `scalar * x_{target, source}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicMorphismCn {
    pub source: usize,
    pub target: usize,
    pub scalar: Cyclotomic,
}

impl BasicMorphismCn {
    pub fn new(target: usize, source: usize, scalar: Cyclotomic) -> Self {
        BasicMorphismCn {
            source,
            target,
            scalar,
        }
    }

    /// `x_{target, source}` with scalar 1.
    pub fn basic(target: usize, source: usize) -> Self {
        Self::new(target, source, Cyclotomic::one())
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }
}

/// `g ∘ f`.
pub fn compose_basic(g: &BasicMorphismCn, f: &BasicMorphismCn) -> Result<BasicMorphismCn, CnError> {
    if f.target != g.source {
        return Err(CnError::CompositionDomain {
            source_obj: g.source,
            target_obj: f.target,
        });
    }
    Ok(BasicMorphismCn::new(
        g.target,
        f.source,
        &g.scalar * &f.scalar,
    ))
}

/// A `K`-linear endofunctor of `C_n` that is faithful on hom spaces:
/// `F(x_ij) = (c_i / c_j) x_{F(i) F(j)}` with `c_1 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Autoequivalence {
    object_map: Vec<usize>,
    coeff: Vec<RootOfUnity>,
}

impl Autoequivalence {
    /// Builds the functor, normalizing the coefficient vector so `c_1 = 1`.
    pub fn new(object_map: Vec<usize>, coeff: Vec<RootOfUnity>) -> Result<Self, CnError> {
        let n = object_map.len();
        if n == 0 {
            return Err(CnError::BadObjectMap(0, 0));
        }
        if coeff.len() != n {
            return Err(CnError::BadCoefficients(coeff.len(), n));
        }
        if let Some(&bad) = object_map.iter().find(|&&v| v >= n) {
            return Err(CnError::BadObjectMap(bad, n));
        }
        let c0 = coeff[0].inv();
        let coeff = coeff.into_iter().map(|c| c.mul(c0)).collect();
        Ok(Autoequivalence { object_map, coeff })
    }

    pub fn identity(n: usize) -> Self {
        Autoequivalence {
            object_map: (0..n).collect(),
            coeff: vec![RootOfUnity::ONE; n],
        }
    }

    /// Object map with all transition coefficients equal to 1.
    pub fn from_map(object_map: Vec<usize>) -> Result<Self, CnError> {
        let n = object_map.len();
        Self::new(object_map, vec![RootOfUnity::ONE; n])
    }

    pub fn n(&self) -> usize {
        self.object_map.len()
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn map(&self, i: usize) -> usize {
        self.object_map[i]
    }

    pub fn coeff(&self) -> &[RootOfUnity] {
        &self.coeff
    }

    /// Transition coefficient `a_ij` with `F(x_ij) = a_ij x_{F(i) F(j)}`.
    pub fn a(&self, i: usize, j: usize) -> RootOfUnity {
        self.coeff[i].div(self.coeff[j])
    }

    pub fn is_automorphism(&self) -> bool {
        let mut seen = vec![false; self.n()];
        for &v in &self.object_map {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, CnError> {
        if self.n() != other.n() {
            return Err(CnError::SizeMismatch(self.n(), other.n()));
        }
        let map = other
            .object_map
            .iter()
            .map(|&j| self.object_map[j])
            .collect();
        let coeff = (0..self.n())
            .map(|i| other.coeff[i].mul(self.coeff[other.object_map[i]]))
            .collect();
        Self::new(map, coeff)
    }

    pub fn inverse(&self) -> Result<Self, CnError> {
        if !self.is_automorphism() {
            return Err(CnError::NotAutomorphism);
        }
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.object_map.iter().enumerate() {
            inv[v] = i;
        }
        let coeff = (0..self.n()).map(|i| self.coeff[inv[i]].inv()).collect();
        Self::new(inv, coeff)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.n());
        for _ in 0..k {
            acc = self.compose(&acc).expect("same size");
        }
        acc
    }

    /// Coefficients after the change of basis `x'_ij = (g_i / g_j) x_ij`.
    pub fn rebase(&self, g: &[RootOfUnity]) -> Self {
        let coeff = (0..self.n())
            .map(|i| self.coeff[i].mul(g[i]).div(g[self.object_map[i]]))
            .collect();
        Self::new(self.object_map.clone(), coeff).expect("valid by construction")
    }

    pub fn apply(&self, m: &BasicMorphismCn) -> BasicMorphismCn {
        apply_functor(self, m)
    }
}

impl fmt::Display for Autoequivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let map: Vec<String> = self
            .object_map
            .iter()
            .map(|v| (v + 1).to_string())
            .collect();
        let coeff: Vec<String> = self.coeff.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}] c=[{}]", map.join(" "), coeff.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct AutoequivalenceJson {
    object_map: Vec<usize>,
    coeff: Vec<RootOfUnity>,
}

impl Serialize for Autoequivalence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AutoequivalenceJson {
            object_map: self.object_map.iter().map(|v| v + 1).collect(),
            coeff: self.coeff.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Autoequivalence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = AutoequivalenceJson::deserialize(d)?;
        if raw.object_map.contains(&0) {
            return Err(serde::de::Error::custom("object_map is 1-indexed"));
        }
        Autoequivalence::new(raw.object_map.iter().map(|v| v - 1).collect(), raw.coeff)
            .map_err(serde::de::Error::custom)
    }
}

pub fn apply_functor(f: &Autoequivalence, m: &BasicMorphismCn) -> BasicMorphismCn {
    let a = f.a(m.target, m.source);
    BasicMorphismCn::new(f.map(m.target), f.map(m.source), m.scalar.mul_root(a))
}

/// Object maps commute and `a_{τ(i)τ(j)} b_ij = a_ij b_{σ(i)σ(j)}` for all `i, j`.
pub fn commutes(s: &Autoequivalence, t: &Autoequivalence) -> bool {
    let n = s.n();
    if n != t.n() {
        return false;
    }
    if (0..n).any(|i| s.map(t.map(i)) != t.map(s.map(i))) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = s.a(t.map(i), t.map(j)).mul(t.a(i, j));
            let rhs = s.a(i, j).mul(t.a(s.map(i), s.map(j)));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// `φ : σ -> τ` with components `φ_i = c_i x_{τ(i) σ(i)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalIso {
    pub source: Autoequivalence,
    pub target: Autoequivalence,
    pub c: Vec<RootOfUnity>,
}

impl NaturalIso {
    /// `c_j a_ji = b_ji c_i` for all `i, j`.
    pub fn is_natural(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        let n = s.n();
        (0..n).all(|i| (0..n).all(|j| self.c[j].mul(s.a(j, i)) == t.a(j, i).mul(self.c[i])))
    }

    pub fn component(&self, i: usize) -> BasicMorphismCn {
        BasicMorphismCn::new(self.target.map(i), self.source.map(i), self.c[i].into())
    }

    /// `φ^{-1} : τ -> σ`.
    pub fn inverse(&self) -> NaturalIso {
        NaturalIso {
            source: self.target.clone(),
            target: self.source.clone(),
            c: self.c.iter().map(|c| c.inv()).collect(),
        }
    }

    pub fn rescale(&self, r: RootOfUnity) -> NaturalIso {
        NaturalIso {
            c: self.c.iter().map(|c| c.mul(r)).collect(),
            ..self.clone()
        }
    }

    /// The ratio vector `c_i / c_1`.
    pub fn ratios(&self) -> Vec<RootOfUnity> {
        self.c.iter().map(|c| c.div(self.c[0])).collect()
    }
}

/// The natural isomorphism with `c_i = a_{1i} b_{i1}`.
pub fn natural_iso(s: &Autoequivalence, t: &Autoequivalence) -> Result<NaturalIso, CnError> {
    if s.n() != t.n() {
        return Err(CnError::SizeMismatch(s.n(), t.n()));
    }
    let c = (0..s.n()).map(|i| s.a(0, i).mul(t.a(i, 0))).collect();
    let phi = NaturalIso {
        source: s.clone(),
        target: t.clone(),
        c,
    };
    if !phi.is_natural() {
        return Err(CnError::Inconsistent("natural_iso fails naturality".into()));
    }
    Ok(phi)
}

/// `a_{τ(i)σ(i)} c_i / c_{σ(i)}`, checked to be independent of `i`.
pub fn continuity_factor_of(phi: &NaturalIso) -> Result<RootOfUnity, CnError> {
    let (s, t) = (&phi.source, &phi.target);
    if !s.is_automorphism() {
        return Err(CnError::NotAutomorphism);
    }
    if !commutes(s, t) {
        return Err(CnError::NotCommuting);
    }
    let value = |i: usize| s.a(t.map(i), s.map(i)).mul(phi.c[i]).div(phi.c[s.map(i)]);
    let v0 = value(0);
    for i in 1..s.n() {
        let vi = value(i);
        if vi != v0 {
            return Err(CnError::Inconsistent(format!(
                "continuity factor depends on i: {v0} at 1, {vi} at {}",
                i + 1
            )));
        }
    }
    Ok(v0)
}

pub fn continuity_factor(s: &Autoequivalence, t: &Autoequivalence) -> Result<RootOfUnity, CnError> {
    continuity_factor_of(&natural_iso(s, t)?)
}

pub fn is_anti_compatible(s: &Autoequivalence, t: &Autoequivalence) -> Result<bool, CnError> {
    Ok(continuity_factor(s, t)? == RootOfUnity::MINUS_ONE)
}

/// `c_{σ(i)} = -c_i a_{τ(i)σ(i)}` for all `i`.
pub fn check_skew_continuity(phi: &NaturalIso) -> bool {
    let (s, t) = (&phi.source, &phi.target);
    (0..s.n()).all(|i| phi.c[s.map(i)] == phi.c[i].mul(s.a(t.map(i), s.map(i))).neg())
}

/// `(ρσρ^{-1}, ρτρ^{-1})`.
pub fn conjugate_pair(
    rho: &Autoequivalence,
    s: &Autoequivalence,
    t: &Autoequivalence,
) -> Result<(Autoequivalence, Autoequivalence), CnError> {
    let inv = rho.inverse()?;
    let conj = |f: &Autoequivalence| rho.compose(f).and_then(|x| x.compose(&inv));
    Ok((conj(s)?, conj(t)?))
}

/// A monomial matrix `P D`: permutation plus diagonal scalars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialLift {
    pub perm: Vec<usize>,
    pub diag: Vec<RootOfUnity>,
}

impl MonomialLift {
    pub fn scaled(&self, lambda: RootOfUnity) -> MonomialLift {
        MonomialLift {
            perm: self.perm.clone(),
            diag: self.diag.iter().map(|d| d.mul(lambda)).collect(),
        }
    }

    pub fn c(&self, i: usize) -> RootOfUnity {
        self.diag[i]
    }
}

pub fn lift_to_monomial(s: &Autoequivalence) -> Result<MonomialLift, CnError> {
    if !s.is_automorphism() {
        return Err(CnError::NotAutomorphism);
    }
    Ok(MonomialLift {
        perm: s.object_map().to_vec(),
        diag: s.coeff().to_vec(),
    })
}

pub fn project_lift(m: &MonomialLift) -> Result<Autoequivalence, CnError> {
    let s = Autoequivalence::new(m.perm.clone(), m.diag.clone())?;
    if !s.is_automorphism() {
        return Err(CnError::NotAutomorphism);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M1: RootOfUnity = RootOfUnity::MINUS_ONE;

    fn auto(map: &[usize], coeff: &[RootOfUnity]) -> Autoequivalence {
        Autoequivalence::new(map.to_vec(), coeff.to_vec()).unwrap()
    }

    fn one() -> RootOfUnity {
        RootOfUnity::ONE
    }

    /// σ = id with a_12 = -1, τ = (12) trivial.
    fn case1() -> (Autoequivalence, Autoequivalence) {
        (auto(&[0, 1], &[one(), M1]), auto(&[1, 0], &[one(), one()]))
    }

    /// σ = (12) trivial, τ = id with b_12 = -1.
    fn case2() -> (Autoequivalence, Autoequivalence) {
        (auto(&[1, 0], &[one(), one()]), auto(&[0, 1], &[one(), M1]))
    }

    fn case3() -> (Autoequivalence, Autoequivalence) {
        (auto(&[1, 0], &[one(), one()]), auto(&[1, 0], &[one(), M1]))
    }

    #[test]
    fn composition_of_basic_morphisms() {
        let g = BasicMorphismCn::basic(0, 1);
        let f = BasicMorphismCn::basic(1, 2);
        assert_eq!(compose_basic(&g, &f).unwrap(), BasicMorphismCn::basic(0, 2));
        let a = Cyclotomic::root(RootOfUnity::new(1, 7));
        let g = BasicMorphismCn::new(1, 1, a.clone());
        assert_eq!(
            compose_basic(&g, &BasicMorphismCn::basic(1, 1))
                .unwrap()
                .scalar,
            a
        );
        let i4 = Cyclotomic::root(RootOfUnity::new(1, 4));
        let g = BasicMorphismCn::new(0, 1, Cyclotomic::from_int(2));
        let f = BasicMorphismCn::new(1, 0, i4.clone());
        let h = compose_basic(&g, &f).unwrap();
        assert_eq!((h.target, h.source), (0, 0));
        assert_eq!(h.scalar, &Cyclotomic::from_int(2) * &i4);
        assert!(compose_basic(&f, &f).is_err());
    }

    #[test]
    fn functor_application() {
        let m = BasicMorphismCn::basic(0, 1);
        assert_eq!(apply_functor(&Autoequivalence::identity(2), &m), m);
        let s = auto(&[1, 0], &[one(), one()]);
        assert_eq!(apply_functor(&s, &m), BasicMorphismCn::basic(1, 0));
        let t = case2().1;
        assert_eq!(apply_functor(&t, &m).scalar, -Cyclotomic::one());
    }

    #[test]
    fn commutation_examples() {
        let (s, _) = case2();
        assert!(commutes(&s, &s));
        let (s, t) = case3();
        assert!(commutes(&s, &t));
        // the identity functor commutes with everything, whatever a_12 is
        let s = auto(&[1, 0], &[one(), RootOfUnity::new(1, 3)]);
        assert!(commutes(&s, &Autoequivalence::identity(2)));
        let t = auto(&[1, 0], &[one(), one()]);
        let r = auto(&[0, 1], &[one(), RootOfUnity::new(1, 3)]);
        assert!(!commutes(&r, &t));
    }

    #[test]
    fn natural_iso_examples() {
        let (s, t) = case1();
        let phi = natural_iso(&s, &t).unwrap();
        assert_eq!(phi.c, vec![one(), M1]);
        assert_eq!(phi.c[0].div(phi.c[1]), M1);
        let (s, t) = case2();
        assert_eq!(natural_iso(&s, &t).unwrap().c, vec![one(), M1]);
        let phi = natural_iso(&s, &s).unwrap();
        assert!(phi.c.iter().all(|c| c.is_one()));
    }

    #[test]
    fn continuity_examples() {
        let (s, t) = case2();
        assert_eq!(continuity_factor(&s, &s).unwrap(), one());
        assert_eq!(
            continuity_factor(&s, &Autoequivalence::identity(2)).unwrap(),
            one()
        );
        assert_eq!(continuity_factor(&s, &t).unwrap(), M1);
        assert!(is_anti_compatible(&case1().0, &case1().1).unwrap());
        assert!(is_anti_compatible(&case3().0, &case3().1).unwrap());
        assert!(!is_anti_compatible(&s, &s).unwrap());
        let r = auto(&[0, 1], &[one(), RootOfUnity::new(1, 3)]);
        assert_eq!(
            continuity_factor(&r, &case3().0),
            Err(CnError::NotCommuting)
        );
    }

    #[test]
    fn skew_continuity_examples() {
        let (s, _) = case2();
        assert!(!check_skew_continuity(&natural_iso(&s, &s).unwrap()));
        let (s, t) = case1();
        assert!(check_skew_continuity(&natural_iso(&s, &t).unwrap()));
        let compatible = auto(&[1, 0], &[one(), one()]);
        let phi = natural_iso(&compatible, &Autoequivalence::identity(2)).unwrap();
        assert!(!check_skew_continuity(&phi));
    }

    #[test]
    fn conjugation_examples() {
        let (s, t) = case1();
        let id = Autoequivalence::identity(2);
        assert_eq!(conjugate_pair(&id, &s, &t).unwrap(), (s.clone(), t.clone()));
        let swap = auto(&[1, 0], &[one(), one()]);
        let (s2, t2) = conjugate_pair(&swap, &s, &t).unwrap();
        assert_eq!(continuity_factor(&s2, &t2).unwrap(), M1);
        let fold = Autoequivalence::from_map(vec![0, 0]).unwrap();
        assert_eq!(conjugate_pair(&fold, &s, &t), Err(CnError::NotAutomorphism));
    }

    #[test]
    fn lifts() {
        let id = Autoequivalence::identity(3);
        let l = lift_to_monomial(&id).unwrap();
        assert_eq!(l.perm, vec![0, 1, 2]);
        assert!(l.diag.iter().all(|d| d.is_one()));
        let m = MonomialLift {
            perm: vec![1, 0],
            diag: vec![one(), M1],
        };
        let p = project_lift(&m).unwrap();
        assert_eq!(p.object_map(), &[1, 0]);
        assert_eq!(p.a(0, 1), M1);
        assert_eq!(project_lift(&m.scaled(RootOfUnity::new(1, 5))).unwrap(), p);
    }

    #[test]
    fn json_is_one_indexed() {
        let (s, _) = case1();
        let js = serde_json::to_value(&s).unwrap();
        assert_eq!(js["object_map"], serde_json::json!([1, 2]));
        assert_eq!(js["coeff"], serde_json::json!(["0/1", "1/2"]));
        let back: Autoequivalence = serde_json::from_value(js).unwrap();
        assert_eq!(back, s);
    }
}
