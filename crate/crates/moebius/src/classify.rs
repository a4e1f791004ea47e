//! Anti-compatible commuting pairs `(σ, τ)` on `C_n`, strong isomorphism of
//! pairs, classification, duality and connected coverings.

use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cn::{
    check_skew_continuity, commutes, continuity_factor, is_anti_compatible, lift_to_monomial,
    natural_iso, Autoequivalence, CnError, MonomialLift, NaturalIso,
};
use crate::normal_forms::{
    all_permutations, canonical_perm, cycle_type, factorial, good_basis, is_indecomposable,
    partitions, perm_cycles, transition_factors, Perm,
};
use crate::par::Exec;
use crate::scalars::RootOfUnity;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("n = {0}: coverings need n >= 2, since every σ is compatible with itself and a single sheet forces σ = τ")]
    TooSmall(usize),
    #[error("order bound {0} must be a positive even integer")]
    BadBound(u64),
    #[error("duality needs τ to be an automorphism")]
    DualityUndefined,
    #[error("triple invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Cn(#[from] CnError),
}

pub fn default_order_bound(n: usize) -> u64 {
    factorial(n).lcm(&2)
}

fn check_bound(bound: u64) -> Result<(), ClassifyError> {
    if bound == 0 || bound % 2 != 0 {
        return Err(ClassifyError::BadBound(bound));
    }
    Ok(())
}

/// `(σ, τ, φ)` with `φ : σ -> τ` skew-continuous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationTriple {
    pub sigma: Autoequivalence,
    pub tau: Autoequivalence,
    pub phi: NaturalIso,
    pub lift: MonomialLift,
}

impl TriangulationTriple {
    pub fn new(sigma: Autoequivalence, tau: Autoequivalence) -> Result<Self, ClassifyError> {
        let phi = natural_iso(&sigma, &tau)?;
        let lift = lift_to_monomial(&sigma)?;
        let t = TriangulationTriple {
            sigma,
            tau,
            phi,
            lift,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: &str| Err(ClassifyError::Invariant(m.to_string()));
        if !self.sigma.is_automorphism() {
            return bad("σ is not an automorphism");
        }
        if !commutes(&self.sigma, &self.tau) {
            return bad("σ and τ do not commute");
        }
        if !is_anti_compatible(&self.sigma, &self.tau)? {
            return bad("σ and τ are not anti-compatible");
        }
        if self.phi.source != self.sigma || self.phi.target != self.tau || !self.phi.is_natural() {
            return bad("φ is not a natural isomorphism σ -> τ");
        }
        if !check_skew_continuity(&self.phi) {
            return bad("φ is not skew-continuous");
        }
        Ok(())
    }

    /// φ-scalar `c_i`.
    pub fn c(&self, i: usize) -> RootOfUnity {
        self.phi.c[i]
    }

    pub fn rescaled(&self, r: RootOfUnity) -> Self {
        TriangulationTriple {
            phi: self.phi.rescale(r),
            ..self.clone()
        }
    }
}

/// Sort key for canonical representatives.
pub type PairKey = (
    Vec<usize>,
    Vec<usize>,
    Vec<usize>,
    Vec<RootOfUnity>,
    Vec<RootOfUnity>,
);

pub fn pair_key(s: &Autoequivalence, t: &Autoequivalence) -> PairKey {
    (
        cycle_type(s.object_map()),
        s.object_map().to_vec(),
        t.object_map().to_vec(),
        s.coeff().to_vec(),
        t.coeff().to_vec(),
    )
}

/// Good-basis automorphisms of `C_n` with standard cycle-type permutations
/// and one constant coefficient per orbit drawn from `μ_bound`.
pub fn sigma_forms(n: usize, bound: u64) -> Vec<Autoequivalence> {
    let roots = RootOfUnity::all_of_order_dividing(bound);
    let mut out = Vec::new();
    for ct in partitions(n) {
        let perm = canonical_perm(&ct);
        let orbits = perm_cycles(&perm);
        let k = orbits.len();
        let combos = roots.len().pow(k as u32 - 1);
        for code in 0..combos {
            let mut rest = code;
            let mut c = vec![RootOfUnity::ONE; n];
            for orb in &orbits[1..] {
                let d = roots[rest % roots.len()];
                rest /= roots.len();
                for &i in orb {
                    c[i] = d;
                }
            }
            out.push(Autoequivalence::new(perm.clone(), c).expect("valid"));
        }
    }
    out
}

/// Object maps `t` with `t ∘ perm = perm ∘ t`.
pub fn commuting_maps(perm: &[usize]) -> Vec<Perm> {
    let orbits = perm_cycles(perm);
    let orbit_of: Vec<usize> = {
        let mut v = vec![0; perm.len()];
        for (k, o) in orbits.iter().enumerate() {
            for &i in o {
                v[i] = k;
            }
        }
        v
    };
    let mut out = vec![vec![usize::MAX; perm.len()]];
    for orb in &orbits {
        let mut next = Vec::new();
        for partial in &out {
            for j in 0..perm.len() {
                if orb.len() % orbits[orbit_of[j]].len() != 0 {
                    continue;
                }
                let mut t = partial.clone();
                let mut v = j;
                for &i in orb {
                    t[i] = v;
                    v = perm[v];
                }
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// All `τ` on the object map `tmap` with coefficients in `μ_bound` that
/// commute with `s`. Commutation forces `e_{σ(i)} = e_i c_{τ(i)} / (c_i κ)`
/// for one constant `κ`, so only `κ` and one value per σ-orbit are free.
pub fn commuting_taus(s: &Autoequivalence, tmap: &[usize], bound: u64) -> Vec<Autoequivalence> {
    let roots = RootOfUnity::all_of_order_dividing(bound);
    let orbits = perm_cycles(s.object_map());
    let c = s.coeff();
    let mut out = Vec::new();
    for &kappa in &roots {
        let closes = orbits.iter().all(|orb| {
            let p = orb
                .iter()
                .fold(RootOfUnity::ONE, |acc, &i| acc.mul(c[tmap[i]]).div(c[i]));
            p == kappa.pow(orb.len() as i64)
        });
        if !closes {
            continue;
        }
        let combos = roots.len().pow(orbits.len() as u32 - 1);
        for code in 0..combos {
            let mut rest = code;
            let mut e = vec![RootOfUnity::ONE; s.n()];
            for (k, orb) in orbits.iter().enumerate() {
                let mut v = if k == 0 {
                    RootOfUnity::ONE
                } else {
                    let r = roots[rest % roots.len()];
                    rest /= roots.len();
                    r
                };
                for &i in orb {
                    e[i] = v;
                    v = v.mul(c[tmap[i]]).div(c[i]).div(kappa);
                }
            }
            let t = Autoequivalence::new(tmap.to_vec(), e).expect("valid");
            debug_assert!(commutes(s, &t));
            out.push(t);
        }
    }
    out
}

fn pairs_for_sigma(
    s: &Autoequivalence,
    bound: u64,
    anti_only: bool,
) -> Vec<(Autoequivalence, Autoequivalence)> {
    let mut out = Vec::new();
    for tmap in commuting_maps(s.object_map()) {
        for t in commuting_taus(s, &tmap, bound) {
            if !commutes(s, &t) {
                continue;
            }
            if anti_only && !matches!(is_anti_compatible(s, &t), Ok(true)) {
                continue;
            }
            out.push((s.clone(), t));
        }
    }
    out
}

/// Commuting pairs with σ in good-basis form, up to permutation conjugacy
/// of σ, and coefficients in `μ_bound`.
pub fn enumerate_commuting(
    n: usize,
    bound: u64,
    exec: Exec,
) -> Vec<(Autoequivalence, Autoequivalence)> {
    if n < 1 {
        return Vec::new();
    }
    exec.flat_map(sigma_forms(n, bound), |s| pairs_for_sigma(&s, bound, false))
}

/// Commuting anti-compatible pairs. Empty for `n < 2`.
pub fn enumerate_pairs(
    n: usize,
    bound: u64,
    exec: Exec,
) -> Vec<(Autoequivalence, Autoequivalence)> {
    if n < 2 {
        return Vec::new();
    }
    exec.flat_map(sigma_forms(n, bound), |s| pairs_for_sigma(&s, bound, true))
}

/// Permutations `π` with `π σ = σ' π` and `π τ = τ' π` on object maps.
pub fn transporters(s: &[usize], t: &[usize], s2: &[usize], t2: &[usize]) -> Vec<Perm> {
    let n = s.len();
    let mut out = Vec::new();
    let mut pi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn ok(pi: &[usize], s: &[usize], t: &[usize], s2: &[usize], t2: &[usize], i: usize) -> bool {
        let n = pi.len();
        let set = |k: usize| pi[k] != usize::MAX;
        for j in 0..n {
            if !set(j) {
                continue;
            }
            if (j == i || s[j] == i) && set(s[j]) && pi[s[j]] != s2[pi[j]] {
                return false;
            }
            if (j == i || t[j] == i) && set(t[j]) && pi[t[j]] != t2[pi[j]] {
                return false;
            }
        }
        true
    }
    fn go(
        i: usize,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        maps: (&[usize], &[usize], &[usize], &[usize]),
        out: &mut Vec<Perm>,
    ) {
        let n = pi.len();
        if i == n {
            out.push(pi.clone());
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            pi[i] = v;
            used[v] = true;
            if ok(pi, maps.0, maps.1, maps.2, maps.3, i) {
                go(i + 1, pi, used, maps, out);
            }
            used[v] = false;
            pi[i] = usize::MAX;
        }
    }
    go(0, &mut pi, &mut used, (s, t, s2, t2), &mut out);
    out
}

fn roots_of(p: RootOfUnity, l: usize) -> Vec<RootOfUnity> {
    let base = p.principal_root(l as u64);
    (0..l)
        .map(|k| base.mul(RootOfUnity::new(k as i64, l as u64)))
        .collect()
}

/// Coefficients `r` of `ρ = (π, r)` with `ρσ = σ'ρ` and `ρτ = τ'ρ`, solved
/// exactly by propagation along σ- and τ-edges.
fn solve_rho(
    s: &Autoequivalence,
    t: &Autoequivalence,
    s2: &Autoequivalence,
    t2: &Autoequivalence,
    pi: &[usize],
) -> Option<Autoequivalence> {
    let n = s.n();
    let (cs, ct, cs2, ct2) = (s.coeff(), t.coeff(), s2.coeff(), t2.coeff());
    // edge factor: r_{f(i)} = κ r_i w_i
    let ws: Vec<RootOfUnity> = (0..n).map(|i| cs2[pi[i]].div(cs[i])).collect();
    let wt: Vec<RootOfUnity> = (0..n).map(|i| ct2[pi[i]].div(ct[i])).collect();
    let sorb = perm_cycles(s.object_map()).swap_remove(0);
    let k1s = roots_of(
        sorb.iter().fold(RootOfUnity::ONE, |a, &i| a.div(ws[i])),
        sorb.len(),
    );
    let tcyc = {
        let mut seen = vec![usize::MAX; n];
        let mut i = 0;
        let mut step = 0;
        while seen[i] == usize::MAX {
            seen[i] = step;
            step += 1;
            i = t.map(i);
        }
        let mut cyc = vec![i];
        let mut j = t.map(i);
        while j != i {
            cyc.push(j);
            j = t.map(j);
        }
        cyc
    };
    let k2s = roots_of(
        tcyc.iter().fold(RootOfUnity::ONE, |a, &i| a.div(wt[i])),
        tcyc.len(),
    );
    let mut s_pre: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut t_pre: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        s_pre[s.map(i)].push(i);
        t_pre[t.map(i)].push(i);
    }
    for &k1 in &k1s {
        for &k2 in &k2s {
            let mut r: Vec<Option<RootOfUnity>> = vec![None; n];
            for root in 0..n {
                if r[root].is_some() {
                    continue;
                }
                r[root] = Some(RootOfUnity::ONE);
                let mut q = VecDeque::from([root]);
                while let Some(i) = q.pop_front() {
                    let ri = r[i].unwrap();
                    let mut nbrs = vec![
                        (s.map(i), k1.mul(ri).mul(ws[i])),
                        (t.map(i), k2.mul(ri).mul(wt[i])),
                    ];
                    nbrs.extend(s_pre[i].iter().map(|&j| (j, ri.div(k1).div(ws[j]))));
                    nbrs.extend(t_pre[i].iter().map(|&j| (j, ri.div(k2).div(wt[j]))));
                    for (j, v) in nbrs {
                        if r[j].is_none() {
                            r[j] = Some(v);
                            q.push_back(j);
                        }
                    }
                }
            }
            let r: Vec<RootOfUnity> = r.into_iter().map(Option::unwrap).collect();
            let consistent = (0..n).all(|i| {
                r[s.map(i)] == k1.mul(r[i]).mul(ws[i]) && r[t.map(i)] == k2.mul(r[i]).mul(wt[i])
            });
            if !consistent {
                continue;
            }
            let rho = Autoequivalence::new(pi.to_vec(), r).ok()?;
            let lhs_s = rho.compose(s).ok()?;
            let rhs_s = s2.compose(&rho).ok()?;
            let lhs_t = rho.compose(t).ok()?;
            let rhs_t = t2.compose(&rho).ok()?;
            if lhs_s == rhs_s && lhs_t == rhs_t {
                return Some(rho);
            }
        }
    }
    None
}

/// An automorphism `ρ` with `ρσ = σ'ρ` and `ρτ = τ'ρ`, if one exists.
pub fn strongly_isomorphic(
    p1: (&Autoequivalence, &Autoequivalence),
    p2: (&Autoequivalence, &Autoequivalence),
) -> Option<Autoequivalence> {
    let ((s, t), (s2, t2)) = (p1, p2);
    if s.n() != s2.n()
        || t.n() != s.n()
        || t2.n() != s.n()
        || !s.is_automorphism()
        || !s2.is_automorphism()
    {
        return None;
    }
    transporters(
        s.object_map(),
        t.object_map(),
        s2.object_map(),
        t2.object_map(),
    )
    .into_iter()
    .find_map(|pi| solve_rho(s, t, s2, t2, &pi))
}

/// Conjugation-invariant data used to bucket pairs before searching for
/// isomorphisms.
fn bucket_key(s: &Autoequivalence, t: &Autoequivalence) -> Vec<(usize, usize, bool, usize)> {
    let n = s.n();
    let orbits = perm_cycles(s.object_map());
    let mut len = vec![0; n];
    let mut which = vec![0; n];
    for (k, o) in orbits.iter().enumerate() {
        for &i in o {
            len[i] = o.len();
            which[i] = k;
        }
    }
    let mut pre = vec![0; n];
    for i in 0..n {
        pre[t.map(i)] += 1;
    }
    let mut key: Vec<_> = (0..n)
        .map(|i| (len[i], len[t.map(i)], which[i] == which[t.map(i)], pre[i]))
        .collect();
    key.sort_unstable();
    key
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFoldParameters {
    pub a12: RootOfUnity,
    pub b12: RootOfUnity,
    pub c1_over_c2: RootOfUnity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub sigma_cycle_type: Vec<usize>,
    pub sigma_pattern: String,
    pub tau_pattern: String,
    pub tau_invertible: bool,
    /// `k` with τ's object map equal to σ^k, if any.
    pub tau_power_of_sigma: Option<usize>,
    pub indecomposable: bool,
    pub orbits: Vec<Vec<usize>>,
    pub transition_factors: Vec<Vec<RootOfUnity>>,
    pub phi_ratios: Vec<RootOfUnity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_fold: Option<TwoFoldParameters>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub representative: TriangulationTriple,
    pub summary: ClassSummary,
    /// Number of enumerated pairs in the class.
    pub members: usize,
}

/// Cycle notation with 1-indexed objects, `id` for the identity; a
/// non-bijective map is written as its value list.
pub fn map_pattern(map: &[usize]) -> String {
    let bijective = {
        let mut seen = vec![false; map.len()];
        map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    };
    if !bijective {
        let vals: Vec<String> = map.iter().map(|v| (v + 1).to_string()).collect();
        return format!("[{}]", vals.join(","));
    }
    let sep = if map.len() < 10 { "" } else { " " };
    let cycles: Vec<String> = perm_cycles(map)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let v: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            format!("({})", v.join(sep))
        })
        .collect();
    if cycles.is_empty() {
        "id".into()
    } else {
        cycles.concat()
    }
}

pub fn summarize(t: &TriangulationTriple) -> ClassSummary {
    let s = &t.sigma;
    let n = s.n();
    let good = good_basis(s).expect("σ is an automorphism").apply(s);
    let od = transition_factors(&good).expect("good by construction");
    let tau_power_of_sigma = (0..n.max(1)).find(|&k| s.pow(k).object_map() == t.tau.object_map());
    let two_fold = (n == 2).then(|| TwoFoldParameters {
        a12: s.a(0, 1),
        b12: t.tau.a(0, 1),
        c1_over_c2: t.c(0).div(t.c(1)),
    });
    ClassSummary {
        sigma_cycle_type: cycle_type(s.object_map()),
        sigma_pattern: map_pattern(s.object_map()),
        tau_pattern: map_pattern(t.tau.object_map()),
        tau_invertible: t.tau.is_automorphism(),
        tau_power_of_sigma,
        indecomposable: is_indecomposable(s, &t.tau),
        orbits: od.orbits,
        transition_factors: od.factors,
        phi_ratios: t.phi.ratios(),
        two_fold,
    }
}

fn record(
    s: Autoequivalence,
    t: Autoequivalence,
    members: usize,
) -> Result<ClassRecord, ClassifyError> {
    let triple = TriangulationTriple::new(s, t)?;
    let summary = summarize(&triple);
    Ok(ClassRecord {
        representative: triple,
        summary,
        members,
    })
}

/// Splits pairs into strong-isomorphism classes. Returns, per class, the
/// member with the smallest key and the class size, sorted by key.
pub fn reduce_classes(
    pairs: Vec<(Autoequivalence, Autoequivalence)>,
    exec: Exec,
) -> Vec<((Autoequivalence, Autoequivalence), usize)> {
    let mut buckets: BTreeMap<_, Vec<(Autoequivalence, Autoequivalence)>> = BTreeMap::new();
    for p in pairs {
        buckets.entry(bucket_key(&p.0, &p.1)).or_default().push(p);
    }
    let per_bucket = exec.flat_map(buckets.into_values().collect(), |bucket| {
        // (first member, best member, size)
        let mut classes: Vec<(
            (Autoequivalence, Autoequivalence),
            (Autoequivalence, Autoequivalence),
            usize,
        )> = Vec::new();
        for p in bucket {
            let hit = classes
                .iter_mut()
                .find(|(rep, _, _)| strongly_isomorphic((&p.0, &p.1), (&rep.0, &rep.1)).is_some());
            match hit {
                Some((_, best, size)) => {
                    *size += 1;
                    if pair_key(&p.0, &p.1) < pair_key(&best.0, &best.1) {
                        *best = p;
                    }
                }
                None => classes.push((p.clone(), p, 1)),
            }
        }
        classes
            .into_iter()
            .map(|(_, best, size)| (best, size))
            .collect()
    });
    let mut out = per_bucket;
    out.sort_by_key(|a| pair_key(&a.0 .0, &a.0 .1));
    out
}

/// Strong-isomorphism classes of anti-compatible commuting pairs on `C_n`
/// with coefficients in `μ_bound`, each with its natural isomorphism.
pub fn classify(n: usize, bound: u64, exec: Exec) -> Result<Vec<ClassRecord>, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::TooSmall(n));
    }
    check_bound(bound)?;
    let pairs = enumerate_pairs(n, bound, exec);
    reduce_classes(pairs, exec)
        .into_iter()
        .map(|((s, t), size)| record(s, t, size))
        .collect()
}

/// `(τ, σ, φ^{-1})`.
pub fn dual_triple(t: &TriangulationTriple) -> Result<TriangulationTriple, ClassifyError> {
    if !t.tau.is_automorphism() {
        return Err(ClassifyError::DualityUndefined);
    }
    let dual = TriangulationTriple {
        sigma: t.tau.clone(),
        tau: t.sigma.clone(),
        phi: t.phi.inverse(),
        lift: lift_to_monomial(&t.tau)?,
    };
    dual.validate()?;
    Ok(dual)
}

pub fn triples_isomorphic(a: &TriangulationTriple, b: &TriangulationTriple) -> bool {
    strongly_isomorphic((&a.sigma, &a.tau), (&b.sigma, &b.tau)).is_some()
}

/// σ an `n`-cycle with all coefficients 1, τ on the object map σ^k with
/// `b_{σ(i) i} = -1`. One class per `k` for even `n`, none for odd `n`.
pub fn connected_coverings(n: usize) -> Result<Vec<ClassRecord>, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::TooSmall(n));
    }
    if n % 2 == 1 {
        return Ok(Vec::new());
    }
    let s = Autoequivalence::from_map(canonical_perm(&[n]))?;
    // with σ(i) = i + 1, b_{σ(i) i} = e_{i+1} / e_i
    let e: Vec<RootOfUnity> = (0..n)
        .map(|m| {
            if m % 2 == 0 {
                RootOfUnity::ONE
            } else {
                RootOfUnity::MINUS_ONE
            }
        })
        .collect();
    (0..n)
        .map(|k| {
            let tau = Autoequivalence::new(s.pow(k).object_map().to_vec(), e.clone())?;
            record(s.clone(), tau, 1)
        })
        .collect()
}

/// The parity statement for triples with invertible τ: only even `n` occur.
pub fn check_even_necessity(t: &TriangulationTriple) -> Result<bool, ClassifyError> {
    if !t.tau.is_automorphism() {
        return Err(ClassifyError::DualityUndefined);
    }
    Ok(t.n() % 2 == 0)
}

pub fn random_root<R: Rng>(rng: &mut R, bound: u64) -> RootOfUnity {
    RootOfUnity::new(rng.gen_range(0..bound) as i64, bound)
}

fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Perm {
    use rand::seq::SliceRandom;
    let mut p: Perm = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A random automorphism with coefficients in `μ_bound`.
pub fn random_automorphism<R: Rng>(rng: &mut R, n: usize, bound: u64) -> Autoequivalence {
    let c = (0..n).map(|_| random_root(rng, bound)).collect();
    Autoequivalence::new(random_perm(rng, n), c).expect("valid")
}

/// A random τ commuting with `s`, with object map from `maps` and
/// coefficients in `μ_bound`; `None` if the drawn map admits none.
fn random_commuting_tau<R: Rng>(
    rng: &mut R,
    s: &Autoequivalence,
    maps: &[Perm],
    bound: u64,
) -> Option<Autoequivalence> {
    let tmap = &maps[rng.gen_range(0..maps.len())];
    let orbits = perm_cycles(s.object_map());
    let c = s.coeff();
    let first = &orbits[0];
    let p = first
        .iter()
        .fold(RootOfUnity::ONE, |acc, &i| acc.mul(c[tmap[i]]).div(c[i]));
    let cands = roots_of(p, first.len());
    let kappa = cands[rng.gen_range(0..cands.len())];
    let mut e = vec![RootOfUnity::ONE; s.n()];
    for orb in &orbits {
        let mut v = random_root(rng, bound);
        for &i in orb {
            e[i] = v;
            v = v.mul(c[tmap[i]]).div(c[i]).div(kappa);
        }
        if v != e[orb[0]] {
            return None;
        }
    }
    let t = Autoequivalence::new(tmap.clone(), e).ok()?;
    commutes(s, &t).then_some(t)
}

/// Seeded random commuting pair of automorphisms, conjugated by a random ρ
/// so that σ is in no special form.
pub fn random_commuting_automorphisms<R: Rng>(
    rng: &mut R,
    n: usize,
    bound: u64,
) -> (Autoequivalence, Autoequivalence) {
    loop {
        let s = random_automorphism(rng, n, bound);
        let maps: Vec<Perm> = all_permutations(n)
            .into_iter()
            .filter(|q| (0..n).all(|i| q[s.map(i)] == s.map(q[i])))
            .collect();
        if let Some(t) = random_commuting_tau(rng, &s, &maps, bound) {
            return (s, t);
        }
    }
}

/// Random anti-compatible pairs drawn from the enumeration space of
/// `enumerate_pairs`, for sizes where exhaustive search is out of reach.
pub fn sample_pairs<R: Rng>(
    rng: &mut R,
    n: usize,
    bound: u64,
    count: usize,
    invertible_tau: bool,
) -> Vec<(Autoequivalence, Autoequivalence)> {
    let types = partitions(n);
    let roots = RootOfUnity::all_of_order_dividing(bound);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1_000_000 {
        attempts += 1;
        let ct = &types[rng.gen_range(0..types.len())];
        let perm = canonical_perm(ct);
        let mut c = vec![RootOfUnity::ONE; n];
        for orb in perm_cycles(&perm).iter().skip(1) {
            let d = roots[rng.gen_range(0..roots.len())];
            for &i in orb {
                c[i] = d;
            }
        }
        let s = Autoequivalence::new(perm.clone(), c).expect("valid");
        let mut maps = commuting_maps(&perm);
        if invertible_tau {
            maps.retain(|m| {
                Autoequivalence::from_map(m.clone())
                    .map(|a| a.is_automorphism())
                    .unwrap_or(false)
            });
        }
        let Some(t) = random_commuting_tau(rng, &s, &maps, bound) else {
            continue;
        };
        if matches!(is_anti_compatible(&s, &t), Ok(true)) {
            out.push((s, t));
        }
    }
    out
}

/// `{σ,τ}·{τ,σ}`, defined when both are automorphisms.
pub fn continuity_product(
    s: &Autoequivalence,
    t: &Autoequivalence,
) -> Result<RootOfUnity, CnError> {
    Ok(continuity_factor(s, t)?.mul(continuity_factor(t, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const M1: RootOfUnity = RootOfUnity::MINUS_ONE;
    const ONE: RootOfUnity = RootOfUnity::ONE;

    fn auto(map: &[usize], coeff: &[RootOfUnity]) -> Autoequivalence {
        Autoequivalence::new(map.to_vec(), coeff.to_vec()).unwrap()
    }

    #[test]
    fn small_n_is_empty() {
        assert!(enumerate_pairs(1, 2, Exec::Sequential).is_empty());
        assert_eq!(
            classify(1, 2, Exec::Sequential),
            Err(ClassifyError::TooSmall(1))
        );
        assert_eq!(
            classify(2, 3, Exec::Sequential),
            Err(ClassifyError::BadBound(3))
        );
    }

    #[test]
    fn two_fold_patterns() {
        let pairs = enumerate_pairs(2, 2, Exec::Sequential);
        assert!(!pairs.is_empty());
        let mut patterns: Vec<(String, String)> = pairs
            .iter()
            .map(|(s, t)| (map_pattern(s.object_map()), map_pattern(t.object_map())))
            .collect();
        patterns.sort();
        patterns.dedup();
        assert_eq!(
            patterns,
            vec![
                ("(12)".to_string(), "(12)".to_string()),
                ("(12)".to_string(), "id".to_string()),
                ("id".to_string(), "(12)".to_string()),
            ]
        );
    }

    #[test]
    fn classify_two() {
        let classes = classify(2, 2, Exec::Sequential).unwrap();
        assert_eq!(classes.len(), 3);
        let got: Vec<_> = classes
            .iter()
            .map(|r| {
                let p = r.summary.two_fold.clone().unwrap();
                (
                    r.summary.sigma_pattern.clone(),
                    r.summary.tau_pattern.clone(),
                    p.a12,
                    p.b12,
                    p.c1_over_c2,
                )
            })
            .collect();
        assert!(got.contains(&("id".into(), "(12)".into(), M1, ONE, M1)));
        assert!(got.contains(&("(12)".into(), "id".into(), ONE, M1, M1)));
        assert!(got.contains(&("(12)".into(), "(12)".into(), ONE, M1, M1)));
        assert!(classes
            .iter()
            .all(|r| r.representative.sigma != r.representative.tau));
    }

    #[test]
    fn strong_isomorphism_examples() {
        let s = auto(&[0, 1], &[ONE, M1]);
        let t = auto(&[1, 0], &[ONE, ONE]);
        assert!(strongly_isomorphic((&s, &t), (&s, &t))
            .unwrap()
            .is_identity());
        let t2 = auto(&[1, 0], &[ONE, M1]);
        let rho = strongly_isomorphic((&s, &t), (&s, &t2)).unwrap();
        assert_eq!(rho.compose(&t).unwrap(), t2.compose(&rho).unwrap());
        let c2 = (auto(&[1, 0], &[ONE, ONE]), auto(&[0, 1], &[ONE, M1]));
        let c3 = (auto(&[1, 0], &[ONE, ONE]), auto(&[1, 0], &[ONE, M1]));
        assert!(strongly_isomorphic((&c2.0, &c2.1), (&c3.0, &c3.1)).is_none());
    }

    #[test]
    fn conjugates_are_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..=5);
            let (s, t) = random_commuting_automorphisms(&mut rng, n, 12);
            let rho = random_automorphism(&mut rng, n, 24);
            let (s2, t2) = crate::cn::conjugate_pair(&rho, &s, &t).unwrap();
            assert!(strongly_isomorphic((&s, &t), (&s2, &t2)).is_some());
        }
    }

    #[test]
    fn commuting_maps_match_brute_force() {
        for ct in partitions(4) {
            let p = canonical_perm(&ct);
            let brute: Vec<Perm> = (0..256usize)
                .map(|code| (0..4).map(|k| (code >> (2 * k)) & 3).collect::<Perm>())
                .filter(|t| (0..4).all(|i| t[p[i]] == p[t[i]]))
                .collect();
            let mut got = commuting_maps(&p);
            got.sort();
            let mut brute = brute;
            brute.sort();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn duality_on_two_fold() {
        let classes = classify(2, 2, Exec::Sequential).unwrap();
        let find = |s: &str, t: &str| {
            classes
                .iter()
                .find(|r| r.summary.sigma_pattern == s && r.summary.tau_pattern == t)
                .unwrap()
                .representative
                .clone()
        };
        let (c1, c2, c3) = (find("id", "(12)"), find("(12)", "id"), find("(12)", "(12)"));
        assert!(triples_isomorphic(&dual_triple(&c1).unwrap(), &c2));
        assert!(triples_isomorphic(&dual_triple(&c3).unwrap(), &c3));
        for c in [&c1, &c2, &c3] {
            assert!(triples_isomorphic(
                &dual_triple(&dual_triple(c).unwrap()).unwrap(),
                c
            ));
        }
    }

    #[test]
    fn connected_counts() {
        assert_eq!(connected_coverings(2).unwrap().len(), 2);
        assert!(connected_coverings(3).unwrap().is_empty());
        let four = connected_coverings(4).unwrap();
        assert_eq!(four.len(), 4);
        for (i, a) in four.iter().enumerate() {
            for b in &four[i + 1..] {
                assert!(!triples_isomorphic(&a.representative, &b.representative));
            }
        }
    }

    #[test]
    fn odd_three_needs_non_invertible_tau() {
        let pairs = enumerate_pairs(3, 6, Exec::Sequential);
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|(_, t)| !t.is_automorphism()));
    }
}
