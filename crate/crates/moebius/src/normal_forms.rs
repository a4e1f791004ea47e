//! Good multiplicative bases, transition factors, orbit combinatorics and
//! centralizers, and the normalization of commuting pairs to roots of unity
//! of bounded order.

use serde::{Deserialize, Serialize};

use crate::cn::{commutes, Autoequivalence};
use crate::scalars::{geometric_mean, RootOfUnity};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum NfError {
    #[error("expected an automorphism")]
    NotAutomorphism,
    #[error("the functor is not in good-basis form")]
    NotGood,
    #[error("the pair does not commute")]
    NotCommuting,
    #[error("the pair is decomposable; normalize each στ-orbit separately")]
    Decomposable,
    #[error("no change of good basis relates the two bases: {0}")]
    NoDeltas(String),
    #[error("normalization did not reach the root-of-unity bound: {0}")]
    Bound(String),
}

pub type Perm = Vec<usize>;

/// Cycles of a permutation, each starting at its smallest element and
/// listed along the permutation; cycles ordered by first element.
pub fn perm_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push(i);
            i = perm[i];
        }
        out.push(cyc);
    }
    out
}

/// Cycle lengths in non-increasing order.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = perm_cycles(perm).iter().map(Vec::len).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// Standard permutation of the given cycle type: consecutive blocks, each
/// block a forward cycle.
pub fn canonical_perm(cycle_type: &[usize]) -> Perm {
    let n: usize = cycle_type.iter().sum();
    let mut perm = vec![0; n];
    let mut start = 0;
    for &len in cycle_type {
        for k in 0..len {
            perm[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    perm
}

/// Partitions of `n` as non-increasing sequences, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            go(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p: Perm = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn sigma_orbits(s: &Autoequivalence) -> Result<Vec<Vec<usize>>, NfError> {
    if !s.is_automorphism() {
        return Err(NfError::NotAutomorphism);
    }
    Ok(perm_cycles(s.object_map()))
}

fn orbit_index(orbits: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for (k, orb) in orbits.iter().enumerate() {
        for &i in orb {
            idx[i] = k;
        }
    }
    idx
}

/// New basis `x'_ij = (g_i / g_j) x_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeOfBasis {
    pub g: Vec<RootOfUnity>,
}

impl ChangeOfBasis {
    pub fn identity(n: usize) -> Self {
        ChangeOfBasis {
            g: vec![RootOfUnity::ONE; n],
        }
    }

    pub fn apply(&self, f: &Autoequivalence) -> Autoequivalence {
        f.rebase(&self.g)
    }

    /// The change of basis doing `self` first, then `next`.
    pub fn then(&self, next: &ChangeOfBasis) -> ChangeOfBasis {
        ChangeOfBasis {
            g: self.g.iter().zip(&next.g).map(|(a, b)| a.mul(*b)).collect(),
        }
    }

    /// Componentwise `other / self`: the change taking basis `self` to `other`.
    pub fn to(&self, other: &ChangeOfBasis) -> ChangeOfBasis {
        ChangeOfBasis {
            g: self
                .g
                .iter()
                .zip(&other.g)
                .map(|(a, b)| b.div(*a))
                .collect(),
        }
    }
}

/// Coefficients of a functor `C_n -> C_m` after changing the source basis by
/// `g` and the target basis by `h`.
pub fn rebase_functor(
    t: &Autoequivalence,
    g: &ChangeOfBasis,
    h: &ChangeOfBasis,
) -> Autoequivalence {
    let coeff = (0..t.n())
        .map(|i| t.coeff()[i].mul(g.g[i]).div(h.g[t.map(i)]))
        .collect();
    Autoequivalence::new(t.object_map().to_vec(), coeff).expect("valid by construction")
}

/// Whether `a_ij = 1` whenever `i` and `j` lie in one σ-orbit.
pub fn is_good(s: &Autoequivalence) -> bool {
    s.is_automorphism()
        && perm_cycles(s.object_map())
            .iter()
            .all(|orb| orb.iter().all(|&i| s.coeff()[i] == s.coeff()[orb[0]]))
}

/// Per orbit with smallest element `i0`: `g_{i0} = 1` and
/// `g_{σ^m(i0)} = c_{i0} ... c_{σ^{m-1}(i0)} / d^m` with `d` the geometric
/// mean of the `c_i` on the orbit.
pub fn good_basis(s: &Autoequivalence) -> Result<ChangeOfBasis, NfError> {
    let orbits = sigma_orbits(s)?;
    let mut g = vec![RootOfUnity::ONE; s.n()];
    for orb in &orbits {
        let cs: Vec<RootOfUnity> = orb.iter().map(|&i| s.coeff()[i]).collect();
        let d = geometric_mean(&cs);
        let mut acc = RootOfUnity::ONE;
        for (k, &i) in orb.iter().enumerate() {
            g[i] = acc;
            acc = acc.mul(cs[k]).div(d);
        }
        debug_assert!(acc.is_one());
    }
    Ok(ChangeOfBasis { g })
}

/// Orbits of σ and the transition factors `a_AB` between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitData {
    pub orbits: Vec<Vec<usize>>,
    pub factors: Vec<Vec<RootOfUnity>>,
}

impl OrbitData {
    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

pub fn transition_factors(s: &Autoequivalence) -> Result<OrbitData, NfError> {
    if !is_good(s) {
        return Err(NfError::NotGood);
    }
    let orbits = sigma_orbits(s)?;
    let factors = orbits
        .iter()
        .map(|a| orbits.iter().map(|b| s.a(a[0], b[0])).collect())
        .collect();
    Ok(OrbitData { orbits, factors })
}

/// The change of good basis `g_{σ^k(i0)} = δ_A^{-k}` on each orbit `A`.
pub fn delta_basis(s: &Autoequivalence, deltas: &[RootOfUnity]) -> Result<ChangeOfBasis, NfError> {
    let orbits = sigma_orbits(s)?;
    let mut g = vec![RootOfUnity::ONE; s.n()];
    for (orb, d) in orbits.iter().zip(deltas) {
        for (k, &i) in orb.iter().enumerate() {
            g[i] = d.pow(-(k as i64));
        }
    }
    Ok(ChangeOfBasis { g })
}

/// The `δ_A` relating two good bases `g1`, `g2` of `s`, so that the
/// transition factors satisfy `b_AB = δ_A a_AB δ_B^{-1}`.
pub fn change_of_good_basis_deltas(
    s: &Autoequivalence,
    g1: &ChangeOfBasis,
    g2: &ChangeOfBasis,
) -> Result<Vec<RootOfUnity>, NfError> {
    let s1 = g1.apply(s);
    let s2 = g2.apply(s);
    if !is_good(&s1) || !is_good(&s2) {
        return Err(NfError::NotGood);
    }
    let h = g1.to(g2);
    let orbits = sigma_orbits(s)?;
    let mut deltas = Vec::with_capacity(orbits.len());
    for orb in &orbits {
        let base = h.g[orb[0]];
        let delta = if orb.len() == 1 {
            RootOfUnity::ONE
        } else {
            base.div(h.g[orb[1]])
        };
        for (k, &i) in orb.iter().enumerate() {
            if h.g[i] != base.mul(delta.pow(-(k as i64))) {
                return Err(NfError::NoDeltas(format!(
                    "basis ratio is not geometric on orbit of {}",
                    orb[0] + 1
                )));
            }
        }
        if !delta.divides_order(orb.len() as u64) {
            return Err(NfError::NoDeltas(format!(
                "delta {delta} has order not dividing {}",
                orb.len()
            )));
        }
        deltas.push(delta);
    }
    let a = transition_factors(&s1)?;
    let b = transition_factors(&s2)?;
    for (x, dx) in deltas.iter().enumerate() {
        for (y, dy) in deltas.iter().enumerate() {
            if b.factors[x][y] != dx.mul(a.factors[x][y]).div(*dy) {
                return Err(NfError::NoDeltas("transition factors do not match".into()));
            }
        }
    }
    Ok(deltas)
}

/// The basis of the source in which every coefficient of `t` is 1, given
/// the basis `target` on the codomain.
pub fn comparison_basis(t: &Autoequivalence, target: &ChangeOfBasis) -> ChangeOfBasis {
    let g = ChangeOfBasis {
        g: (0..t.n())
            .map(|i| target.g[t.map(i)].div(t.coeff()[i]))
            .collect(),
    };
    let check = rebase_functor(t, &g, target);
    assert!(
        check.coeff().iter().all(|c| c.is_one()),
        "comparison basis failed to trivialize coefficients"
    );
    g
}

pub fn centralizer_size(perm: &[usize]) -> u128 {
    let t = cycle_type(perm);
    let mut out: u128 = 1;
    let mut i = 0;
    while i < t.len() {
        let lambda = t[i];
        let e = t[i..].iter().take_while(|&&x| x == lambda).count();
        out *= (lambda as u128).pow(e as u32) * (1..=e as u128).product::<u128>();
        i += e;
    }
    out
}

/// Permutations commuting with `perm`: cycles of equal length are permuted
/// among themselves and each is rotated.
pub fn enumerate_centralizer(perm: &[usize]) -> Vec<Perm> {
    let cycles = perm_cycles(perm);
    let n = perm.len();
    let mut lengths: Vec<usize> = cycles.iter().map(Vec::len).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let mut partial: Vec<Perm> = vec![vec![usize::MAX; n]];
    for len in lengths {
        let class: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.len() == len).collect();
        let e = class.len();
        let mut next = Vec::new();
        for pi in all_permutations(e) {
            let rot_count = len.pow(e as u32);
            for code in 0..rot_count {
                let mut code = code;
                let rots: Vec<usize> = (0..e)
                    .map(|_| {
                        let r = code % len;
                        code /= len;
                        r
                    })
                    .collect();
                for base in &partial {
                    let mut p = base.clone();
                    for k in 0..e {
                        let (src, dst) = (class[k], class[pi[k]]);
                        for m in 0..len {
                            p[src[m]] = dst[(m + rots[k]) % len];
                        }
                    }
                    next.push(p);
                }
            }
        }
        partial = next;
    }
    partial.sort();
    partial
}

/// Connected components of the graph joining `i` to `s(i)` and `t(i)`.
pub fn sigma_tau_orbits(s_map: &[usize], t_map: &[usize]) -> Vec<Vec<usize>> {
    let n = s_map.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in [s_map[i], t_map[i]] {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_block[r]].push(i);
    }
    blocks
}

pub fn is_indecomposable(s: &Autoequivalence, t: &Autoequivalence) -> bool {
    sigma_tau_orbits(s.object_map(), t.object_map()).len() == 1
}

/// σ-orbits form a functional graph under τ with exactly one cycle when the
/// pair is indecomposable. Per-orbit scalars make `e'_{i0(A)} = K` for the
/// smallest element of every orbit, where `K^p` is the product of those
/// coefficients around the cycle of length `p`; `branch` picks the root.
fn cycle_scaling(s: &Autoequivalence, t: &Autoequivalence, branch: usize) -> Option<ChangeOfBasis> {
    let n = s.n();
    let orbits = perm_cycles(s.object_map());
    let idx = orbit_index(&orbits, n);
    let e = t.coeff();
    let next: Vec<usize> = orbits.iter().map(|o| idx[t.map(o[0])]).collect();
    let mut a = 0;
    for _ in 0..orbits.len() {
        a = next[a];
    }
    let mut cycle = vec![a];
    while next[*cycle.last().unwrap()] != a {
        cycle.push(next[*cycle.last().unwrap()]);
    }
    let p = cycle.len();
    let prod = cycle
        .iter()
        .fold(RootOfUnity::ONE, |acc, &b| acc.mul(e[orbits[b][0]]));
    let k = prod
        .principal_root(p as u64)
        .mul(RootOfUnity::new(branch as i64, p as u64));
    let mut lambda: Vec<Option<RootOfUnity>> = vec![None; orbits.len()];
    lambda[a] = Some(RootOfUnity::ONE);
    for w in cycle.windows(2) {
        let la = lambda[w[0]].unwrap();
        lambda[w[1]] = Some(e[orbits[w[0]][0]].mul(la).div(k));
    }
    // remaining orbits hang off the cycle; e'_{i0} = e_{i0} λ_A / λ_{τA} = K
    let mut changed = true;
    while changed {
        changed = false;
        for b in 0..orbits.len() {
            if lambda[b].is_none() {
                if let Some(lt) = lambda[next[b]] {
                    lambda[b] = Some(k.mul(lt).div(e[orbits[b][0]]));
                    changed = true;
                }
            }
        }
    }
    let lambda: Option<Vec<RootOfUnity>> = lambda.into_iter().collect();
    let lambda = lambda?;
    Some(ChangeOfBasis {
        g: (0..n).map(|i| lambda[idx[i]]).collect(),
    })
}

fn within_bound(f: &Autoequivalence, bound: u64) -> bool {
    f.coeff().iter().all(|c| c.divides_order(bound))
}

/// Rebases an indecomposable commuting pair so that every coefficient of
/// both functors is an `n!`-th root of unity.
///
/// Constructive pass: good basis for σ, then per-orbit scalars along the
/// orbit graph of τ. If the bound is not met, the remaining
/// good-basis freedom `δ_A` is searched in index order. The result is always
/// checked against the bound.
pub fn normalize_pair(
    s: &Autoequivalence,
    t: &Autoequivalence,
) -> Result<(Autoequivalence, Autoequivalence, ChangeOfBasis), NfError> {
    if !s.is_automorphism() {
        return Err(NfError::NotAutomorphism);
    }
    if !commutes(s, t) {
        return Err(NfError::NotCommuting);
    }
    if !is_indecomposable(s, t) {
        return Err(NfError::Decomposable);
    }
    let bound = factorial(s.n());
    let g0 = good_basis(s)?;
    let (s1, t1) = (g0.apply(s), g0.apply(t));
    let orbits = perm_cycles(s1.object_map());
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    let combos: usize = sizes.iter().product();
    for code in 0..combos {
        let mut rest = code;
        let deltas: Vec<RootOfUnity> = sizes
            .iter()
            .map(|&m| {
                let k = rest % m;
                rest /= m;
                RootOfUnity::new(k as i64, m as u64)
            })
            .collect();
        let h = delta_basis(&s1, &deltas)?;
        let (s2, t2) = (h.apply(&s1), h.apply(&t1));
        for branch in 0..s.n() {
            let Some(lam) = cycle_scaling(&s2, &t2, branch) else {
                break;
            };
            let (s3, t3) = (lam.apply(&s2), lam.apply(&t2));
            if within_bound(&s3, bound) && within_bound(&t3, bound) {
                debug_assert!(commutes(&s3, &t3));
                return Ok((s3, t3, g0.then(&h).then(&lam)));
            }
        }
    }
    Err(NfError::Bound(format!(
        "no good basis puts ({s}, {t}) in μ_{bound}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: i64, q: u64) -> RootOfUnity {
        RootOfUnity::new(p, q)
    }

    fn auto(map: &[usize], coeff: &[RootOfUnity]) -> Autoequivalence {
        Autoequivalence::new(map.to_vec(), coeff.to_vec()).unwrap()
    }

    #[test]
    fn orbits_of_small_permutations() {
        assert_eq!(
            sigma_orbits(&Autoequivalence::identity(3)).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        let c = Autoequivalence::from_map(vec![1, 2, 0]).unwrap();
        assert_eq!(sigma_orbits(&c).unwrap(), vec![vec![0, 1, 2]]);
        let d = Autoequivalence::from_map(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(sigma_orbits(&d).unwrap(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn good_basis_examples() {
        let trivial = Autoequivalence::from_map(vec![1, 2, 0]).unwrap();
        let g = good_basis(&trivial).unwrap();
        assert!(g.g.iter().all(|x| *x == g.g[0]));
        let cyc = auto(&[1, 2, 3, 0], &[z(0, 1), z(1, 5), z(3, 7), z(1, 2)]);
        let good = good_basis(&cyc).unwrap().apply(&cyc);
        assert!(is_good(&good));
        assert!(good.pow(4).is_identity());
    }

    #[test]
    fn transition_factor_examples() {
        let cyc = Autoequivalence::from_map(vec![1, 2, 0]).unwrap();
        assert_eq!(
            transition_factors(&cyc).unwrap().factors,
            vec![vec![RootOfUnity::ONE]]
        );
        let s = auto(&[0, 1], &[z(0, 1), z(1, 2)]);
        let f = transition_factors(&s).unwrap();
        assert_eq!(f.factors[0][1], RootOfUnity::MINUS_ONE);
        assert_eq!(f.factors[1][0], RootOfUnity::MINUS_ONE);
        assert_eq!(
            transition_factors(&auto(&[1, 0], &[z(0, 1), z(1, 3)])),
            Err(NfError::NotGood)
        );
    }

    #[test]
    fn deltas_round_trip() {
        let s = auto(
            &[1, 2, 0, 4, 5, 3],
            &[z(0, 1), z(1, 4), z(1, 6), z(1, 3), z(0, 1), z(5, 12)],
        );
        let g1 = good_basis(&s).unwrap();
        assert_eq!(
            change_of_good_basis_deltas(&s, &g1, &g1).unwrap(),
            vec![RootOfUnity::ONE; 2]
        );
        let good = g1.apply(&s);
        let want = vec![z(1, 3), RootOfUnity::ONE];
        let g2 = g1.then(&delta_basis(&good, &want).unwrap());
        assert_eq!(change_of_good_basis_deltas(&s, &g1, &g2).unwrap(), want);
    }

    #[test]
    fn comparison_basis_examples() {
        let t = Autoequivalence::identity(2);
        let target = ChangeOfBasis {
            g: vec![z(1, 4), z(1, 3)],
        };
        assert_eq!(comparison_basis(&t, &target), target);
        let t = auto(&[1, 0], &[z(0, 1), z(1, 2)]);
        let id = ChangeOfBasis::identity(2);
        let g = comparison_basis(&t, &id);
        assert!(rebase_functor(&t, &g, &id)
            .coeff()
            .iter()
            .all(|c| c.is_one()));
        assert_eq!(g.g[1].div(g.g[0]), z(1, 2));
    }

    #[test]
    fn centralizers_match_brute_force() {
        for n in 1..=6 {
            let all = all_permutations(n);
            for p in all.iter().step_by(7) {
                let brute: Vec<Perm> = all
                    .iter()
                    .filter(|q| (0..n).all(|i| p[q[i]] == q[p[i]]))
                    .cloned()
                    .collect();
                assert_eq!(centralizer_size(p), brute.len() as u128, "{p:?}");
                assert_eq!(enumerate_centralizer(p), brute, "{p:?}");
            }
        }
        assert_eq!(centralizer_size(&[0, 1, 2]), 6);
        assert_eq!(centralizer_size(&[1, 2, 0]), 3);
        assert_eq!(centralizer_size(&[1, 0, 3, 2]), 8);
    }

    #[test]
    fn sigma_tau_orbit_examples() {
        assert_eq!(sigma_tau_orbits(&[1, 0], &[0, 1]), vec![vec![0, 1]]);
        assert_eq!(sigma_tau_orbits(&[0, 1], &[0, 1]), vec![vec![0], vec![1]]);
        assert_eq!(
            sigma_tau_orbits(&[1, 0, 3, 2], &[2, 3, 0, 1]),
            vec![vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn normalization_of_two_two_cycles() {
        // σ = (12)(34), τ swaps the two orbits
        let s = auto(&[1, 0, 3, 2], &[z(0, 1), z(3, 8), z(1, 8), z(1, 4)]);
        let tmap = [2, 3, 0, 1];
        let n = 4;
        let mut found = 0;
        for code in 0..8u64.pow(3) {
            let mut c = vec![RootOfUnity::ONE];
            let mut r = code;
            for _ in 1..n {
                c.push(z((r % 8) as i64, 8));
                r /= 8;
            }
            let t = auto(&tmap, &c);
            if !commutes(&s, &t) {
                continue;
            }
            found += 1;
            let (s2, t2, _) = normalize_pair(&s, &t).unwrap();
            assert!(within_bound(&s2, 24) && within_bound(&t2, 24));
        }
        assert!(found > 0);
    }

    #[test]
    fn partitions_and_canonical_perms() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(canonical_perm(&[2, 1]), vec![1, 0, 2]);
        assert_eq!(cycle_type(&canonical_perm(&[3, 2, 2])), vec![3, 2, 2]);
    }
}
