//! Seeded verification sweeps shared by `verify` and the acceptance runner.
//! Every sweep item gets its own ChaCha stream, so results do not depend on
//! the execution mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    classify, connected_coverings, continuity_product, default_order_bound, dual_triple,
    enumerate_pairs, random_automorphism, random_commuting_automorphisms, sample_pairs,
    triples_isomorphic, ClassRecord, TriangulationTriple,
};
use crate::cn::{natural_iso, MonomialLift};
use crate::frobenius::{
    coord, normalized_scalars, positive_triangle, random_object, universal_sequence,
    universal_virtual_triangle, verify_axiom_samples, AxiomReport, Cover, CoverMorphism, MFObject,
    Model, Series, TriangleScalars,
};
use crate::normal_forms::{
    all_permutations, change_of_good_basis_deltas, delta_basis, factorial, good_basis, is_good,
    is_indecomposable, normalize_pair, perm_cycles, sigma_orbits,
};
use crate::par::Exec;
use crate::scalars::{Cyclotomic, RootOfUnity};

pub const SUITES: &[&str] = &[
    "two-fold",
    "connected",
    "duality",
    "anti-symmetry",
    "skew-law",
    "good-basis",
    "root-bound",
    "mf-law",
    "universal-sequence",
    "triangle-patterns",
    "axioms",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the per-suite default sample count.
    pub sample_size: Option<usize>,
    /// Restricts suites that sweep several `n` to this one.
    pub n: Option<usize>,
    pub exec: Exec,
    /// Test hook: perturbs one φ-coefficient before the skew-law check.
    pub corrupt: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            sample_size: None,
            n: None,
            exec: Exec::default(),
            corrupt: false,
        }
    }
}

impl SuiteConfig {
    fn samples(&self, default: usize) -> usize {
        self.sample_size.unwrap_or(default)
    }

    fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
}

fn outcome(name: &str, checked: usize, failures: Vec<String>) -> SuiteOutcome {
    let detail = match failures.len() {
        0 => format!("{checked} checks"),
        k => format!("{k} of {checked} failed; first: {}", failures[0]),
    };
    SuiteOutcome {
        name: name.into(),
        passed: failures.is_empty(),
        checked,
        detail,
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteOutcome, String> {
    match name {
        "two-fold" => Ok(two_fold(cfg)),
        "connected" => Ok(connected(cfg)),
        "duality" => Ok(duality(cfg)),
        "anti-symmetry" => Ok(anti_symmetry(cfg)),
        "skew-law" => Ok(skew_law(cfg)),
        "good-basis" => Ok(good_basis_suite(cfg)),
        "root-bound" => Ok(root_bound(cfg)),
        "mf-law" => Ok(mf_law(cfg)),
        "universal-sequence" => Ok(universal_sequences(cfg)),
        "triangle-patterns" => Ok(triangle_patterns(cfg)),
        "axioms" => Ok(axioms(cfg)),
        _ => Err(format!(
            "unknown suite `{name}`; expected one of {}",
            SUITES.join(", ")
        )),
    }
}

pub fn two_fold_classes(exec: Exec) -> Vec<ClassRecord> {
    classify(2, default_order_bound(2), exec).expect("n = 2 is valid")
}

pub fn two_fold(cfg: &SuiteConfig) -> SuiteOutcome {
    let (p, m) = (RootOfUnity::ONE, RootOfUnity::MINUS_ONE);
    let expected = [
        ("id", "(12)", m, p, m),
        ("(12)", "id", p, m, m),
        ("(12)", "(12)", p, m, m),
    ];
    let classes = two_fold_classes(cfg.exec);
    let mut got: Vec<_> = classes
        .iter()
        .filter_map(|r| {
            let s = &r.summary;
            let t = s.two_fold.as_ref()?;
            Some((
                s.sigma_pattern.clone(),
                s.tau_pattern.clone(),
                t.a12,
                t.b12,
                t.c1_over_c2,
            ))
        })
        .collect();
    let mut want: Vec<_> = expected
        .iter()
        .map(|&(s, t, a, b, c)| (s.to_string(), t.to_string(), a, b, c))
        .collect();
    got.sort();
    want.sort();
    let mut fails = Vec::new();
    if classes.len() != 3 {
        fails.push(format!("{} classes", classes.len()));
    }
    if got != want {
        fails.push(format!("parameters {got:?}"));
    }
    outcome("two-fold", 1, fails)
}

pub fn connected(cfg: &SuiteConfig) -> SuiteOutcome {
    let ks = cfg.ns(&[2, 3, 4, 5, 6, 7, 8]);
    let mut fails = Vec::new();
    for &k in &ks {
        match connected_coverings(k) {
            Ok(v) => {
                let want = if k % 2 == 0 { k } else { 0 };
                if v.len() != want {
                    fails.push(format!("n={k}: {} classes", v.len()));
                }
            }
            Err(e) => fails.push(format!("n={k}: {e}")),
        }
    }
    // n=2 against the 2-cycle part of the full classification
    let full: Vec<_> = two_fold_classes(cfg.exec)
        .into_iter()
        .filter(|r| r.summary.sigma_cycle_type == vec![2])
        .collect();
    let conn = connected_coverings(2).expect("n = 2");
    let same = full.len() == conn.len()
        && conn.iter().all(|c| {
            full.iter()
                .any(|f| triples_isomorphic(&c.representative, &f.representative))
        });
    if !same {
        fails.push("n=2 connected classes differ from the 2-cycle classes".into());
    }
    outcome("connected", ks.len() + 1, fails)
}

pub fn duality(cfg: &SuiteConfig) -> SuiteOutcome {
    let classes = two_fold_classes(cfg.exec);
    let find = |s: &str, t: &str| {
        classes
            .iter()
            .find(|r| r.summary.sigma_pattern == s && r.summary.tau_pattern == t)
            .map(|r| r.representative.clone())
    };
    let mut fails = Vec::new();
    let mut checked = 0;
    match (find("id", "(12)"), find("(12)", "id"), find("(12)", "(12)")) {
        (Some(a), Some(b), Some(c)) => {
            checked += 2;
            if !dual_triple(&a)
                .map(|d| triples_isomorphic(&d, &b))
                .unwrap_or(false)
            {
                fails.push("dual of (id, (12)) is not (12), id".into());
            }
            if !dual_triple(&c)
                .map(|d| triples_isomorphic(&d, &c))
                .unwrap_or(false)
            {
                fails.push("((12), (12)) is not self-dual".into());
            }
        }
        _ => fails.push("missing two-fold classes".into()),
    }
    let mut rng = cfg.rng(0);
    let mut triples: Vec<TriangulationTriple> =
        classes.into_iter().map(|r| r.representative).collect();
    for (s, t) in sample_pairs(&mut rng, 4, default_order_bound(4), cfg.samples(20), true) {
        match TriangulationTriple::new(s, t) {
            Ok(x) => triples.push(x),
            Err(e) => fails.push(format!("sampled pair: {e}")),
        }
    }
    let res = cfg.exec.map(triples, |t| {
        dual_triple(&t)
            .and_then(|d| dual_triple(&d))
            .map(|dd| triples_isomorphic(&dd, &t))
            .unwrap_or(false)
            .then_some(())
            .ok_or_else(|| format!("dual∘dual not isomorphic for σ={}", t.sigma))
    });
    checked += res.len();
    fails.extend(res.into_iter().filter_map(Result::err));
    outcome("duality", checked, fails)
}

pub fn anti_symmetry(cfg: &SuiteConfig) -> SuiteOutcome {
    let count = cfg.samples(500);
    let res = cfg.exec.map((0..count as u64).collect(), |k| {
        let mut rng = cfg.rng(k);
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(1..=4));
        let (s, t) = random_commuting_automorphisms(&mut rng, n, 24);
        match continuity_product(&s, &t) {
            Ok(p) if p.is_one() => Ok(()),
            Ok(p) => Err(format!("product {p} for σ={s}, τ={t}")),
            Err(e) => Err(format!("{e} for σ={s}, τ={t}")),
        }
    });
    outcome(
        "anti-symmetry",
        count,
        res.into_iter().filter_map(Result::err).collect(),
    )
}

pub fn skew_law(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut checked = 0;
    let mut fails = Vec::new();
    for n in cfg.ns(&[2, 3]) {
        let pairs = enumerate_pairs(n, default_order_bound(n), cfg.exec);
        checked += pairs.len();
        let res = cfg.exec.map(pairs, |(s, t)| {
            let mut phi = natural_iso(&s, &t).map_err(|e| e.to_string())?;
            if cfg.corrupt {
                phi.c[0] = phi.c[0].mul(RootOfUnity::zeta(3));
            }
            for i in 0..n {
                let si = s.map(i);
                if phi.c[si] != phi.c[i].mul(s.a(t.map(i), si)).neg() {
                    return Err(format!("n={n}, i={}: σ={s}, τ={t}", i + 1));
                }
            }
            Ok(())
        });
        fails.extend(res.into_iter().filter_map(Result::err));
    }
    outcome("skew-law", checked, fails)
}

pub fn good_basis_suite(cfg: &SuiteConfig) -> SuiteOutcome {
    let count = cfg.samples(200);
    let res = cfg
        .exec
        .map((0..count as u64).collect(), |k| -> Result<(), String> {
            let mut rng = cfg.rng(k);
            let n = cfg.n.unwrap_or_else(|| rng.gen_range(1..=6));
            let s = random_automorphism(&mut rng, n, 12);
            let g = good_basis(&s).map_err(|e| e.to_string())?;
            let s1 = g.apply(&s);
            if !is_good(&s1) {
                return Err(format!("not good after rebasing: {s}"));
            }
            let orbits = perm_cycles(s.object_map());
            if orbits.len() == 1 && !s1.pow(n).is_identity() {
                return Err(format!("σ^n is not the identity after rebasing: {s}"));
            }
            let deltas: Vec<RootOfUnity> = sigma_orbits(&s1)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|o| RootOfUnity::new(rng.gen_range(0..o.len() as i64), o.len() as u64))
                .collect();
            let g2 = g.then(&delta_basis(&s1, &deltas).map_err(|e| e.to_string())?);
            let back =
                change_of_good_basis_deltas(&s, &g, &g2).map_err(|e| format!("{e} for {s}"))?;
            let sizes: Vec<usize> = sigma_orbits(&s)
                .map_err(|e| e.to_string())?
                .iter()
                .map(Vec::len)
                .collect();
            if back != deltas
                || back
                    .iter()
                    .zip(&sizes)
                    .any(|(d, &m)| !d.pow(m as i64).is_one())
            {
                return Err(format!("δ round trip {deltas:?} -> {back:?} for {s}"));
            }
            Ok(())
        });
    outcome(
        "good-basis",
        count,
        res.into_iter().filter_map(Result::err).collect(),
    )
}

pub fn root_bound(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut checked = 0;
    let mut fails = Vec::new();
    for n in cfg.ns(&[2, 3]) {
        let bound = factorial(n);
        let pairs: Vec<_> = enumerate_pairs(n, default_order_bound(n), cfg.exec)
            .into_iter()
            .filter(|(s, t)| is_indecomposable(s, t))
            .collect();
        checked += pairs.len();
        let res = cfg.exec.map(pairs, |(s, t)| {
            let (s2, t2, _) =
                normalize_pair(&s, &t).map_err(|e| format!("{e} for σ={s}, τ={t}"))?;
            let ok = s2
                .coeff()
                .iter()
                .chain(t2.coeff())
                .all(|c| c.divides_order(bound));
            ok.then_some(())
                .ok_or_else(|| format!("n={n}: σ={s2}, τ={t2}"))
        });
        fails.extend(res.into_iter().filter_map(Result::err));
    }
    outcome("root-bound", checked, fails)
}

fn random_lift<R: Rng>(rng: &mut R, n: usize) -> MonomialLift {
    let perms = all_permutations(n);
    MonomialLift {
        perm: perms[rng.gen_range(0..perms.len())].clone(),
        diag: (0..n)
            .map(|_| RootOfUnity::new(rng.gen_range(0..12), 12))
            .collect(),
    }
}

pub fn mf_law(cfg: &SuiteConfig) -> SuiteOutcome {
    let count = cfg.samples(100);
    let mut items = Vec::new();
    for n in cfg.ns(&[1, 2, 3]) {
        items.extend((0..count as u64).map(|k| (n, k)));
    }
    let checked = items.len();
    let res = cfg.exec.map(items, |(n, k)| {
        let mut rng = cfg.rng(((n as u64) << 32) | k);
        let cv = Cover::new(random_lift(&mut rng, n));
        let m = random_object(&mut rng, n);
        let (dm, dp) = (m.d_minus(&cv), m.d_plus(&cv));
        let t_id = |p| CoverMorphism {
            source: p,
            target: p,
            coeff: Series::monomial(Cyclotomic::one(), 1),
        };
        let pm = cv.compose(&dp, &dm).map_err(|e| e.to_string())?;
        let mp = cv.compose(&dm, &dp).map_err(|e| e.to_string())?;
        if pm != t_id(dm.source) || mp != t_id(dp.source) {
            return Err(format!("{m} with lift {:?}", cv.lift));
        }
        Ok(())
    });
    outcome(
        "mf-law",
        checked,
        res.into_iter().filter_map(Result::err).collect(),
    )
}

pub fn universal_sequences(cfg: &SuiteConfig) -> SuiteOutcome {
    let count = cfg.samples(100);
    let classes = two_fold_classes(cfg.exec);
    let items: Vec<(usize, u64)> = (0..classes.len())
        .flat_map(|c| (0..count as u64).map(move |k| (c, k)))
        .collect();
    let models: Vec<Model> = classes
        .iter()
        .map(|r| Model::new(&r.representative).expect("valid triple"))
        .collect();
    let checked = items.len();
    let res = cfg.exec.map(items, |(c, k)| {
        let md = &models[c];
        let mut rng = cfg.rng(((c as u64) << 32) | k);
        let m = random_object(&mut rng, 2);
        let a = universal_sequence(md, &m).map_err(|e| format!("{m}: {e}"))?;
        a.check(&md.cv).map_err(|e| format!("{m}: {e}"))?;
        let b = universal_sequence(md, &m.swap(&md.cv)).map_err(|e| format!("{m}: {e}"))?;
        let same = b.j.m.select(&[3, 2, 1, 0], &[1, 0]) == a.j.m
            && b.p.m.select(&[1, 0], &[3, 2, 1, 0]) == a.p.m;
        same.then_some(())
            .ok_or_else(|| format!("{m}: relabeled sequence differs"))
    });
    outcome(
        "universal-sequence",
        checked,
        res.into_iter().filter_map(Result::err).collect(),
    )
}

/// Normalized scalars of the positive triangle at (1/4, 1/2, 3/4) and of the
/// universal virtual triangle of M(1/4, 1/2, i), per class and sheet.
#[derive(Clone, Debug)]
pub struct PatternSample {
    pub class: usize,
    pub sheet: usize,
    pub c: Cyclotomic,
    pub positive: TriangleScalars,
    pub virtual_: TriangleScalars,
}

pub fn triangle_samples(exec: Exec) -> Result<Vec<PatternSample>, String> {
    let classes = two_fold_classes(exec);
    let mut out = Vec::new();
    for (k, r) in classes.iter().enumerate() {
        let md = Model::new(&r.representative).map_err(|e| e.to_string())?;
        for i in 0..2 {
            let p = positive_triangle(&md, coord(1, 4), coord(1, 2), coord(3, 4), i)
                .and_then(|t| normalized_scalars(&md, &t))
                .map_err(|e| e.to_string())?;
            let m = MFObject::new(coord(1, 4), coord(1, 2), i);
            let v = universal_virtual_triangle(&md, &m, coord(1, 3), coord(1, 5))
                .and_then(|t| normalized_scalars(&md, &t))
                .map_err(|e| e.to_string())?;
            out.push(PatternSample {
                class: k + 1,
                sheet: i + 1,
                c: r.representative.c(i).into(),
                positive: p,
                virtual_: v,
            });
        }
    }
    Ok(out)
}

pub fn positive_matches(s: &PatternSample) -> bool {
    let one = vec![Cyclotomic::one()];
    s.positive.f == one && s.positive.g == one && s.positive.h == s.c
}

/// `((1,1), (-1,1), h)` with the given `h`.
pub fn virtual_matches(s: &PatternSample, h: &Cyclotomic) -> bool {
    let one = Cyclotomic::one();
    s.virtual_.f == vec![one.clone(), one.clone()]
        && s.virtual_.g == vec![-one.clone(), one]
        && &s.virtual_.h == h
}

pub fn triangle_patterns(cfg: &SuiteConfig) -> SuiteOutcome {
    let samples = match triangle_samples(cfg.exec) {
        Ok(s) => s,
        Err(e) => return outcome("triangle-patterns", 1, vec![e]),
    };
    let mut fails = Vec::new();
    for s in &samples {
        if !positive_matches(s) {
            fails.push(format!(
                "positive, class {} sheet {}: {:?}",
                s.class, s.sheet, s.positive
            ));
        }
        if !virtual_matches(s, &s.c) {
            fails.push(format!(
                "virtual, class {} sheet {}: {:?}",
                s.class, s.sheet, s.virtual_
            ));
        }
    }
    outcome("triangle-patterns", 2 * samples.len(), fails)
}

pub fn axioms(cfg: &SuiteConfig) -> SuiteOutcome {
    let size = cfg.samples(50);
    let classes = two_fold_classes(cfg.exec);
    let items: Vec<(u64, TriangulationTriple)> = classes
        .into_iter()
        .enumerate()
        .map(|(k, r)| (k as u64, r.representative))
        .collect();
    let checked = items.len();
    let res = cfg.exec.map(items, |(k, t)| {
        let mut rng = cfg.rng(k);
        match verify_axiom_samples(&t, size, &mut rng) {
            Ok(r) if r.passed() => Ok(r),
            Ok(r) => Err(format!("class {}: {r:?}", k + 1)),
            Err(e) => Err(format!("class {}: {e}", k + 1)),
        }
    });
    let mut total = AxiomReport::default();
    let mut fails = Vec::new();
    for r in res {
        match r {
            Ok(r) => {
                total.generic_samples += r.generic_samples;
                total.shared_end_samples += r.shared_end_samples;
                total.rotation_samples += r.rotation_samples;
                total.completion_samples += r.completion_samples;
            }
            Err(e) => fails.push(e),
        }
    }
    let mut o = outcome("axioms", checked, fails);
    if o.passed {
        o.detail = format!(
            "{checked} classes; samples: {} generic, {} shared-end, {} rotation, {} completion",
            total.generic_samples,
            total.shared_end_samples,
            total.rotation_samples,
            total.completion_samples
        );
    }
    o
}
