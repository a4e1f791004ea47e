//! Acceptance runner: one line per criterion with its time against budget.
//! Exits nonzero if any criterion fails other than the listed known
//! deviations, or if a known deviation unexpectedly passes.

use std::time::{Duration, Instant};

use moebius::cli::suites::{
    self, positive_matches, triangle_samples, virtual_matches, SuiteConfig, SuiteOutcome,
};
use moebius::par::Exec;

/// Criteria whose literal statement is not reproduced by the computation.
const KNOWN_DEVIATIONS: &[usize] = &[10];

struct Criterion {
    id: usize,
    title: &'static str,
    budget: Duration,
    run: fn(&SuiteConfig) -> SuiteOutcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn triangles(_: &SuiteConfig) -> SuiteOutcome {
    let samples = match triangle_samples(Exec::default()) {
        Ok(s) => s,
        Err(e) => {
            return SuiteOutcome {
                name: "triangles".into(),
                passed: false,
                checked: 0,
                detail: e,
            };
        }
    };
    let positive = samples.iter().filter(|s| positive_matches(s)).count();
    let literal = samples
        .iter()
        .filter(|s| virtual_matches(s, &-s.c.clone()))
        .count();
    let normal = samples.iter().filter(|s| virtual_matches(s, &s.c)).count();
    let n = samples.len();
    let mut detail = format!("positive (1,1,c_i) on {positive}/{n}; ");
    detail += &format!("virtual ((1,1),(-1,1),-c_i) on {literal}/{n}");
    if literal < n {
        detail += &format!(
            "; computed ((1,1),(-1,1),+c_i) on {normal}/{n}, which is the normal form itself \
             and differs from -c_i by rescaling h with -1"
        );
    }
    SuiteOutcome {
        name: "triangles".into(),
        passed: positive == n && literal == n,
        checked: 2 * n,
        detail,
    }
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "classify --n 2 gives the three two-fold classes",
            budget: secs(1),
            run: suites::two_fold,
        },
        Criterion {
            id: 2,
            title: "connected --n k gives k classes (even) or none (odd)",
            budget: secs(30),
            run: suites::connected,
        },
        Criterion {
            id: 3,
            title: "duality and dual∘dual on n=2 and sampled n=4",
            budget: secs(10),
            run: suites::duality,
        },
        Criterion {
            id: 4,
            title: "anti-symmetry {σ,τ}{τ,σ}=1 on 500 pairs",
            budget: secs(20),
            run: suites::anti_symmetry,
        },
        Criterion {
            id: 5,
            title: "skew law for every enumerated pair, n ∈ {2,3}",
            budget: secs(60),
            run: suites::skew_law,
        },
        Criterion {
            id: 6,
            title: "good bases, σ^n, δ_A round trips on 200 samples",
            budget: secs(30),
            run: suites::good_basis_suite,
        },
        Criterion {
            id: 7,
            title: "root bound n! for indecomposable pairs, n ∈ {2,3}",
            budget: secs(120),
            run: suites::root_bound,
        },
        Criterion {
            id: 8,
            title: "d+d- = d-d+ = t on 100 objects per n ∈ {1,2,3}",
            budget: secs(10),
            run: suites::mf_law,
        },
        Criterion {
            id: 9,
            title: "universal sequences split and are well defined",
            budget: secs(20),
            run: suites::universal_sequences,
        },
        Criterion {
            id: 10,
            title: "positive and universal virtual triangle scalars",
            budget: secs(5),
            run: triangles,
        },
        Criterion {
            id: 11,
            title: "axiom sampling with 50 completions per class",
            budget: secs(60),
            run: suites::axioms,
        },
    ]
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut unexpected = Vec::new();
    println!(
        "acceptance: {} criteria, seed {}",
        criteria().len(),
        cfg.seed
    );
    for c in criteria() {
        let start = Instant::now();
        let out = (c.run)(&cfg);
        let took = start.elapsed();
        let in_time = took <= c.budget;
        let pass = out.passed && in_time;
        let known = KNOWN_DEVIATIONS.contains(&c.id);
        println!(
            "[{}] {:>2} {} ({:.2}s / {}s) {}{}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            took.as_secs_f64(),
            c.budget.as_secs(),
            out.detail,
            match (pass, known) {
                (false, true) => " [known deviation]",
                (true, true) => " [known deviation now passes]",
                _ => "",
            }
        );
        if pass == known {
            unexpected.push(c.id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected results");
    } else {
        println!("acceptance: unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
