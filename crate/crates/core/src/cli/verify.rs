//! Seeded property checks behind `verify`.
//!
//! Each suite draws from its own ChaCha stream of the given seed so adding
//! a suite never shifts another suite's samples.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bounds::{
    baseline_simple_rhs, compare_bounds, lemma1_rhs, lemma2_check, lemma3_rhs, lemma4_rhs, pow, thm3_bound, tripartite_case,
    BoundKind, BoundParams, VIOLATION_TOL,
};
use crate::entanglement::{concurrence_vector, pure_concurrence, wootters_concurrence, EntanglementVector, State};
use crate::linalg::{kron, ComplexMatrix};
use crate::states::{density_of, partial_trace, BipartiteSplit, PureState, StateSampler};

/// Tolerance for the closed-form Lemma-4 minus Lemma-1 gap.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Slack on inequalities involving computed concurrences.
pub const STATE_TOL: f64 = 1e-9;
/// Agreement between two routes to the same matrix or scalar.
pub const ROUTE_TOL: f64 = 1e-10;
/// η values for the tripartite soundness check.
pub const SOUNDNESS_ETAS: [f64; 3] = [4.0, 6.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Orderings,
    Ckw,
    States,
    All,
}

impl Suite {
    pub const EACH: [Suite; 4] = [Suite::Lemmas, Suite::Orderings, Suite::Ckw, Suite::States];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Orderings => "orderings",
            Suite::Ckw => "ckw",
            Suite::States => "states",
            Suite::All => "all",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "orderings" => Ok(Suite::Orderings),
            "ckw" => Ok(Suite::Ckw),
            "states" => Ok(Suite::States),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?} (expected lemmas, orderings, ckw, states or all)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Counts for one suite plus the first failing input, if any.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Records one check; `detail` is only built on failure.
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn absorb(&mut self, other: SuiteReport) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.skipped += other.skipped;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checks, {} passed, {} failed",
            self.name,
            self.checks,
            self.checks - self.violations,
            self.violations
        )?;
        if self.skipped > 0 {
            write!(f, ", {} samples outside the case condition", self.skipped)?;
        }
        if let Some(first) = &self.first_failure {
            write!(f, "\n  first failure: {first}")?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Vec<SuiteReport> {
    match suite {
        Suite::Lemmas => vec![lemma_suite(samples, seed)],
        Suite::Orderings => vec![ordering_suite(samples, seed, &[3, 4, 5])],
        Suite::Ckw => vec![ckw_suite(samples, seed)],
        Suite::States => vec![state_suite(samples, seed)],
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, samples, seed)).collect(),
    }
}

/// Lemmas 1 to 4 and the simple-baseline dominance on random `(x, k, μ)`.
pub fn lemma_suite(samples: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("lemmas");
    let mut rng = StateSampler::with_stream(seed, Suite::Lemmas.stream());
    for _ in 0..samples {
        let k = rng.uniform_in(1.0, 5.0);
        let mu = rng.uniform_in(1.0, 6.0);
        let mu2 = rng.uniform_in(2.0, 6.0);
        let x = rng.uniform_in(0.0, 1.0 / k);
        let x3 = rng.uniform();
        let lhs = pow(1.0 + x, mu);
        let lhs2 = pow(1.0 + x, mu2);
        let tag = || format!("x={x:e}, k={k:e}, mu={mu:e}, mu2={mu2:e}");

        let l1 = lemma1_rhs(x, k, mu).expect("sampled in domain");
        let s = baseline_simple_rhs(x, k, mu).expect("sampled in domain");
        r.check(lhs - l1 >= -VIOLATION_TOL, || format!("lemma 1: {}", tag()));
        r.check(lemma2_check(x, mu).expect("sampled in domain"), || format!("lemma 2: {}", tag()));
        r.check(pow(1.0 + x3, mu2) - lemma3_rhs(x3, mu2).expect("sampled in domain") >= -VIOLATION_TOL, || {
            format!("lemma 3: x3={x3:e}, mu2={mu2:e}")
        });
        let l4 = lemma4_rhs(x, k, mu2).expect("sampled in domain");
        r.check(lhs2 - l4 >= -VIOLATION_TOL, || format!("lemma 4: {}", tag()));
        r.check(l1 - s >= -VIOLATION_TOL && lhs - s >= -VIOLATION_TOL, || format!("simple dominance: {}", tag()));

        let gap = l4 - lemma1_rhs(x, k, mu2).expect("sampled in domain");
        r.check((gap - lemma4_gap(x, k, mu2)).abs() <= IDENTITY_TOL && gap >= -VIOLATION_TOL, || {
            format!("lemma 4 − lemma 1 identity: {}", tag())
        });
    }
    r
}

/// `(μ/(k+1))·x·(1 − (kx)^{μ−1})`.
pub fn lemma4_gap(x: f64, k: f64, mu: f64) -> f64 {
    mu / (k + 1.0) * x * (1.0 - pow(k * x, mu - 1.0))
}

/// Random `(α, μ, γ, γ′)` for the ordering checks, with `μ ≥ 2`.
pub fn random_params(rng: &mut StateSampler) -> BoundParams {
    let alpha = rng.uniform_in(1.0, 3.0);
    let mu = rng.uniform_in(2.0, 6.0);
    let gamma = rng.uniform_in(1.0, 2.0);
    let gamma_prime = rng.uniform_in(1.0, 2.0);
    BoundParams::from_mu(alpha, mu, gamma)
        .and_then(|p| p.with_gamma_prime(gamma_prime))
        .expect("sampled in domain")
}

/// Pairwise values of length `n` meeting the partition chains for `m`,
/// built from the tail forwards and scaled so the largest is 1.
pub fn conforming_partition(rng: &mut StateSampler, n: usize, m: usize, gamma: f64, gamma_prime: f64) -> Vec<f64> {
    assert!(n >= 3 && (1..=n - 2).contains(&m));
    let mut e = vec![0.0; n];
    e[n - 1] = rng.uniform_in(0.1, 1.0);
    let mut tail = e[n - 1];
    for j in (m..n - 1).rev() {
        // strictly inside the trailing bound so rescaling cannot flip it
        e[j] = rng.uniform_in(0.0, 0.999) * tail / gamma_prime;
        tail += e[j];
    }
    for i in (0..m).rev() {
        e[i] = gamma * tail * rng.uniform_in(1.001, 2.0);
        tail += e[i];
    }
    normalize_max(e)
}

/// Pairwise values of length `n` meeting `E_i ≥ γ Σ_{l>i} E_l` throughout.
pub fn conforming_strong(rng: &mut StateSampler, n: usize, gamma: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[n - 1] = rng.uniform_in(0.1, 1.0);
    let mut tail = e[n - 1];
    for i in (0..n - 1).rev() {
        e[i] = gamma * tail * rng.uniform_in(1.001, 2.0);
        tail += e[i];
    }
    normalize_max(e)
}

fn normalize_max(mut e: Vec<f64>) -> Vec<f64> {
    let max = e.iter().cloned().fold(0.0, f64::max);
    e.iter_mut().for_each(|v| *v /= max);
    e
}

/// Corollary orderings on random conforming vectors, `samples` of each
/// length in `lengths` and of each generator.
pub fn ordering_suite(samples: usize, seed: u64, lengths: &[usize]) -> SuiteReport {
    let mut r = SuiteReport::new("orderings");
    let mut rng = StateSampler::with_stream(seed, Suite::Orderings.stream());
    for &n in lengths {
        for _ in 0..samples {
            let p = random_params(&mut rng);
            let m = 1 + (rng.uniform() * (n - 2) as f64) as usize;
            let partition = conforming_partition(&mut rng, n, m.min(n - 2), p.gamma(), p.gamma_prime());
            check_orderings(&mut r, &partition, &p, &[BoundKind::Thm1, BoundKind::Thm4]);
            let strong = conforming_strong(&mut rng, n, p.gamma());
            check_orderings(&mut r, &strong, &p, &[BoundKind::Thm2, BoundKind::Thm5]);
        }
    }
    r
}

fn check_orderings(r: &mut SuiteReport, e: &[f64], p: &BoundParams, expected: &[BoundKind]) {
    let report = compare_bounds(&EntanglementVector::new(None, e.to_vec()), p);
    let describe = || format!("pairwise={e:?}, alpha={}, mu={}, gamma={}, gamma'={}", p.alpha(), p.mu(), p.gamma(), p.gamma_prime());
    r.check(expected.iter().all(|&k| report.applies(k)), || format!("generator produced a non-conforming vector: {}", describe()));
    let violations = report.ordering_violations(VIOLATION_TOL);
    r.check(violations.is_empty(), || {
        let first = violations.first().map(|v| v.to_string()).unwrap_or_default();
        format!("{first}: {}", describe())
    });
}

/// CKW on Haar-random three-qubit states, plus tripartite soundness with γ = √2.
pub fn ckw_suite(samples: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("ckw");
    let mut rng = StateSampler::with_stream(seed, Suite::Ckw.stream());
    for idx in 0..samples {
        let psi = rng.pure(3).expect("three qubits");
        let cv = concurrence_vector(&State::Pure(psi), 0).expect("qubit state");
        let total = cv.total.expect("pure states have a total");
        let (c1, c2) = (cv.pairwise[0], cv.pairwise[1]);
        r.check(total * total >= c1 * c1 + c2 * c2 - STATE_TOL, || {
            format!("sample {idx}: C(A|BC)={total:e}, C(AB)={c1:e}, C(AC)={c2:e}")
        });
        if tripartite_case(c1, c2, 2f64.sqrt()).is_none() {
            r.skipped += 1;
            continue;
        }
        for eta in SOUNDNESS_ETAS {
            let p = BoundParams::new(2.0, eta, 2f64.sqrt()).expect("fixed parameters");
            let bound = thm3_bound(c1, c2, &p).expect("case condition holds");
            r.check(pow(total, eta) >= bound - STATE_TOL, || {
                format!("sample {idx}, eta={eta}: C^eta={:e} < bound {bound:e}", pow(total, eta))
            });
        }
    }
    r
}

/// `U₀ ⊗ U₁ ⊗ ⋯` applied to `psi`.
pub fn apply_local(psi: &PureState, unitaries: &[ComplexMatrix]) -> PureState {
    let full = unitaries[1..].iter().fold(unitaries[0].clone(), |acc, u| kron(&acc, u));
    PureState::new(full.mul_vec(psi.amplitudes()), psi.dims().to_vec()).expect("unitary keeps the norm")
}

/// Partial-trace composition, trace preservation, purity, Wootters against
/// the pure formula, and local-unitary invariance.
pub fn state_suite(samples: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("states");
    let mut rng = StateSampler::with_stream(seed, Suite::States.stream());
    for idx in 0..samples {
        let n = 2 + idx % 3;
        let psi = rng.pure(n).expect("small qubit count");
        let rho = density_of(&psi);
        let tag = |what: &str| format!("sample {idx} ({n} qubits): {what}");

        r.check((rho.purity() - 1.0).abs() <= ROUTE_TOL, || tag("purity of a pure state differs from 1"));

        let last = partial_trace(&rho, &[n - 1]).expect("valid subset");
        r.check((last.matrix().trace() - Complex64::new(1.0, 0.0)).norm() <= ROUTE_TOL, || {
            tag("partial trace changed the trace")
        });
        if n >= 3 {
            let stepwise = partial_trace(&last, &[1]).expect("valid subset");
            let direct = partial_trace(&rho, &[1, n - 1]).expect("valid subset");
            r.check(stepwise.matrix().max_abs_diff(direct.matrix()) <= ROUTE_TOL, || {
                tag("partial traces do not compose")
            });
        }

        if n == 2 {
            let split = BipartiteSplit::new(&[0], 2).expect("valid split");
            let pure = pure_concurrence(&psi, &split).expect("qubit split");
            let mixed = wootters_concurrence(&rho).expect("two qubits");
            r.check((pure - mixed).abs() <= ROUTE_TOL, || tag(&format!("Wootters {mixed:e} vs pure {pure:e}")));
        }

        let before = concurrence_vector(&State::Pure(psi.clone()), 0).expect("qubit state");
        let unitaries: Vec<ComplexMatrix> = (0..n).map(|_| rng.unitary2()).collect();
        let after = concurrence_vector(&State::Pure(apply_local(&psi, &unitaries)), 0).expect("qubit state");
        let drift = before
            .pairwise
            .iter()
            .zip(&after.pairwise)
            .map(|(a, b)| (a - b).abs())
            .chain([(before.total.unwrap_or(0.0) - after.total.unwrap_or(0.0)).abs()])
            .fold(0.0, f64::max);
        r.check(drift <= STATE_TOL, || tag(&format!("local unitary moved concurrence by {drift:e}")));
    }
    r
}

/// Sum of several reports under one name.
pub fn merge(name: &str, reports: Vec<SuiteReport>) -> SuiteReport {
    reports.into_iter().fold(SuiteReport::new(name), |mut acc, r| {
        acc.absorb(r);
        acc
    })
}
