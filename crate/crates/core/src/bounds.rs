//! Lower bounds on `E^η(ρ_{A|B₁⋯B_{N−1}})` built from the pairwise values
//! `E(ρ_{A|B_i})`.
//!
//! Every bound is a cascade of one scalar inequality of the form
//! `(1+x)^μ ≥ 1 + a·x + c·x^μ` applied party by party. Three such inequalities
//! are used:
//!
//! | kind        | `a`          | `c`                                 | valid for      |
//! |-------------|--------------|-------------------------------------|----------------|
//! | `Lemma1`    | `kμ/(k+1)`   | `(k+1)^μ − (1 + μ/(k+1))k^μ`        | `μ ≥ 1`        |
//! | `Lemma4`    | `μ`          | `(k+1)^μ − μk^{μ−1} − k^μ`          | `μ ≥ 2`        |
//! | `Simple`    | `0`          | `(k+1)^μ − k^μ`                     | `μ ≥ 1`        |
//!
//! all on `0 ≤ x ≤ 1/k`. The cascades are evaluated directly on the `E`
//! values and never form the ratio `x`, so zero entries need no special case.
//!
//! Parties are used in the order given; nothing here reorders them.

use std::fmt;

use thiserror::Error;

use crate::entanglement::EntanglementVector;

/// Slack allowed on every inequality check.
pub const VIOLATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("no partition index m satisfies both condition chains")]
    NoValidPartition,
    #[error("need at least {needed} pairwise values, got {got}")]
    TooShort { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, BoundError>;

/// `base^exp`, by repeated multiplication when `exp` is integral.
pub fn pow(base: f64, exp: f64) -> f64 {
    if exp == exp.trunc() && exp.abs() <= i32::MAX as f64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

/// The scalar inequality a cascade is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    Lemma1,
    Lemma4,
    Simple,
}

impl Inequality {
    pub fn min_mu(self) -> f64 {
        match self {
            Inequality::Lemma4 => 2.0,
            Inequality::Lemma1 | Inequality::Simple => 1.0,
        }
    }

    /// Coefficient of `x`.
    pub fn linear(self, k: f64, mu: f64) -> f64 {
        match self {
            Inequality::Lemma1 => k * mu / (k + 1.0),
            Inequality::Lemma4 => mu,
            Inequality::Simple => 0.0,
        }
    }

    /// Coefficient of `x^μ`.
    pub fn power(self, k: f64, mu: f64) -> f64 {
        let head = pow(k + 1.0, mu);
        match self {
            Inequality::Lemma1 => head - (1.0 + mu / (k + 1.0)) * pow(k, mu),
            Inequality::Lemma4 => head - mu * pow(k, mu - 1.0) - pow(k, mu),
            Inequality::Simple => head - pow(k, mu),
        }
    }

    /// `1 + a·x + c·x^μ` with no domain check.
    fn rhs_unchecked(self, x: f64, k: f64, mu: f64) -> f64 {
        1.0 + self.linear(k, mu) * x + self.power(k, mu) * pow(x, mu)
    }

    /// Right-hand side on `0 ≤ x ≤ 1/k`, `k ≥ 1`, `μ ≥ min_mu`.
    pub fn rhs(self, x: f64, k: f64, mu: f64) -> Result<f64> {
        check_finite(&[("x", x), ("k", k), ("mu", mu)])?;
        if k < 1.0 {
            return Err(BoundError::Domain(format!("k = {k} < 1")));
        }
        if mu < self.min_mu() {
            return Err(BoundError::Domain(format!("mu = {mu} < {}", self.min_mu())));
        }
        if !(0.0..=1.0 / k).contains(&x) {
            return Err(BoundError::Domain(format!("x = {x} outside [0, 1/k = {}]", 1.0 / k)));
        }
        Ok(self.rhs_unchecked(x, k, mu))
    }
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    match values.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(BoundError::Domain(format!("{name} = {v} is not finite"))),
        None => Ok(()),
    }
}

/// `1 + (kμ/(k+1))x + [(k+1)^μ − (1+μ/(k+1))k^μ]x^μ`.
pub fn lemma1_rhs(x: f64, k: f64, mu: f64) -> Result<f64> {
    Inequality::Lemma1.rhs(x, k, mu)
}

/// Whether `(1+x)^μ ≥ 1 + μx` (up to [`VIOLATION_TOL`]).
pub fn lemma2_check(x: f64, mu: f64) -> Result<bool> {
    check_finite(&[("x", x), ("mu", mu)])?;
    if x < 0.0 {
        return Err(BoundError::Domain(format!("x = {x} < 0")));
    }
    if mu < 1.0 {
        return Err(BoundError::Domain(format!("mu = {mu} < 1")));
    }
    Ok(pow(1.0 + x, mu) >= 1.0 + mu * x - VIOLATION_TOL)
}

/// `1 + μx + (2^μ − μ − 1)x^μ` on `0 ≤ x ≤ 1`, `μ ≥ 2`.
pub fn lemma3_rhs(x: f64, mu: f64) -> Result<f64> {
    check_finite(&[("x", x), ("mu", mu)])?;
    if mu < 2.0 {
        return Err(BoundError::Domain(format!("mu = {mu} < 2")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundError::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(1.0 + mu * x + (pow(2.0, mu) - mu - 1.0) * pow(x, mu))
}

/// `1 + μx + [(k+1)^μ − μk^{μ−1} − k^μ]x^μ`.
pub fn lemma4_rhs(x: f64, k: f64, mu: f64) -> Result<f64> {
    Inequality::Lemma4.rhs(x, k, mu)
}

/// `1 + [(k+1)^μ − k^μ]x^μ`.
pub fn baseline_simple_rhs(x: f64, k: f64, mu: f64) -> Result<f64> {
    Inequality::Simple.rhs(x, k, mu)
}

/// `α`, `η`, `γ`, `γ′` and the optional partition index `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    alpha: f64,
    eta: f64,
    gamma: f64,
    gamma_prime: Option<f64>,
    m: Option<usize>,
}

impl BoundParams {
    pub fn new(alpha: f64, eta: f64, gamma: f64) -> Result<Self> {
        check_finite(&[("alpha", alpha), ("eta", eta), ("gamma", gamma)])?;
        if alpha < 1.0 {
            return Err(BoundError::Domain(format!("alpha = {alpha} < 1")));
        }
        if eta <= 0.0 {
            return Err(BoundError::Domain(format!("eta = {eta} must be positive")));
        }
        if gamma < 1.0 {
            return Err(BoundError::Domain(format!("gamma = {gamma} < 1")));
        }
        Ok(Self {
            alpha,
            eta,
            gamma,
            gamma_prime: None,
            m: None,
        })
    }

    /// Parameters with `η = α·μ`.
    pub fn from_mu(alpha: f64, mu: f64, gamma: f64) -> Result<Self> {
        Self::new(alpha, alpha * mu, gamma)
    }

    pub fn with_gamma_prime(mut self, gamma_prime: f64) -> Result<Self> {
        check_finite(&[("gamma_prime", gamma_prime)])?;
        if gamma_prime < 1.0 {
            return Err(BoundError::Domain(format!("gamma' = {gamma_prime} < 1")));
        }
        self.gamma_prime = Some(gamma_prime);
        Ok(self)
    }

    /// Fix the partition index instead of searching for one.
    pub fn with_partition(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `γ′`, defaulting to `γ` when unset.
    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime.unwrap_or(self.gamma)
    }

    pub fn partition(&self) -> Option<usize> {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.eta / self.alpha
    }

    pub fn k(&self) -> f64 {
        pow(self.gamma, self.alpha)
    }

    pub fn k_prime(&self) -> f64 {
        pow(self.gamma_prime(), self.alpha)
    }

    fn require_mu(&self, min: f64) -> Result<()> {
        if self.mu() < min {
            return Err(BoundError::Domain(format!("mu = {} < {min}", self.mu())));
        }
        Ok(())
    }
}

fn tail_sum(e: &[f64], i: usize) -> f64 {
    e[i + 1..].iter().sum()
}

/// `E_i ≥ γ Σ_{l>i} E_l` (0-based `i`).
fn dominates(e: &[f64], i: usize, gamma: f64) -> bool {
    e[i] >= gamma * tail_sum(e, i)
}

/// `γ′ E_j ≤ Σ_{l>j} E_l` (0-based `j`).
fn trails(e: &[f64], j: usize, gamma_prime: f64) -> bool {
    gamma_prime * e[j] <= tail_sum(e, j)
}

/// Both condition chains for partition index `m` (1-based count of leading
/// dominant parties).
pub fn partition_holds(e: &[f64], m: usize, gamma: f64, gamma_prime: f64) -> bool {
    let n = e.len();
    n >= 3 && (1..=n - 2).contains(&m) && (0..m).all(|i| dominates(e, i, gamma)) && (m..n - 1).all(|j| trails(e, j, gamma_prime))
}

/// `E_i ≥ γ Σ_{l>i} E_l` for every party but the last.
pub fn strong_condition_holds(e: &[f64], gamma: f64) -> bool {
    !e.is_empty() && (0..e.len() - 1).all(|i| dominates(e, i, gamma))
}

/// Largest `m ∈ [1, N−3]` for which both condition chains hold on the given order.
pub fn partition_m(ev: &EntanglementVector, gamma: f64, gamma_prime: f64) -> Result<usize> {
    check_finite(&[("gamma", gamma), ("gamma_prime", gamma_prime)])?;
    if gamma < 1.0 || gamma_prime < 1.0 {
        return Err(BoundError::Domain(format!("gamma = {gamma}, gamma' = {gamma_prime}; both must be ≥ 1")));
    }
    let e = &ev.pairwise;
    if e.len() < 3 {
        return Err(BoundError::TooShort { needed: 3, got: e.len() });
    }
    (1..=e.len() - 2)
        .rev()
        .find(|&m| partition_holds(e, m, gamma, gamma_prime))
        .ok_or(BoundError::NoValidPartition)
}

fn check_entries(e: &[f64]) -> Result<()> {
    match e.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(v) => Err(BoundError::Domain(format!("entanglement value {v} must be finite and ≥ 0"))),
        None => Ok(()),
    }
}

/// `c^{i−1}[E_i^η + a E_i^{η−α} S_i]` summed over the first `count` parties.
fn lead_cascade(e: &[f64], count: usize, a: f64, c: f64, p: &BoundParams) -> f64 {
    let (alpha, eta) = (p.alpha, p.eta);
    let mut tails = vec![0.0; e.len()];
    for i in (0..e.len().saturating_sub(1)).rev() {
        tails[i] = tails[i + 1] + pow(e[i + 1], alpha);
    }
    (0..count)
        .map(|i| pow(c, i as f64) * (pow(e[i], eta) + a * pow(e[i], eta - alpha) * tails[i]))
        .sum()
}

/// Cascade over `m` dominant parties, then the trailing block: the middle
/// parties `m+1 … N−3` with `(k′+1)^μ − k′^μ`, and a closing three-term block
/// on the last two parties.
fn partition_form(e: &[f64], m: usize, lead: Inequality, close: Inequality, p: &BoundParams) -> f64 {
    let (mu, k, kp, alpha, eta) = (p.mu(), p.k(), p.k_prime(), p.alpha, p.eta);
    let n = e.len();
    let c = lead.power(k, mu);
    let head = lead_cascade(e, m, lead.linear(k, mu), c, p);
    let middle: f64 = e[m..n - 2].iter().map(|&x| pow(x, eta)).sum();
    let (second_last, last) = (e[n - 2], e[n - 1]);
    let closing = close.power(kp, mu) * pow(second_last, eta)
        + close.linear(kp, mu) * pow(second_last, alpha) * pow(last, eta - alpha)
        + pow(last, eta);
    head + pow(c, m as f64) * (Inequality::Simple.power(kp, mu) * middle + closing)
}

/// Cascade over all parties but the last, plus `c^{N−2} E_{N−1}^η`.
fn strong_form(e: &[f64], kind: Inequality, p: &BoundParams) -> f64 {
    let (mu, k) = (p.mu(), p.k());
    let n = e.len();
    let c = kind.power(k, mu);
    lead_cascade(e, n - 1, kind.linear(k, mu), c, p) + pow(c, (n - 1) as f64) * pow(e[n - 1], p.eta)
}

/// Resolve `m` from the parameters (validated) or by search.
fn resolve_partition(e: &[f64], p: &BoundParams) -> Result<usize> {
    if e.len() < 3 {
        return Err(BoundError::TooShort { needed: 3, got: e.len() });
    }
    match p.m {
        Some(m) if partition_holds(e, m, p.gamma, p.gamma_prime()) => Ok(m),
        Some(m) => Err(BoundError::ConditionViolated(format!(
            "partition m = {m} does not satisfy the dominance/trailing conditions"
        ))),
        None => partition_m(&EntanglementVector::new(None, e.to_vec()), p.gamma, p.gamma_prime()).map_err(|err| match err {
            BoundError::NoValidPartition => BoundError::ConditionViolated(err.to_string()),
            other => other,
        }),
    }
}

fn partition_bound(ev: &EntanglementVector, p: &BoundParams, kind: Inequality) -> Result<f64> {
    p.require_mu(kind.min_mu())?;
    check_entries(&ev.pairwise)?;
    let m = resolve_partition(&ev.pairwise, p)?;
    Ok(partition_form(&ev.pairwise, m, kind, kind, p))
}

fn strong_bound(ev: &EntanglementVector, p: &BoundParams, kind: Inequality) -> Result<f64> {
    p.require_mu(kind.min_mu())?;
    let e = &ev.pairwise;
    check_entries(e)?;
    if e.len() < 2 {
        return Err(BoundError::TooShort { needed: 2, got: e.len() });
    }
    if !strong_condition_holds(e, p.gamma) {
        return Err(BoundError::ConditionViolated(format!(
            "E_i ≥ γ·Σ_(l>i) E_l fails for some i ≤ N−2 (γ = {})",
            p.gamma
        )));
    }
    Ok(strong_form(e, kind, p))
}

/// Lemma-1 cascade with a partition (`N ≥ 4`, `μ ≥ 1`).
pub fn thm1_bound(ev: &EntanglementVector, p: &BoundParams) -> Result<f64> {
    partition_bound(ev, p, Inequality::Lemma1)
}

/// Lemma-1 cascade under the strong condition (`μ ≥ 1`).
pub fn thm2_bound(ev: &EntanglementVector, p: &BoundParams) -> Result<f64> {
    strong_bound(ev, p, Inequality::Lemma1)
}

/// Which orientation of the tripartite condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripartiteCase {
    /// `E₁ ≥ γE₂`
    FirstDominant,
    /// `γE₁ ≤ E₂`
    SecondDominant,
}

pub fn tripartite_case(e1: f64, e2: f64, gamma: f64) -> Option<TripartiteCase> {
    if e1 >= gamma * e2 {
        Some(TripartiteCase::FirstDominant)
    } else if gamma * e1 <= e2 {
        Some(TripartiteCase::SecondDominant)
    } else {
        None
    }
}

/// Tripartite bound from any of the three inequalities, oriented by the case.
pub fn tripartite_bound(kind: Inequality, e1: f64, e2: f64, p: &BoundParams) -> Result<f64> {
    p.require_mu(kind.min_mu())?;
    check_entries(&[e1, e2])?;
    let pair = match tripartite_case(e1, e2, p.gamma) {
        Some(TripartiteCase::FirstDominant) => [e1, e2],
        Some(TripartiteCase::SecondDominant) => [e2, e1],
        None => {
            return Err(BoundError::ConditionViolated(format!(
                "neither E1 ≥ γE2 nor γE1 ≤ E2 holds (E1 = {e1}, E2 = {e2}, γ = {})",
                p.gamma
            )))
        }
    };
    Ok(strong_form(&pair, kind, p))
}

/// Lemma-4 tripartite bound (`μ ≥ 2`).
pub fn thm3_bound(e1: f64, e2: f64, p: &BoundParams) -> Result<f64> {
    tripartite_bound(Inequality::Lemma4, e1, e2, p)
}

/// Lemma-4 cascade with a partition (`N ≥ 4`, `μ ≥ 2`).
pub fn thm4_bound(ev: &EntanglementVector, p: &BoundParams) -> Result<f64> {
    partition_bound(ev, p, Inequality::Lemma4)
}

/// Lemma-4 cascade under the strong condition (`μ ≥ 2`).
pub fn thm5_bound(ev: &EntanglementVector, p: &BoundParams) -> Result<f64> {
    strong_bound(ev, p, Inequality::Lemma4)
}

/// Named bounds carried by a [`BoundReport`], in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    BaselineLemma1,
    BaselineSimple,
    TrivialSum,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::Thm1,
        BoundKind::Thm2,
        BoundKind::Thm3,
        BoundKind::Thm4,
        BoundKind::Thm5,
        BoundKind::BaselineLemma1,
        BoundKind::BaselineSimple,
        BoundKind::TrivialSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Thm1 => "thm1",
            BoundKind::Thm2 => "thm2",
            BoundKind::Thm3 => "thm3",
            BoundKind::Thm4 => "thm4",
            BoundKind::Thm5 => "thm5",
            BoundKind::BaselineLemma1 => "baseline_lemma1",
            BoundKind::BaselineSimple => "baseline_simple",
            BoundKind::TrivialSum => "trivial_sum",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pairs `(larger, smaller)` that every report must respect.
pub const ORDERING_CHAIN: [(BoundKind, BoundKind); 6] = [
    (BoundKind::Thm4, BoundKind::Thm1),
    (BoundKind::Thm5, BoundKind::Thm2),
    (BoundKind::Thm3, BoundKind::BaselineLemma1),
    (BoundKind::Thm1, BoundKind::BaselineLemma1),
    (BoundKind::BaselineLemma1, BoundKind::BaselineSimple),
    (BoundKind::BaselineSimple, BoundKind::TrivialSum),
];

/// A bound that is not derived here, plugged into [`compare_bounds_with`].
pub trait ExternalBaseline {
    fn name(&self) -> &str;
    /// `None` when the bound does not apply to these inputs.
    fn evaluate(&self, ev: &EntanglementVector, params: &BoundParams) -> Option<f64>;
}

/// External baseline of the common shape `Σ c^{i−1} E_i^η + c^{N−2} E_{N−1}^η`
/// under the strong condition, with a user-supplied coefficient `c(k, μ)`.
pub struct CoefficientBaseline<F> {
    pub name: String,
    pub coefficient: F,
}

impl<F: Fn(f64, f64) -> f64> ExternalBaseline for CoefficientBaseline<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, ev: &EntanglementVector, p: &BoundParams) -> Option<f64> {
        let e = &ev.pairwise;
        if e.len() < 2 || !strong_condition_holds(e, p.gamma) {
            return None;
        }
        let c = (self.coefficient)(p.k(), p.mu());
        let n = e.len();
        let head: f64 = (0..n - 1).map(|i| pow(c, i as f64) * pow(e[i], p.eta)).sum();
        Some(head + pow(c, (n - 1) as f64) * pow(e[n - 1], p.eta))
    }
}

/// All applicable bounds for one entanglement vector and parameter set.
///
/// A value is present exactly when its applicability condition holds;
/// `warnings` says why the others are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    values: [Option<f64>; 8],
    pub partition_m: Option<usize>,
    /// `E^η(ρ_{A|B₁⋯B_{N−1}})` when the total is known.
    pub total: Option<f64>,
    pub external: Vec<(String, Option<f64>)>,
    pub warnings: Vec<String>,
}

/// `larger − smaller < −tol` for a required ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingViolation {
    pub larger: String,
    pub smaller: String,
    pub gap: f64,
}

impl fmt::Display for OrderingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} < {} by {:e}", self.larger, self.smaller, -self.gap)
    }
}

impl BoundReport {
    fn empty(total: Option<f64>) -> Self {
        Self {
            values: [None; 8],
            partition_m: None,
            total,
            external: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn get(&self, kind: BoundKind) -> Option<f64> {
        self.values[kind.index()]
    }

    /// Applicability flag for `kind`.
    pub fn applies(&self, kind: BoundKind) -> bool {
        self.get(kind).is_some()
    }

    fn set(&mut self, kind: BoundKind, value: Result<f64>) {
        match value {
            Ok(v) => self.values[kind.index()] = Some(v),
            Err(e) => self.warnings.push(format!("{kind}: {e}")),
        }
    }

    /// Checks [`ORDERING_CHAIN`] on every pair where both values are present.
    pub fn ordering_violations(&self, tol: f64) -> Vec<OrderingViolation> {
        ORDERING_CHAIN
            .iter()
            .filter_map(|&(hi, lo)| {
                let gap = self.get(hi)? - self.get(lo)?;
                (gap < -tol).then(|| OrderingViolation {
                    larger: hi.name().to_string(),
                    smaller: lo.name().to_string(),
                    gap,
                })
            })
            .collect()
    }

    /// `E^η(total) ≥ bound` for every present bound. Only meaningful when
    /// `E^α` really is monogamous for the chosen `α`.
    pub fn soundness_violations(&self, tol: f64) -> Vec<OrderingViolation> {
        let Some(total) = self.total else {
            return Vec::new();
        };
        BoundKind::ALL
            .iter()
            .filter_map(|&kind| {
                let gap = total - self.get(kind)?;
                (gap < -tol).then(|| OrderingViolation {
                    larger: "state_value".to_string(),
                    smaller: kind.name().to_string(),
                    gap,
                })
            })
            .collect()
    }
}

/// Evaluates every bound that applies, plus the two baselines and the plain
/// power sum.
///
/// `baseline_lemma1` is the Lemma-1 counterpart of the headline Lemma-4 bound
/// (tripartite form for `N = 3`, the partition form for `N ≥ 4`, the strong
/// form when only the strong condition holds). For `N ≥ 4` with a partition it
/// therefore coincides with `thm1`. `baseline_simple` is the same cascade
/// built only from `1 + [(k+1)^μ − k^μ]x^μ`.
pub fn compare_bounds(ev: &EntanglementVector, p: &BoundParams) -> BoundReport {
    compare_bounds_with(ev, p, &[])
}

pub fn compare_bounds_with(ev: &EntanglementVector, p: &BoundParams, external: &[&dyn ExternalBaseline]) -> BoundReport {
    let mut report = BoundReport::empty(ev.total.map(|t| pow(t, p.eta)));
    let e = &ev.pairwise;
    report.external = external.iter().map(|b| (b.name().to_string(), b.evaluate(ev, p))).collect();

    if let Err(err) = check_entries(e) {
        report.warnings.push(err.to_string());
        return report;
    }
    if p.mu() < 1.0 {
        report.warnings.push(format!("mu = {} < 1: no bound applies", p.mu()));
        return report;
    }
    report.set(BoundKind::TrivialSum, Ok(e.iter().map(|&x| pow(x, p.eta)).sum()));

    match e.len() {
        0 | 1 => {}
        2 => {
            let (e1, e2) = (e[0], e[1]);
            report.set(BoundKind::Thm3, thm3_bound(e1, e2, p));
            report.set(BoundKind::BaselineLemma1, tripartite_bound(Inequality::Lemma1, e1, e2, p));
            report.set(BoundKind::BaselineSimple, tripartite_bound(Inequality::Simple, e1, e2, p));
            report.set(BoundKind::Thm2, thm2_bound(ev, p));
            report.set(BoundKind::Thm5, thm5_bound(ev, p));
        }
        _ => {
            let partition = resolve_partition(e, p);
            let strong = strong_condition_holds(e, p.gamma);
            match partition {
                Ok(m) => {
                    report.partition_m = Some(m);
                    let fixed = p.with_partition(m);
                    report.set(BoundKind::Thm1, thm1_bound(ev, &fixed));
                    report.set(BoundKind::Thm4, thm4_bound(ev, &fixed));
                    report.set(BoundKind::BaselineLemma1, thm1_bound(ev, &fixed));
                    report.set(
                        BoundKind::BaselineSimple,
                        Ok(partition_form(e, m, Inequality::Simple, Inequality::Simple, &fixed)),
                    );
                }
                Err(err) => {
                    report.warnings.push(format!("thm1/thm4: {err}"));
                    if strong {
                        report.set(BoundKind::BaselineLemma1, thm2_bound(ev, p));
                        report.set(BoundKind::BaselineSimple, Ok(strong_form(e, Inequality::Simple, p)));
                    }
                }
            }
            report.set(BoundKind::Thm2, thm2_bound(ev, p));
            report.set(BoundKind::Thm5, thm5_bound(ev, p));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn ev(p: &[f64]) -> EntanglementVector {
        EntanglementVector::new(None, p.to_vec())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    /// Direct transcription of the partitioned cascade with 1-based indices and
    /// `powf` throughout; shares nothing with `partition_form`.
    fn partition_oracle(e: &[f64], m: usize, alpha: f64, eta: f64, k: f64, kp: f64, lemma4: bool) -> f64 {
        let mu = eta / alpha;
        let big_n = e.len() + 1;
        let ee = |i: usize| e[i - 1];
        let (a, c) = if lemma4 {
            (mu, (k + 1.0).powf(mu) - mu * k.powf(mu - 1.0) - k.powf(mu))
        } else {
            (k * mu / (k + 1.0), (k + 1.0).powf(mu) - (1.0 + mu / (k + 1.0)) * k.powf(mu))
        };
        let (a2, c2) = if lemma4 {
            (mu, (kp + 1.0).powf(mu) - mu * kp.powf(mu - 1.0) - kp.powf(mu))
        } else {
            (kp * mu / (kp + 1.0), (kp + 1.0).powf(mu) - (1.0 + mu / (kp + 1.0)) * kp.powf(mu))
        };
        let mut total = 0.0;
        for i in 1..=m {
            let mut s = 0.0;
            for l in (i + 1)..big_n {
                s += ee(l).powf(alpha);
            }
            total += c.powf((i - 1) as f64) * (ee(i).powf(eta) + a * ee(i).powf(eta - alpha) * s);
        }
        let mut middle = 0.0;
        for j in (m + 1)..=(big_n - 3) {
            middle += ee(j).powf(eta);
        }
        total += c.powf(m as f64) * ((kp + 1.0).powf(mu) - kp.powf(mu)) * middle;
        let (x, y) = (ee(big_n - 2), ee(big_n - 1));
        total += c.powf(m as f64) * (c2 * x.powf(eta) + a2 * x.powf(alpha) * y.powf(eta - alpha) + y.powf(eta));
        total
    }

    #[test]
    fn lemma1_examples() {
        for (k, mu) in [(1.0, 1.0), (2.0, 3.5), (4.0, 2.0)] {
            assert_eq!(lemma1_rhs(0.0, k, mu).unwrap(), 1.0);
            let x = 1.0 / k;
            assert!(close(lemma1_rhs(x, k, mu).unwrap(), (1.0 + x).powf(mu), 1e-12));
        }
        assert!(close(lemma1_rhs(0.5, 1.0, 2.0).unwrap(), 2.0, 1e-15));
        assert!(matches!(lemma1_rhs(0.6, 2.0, 2.0), Err(BoundError::Domain(_))));
        assert!(matches!(lemma1_rhs(0.1, 0.5, 2.0), Err(BoundError::Domain(_))));
        assert!(matches!(lemma1_rhs(0.1, 1.0, 0.5), Err(BoundError::Domain(_))));
        assert!(matches!(lemma1_rhs(-0.1, 1.0, 2.0), Err(BoundError::Domain(_))));
    }

    #[test]
    fn lemma2_examples() {
        assert!(lemma2_check(0.0, 3.0).unwrap());
        assert!(lemma2_check(1.0, 2.0).unwrap());
        assert!(lemma2_check(5.0, 1.0).unwrap());
        assert!(lemma2_check(-1.0, 2.0).is_err());
        assert!(lemma2_check(1.0, 0.5).is_err());
    }

    #[test]
    fn lemma3_examples() {
        for mu in [2.0, 3.0, 4.7] {
            assert!(close(lemma3_rhs(1.0, mu).unwrap(), 2f64.powf(mu), 1e-14));
            assert_eq!(lemma3_rhs(0.0, mu).unwrap(), 1.0);
            let x = 0.37;
            assert!(close(lemma3_rhs(x, mu).unwrap(), lemma4_rhs(x, 1.0, mu).unwrap(), 1e-15));
        }
        assert!(close(lemma3_rhs(0.5, 3.0).unwrap(), 3.0, 1e-15));
        assert!(lemma3_rhs(0.5, 1.5).is_err());
        assert!(lemma3_rhs(1.5, 2.0).is_err());
    }

    #[test]
    fn lemma4_examples() {
        for (x, k) in [(0.3, 1.0), (0.1, 3.0), (0.5, 2.0)] {
            assert!(close(lemma4_rhs(x, k, 2.0).unwrap(), (1.0 + x) * (1.0 + x), 1e-14));
        }
        for (k, mu) in [(1.0, 2.0), (2.0, 3.5), (5.0, 6.0)] {
            let x = 1.0 / k;
            assert!(close(lemma4_rhs(x, k, mu).unwrap(), (1.0 + x).powf(mu), 1e-12));
        }
        assert!(close(lemma4_rhs(0.25, 2.0, 3.0).unwrap(), 1.859375, 1e-15));
        assert!(lemma4_rhs(0.25, 2.0, 1.5).is_err());
    }

    #[test]
    fn baseline_simple_examples() {
        assert_eq!(baseline_simple_rhs(0.0, 3.0, 2.5).unwrap(), 1.0);
        for (k, mu) in [(1.0, 1.0), (2.0, 3.5), (5.0, 6.0)] {
            let x = 1.0 / k;
            assert!(close(baseline_simple_rhs(x, k, mu).unwrap(), (1.0 + x).powf(mu), 1e-12));
        }
        assert!(close(baseline_simple_rhs(0.5, 1.0, 2.0).unwrap(), 1.75, 1e-15));
    }

    #[test]
    fn pow_integer_and_fractional() {
        assert_eq!(pow(3.0, 4.0), 81.0);
        assert_eq!(pow(0.0, 0.0), 1.0);
        assert!(close(pow(2.0, 0.5), S2, 1e-15));
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_m(&ev(&[1.0, 0.1, 0.15, 0.2]), 1.0, 1.0), Ok(1));
        // every chain holds with equality; the largest index wins
        assert_eq!(partition_m(&ev(&[0.0; 4]), 1.0, 1.0), Ok(2));
        assert_eq!(partition_m(&ev(&[0.1, 1.0, 1.0, 1.0]), 1.0, 1.0), Err(BoundError::NoValidPartition));
        assert_eq!(
            partition_m(&ev(&[1.0, 0.1]), 1.0, 1.0),
            Err(BoundError::TooShort { needed: 3, got: 2 })
        );
        // m = 1 fails the trailing chain at 0.4 > 0.2; m = 2 holds
        assert!(!partition_holds(&[1.0, 0.4, 0.1, 0.1], 1, 1.0, 1.0));
        assert_eq!(partition_m(&ev(&[1.0, 0.4, 0.1, 0.1]), 1.0, 1.0), Ok(2));
    }

    #[test]
    fn thm1_example_against_oracle() {
        let e = [1.0, 0.1, 0.15, 0.2];
        let p = BoundParams::new(1.0, 2.0, 1.0).unwrap();
        let v = thm1_bound(&ev(&e), &p).unwrap();
        let oracle = partition_oracle(&e, 1, 1.0, 2.0, 1.0, 1.0, false);
        assert!((v - oracle).abs() < 1e-12);
        // hand evaluation: 1.45 + 2·3·0.01 + 2·(2·0.0225 + 0.03 + 0.04)
        assert!((v - 1.74).abs() < 1e-12);
    }

    #[test]
    fn thm4_example_against_oracle() {
        let e = [1.0, 0.1, 0.15, 0.2];
        let p = BoundParams::new(1.0, 2.0, 1.0).unwrap();
        let v = thm4_bound(&ev(&e), &p).unwrap();
        let oracle = partition_oracle(&e, 1, 1.0, 2.0, 1.0, 1.0, true);
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 2.0525).abs() < 1e-12);
        assert!(v >= thm1_bound(&ev(&e), &p).unwrap());
    }

    #[test]
    fn single_party_entanglement_collapses() {
        let e1: f64 = 0.7;
        for eta in [2.0, 4.0, 5.5] {
            let p = BoundParams::new(2.0, eta, 1.3).unwrap();
            let target = e1.powf(eta);
            assert!(close(thm1_bound(&ev(&[e1, 0.0, 0.0, 0.0]), &p).unwrap(), target, 1e-14));
            assert!(close(thm2_bound(&ev(&[e1, 0.0]), &p).unwrap(), target, 1e-14));
            if eta >= 4.0 {
                assert!(close(thm4_bound(&ev(&[e1, 0.0, 0.0, 0.0]), &p).unwrap(), target, 1e-14));
                assert!(close(thm5_bound(&ev(&[e1, 0.0]), &p).unwrap(), target, 1e-14));
                assert!(close(thm3_bound(e1, 0.0, &p).unwrap(), target, 1e-14));
            }
        }
    }

    #[test]
    fn thm2_tripartite_example() {
        let p = BoundParams::new(2.0, 4.0, S2).unwrap();
        let v = thm2_bound(&ev(&[6f64.sqrt() / 3.0, S2 / 3.0]), &p).unwrap();
        let expected = 4.0 / 9.0 + (4.0 / 3.0) * (2.0 / 3.0) * (2.0 / 9.0) + (7.0 / 3.0) * (4.0 / 81.0);
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.7572016).abs() < 1e-7);
    }

    #[test]
    fn thm3_example1_equality() {
        let p = BoundParams::new(2.0, 4.0, S2).unwrap();
        let (e1, e2) = (6f64.sqrt() / 3.0, S2 / 3.0);
        let v = thm3_bound(e1, e2, &p).unwrap();
        assert!((v - 64.0 / 81.0).abs() < 1e-12);
        let state = (2.0 * S2 / 3.0_f64).powi(4);
        assert!((v - state).abs() < 1e-12);
        // thm5 at N = 3 is the same expression
        assert!((thm5_bound(&ev(&[e1, e2]), &p).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn thm3_cases_and_errors() {
        let p = BoundParams::new(2.0, 6.0, S2).unwrap();
        let a = thm3_bound(0.8, 0.3, &p).unwrap();
        let b = thm3_bound(0.3, 0.8, &p).unwrap();
        assert!((a - b).abs() < 1e-15, "case 2 mirrors case 1");
        assert!(matches!(thm3_bound(0.5, 0.45, &p), Err(BoundError::ConditionViolated(_))));
        assert_eq!(thm3_bound(0.0, 0.0, &p).unwrap(), 0.0);
        let low = BoundParams::new(2.0, 3.0, S2).unwrap();
        assert!(matches!(thm3_bound(0.8, 0.3, &low), Err(BoundError::Domain(_))));
    }

    #[test]
    fn condition_errors() {
        let p = BoundParams::new(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(thm1_bound(&ev(&[0.1, 1.0, 1.0, 1.0]), &p), Err(BoundError::ConditionViolated(_))));
        assert!(matches!(
            thm1_bound(&ev(&[1.0, 0.1, 0.15, 0.2]), &p.with_partition(2)),
            Err(BoundError::ConditionViolated(_))
        ));
        assert!(matches!(thm2_bound(&ev(&[0.1, 1.0, 1.0]), &p), Err(BoundError::ConditionViolated(_))));
        assert!(matches!(thm1_bound(&ev(&[1.0, 0.1]), &p), Err(BoundError::TooShort { .. })));
        let low = BoundParams::new(1.0, 1.5, 1.0).unwrap();
        assert!(matches!(thm4_bound(&ev(&[1.0, 0.1, 0.15, 0.2]), &low), Err(BoundError::Domain(_))));
        assert!(matches!(thm2_bound(&ev(&[1.0, -0.1]), &p), Err(BoundError::Domain(_))));
    }

    #[test]
    fn params_validate() {
        assert!(BoundParams::new(0.5, 2.0, 1.0).is_err());
        assert!(BoundParams::new(1.0, 2.0, 0.9).is_err());
        assert!(BoundParams::new(1.0, f64::NAN, 1.0).is_err());
        let p = BoundParams::new(2.0, 6.0, S2).unwrap();
        assert!(p.with_gamma_prime(0.5).is_err());
        assert!((p.mu() - 3.0).abs() < 1e-15);
        assert!((p.k() - 2.0).abs() < 1e-15);
        assert!((p.k_prime() - 2.0).abs() < 1e-15);
        let q = p.with_gamma_prime(3f64.sqrt()).unwrap();
        assert!((q.k_prime() - 3.0).abs() < 1e-14);
    }

    // printed k = k' = 1 displays, transcribed literally
    fn k1_thm1(e: &[f64], m: usize, alpha: f64, eta: f64) -> f64 {
        let mu = eta / alpha;
        let c = 2f64.powf(mu) - mu / 2.0 - 1.0;
        let n = e.len();
        let mut v = 0.0;
        for i in 0..m {
            let s: f64 = e[i + 1..].iter().map(|x| x.powf(alpha)).sum();
            v += c.powf(i as f64) * (e[i].powf(eta) + mu / 2.0 * e[i].powf(eta - alpha) * s);
        }
        let middle: f64 = e[m..n - 2].iter().map(|x| x.powf(eta)).sum();
        v += c.powf(m as f64) * (2f64.powf(mu) - 1.0) * middle;
        v + c.powf(m as f64)
            * (c * e[n - 2].powf(eta) + mu / 2.0 * e[n - 2].powf(alpha) * e[n - 1].powf(eta - alpha) + e[n - 1].powf(eta))
    }

    fn k1_thm4(e: &[f64], m: usize, alpha: f64, eta: f64) -> f64 {
        let mu = eta / alpha;
        let c = 2f64.powf(mu) - mu - 1.0;
        let n = e.len();
        let mut v = 0.0;
        for i in 0..m {
            let s: f64 = e[i + 1..].iter().map(|x| x.powf(alpha)).sum();
            v += c.powf(i as f64) * (e[i].powf(eta) + mu * e[i].powf(eta - alpha) * s);
        }
        let middle: f64 = e[m..n - 2].iter().map(|x| x.powf(eta)).sum();
        v += c.powf(m as f64) * (2f64.powf(mu) - 1.0) * middle;
        v + c.powf(m as f64)
            * (c * e[n - 2].powf(eta) + mu * e[n - 2].powf(alpha) * e[n - 1].powf(eta - alpha) + e[n - 1].powf(eta))
    }

    #[test]
    fn k1_specialisations_spot_check() {
        let e = [1.0, 0.2, 0.15, 0.3, 0.35];
        let (alpha, eta) = (1.5, 4.5);
        let p = BoundParams::new(alpha, eta, 1.0).unwrap();
        let m = partition_m(&ev(&e), 1.0, 1.0).unwrap();
        assert!(close(thm1_bound(&ev(&e), &p).unwrap(), k1_thm1(&e, m, alpha, eta), 1e-12));
        assert!(close(thm4_bound(&ev(&e), &p).unwrap(), k1_thm4(&e, m, alpha, eta), 1e-12));
    }

    #[test]
    fn report_example1() {
        let (e1, e2) = (6f64.sqrt() / 3.0, S2 / 3.0);
        let v = EntanglementVector::new(Some(2.0 * S2 / 3.0), vec![e1, e2]);
        for eta in [4.0, 6.0] {
            let r = compare_bounds(&v, &BoundParams::new(2.0, eta, S2).unwrap());
            let chain = [
                BoundKind::Thm3,
                BoundKind::BaselineLemma1,
                BoundKind::BaselineSimple,
                BoundKind::TrivialSum,
            ];
            for w in chain.windows(2) {
                assert!(r.get(w[0]).unwrap() - r.get(w[1]).unwrap() >= -VIOLATION_TOL, "{:?}", w);
            }
            assert!(r.ordering_violations(VIOLATION_TOL).is_empty());
            assert!(r.soundness_violations(1e-12).is_empty());
            assert!(!r.applies(BoundKind::Thm1));
        }
    }

    #[test]
    fn report_all_zero() {
        let r = compare_bounds(&ev(&[0.0; 4]), &BoundParams::new(2.0, 4.0, 1.0).unwrap());
        for kind in BoundKind::ALL {
            if let Some(v) = r.get(kind) {
                assert_eq!(v, 0.0, "{kind}");
            }
        }
        assert!(r.applies(BoundKind::Thm4) && r.applies(BoundKind::TrivialSum));
    }

    #[test]
    fn report_four_party() {
        let e = [1.0, 0.1, 0.15, 0.2];
        let r = compare_bounds(&ev(&e), &BoundParams::new(1.0, 2.0, 1.0).unwrap());
        assert_eq!(r.partition_m, Some(1));
        assert!(r.get(BoundKind::Thm4).unwrap() >= r.get(BoundKind::Thm1).unwrap());
        assert_eq!(r.get(BoundKind::Thm1), r.get(BoundKind::BaselineLemma1));
        assert!(!r.applies(BoundKind::Thm2), "strong condition fails at 0.1 < 0.35");
        assert!(r.ordering_violations(VIOLATION_TOL).is_empty());
    }

    #[test]
    fn report_presence_matches_flags_for_mu_below_two() {
        let r = compare_bounds(&ev(&[0.8, 0.3]), &BoundParams::new(2.0, 3.0, S2).unwrap());
        assert!(!r.applies(BoundKind::Thm3));
        assert!(r.applies(BoundKind::BaselineLemma1));
        assert!(r.warnings.iter().any(|w| w.starts_with("thm3")));
    }

    #[test]
    fn external_baseline_slot() {
        let ext = CoefficientBaseline {
            name: "doubling".to_string(),
            coefficient: |_k: f64, _mu: f64| 2.0,
        };
        let r = compare_bounds_with(&ev(&[0.8, 0.3]), &BoundParams::new(1.0, 2.0, 1.0).unwrap(), &[&ext]);
        assert_eq!(r.external.len(), 1);
        assert_eq!(r.external[0].0, "doubling");
        assert!(close(r.external[0].1.unwrap(), 0.64 + 2.0 * 0.09, 1e-15));
    }
}
