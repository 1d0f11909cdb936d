//! Scenario files, the built-in registry, and the check chain behind
//! `twistred run`.
//!
//! A scenario names an action, a level, a twist specification and the
//! checks to run. Runs are deterministic given `(scenario, seed)`: every
//! random draw comes from a ChaCha stream keyed by seed and index, and
//! per-point results are reduced by max, which does not depend on
//! scheduling.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Form, C64};
use crate::field::{finite_difference_check, FormField};
use crate::reduction::{
    basis_change_check, convention_audit, intermediate_identities, measure_d_omega, reduce, verify_basic,
    verify_basic_symbolic, verify_su_equations, CheckConfig, Convention, ReduceOptions, Reduction,
};
use crate::report::{Entries, Entry, Provenance};
use crate::search::zero_search;
use crate::skew::{collinear_planes, collinearity_locus, distance_to_plane, SkewMatrix};
use crate::torsion::{lt_check, pfaffian_identity, torsion_classes, verify_torsion_equations};
use crate::torus::{stream_rng, MomentLevel, TorusAction};
use crate::twist::{
    alpha_from_skew, diagonal_monomial, gram_schmidt, hirzebruch_level, hirzebruch_twist, singular_limit_probe,
    veronese_pullback, verify_twist, TwistCheck, TwistForm,
};

/// Environment variable holding a JSON object of default tolerance
/// overrides, e.g. `{"su": 1e-9}`. Explicit scenario values take precedence.
pub const TOLERANCE_ENV: &str = "TWISTRED_TOLERANCES";

/// Streams used for random matrices start here, clear of the sampling streams.
const MATRIX_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    /// The diagonal circle on `C^N`.
    Diagonal(usize),
    /// Integer charge matrix, one row per circle factor.
    Charges(Vec<Vec<i64>>),
    /// The rank-3 action over the Hirzebruch surface `F_n`, with `a = 2 − n`, `b = −2`.
    Hirzebruch(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    /// Complex Gaussian entries.
    Generic,
    /// `U diag(J,…,J) Uᵀ` scaled, so `M*M = μI`.
    Lt,
    /// Integer entries in `[-3, 3]`.
    Integer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSpec {
    /// Upper-triangle entries `(i, j, re, im)`, antisymmetrized.
    Entries { n: usize, upper: Vec<(usize, usize, f64, f64)> },
    /// `diag(λ₁J, …, λ_kJ)` with `λ` given as `(re, im)`.
    BlockDiagonal(Vec<(f64, f64)>),
    /// Drawn from the run seed; `index` selects the stream.
    Random {
        n: usize,
        kind: RandomKind,
        #[serde(default)]
        index: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistSpec {
    /// `α_M`.
    Skew(MatrixSpec),
    /// Gram–Schmidt orthogonalization of `(α_{M₁}, α_{M₂})`.
    GramSchmidt(MatrixSpec, MatrixSpec),
    /// `(α_{M₁}, α_{M₂})` as given, not orthogonalized.
    Pair(MatrixSpec, MatrixSpec),
    /// `z₅α₁ + z₆α₂` on the Hirzebruch action.
    Hirzebruch(i64),
    /// Pullback of `α_M` along the degree-`degree` Veronese map.
    Veronese { degree: usize, matrix: MatrixSpec },
}

/// Optional tolerance overrides; unset values fall back to the environment
/// variable, then to built-in defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd: Option<f64>,
}

impl ToleranceSpec {
    fn or(&self, other: &ToleranceSpec) -> ToleranceSpec {
        ToleranceSpec {
            su: self.su.or(other.su),
            chain: self.chain.or(other.chain),
            basic: self.basic.or(other.basic),
            twist: self.twist.or(other.twist),
            torsion: self.torsion.or(other.torsion),
            probe: self.probe.or(other.probe),
            fd: self.fd.or(other.fd),
        }
    }
}

/// Tolerances in force for a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub su: f64,
    pub chain: f64,
    pub basic: f64,
    pub twist: f64,
    pub torsion: f64,
    pub probe: f64,
    /// Symbolic derivatives against finite differences.
    pub fd: f64,
}

impl Tolerances {
    /// `1e-10` for one twist, `1e-8` for two (deeper expressions).
    pub fn defaults(twists: usize) -> Self {
        let t = if twists > 1 { 1e-8 } else { 1e-10 };
        Self {
            su: t,
            chain: t,
            basic: t,
            twist: 1e-10,
            torsion: 1e-8,
            probe: 1e-4,
            fd: 1e-6,
        }
    }

    fn apply(mut self, spec: &ToleranceSpec) -> Self {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut self.su, spec.su);
        set(&mut self.chain, spec.chain);
        set(&mut self.basic, spec.basic);
        set(&mut self.twist, spec.twist);
        set(&mut self.torsion, spec.torsion);
        set(&mut self.probe, spec.probe);
        set(&mut self.fd, spec.fd);
        self
    }
}

fn yes() -> bool {
    true
}

fn default_starts() -> usize {
    64
}

/// Which checks run, beyond the core chain (SU equations and basicness).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default = "yes")]
    pub twist_axioms: bool,
    #[serde(default = "default_starts")]
    pub zero_search_starts: usize,
    /// Require the zero search to stay above this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonvanishing_bound: Option<f64>,
    #[serde(default = "yes")]
    pub intermediate: bool,
    #[serde(default = "yes")]
    pub audit: bool,
    /// Symbolic Cartan route for `L_V`, exact horizontality of `Ω`, `|dω|`.
    #[serde(default)]
    pub symbolic: bool,
    #[serde(default)]
    pub torsion: bool,
    #[serde(default)]
    pub pfaffian_identity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_change: Option<Vec<Vec<f64>>>,
    /// Sample points at least this far from the collinearity planes of a pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_distance: Option<f64>,
    /// Sample points at least this far from zeros reported by the zero search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_distance: Option<f64>,
    #[serde(default)]
    pub collinearity: bool,
    #[serde(default)]
    pub singular_probe: bool,
}

impl Default for Checks {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_points() -> usize {
    50
}

fn default_trials() -> usize {
    20
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub action: ActionSpec,
    /// Moment-map level in the `½Σq|z|²` normalization; defaults to the unit
    /// sphere for the diagonal action and the smooth level for Hirzebruch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<f64>>,
    pub twist: TwistSpec,
    #[serde(default)]
    pub normalize: bool,
    /// Independent repetitions; random matrices are redrawn per instance.
    #[serde(default = "one")]
    pub instances: usize,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub checks: Checks,
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn twist_count(&self) -> usize {
        match self.twist {
            TwistSpec::GramSchmidt(..) | TwistSpec::Pair(..) => 2,
            _ => 1,
        }
    }
}

/// Machine-readable outcome of a run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub seed: u64,
    pub precision: &'static str,
    pub tolerances: Tolerances,
    /// The raw environment override, echoed verbatim.
    pub tolerance_env: Option<String>,
    /// Conventions pinned by the audit, one per instance.
    pub conventions: Vec<Option<Convention>>,
    pub entries: Entries,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `0` if every verdict passes, `2` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn first_failure(&self) -> Option<&Entry> {
        self.entries.failures().next()
    }
}

/// How a run is executed.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    /// Record wall time (makes the report non-reproducible).
    pub timing: bool,
    /// Skip everything except the convention audit.
    pub audit_only: bool,
}

fn env_tolerances() -> Result<(ToleranceSpec, Option<String>)> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(raw) => {
            let spec: ToleranceSpec = serde_json::from_str(&raw)
                .map_err(|e| Error::Scenario(format!("{TOLERANCE_ENV}: {e}")))?;
            Ok((spec, Some(raw)))
        }
        Err(_) => Ok((ToleranceSpec::default(), None)),
    }
}

/// The action, twist forms and matrices of one instance.
struct Built {
    level: MomentLevel,
    twists: Vec<TwistForm>,
    matrices: Vec<SkewMatrix>,
}

fn build_matrix(spec: &MatrixSpec, seed: u64, instance: u64) -> Result<SkewMatrix> {
    match spec {
        MatrixSpec::Entries { n, upper } => SkewMatrix::from_entries(*n, upper),
        MatrixSpec::BlockDiagonal(ls) => Ok(SkewMatrix::block_diagonal(
            &ls.iter().map(|&(re, im)| C64::new(re, im)).collect::<Vec<_>>(),
        )),
        MatrixSpec::Random { n, kind, index } => {
            let mut rng = stream_rng(seed, MATRIX_STREAM + 1000 * instance + index);
            match kind {
                RandomKind::Generic => SkewMatrix::random(*n, &mut rng),
                RandomKind::Lt => {
                    use rand::Rng;
                    let s = C64::new(rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5));
                    SkewMatrix::random_lt(*n, s, &mut rng)
                }
                RandomKind::Integer => SkewMatrix::random_integer(*n, 3, &mut rng),
            }
        }
    }
}

fn build_action(spec: &ActionSpec) -> Result<TorusAction> {
    match spec {
        ActionSpec::Diagonal(n) => Ok(TorusAction::diagonal(*n)),
        ActionSpec::Charges(q) => TorusAction::new(q.clone()),
        ActionSpec::Hirzebruch(n) => crate::twist::hirzebruch_action(*n, 2 - n, -2),
    }
}

/// `collinearity_locus` of a generic pair has 4 clusters of multiplicity 2.
fn generic_pair(m1: &SkewMatrix, m2: &SkewMatrix) -> bool {
    collinearity_locus(m1, m2, 1e-8)
        .map(|r| r.clusters.len() == m1.n() / 2 && r.clusters.iter().all(|c| c.geometric == 2) && r.separation > 1e-6)
        .unwrap_or(false)
}

fn build(sc: &Scenario, seed: u64, instance: u64) -> Result<Built> {
    let action = build_action(&sc.action)?;
    let level_values = match (&sc.level, &sc.action) {
        (Some(l), _) => l.clone(),
        (None, ActionSpec::Hirzebruch(n)) => hirzebruch_level(*n),
        (None, _) => vec![0.5; action.rank()],
    };
    let level = MomentLevel::new(action, level_values)?;
    let (twists, matrices) = match &sc.twist {
        TwistSpec::Skew(m) => {
            let m = build_matrix(m, seed, instance)?;
            (vec![alpha_from_skew(&m)], vec![m])
        }
        TwistSpec::Pair(a, b) => {
            let (m1, m2) = (build_matrix(a, seed, instance)?, build_matrix(b, seed, instance)?);
            (vec![alpha_from_skew(&m1), alpha_from_skew(&m2)], vec![m1, m2])
        }
        TwistSpec::GramSchmidt(a, b) => {
            let random = matches!(a, MatrixSpec::Random { .. }) || matches!(b, MatrixSpec::Random { .. });
            // bounded resampling until the pair is generic
            let mut attempt = 0;
            let (m1, m2) = loop {
                let inst = instance + 1_000_000 * attempt;
                let (m1, m2) = (build_matrix(a, seed, inst)?, build_matrix(b, seed, inst)?);
                if !random || generic_pair(&m1, &m2) || attempt == 9 {
                    break (m1, m2);
                }
                attempt += 1;
            };
            (gram_schmidt(&[alpha_from_skew(&m1), alpha_from_skew(&m2)])?, vec![m1, m2])
        }
        TwistSpec::Hirzebruch(n) => {
            let h = hirzebruch_twist(*n)?;
            if h.action != *level.action() {
                return Err(Error::Scenario("hirzebruch twist needs the matching hirzebruch action".into()));
            }
            (vec![h.alpha], vec![])
        }
        TwistSpec::Veronese { degree, matrix } => {
            let m = build_matrix(matrix, seed, instance)?;
            (vec![veronese_pullback(*degree, &m)?], vec![m])
        }
    };
    Ok(Built { level, twists, matrices })
}

/// Every symbolic field entering a scenario's first instance: the twist
/// forms and, when the scenario asks for symbolic checks, `Ω` and `ω`.
pub fn scenario_fields(sc: &Scenario, seed: u64) -> Result<(MomentLevel, Vec<(String, FormField)>)> {
    let b = build(sc, seed, 0)?;
    let mut fields: Vec<(String, FormField)> = b
        .twists
        .iter()
        .enumerate()
        .map(|(k, tf)| (format!("{}: twist {}", sc.name, k + 1), tf.field()))
        .collect();
    if sc.checks.symbolic {
        let opts = ReduceOptions {
            normalize: sc.normalize,
            ..ReduceOptions::default()
        };
        let sym = reduce(&b.level, b.twists.clone(), &opts)?.symbolic()?;
        fields.push((format!("{}: Omega", sc.name), sym.big_omega));
        fields.push((format!("{}: omega", sc.name), sym.omega));
    }
    Ok((b.level, fields))
}

/// Runs a scenario's full check chain.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<Report> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(sc.seed);
    let (env, raw_env) = env_tolerances()?;
    let tol = Tolerances::defaults(sc.twist_count()).apply(&sc.tolerances.or(&env));
    let mut entries = Entries::new();
    let mut conventions = Vec::new();
    for k in 0..sc.instances.max(1) {
        let prefix = if sc.instances > 1 { format!("[{k}] ") } else { String::new() };
        let (ents, conv) = run_instance(sc, seed, k as u64, &tol, opts)?;
        entries.extend(
            ents.into_iter()
                .map(|mut e| {
                    e.name = format!("{prefix}{}", e.name);
                    e
                })
                .collect(),
        );
        conventions.push(conv);
        if !entries.all_passed() && entries.iter().any(|e| e.name.ends_with("precondition")) {
            break;
        }
    }
    let passed = entries.all_passed();
    Ok(Report {
        scenario: sc.clone(),
        seed,
        precision: "f64",
        tolerances: tol,
        tolerance_env: raw_env,
        conventions,
        entries,
        passed,
        wall_time_s: opts.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// A precondition failure becomes a failing entry; anything else propagates.
fn precondition<T>(name: &str, r: Result<T>, out: &mut Entries) -> Result<Option<T>> {
    match r {
        Ok(v) => {
            out.push(Entry::equal(name, 1.0, 1.0, Provenance::exact("construction")));
            Ok(Some(v))
        }
        Err(Error::Precondition(msg)) => {
            out.push(Entry::failure(name, Provenance::exact(msg)));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn run_instance(
    sc: &Scenario,
    seed: u64,
    instance: u64,
    tol: &Tolerances,
    opts: &RunOptions,
) -> Result<(Entries, Option<Convention>)> {
    let b = build(sc, seed, instance)?;
    let ck = &sc.checks;
    let mut out = Entries::new();
    // instance-specific seed for sampling
    let seed_i = seed.wrapping_add(instance.wrapping_mul(0x9e37_79b9));

    let action = b.level.action();
    let half_q: Vec<C64> = action.volume_charge().into_iter().map(|q| q * 0.5).collect();
    let charge_ok: Result<()> = {
        let sum: Vec<C64> = (0..action.rank()).map(|a| b.twists.iter().map(|t| t.charge()[a]).sum()).collect();
        if sum.iter().zip(&half_q).all(|(x, y)| (x - y).norm() <= 1e-12) {
            Ok(())
        } else {
            let show = |v: &[C64]| v.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect::<Vec<_>>().join(", ");
            Err(Error::Precondition(format!("twist charges sum to ({}), q_V/2 = ({})", show(&sum), show(&half_q))))
        }
    };
    if precondition("charge-sum precondition", charge_ok, &mut out)?.is_none() {
        return Ok((out, None));
    }

    let mut planes = Vec::new();
    if let (Some(d), [m1, m2]) = (ck.singular_distance, b.matrices.as_slice()) {
        if b.twists.len() == 2 {
            planes = collinear_planes(m1, m2, 1e-8)?;
            out.push(Entry::info("singular locus: planes avoided", planes.len() as f64, Provenance::exact("SVD")));
            let _ = d;
        }
    }

    let red_opts = ReduceOptions {
        normalize: sc.normalize,
        seed: seed_i,
        ..ReduceOptions::default()
    };
    let Some(red) = precondition("orthogonality precondition", reduce(&b.level, b.twists.clone(), &red_opts), &mut out)?
    else {
        return Ok((out, None));
    };

    // zero search first when it also decides where sampling may go
    let mut zeros: Vec<Vec<C64>> = Vec::new();
    if ck.twist_axioms && !opts.audit_only {
        for (k, tf) in b.twists.iter().enumerate() {
            let label = if b.twists.len() == 1 { "twist".to_string() } else { format!("twist {}", k + 1) };
            let check = TwistCheck {
                points: sc.points,
                seed: seed_i,
                tol: tol.twist,
                starts: ck.zero_search_starts,
                nonvanishing_bound: ck.nonvanishing_bound,
                // the symbolic Lie derivative is cheap only in low dimension
                pointwise_charge: tf.dim() > 6,
            };
            out.extend(verify_twist(tf, &b.level, &check, &label)?);
            out.push(fd_entry(&format!("{label}: d vs finite differences"), &tf.field(), &b.level, seed_i, tol.fd)?);
            if ck.zero_distance.is_some() {
                let z = zero_search(tf.coeffs(), &b.level, ck.zero_search_starts, seed_i ^ 0x5eed)?;
                if z.min_value < 1e-6 {
                    zeros.push(z.argmin);
                }
            }
        }
        if let TwistSpec::Hirzebruch(n) = sc.twist {
            out.extend(hirzebruch_extras(n, &b.level, seed_i, tol.twist)?);
        }
    }

    let accept = |z: &[C64]| {
        ck.singular_distance.is_none_or(|d| planes.iter().all(|p| distance_to_plane(z, p) >= d))
            && ck.zero_distance.is_none_or(|d| {
                zeros.iter().all(|w| z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() >= d)
            })
    };
    let pts = red.sample(sc.points, seed_i, accept)?;
    let cfg = |t: f64| CheckConfig {
        trials: sc.trials,
        seed: seed_i,
        tol: t,
    };

    let mut red: Reduction = red;
    let mut pinned = None;
    if ck.audit || opts.audit_only {
        let audit = convention_audit(&red, &pts, &cfg(tol.su))?;
        out.extend(audit.entries(pts.len(), &cfg(tol.su)));
        if let Some(c) = audit.selected {
            red = red.with_convention(c);
            pinned = Some(c);
        }
    }
    if opts.audit_only {
        return Ok((out, pinned));
    }

    if ck.intermediate && b.twists.len() <= 2 {
        out.extend(intermediate_identities(&red, &pts, &cfg(tol.chain))?);
    }
    out.extend(verify_su_equations(&red, &pts, &cfg(tol.su))?);
    out.extend(verify_basic(&red, &pts, &cfg(tol.basic))?);
    if ck.symbolic {
        let few = &pts[..pts.len().min(10)];
        out.extend(verify_basic_symbolic(&red, few, &cfg(tol.basic))?);
        out.push(measure_d_omega(&red, few, &cfg(tol.basic))?);
        let sym = red.symbolic()?;
        out.push(fd_entry("Omega: d vs finite differences", &sym.big_omega, &b.level, seed_i, tol.fd)?);
        out.push(fd_entry("omega: d vs finite differences", &sym.omega, &b.level, seed_i, tol.fd)?);
    }
    if let Some(a) = &ck.basis_change {
        out.extend(basis_change_check(&red, a, &pts, &cfg(tol.su))?);
    }
    if ck.collinearity {
        if let [m1, m2] = b.matrices.as_slice() {
            let rep = collinearity_locus(m1, m2, 1e-8)?;
            let prov = Provenance::exact("eigen clustering");
            out.push(Entry::equal("collinearity: eigenvalue clusters", rep.clusters.len() as f64, 4.0, prov.clone()));
            let doubles = rep.clusters.iter().filter(|c| c.algebraic == 2 && c.geometric == 2).count();
            out.push(Entry::equal("collinearity: clusters of multiplicity 2", doubles as f64, 4.0, prov.clone()));
            out.push(Entry::at_least("collinearity: cluster separation", rep.separation, 1e-6, prov));
        }
    }
    if ck.singular_probe {
        if let [m1, m2] = b.matrices.as_slice() {
            out.extend(probe_entries(m1, m2, tol.probe)?);
        }
    }
    if ck.pfaffian_identity {
        for m in b.matrices.iter().filter(|m| m.n() == 4) {
            let r = pfaffian_identity(m)?;
            // integer entries make every float operation exact
            let (bound, method) = if m.is_integral() {
                (0.0, "symbolic, integer entries")
            } else {
                (1e-12 * m.max_abs().powi(2).max(1.0), "symbolic, float entries")
            };
            out.push(Entry::at_most(
                "pfaffian: d alpha^d alpha - 8 Pf(M) Omega0",
                r.max_coeff(),
                bound,
                Provenance::exact(method),
            ));
        }
    }
    if ck.torsion {
        let [m] = b.matrices.as_slice() else {
            return Err(Error::Scenario("torsion needs a single skew matrix".into()));
        };
        let t = torsion_classes(m)?;
        out.extend(verify_torsion_equations(&t, &b.level, &pts, sc.trials, seed_i, tol.torsion)?);
        let lt = lt_check(&t, &b.level, &pts, sc.trials, seed_i)?;
        out.extend(lt.entries("LT", pts.len(), sc.trials, seed_i, 1e-10));
    }
    Ok((out, pinned))
}

/// Symbolic Wirtinger partials against central differences at a few points.
fn fd_entry(name: &str, f: &FormField, level: &MomentLevel, seed: u64, tol: f64) -> Result<Entry> {
    const POINTS: usize = 10;
    let pts = level.sample(POINTS, seed ^ 0xfd, |_| true)?;
    let worst = pts
        .iter()
        .map(|z| finite_difference_check(f, z, 1e-5))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))?;
    Ok(Entry::at_most(name, worst, tol, Provenance::new(POINTS, 0, seed ^ 0xfd, "central differences, h = 1e-5")))
}

/// Charge vectors of the two building blocks and the subtorus property.
fn hirzebruch_extras(n: i64, level: &MomentLevel, seed: u64, tol: f64) -> Result<Entries> {
    let h = hirzebruch_twist(n)?;
    let mut out = Entries::new();
    let pts = level.sample(20, seed, |_| true)?;
    for (label, tf) in [("alpha1", &h.alpha1), ("alpha2", &h.alpha2)] {
        for k in 0..3 {
            let r = crate::twist::charge_residual_flow(tf, &h.action, k, &pts)?;
            out.push(Entry::at_most(
                format!("hirzebruch: {label} charge e{}", k + 1),
                r,
                tol,
                Provenance::new(pts.len(), 0, seed, "finite flow"),
            ));
        }
    }
    Ok(out)
}

/// The two approach paths to the singular line `{z₃ = … = z₈ = 0}`.
fn probe_entries(m1: &SkewMatrix, m2: &SkewMatrix, tol: f64) -> Result<Entries> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z1 = [C64::new(s, 0.0), C64::new(0.0, s)];
    let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let probe = singular_limit_probe(m1, m2, z1, &eps)?;
    let prov = || Provenance::exact("eps = 1e-2 .. 1e-6");
    let dist = |f: &Form, j: usize| (f - &diagonal_monomial(8, j)).norm_l1();
    Ok(Entries(vec![
        Entry::at_most("probe: path 1 -> dz4^conj(dz4)", dist(probe.limit1(), 3), tol, prov()),
        Entry::at_most("probe: path 2 -> dz3^conj(dz3)", dist(probe.limit2(), 2), tol, prov()),
        Entry::at_least("probe: limit difference", probe.difference(), 1.0, prov()),
    ]))
}

/// Built-in scenarios, in listing order.
pub fn registry() -> Vec<Scenario> {
    let j = |n: usize| MatrixSpec::BlockDiagonal(vec![(1.0, 0.0); n]);
    let rand = |n: usize, kind: RandomKind, index: u64| MatrixSpec::Random { n, kind, index };
    let base = |name: &str, description: &str, action: ActionSpec, twist: TwistSpec| Scenario {
        name: name.into(),
        description: description.into(),
        action,
        level: None,
        twist,
        normalize: false,
        instances: 1,
        points: 50,
        trials: 20,
        seed: 0,
        tolerances: ToleranceSpec::default(),
        checks: Checks::default(),
    };
    let cp3_checks = Checks {
        symbolic: true,
        torsion: true,
        pfaffian_identity: true,
        basis_change: Some(vec![vec![2.0]]),
        ..Checks::default()
    };
    let cp7_checks = Checks {
        singular_distance: Some(1e-2),
        collinearity: true,
        singular_probe: true,
        ..Checks::default()
    };
    vec![
        Scenario {
            normalize: true,
            checks: cp3_checks.clone(),
            ..base(
                "cp3-llt",
                "CP^3 with M = diag(J, J): the nearly-LT example, normalized",
                ActionSpec::Diagonal(4),
                TwistSpec::Skew(j(2)),
            )
        },
        Scenario {
            normalize: true,
            checks: cp3_checks.clone(),
            ..base(
                "cp3-lt",
                "CP^3 with a random matrix satisfying M*M = mu I",
                ActionSpec::Diagonal(4),
                TwistSpec::Skew(rand(4, RandomKind::Lt, 0)),
            )
        },
        Scenario {
            normalize: true,
            checks: cp3_checks,
            ..base(
                "cp3-generic",
                "CP^3 with a random invertible skew matrix (not LT)",
                ActionSpec::Diagonal(4),
                TwistSpec::Skew(rand(4, RandomKind::Generic, 0)),
            )
        },
        Scenario {
            normalize: true,
            points: 20,
            trials: 8,
            checks: cp7_checks.clone(),
            ..base(
                "cp7",
                "CP^7 with the Gram-Schmidt pair from diag(J,J,J,J) and diag(l1 J, .., l4 J)",
                ActionSpec::Diagonal(8),
                TwistSpec::GramSchmidt(
                    j(4),
                    MatrixSpec::BlockDiagonal(vec![(1.5, 0.0), (-0.7, 0.0), (2.3, 0.5), (0.4, -1.1)]),
                ),
            )
        },
        Scenario {
            normalize: true,
            points: 20,
            trials: 8,
            checks: Checks {
                singular_probe: false,
                zero_search_starts: 8,
                ..cp7_checks
            },
            ..base(
                "cp7-random",
                "CP^7 with the Gram-Schmidt pair of a random generic pair",
                ActionSpec::Diagonal(8),
                TwistSpec::GramSchmidt(rand(8, RandomKind::Generic, 0), rand(8, RandomKind::Generic, 1)),
            )
        },
        hirzebruch(-1),
        hirzebruch(0),
        hirzebruch(1),
        hirzebruch(2),
        Scenario {
            points: 25,
            trials: 10,
            checks: Checks {
                zero_search_starts: 16,
                zero_distance: Some(1e-2),
                intermediate: false,
                ..Checks::default()
            },
            tolerances: ToleranceSpec {
                su: Some(1e-7),
                ..ToleranceSpec::default()
            },
            ..base(
                "veronese-2",
                "Veronese pullback of a random charge-2 form on C^36 to C^8 (charge 4)",
                ActionSpec::Diagonal(8),
                TwistSpec::Veronese {
                    degree: 2,
                    matrix: rand(36, RandomKind::Generic, 0),
                },
            )
        },
        base(
            "cp3-bad-charge",
            "negative control: a charge-2 form on C^8, where q_V/2 = 4i",
            ActionSpec::Diagonal(8),
            TwistSpec::Skew(rand(8, RandomKind::Generic, 0)),
        ),
        base(
            "cp7-non-orthogonal",
            "negative control: a pair of charge-2 forms on C^8 without Gram-Schmidt",
            ActionSpec::Diagonal(8),
            TwistSpec::Pair(rand(8, RandomKind::Generic, 0), rand(8, RandomKind::Generic, 1)),
        ),
        Scenario {
            checks: Checks {
                nonvanishing_bound: Some(1e-6),
                ..Checks::default()
            },
            ..base(
                "cp3-singular",
                "negative control: M = diag(J, 0) is singular, so alpha_M vanishes on a line",
                ActionSpec::Diagonal(4),
                TwistSpec::Skew(MatrixSpec::BlockDiagonal(vec![(1.0, 0.0), (0.0, 0.0)])),
            )
        },
    ]
}

fn hirzebruch(n: i64) -> Scenario {
    Scenario {
        name: hirzebruch_name(n),
        description: format!("CP^1-bundle over the Hirzebruch surface F_{n}, a = {}, b = -2", 2 - n),
        action: ActionSpec::Hirzebruch(n),
        level: None,
        twist: TwistSpec::Hirzebruch(n),
        normalize: false,
        instances: 1,
        points: 50,
        trials: 20,
        seed: 0,
        tolerances: ToleranceSpec {
            su: Some(1e-8),
            ..ToleranceSpec::default()
        },
        checks: Checks {
            basis_change: Some(vec![vec![1.0, 2.0, 0.0], vec![0.5, 1.0, 1.0], vec![0.0, 3.0, 1.0]]),
            ..Checks::default()
        },
    }
}

/// `hirzebruch-m1`, `hirzebruch-0`, … (`m` marks a negative `n`).
pub fn hirzebruch_name(n: i64) -> String {
    if n < 0 {
        format!("hirzebruch-m{}", -n)
    } else {
        format!("hirzebruch-{n}")
    }
}

pub fn find(name: &str) -> Option<Scenario> {
    registry().into_iter().find(|s| s.name == name)
}
