//! Named verification suites over the whole model stack.
//!
//! Each suite builds its own models, runs a fixed ordered list of identity
//! checks, and returns records for the run report.  [`run`] dispatches the
//! requested suites to a worker pool and assembles the report
//! single-threaded in a fixed order, so identical configurations produce
//! identical reports (timing aside).  Sampled instances are drawn from a
//! seeded generator and are part of that determinism.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::algebra::{Element, Var};
use crate::combin::{binom, int_pow, rat, Rat};
use crate::cycles;
use crate::divisors::{self, DivisorCalc, DivisorSpec};
use crate::jacobian::{ClassSpec, JacobianRing};
use crate::report::{Record, RunReport};
use crate::series::{log1p_over_psi, one_plus_psi_pow};
use crate::syminf;
use crate::tower::{Basis, Model, TowerElem};
use crate::{Error, ModelConfig, Result};

/// Which identity families to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    CInf,
    CBullet,
    Pd,
    Gk,
    Filtration,
    All,
}

impl Suite {
    /// The concrete suites, in report order.
    pub const LEAVES: [Suite; 5] = [
        Suite::CInf,
        Suite::CBullet,
        Suite::Pd,
        Suite::Gk,
        Suite::Filtration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CInf => "cinf",
            Suite::CBullet => "cbullet",
            Suite::Pd => "pd",
            Suite::Gk => "gk",
            Suite::Filtration => "filtration",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "cinf" => Ok(Suite::CInf),
            "cbullet" => Ok(Suite::CBullet),
            "pd" => Ok(Suite::Pd),
            "gk" => Ok(Suite::Gk),
            "filtration" => Ok(Suite::Filtration),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!(
                "unknown suite `{other}` (expected cinf, cbullet, pd, gk, filtration or all)"
            ))),
        }
    }
}

/// Run parameters: genus, base dimension, seed for the sampled instances,
/// and the optional `u`-index cap.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub g: u32,
    pub d: u32,
    pub seed: u64,
    pub u_cap: Option<u32>,
}

impl SuiteConfig {
    pub fn new(g: u32, d: u32) -> SuiteConfig {
        SuiteConfig {
            g,
            d,
            seed: 0,
            u_cap: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> SuiteConfig {
        self.seed = seed;
        self
    }

    pub fn with_u_cap(mut self, cap: Option<u32>) -> SuiteConfig {
        self.u_cap = cap;
        self
    }

    fn model(&self, points: &[&str]) -> Result<Model> {
        Model::new(
            ModelConfig::new(self.g, self.d)
                .with_points(points.iter().copied())
                .with_u_cap(self.u_cap),
        )
    }
}

struct SuiteOutput {
    records: Vec<Record>,
    warnings: Vec<String>,
    cap_hits: u64,
}

/// Runs the selected suites and assembles the ordered report.
pub fn run(cfg: &SuiteConfig, suite: Suite) -> Result<RunReport> {
    if !(1..=5).contains(&cfg.g) || cfg.d > 2 {
        return Err(Error::Config(format!(
            "supported range is 1 <= g <= 5 and 0 <= d <= 2, got g={} d={}",
            cfg.g, cfg.d
        )));
    }
    let leaves: Vec<Suite> = match suite {
        Suite::All => Suite::LEAVES.to_vec(),
        s => vec![s],
    };
    let outs: Vec<SuiteOutput> = leaves
        .par_iter()
        .map(|s| match s {
            Suite::CInf => suite_cinf(cfg),
            Suite::CBullet => suite_cbullet(cfg),
            Suite::Pd => suite_pd(cfg),
            Suite::Gk => suite_gk(cfg),
            Suite::Filtration => suite_filtration(cfg),
            Suite::All => unreachable!("leaf suites only"),
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut cap_hits = 0;
    for out in outs {
        records.extend(out.records);
        for w in out.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        cap_hits += out.cap_hits;
    }

    let echo = cfg.model(&["p"])?;
    Ok(RunReport {
        config: json!({
            "g": cfg.g,
            "d": cfg.d,
            "suite": suite.name(),
            "seed": cfg.seed,
            "u_cap": cfg.u_cap,
        }),
        generators: echo.jac().tables_json(),
        records,
        warnings,
        cap_hits,
    })
}

/// Wall clock for per-block timing; the lap time is attached to every record
/// the block produced.
struct Clock(Instant);

impl Clock {
    fn start() -> Clock {
        Clock(Instant::now())
    }

    fn lap(&mut self) -> u128 {
        let e = self.0.elapsed().as_millis();
        self.0 = Instant::now();
        e
    }
}

fn push(out: &mut Vec<Record>, clock: &mut Clock, rec: Record) {
    let ms = clock.lap();
    out.push(rec.with_elapsed(ms));
}

fn push_all(out: &mut Vec<Record>, clock: &mut Clock, recs: Vec<Record>) {
    let ms = clock.lap();
    for r in recs {
        out.push(r.with_elapsed(ms));
    }
}

fn rng_for(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(salt))
}

/// A small random coefficient-ring element: a few monomials in the `c`
/// generators, point generators when declared, and `psi` when it is nonzero.
fn random_jac_element(jac: &JacobianRing, rng: &mut ChaCha8Rng) -> Result<Element> {
    let g = jac.config().g;
    let d = jac.config().d;
    let points: Vec<String> = jac.config().points.clone();
    let mut acc = jac.zero();
    for _ in 0..3 {
        let mut term = match rng.gen_range(0..4u32) {
            0 => jac.one(),
            1 => jac.curve_class(),
            _ => jac.gen_c(rng.gen_range(2..=2 * g)),
        };
        if rng.gen_bool(0.4) {
            term = term.mul(&jac.gen_c(rng.gen_range(2..=2 * g)))?;
        }
        if !points.is_empty() && rng.gen_bool(0.3) {
            let p = &points[rng.gen_range(0..points.len())];
            let jmax = jac.config().point_coweight_max().max(1);
            term = term.mul(&jac.gen_a(p, rng.gen_range(1..=jmax.min(2)))?)?;
        }
        if d > 0 && rng.gen_bool(0.3) {
            term = term.mul(&jac.psi())?;
        }
        let k: i64 = rng.gen_range(-3..=3);
        if k != 0 {
            acc = acc.add(&term.scale(&rat(k, 1)));
        }
    }
    Ok(acc)
}

/// A random twisted-storage tower element: a coefficient sample times small
/// `t` and `u` powers.
fn random_tower_element(m: &Model, rng: &mut ChaCha8Rng) -> Result<TowerElem> {
    let y = random_jac_element(m.jac(), rng)?;
    let t = rng.gen_range(0..=2u32);
    let u = rng.gen_range(0..=2u32);
    let el = y
        .mul(&Element::var(m.jac().table(), Var::T, t))?
        .mul(&m.u_var(u))?;
    m.twisted(el)
}

/// `a` minus its best scalar multiple of `b`; zero exactly when `a` lies in
/// the line spanned by `b`.
fn off_span(a: &Element, b: &Element) -> Element {
    if a.is_zero() || b.is_zero() {
        return a.clone();
    }
    let (m0, c0) = match b.iter().next() {
        Some(p) => p,
        None => return a.clone(),
    };
    let lambda = a
        .iter()
        .find(|(m, _)| *m == m0)
        .map(|(_, c)| c / c0)
        .unwrap_or_else(|| rat(0, 1));
    a.sub(&b.scale(&lambda))
}

fn suite_pd(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let mut out = Vec::new();
    let mut clock = Clock::start();
    for r in 1..=3usize {
        let recs = cycles::check_pd_axioms(r, 8)?;
        push_all(&mut out, &mut clock, recs);
    }
    let m = cfg.model(&[])?;
    let probes = cycles::default_interaction_probes(&m)?;
    let recs = cycles::check_gamma_operator_interaction(&m, &probes, 3, 3)?;
    push_all(&mut out, &mut clock, recs);
    Ok(SuiteOutput {
        records: out,
        warnings: Vec::new(),
        cap_hits: m.jac().table().cap_hits(),
    })
}

fn suite_cinf(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let m = cfg.model(&["p"])?;
    let jac = m.jac();
    let table = jac.table();
    let mut rng = rng_for(cfg, 1);
    let mut out = Vec::new();
    let mut clock = Clock::start();
    let params = |extra: &str| format!("g={} d={} {extra}", cfg.g, cfg.d);

    // Colimit reconstruction: the transfer formula and the direct projection
    // agree on diagonal classes and their products.
    let point = ClassSpec::Point("p".into());
    let nmax = (2 * cfg.g + cfg.d).min(6);
    let mut cases: Vec<(String, TowerElem)> = Vec::new();
    for spec in [&ClassSpec::Curve, &point, &ClassSpec::BasePoint] {
        for n in 1..=nmax {
            cases.push((format!("{} n={n}", spec.label()), m.delta_push(n, spec)?));
        }
    }
    cases.push((
        "product of degree-1 and degree-2 curve diagonals".into(),
        m.delta_push(1, &ClassSpec::Curve)?
            .mul(&m.delta_push(2, &ClassSpec::Curve)?)?,
    ));
    cases.push((
        "product of curve and point diagonals".into(),
        m.delta_push(1, &ClassSpec::Curve)?
            .mul(&m.delta_push(1, &point)?)?,
    ));
    for (label, x) in &cases {
        let diff = m.fa_of(x)?.sub(&m.q_push(x)?);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "kv-round-trip",
                "colimit image rebuilt from base-point transfers equals the direct projection",
                &params(label),
                &diff,
            ),
        );
    }

    // Symmetric powers are divided powers of the curve class.
    let c = syminf::class_c(jac)?;
    for n in 0..=nmax {
        let diff = syminf::class_cn(jac, n)?.sub(&c.divided_power(n)?);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "symmetric-power-pd",
                "the degree-n symmetric power class is the n-th divided power of the curve class",
                &params(&format!("n={n}")),
                &diff,
            ),
        );
    }

    // The divisor variable is recovered by its logarithmic closed form.
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "divisor-log-form",
            "log(1+psi [C]) - log(1+psi c) over psi recovers the divisor variable",
            &params(""),
            &syminf::l_closed_form(jac)?.sub(&syminf::class_l(jac)),
        ),
    );

    // Coordinate changes between the divisor and symmetric-power variables.
    for i in 0..3 {
        let y = random_jac_element(jac, &mut rng)?;
        let f = y.mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let back = syminf::u_to_x(jac, &syminf::x_to_u(jac, &f)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "coordinate-round-trip",
                "u-coordinates and back is the identity",
                &params(&format!("sample {i}")),
                &back.sub(&f),
            ),
        );
        let y2 = random_jac_element(jac, &mut rng)?;
        let g2 = y2.mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let lhs = syminf::x_to_u(jac, &f.mul(&g2)?)?;
        let rhs = syminf::x_to_u(jac, &f)?.mul(&syminf::x_to_u(jac, &g2)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "coordinate-ring-hom",
                "the coordinate change is multiplicative",
                &params(&format!("sample {i}")),
                &lhs.sub(&rhs),
            ),
        );
    }

    // The section image of the Jacobian fundamental class.
    let gamma = syminf::class_gamma(jac)?;
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "section-closed-form",
            "the divided-power closed form of the section image is the constant fundamental class",
            &params(""),
            &gamma.sub(&jac.jac_fundamental()),
        ),
    );
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "section-projects",
            "evaluation at zero returns the fundamental class",
            &params(""),
            &syminf::sigma_push(&gamma).sub(&jac.jac_fundamental()),
        ),
    );
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "section-killed-by-cap",
            "the divisor cap kills the section image",
            &params(""),
            &syminf::xi_cap(&gamma),
        ),
    );
    for n in 2..=4 {
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "section-from-push",
                "the multiplication-by-n construction recovers the section image",
                &params(&format!("n={n}")),
                &syminf::class_gamma_from_push(jac, n)?.sub(&gamma),
            ),
        );
    }

    // The divisor cap is a derivation.
    for i in 0..2 {
        let a = random_jac_element(jac, &mut rng)?
            .mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let b = random_jac_element(jac, &mut rng)?
            .mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let lhs = syminf::xi_cap(&a.mul(&b)?);
        let rhs = syminf::xi_cap(&a)
            .mul(&b)?
            .add(&a.mul(&syminf::xi_cap(&b))?);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "divisor-cap-derivation",
                "the divisor cap satisfies the Leibniz rule",
                &params(&format!("sample {i}")),
                &lhs.sub(&rhs),
            ),
        );
    }

    // Bigraded components of the curve class.
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "curve-lowest-component",
            "the lowest bigraded component of the curve class is the divisor variable",
            &params(""),
            &syminf::component_inf(&c, 1, -1).sub(&syminf::class_l(jac)),
        ),
    );
    let mut recovered = jac.zero();
    for j in syminf::curve_component_range(jac) {
        let comp = syminf::component_inf(&c, 1, j);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "curve-component-form",
                "each bigraded curve component matches its closed form",
                &params(&format!("j={j}")),
                &comp.sub(&syminf::curve_component_form(jac, j)?),
            ),
        );
        recovered = recovered.add(&comp);
    }
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "curve-components-exhaust",
            "the bigraded components sum back to the curve class",
            &params(""),
            &recovered.sub(&c),
        ),
    );
    {
        let y = random_jac_element(jac, &mut rng)?;
        let f = y.mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let mut total = jac.zero();
        for i in -1..=(cfg.g as i64 + 3) {
            for j in -3..=(2 * cfg.g as i64 + 3) {
                total = total.add(&syminf::component_inf(&f, i, j));
            }
        }
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "components-exhaust",
                "bigraded components of a sampled class sum back to it",
                &params(""),
                &total.sub(&f),
            ),
        );
    }

    // Pushforward laws for the multiplication maps.
    for i in 0..2 {
        let y1 = random_jac_element(jac, &mut rng)?;
        let y2 = random_jac_element(jac, &mut rng)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "push-composition",
                "multiplication pushforwards compose multiplicatively",
                &params(&format!("sample {i}")),
                &jac.push_n(&jac.push_n(&y1, 2), 3).sub(&jac.push_n(&y1, 6)),
            ),
        );
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "push-ring-hom",
                "multiplication pushforward is a ring map",
                &params(&format!("sample {i}")),
                &jac.push_n(&y1.mul(&y2)?, 2)
                    .sub(&jac.push_n(&y1, 2).mul(&jac.push_n(&y2, 2))?),
            ),
        );
        let f = y1.mul(&Element::var(table, Var::X, rng.gen_range(0..=2u32)))?;
        let g2 = y2.mul(&Element::var(table, Var::X, rng.gen_range(0..=1u32)))?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "push-inf-ring-hom",
                "the pushforward on the infinite symmetric power is a ring map",
                &params(&format!("sample {i}")),
                &syminf::push_n_inf(&f.mul(&g2)?, 3)?
                    .sub(&syminf::push_n_inf(&f, 3)?.mul(&syminf::push_n_inf(&g2, 3)?)?),
            ),
        );
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "push-inf-identity",
                "pushing by one is the identity",
                &params(&format!("sample {i}")),
                &syminf::push_n_inf(&f, 1)?.sub(&f),
            ),
        );
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "push-section-compat",
                "pushing a constant class matches the coefficient pushforward",
                &params(&format!("sample {i}")),
                &syminf::push_n_inf(&syminf::s_embed(&y1)?, 2)?
                    .sub(&syminf::s_embed(&jac.push_n(&y1, 2))?),
            ),
        );
    }

    // The two coefficient bases and their dictionary.
    for i in 0..3 {
        let y = random_jac_element(jac, &mut rng)?;
        let round = jac.to_coweight_basis(&jac.to_grade_basis(&y)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "dictionary-round-trip",
                "grade basis and back is the identity",
                &params(&format!("sample {i}")),
                &round.sub(&y),
            ),
        );
    }
    for k in 2..=2 * cfg.g {
        let split = jac.grade_split(&jac.gen_c(k))?;
        let bad = split
            .iter()
            .find(|(gr, part)| **gr < k as i64 && !part.is_zero());
        push(
            &mut out,
            &mut clock,
            Record::from_bool(
                "dictionary-triangular",
                "a coweight-k generator has grade components only in grades >= k",
                &params(&format!("k={k}")),
                bad.is_none(),
                &bad.map(|(gr, _)| format!("grade {gr}")).unwrap_or_default(),
            ),
        );
    }
    {
        let top = jac.gen_c(2 * cfg.g);
        let split = jac.grade_split(&top)?;
        let pure = split.iter().all(|(gr, part)| part.is_zero() || *gr == 2 * cfg.g as i64);
        push(
            &mut out,
            &mut clock,
            Record::from_bool(
                "grade-top-generator",
                "the top coweight generator is pure of top grade",
                &params(""),
                pure,
                "",
            ),
        );
    }
    {
        let y1 = random_jac_element(jac, &mut rng)?;
        let y2 = random_jac_element(jac, &mut rng)?;
        let prod = y1.mul(&y2)?;
        let comp = jac.component(&prod, cfg.g as i64, 0);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "fundamental-spans-top",
                "the dimension-g coweight-2g component is a multiple of the fundamental class",
                &params(""),
                &off_span(&comp, &jac.jac_fundamental()),
            ),
        );
    }

    Ok(SuiteOutput {
        records: out,
        warnings: Vec::new(),
        cap_hits: table.cap_hits(),
    })
}

fn suite_cbullet(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let m = cfg.model(&["p"])?;
    let jac = m.jac();
    let table = jac.table();
    let mut rng = rng_for(cfg, 2);
    let mut out = Vec::new();
    let mut clock = Clock::start();
    let params = |extra: &str| format!("g={} d={} {extra}", cfg.g, cfg.d);
    let point = ClassSpec::Point("p".into());

    // Modified-diagonal projection.
    for spec in [&ClassSpec::Curve, &point] {
        for n in 0..=(2 * cfg.g + 2) {
            let diff = m
                .k_project(&m.delta_push(n, spec)?)?
                .el
                .sub(&m.gamma_nat(n, spec)?.el);
            push(
                &mut out,
                &mut clock,
                Record::from_diff(
                    "diagonal-project",
                    "projecting the diagonal to the coefficient ring gives the corrected modified diagonal",
                    &params(&format!("{} n={n}", spec.label())),
                    &diff,
                ),
            );
        }
    }

    // Binomial inversion recovers the diagonals from the modified ones.
    let tw = m.t_plus_psi_u()?;
    for spec in [&ClassSpec::Curve, &point] {
        for mm in 0..=(2 * cfg.g + 2).min(5) {
            let mut acc = jac.zero();
            for n in 0..=mm {
                let coeff = Rat::from_integer(binom(mm as i64, mm - n));
                let term = tw.pow(mm - n)?.mul(&m.gamma_n(n, spec)?.el)?;
                acc = acc.add(&term.scale(&coeff));
            }
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "diagonal-inverse",
                    "the binomial sum of modified diagonals rebuilds the diagonal",
                    &params(&format!("{} m={mm}", spec.label())),
                    &m.delta_push(mm, spec)?.el.sub(&acc),
                ),
            );
        }
    }

    // Divided t-derivative ladder.
    for spec in [&ClassSpec::Curve, &point] {
        for n in 1..=4u32 {
            let dn = m.delta_push(n, spec)?;
            for k in 1..=n {
                let rhs = m
                    .delta_push(n - k, spec)?
                    .scale(&Rat::from_integer(binom(n as i64, k)));
                push(
                    &mut out,
                    &mut clock,
                    Record::from_diff_exact(
                        "diagonal-t-ladder",
                        "divided t-derivatives lower diagonals binomially",
                        &params(&format!("{} n={n} k={k}", spec.label())),
                        &m.dt_div(&dn, k).el.sub(&rhs.el),
                    ),
                );
            }
        }
    }

    // Base-point transfer on diagonals.
    for spec in [&ClassSpec::Curve, &point, &ClassSpec::BasePoint] {
        for n in 1..=3u32 {
            let lhs = m.p01_p0(&m.delta_push(n, spec)?)?;
            let rhs = jac
                .p0_pull(spec)
                .mul(&Element::var(table, Var::T, n - 1))?
                .scale(&rat(n as i64, 1));
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "base-point-transfer",
                    "the base-point operator extracts the pullback times a t-power",
                    &params(&format!("{} n={n}", spec.label())),
                    &lhs.el.sub(&rhs),
                ),
            );
        }
    }

    // The corrected diagonals are coefficient-ring members.
    for n in 2..=(2 * cfg.g) {
        let gn = m.gamma_nat(n, &ClassSpec::Curve)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff(
                "k-membership-t",
                "divided t-derivatives kill the corrected modified diagonal",
                &params(&format!("n={n}")),
                &m.dt_div(&gn, 1).el,
            ),
        );
        push(
            &mut out,
            &mut clock,
            Record::from_diff(
                "k-membership-transfer",
                "the base-point operator kills the corrected modified diagonal",
                &params(&format!("n={n}")),
                &m.p01_p0(&gn)?.el,
            ),
        );
        let split = m.degree_split(&gn)?;
        let stray = split
            .iter()
            .find(|(deg, part)| **deg != n as i64 && !part.is_zero());
        push(
            &mut out,
            &mut clock,
            Record::from_bool(
                "grade-homogeneity",
                "the corrected modified diagonal is homogeneous of its degree",
                &params(&format!("n={n}")),
                stray.is_none(),
                &stray.map(|(deg, _)| format!("degree {deg}")).unwrap_or_default(),
            ),
        );
    }

    // Leibniz rules on sampled elements.
    for i in 0..2 {
        let x = random_tower_element(&m, &mut rng)?;
        let y = random_tower_element(&m, &mut rng)?;
        let xy = x.mul(&y)?;
        for n in 1..=3u32 {
            let mut rhs = jac.zero();
            for nu in 0..=n {
                rhs = rhs.add(&m.dt_div(&x, nu).el.mul(&m.dt_div(&y, n - nu).el)?);
            }
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "t-derivative-leibniz",
                    "divided t-derivatives satisfy the binomial Leibniz rule",
                    &params(&format!("sample {i} n={n}")),
                    &m.dt_div(&xy, n).el.sub(&rhs),
                ),
            );
        }
        let lhs = m.du_gamma(&xy)?;
        let rhs = m
            .du_gamma(&x)?
            .mul(&y)?
            .add(&x.mul(&m.du_gamma(&y)?)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "u-derivation-leibniz",
                "the u-derivation satisfies the Leibniz rule",
                &params(&format!("sample {i}")),
                &lhs.el.sub(&rhs.el),
            ),
        );
        let lhs = m.p01_p0(&xy)?;
        let rhs = m
            .p01_p0(&x)?
            .mul(&y)?
            .add(&x.mul(&m.p01_p0(&y)?)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "transfer-leibniz",
                "the base-point operator is a derivation",
                &params(&format!("sample {i}")),
                &lhs.el.sub(&rhs.el),
            ),
        );
    }

    // Twisted derivation values and commutation.
    {
        let t = m.twisted(m.t_var())?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "twisted-derivation-kills-t",
                "the twisted u-derivation kills t",
                &params(""),
                &m.d_tilde_u(&t)?.el,
            ),
        );
        let u = m.twisted(m.u_var(1))?;
        let want = jac.one().add(&jac.psi().mul(&m.u_var(1))?);
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "twisted-derivation-on-u",
                "the twisted u-derivation sends u to 1 + psi u",
                &params(""),
                &m.d_tilde_u(&u)?.el.sub(&want),
            ),
        );
        let x = m.twisted(
            jac.curve_class()
                .mul(&Element::var(table, Var::T, 3))?
                .mul(&m.u_var(2))?
                .add(&m.t_var()),
        )?;
        for k in 1..=6u32 {
            let a = m.dt_div(&m.d_tilde_u(&x)?, k);
            let b = m.d_tilde_u(&m.dt_div(&x, k))?;
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "operator-commutation",
                    "the twisted u-derivation commutes with divided t-derivatives",
                    &params(&format!("k={k}")),
                    &a.el.sub(&b.el),
                ),
            );
        }
    }
    for n in 2..=(2 * cfg.g as i64) {
        let base = jac
            .curve_class()
            .add(&jac.jac_fundamental())
            .add(&random_jac_element(jac, &mut rng)?);
        let y = jac.grade_part(&base, n)?;
        if y.is_zero() {
            continue;
        }
        let z = m.twisted(one_plus_psi_pow(&m.u_var(1), -n)?.mul(&y)?)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "twisted-constants-killed",
                "the twisted u-derivation kills twisted grade-n constants",
                &params(&format!("n={n}")),
                &m.d_tilde_u(&z)?.el,
            ),
        );
    }

    // Storage conversion between the two coordinate systems.
    for i in 0..2 {
        let x = random_tower_element(&m, &mut rng)?;
        let round = m.convert(&m.convert(&x, Basis::Beta)?, Basis::Gamma)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "convert-round-trip",
                "coordinate conversion round-trips exactly",
                &params(&format!("sample {i}")),
                &round.el.sub(&x.el),
            ),
        );
        if cfg.d == 0 {
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "convert-field-identity",
                    "over a field the conversion is the identity",
                    &params(&format!("sample {i}")),
                    &m.convert(&x, Basis::Beta)?.el.sub(&x.el),
                ),
            );
        }
    }
    {
        let fund = jac.jac_fundamental();
        let conv = m.convert(&m.s_tilde(&fund)?, Basis::Gamma)?;
        let want = one_plus_psi_pow(&m.u_var(1), -2 * cfg.g as i64)?.mul(&fund)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "fundamental-twist",
                "the plain section of the fundamental class reads (1+psi u)^(-2g) times it in twisted coordinates",
                &params(""),
                &conv.el.sub(&want),
            ),
        );
        let mut hand = jac.zero();
        let pmax = cfg.g.min(cfg.d + 1);
        for mm in 0..=pmax {
            let mut coeff = rat(if mm % 2 == 0 { 1 } else { -1 }, 1);
            for i in 0..mm {
                coeff *= rat(2 * cfg.g as i64 + i as i64, 1);
            }
            let term = jac
                .psi()
                .pow(mm)?
                .mul(&m.u_var(mm))?
                .mul(&fund)?
                .scale(&coeff);
            hand = hand.add(&term);
        }
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "fundamental-twist-expansion",
                "the twist expands with alternating rising-factorial coefficients on psi-powers",
                &params(""),
                &conv.el.sub(&hand),
            ),
        );
        let back = m.convert(&m.s_tilde_prime(&fund)?, Basis::Beta)?;
        let want = one_plus_psi_pow(&m.u_var(1), 2 * cfg.g as i64)?.mul(&fund)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "fundamental-untwist",
                "the twisted section of the fundamental class reads (1+psi u)^(2g) times it in plain coordinates",
                &params(""),
                &back.el.sub(&want),
            ),
        );
    }

    // The section-coefficient relation for the curve.
    {
        let lhs = m.s_tilde(&log1p_over_psi(&jac.curve_class())?)?.el.clone();
        let mut rhs = jac.zero();
        for n in 2..=(2 * cfg.g + 2) {
            let gn = m.gamma_nat(n, &ClassSpec::Curve)?;
            if gn.is_zero() {
                continue;
            }
            let sgn = if n % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
            let term = one_plus_psi_pow(&m.u_var(1), -(n as i64))?
                .mul(&gn.el)?
                .scale(&(sgn / Rat::from_integer(n.into())));
            rhs = rhs.add(&term);
        }
        push(
            &mut out,
            &mut clock,
            Record::from_diff(
                "section-coefficient-relation",
                "the embedded curve coefficient equals the signed sum of twisted modified diagonals",
                &params(""),
                &lhs.sub(&rhs),
            ),
        );
    }

    // Sections and retractions.
    for i in 0..2 {
        let y = random_jac_element(jac, &mut rng)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "section-retraction",
                "the projection retracts the twisted coefficient section",
                &params(&format!("sample {i}")),
                &m.sigma_tilde_push(&m.s_tilde(&y)?)?.sub(&y),
            ),
        );
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "section-retraction-prime",
                "the projection retracts the counter-twisted coefficient section",
                &params(&format!("sample {i}")),
                &m.sigma_tilde_push(&m.s_tilde_prime(&y)?)?.sub(&y),
            ),
        );
        let x = random_tower_element(&m, &mut rng)?;
        let f = m.q_push(&x)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "projection-section",
                "projecting after the canonical section is the identity",
                &params(&format!("sample {i}")),
                &m.q_push(&m.r_section(&f)?)?.sub(&f),
            ),
        );
        let plain = m.convert(&x, Basis::Beta)?;
        let maxt = plain.el.iter().map(|(mo, _)| mo.t).max().unwrap_or(0);
        let one_minus_t = jac.one().sub(&m.t_var());
        let mut opsum = jac.zero();
        for n in 0..=maxt {
            opsum = opsum.add(&one_minus_t.pow(n)?.mul(&m.dt_div(&plain, n).el)?);
        }
        push(
            &mut out,
            &mut clock,
            Record::from_diff(
                "section-operator-form",
                "the canonical section agrees with its operator sum on any lift",
                &params(&format!("sample {i}")),
                &m.r_section(&f)?.el.sub(&opsum),
            ),
        );
    }

    // The coweight filtration is an ideal and tops out at the fundamental
    // class.
    for i in 0..2 {
        let y = random_jac_element(jac, &mut rng)?;
        let z = random_jac_element(jac, &mut rng)?;
        for mm in 1..=2i64 {
            let w = z.mul(&jac.fil_component(&y, mm)?)?;
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "filtration-ideal",
                    "products stay inside the filtration step",
                    &params(&format!("sample {i} m={mm}")),
                    &jac.fil_component(&w, mm)?.sub(&w),
                ),
            );
        }
    }
    push(
        &mut out,
        &mut clock,
        Record::from_diff_exact(
            "filtration-top",
            "the fundamental class sits in the top filtration step",
            &params(""),
            &jac
                .fil_component(&jac.jac_fundamental(), 2 * cfg.g as i64)?
                .sub(&jac.jac_fundamental()),
        ),
    );

    Ok(SuiteOutput {
        records: out,
        warnings: Vec::new(),
        cap_hits: table.cap_hits(),
    })
}

fn suite_filtration(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let m = cfg.model(&[])?;
    let mut out = Vec::new();
    let mut clock = Clock::start();
    let params = |extra: &str| format!("g={} d={} {extra}", cfg.g, cfg.d);

    for n in 2..=3u32 {
        let expr = m.gamma_nat_taut(n, &ClassSpec::Curve)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "taut-evaluation",
                "the tautological presentation evaluates to the corrected diagonal",
                &params(&format!("n={n}")),
                &expr.eval(&m)?.el.sub(&m.gamma_nat(n, &ClassSpec::Curve)?.el),
            ),
        );
    }
    for nn in 2..=3u32 {
        let pushed = crate::tower::TautExpr::U(1).push(&m, nn)?.eval(&m)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "taut-push-generator",
                "pushing the symmetric-power generator gives the curve diagonal",
                &params(&format!("N={nn}")),
                &pushed.el.sub(&m.delta_push(nn, &ClassSpec::Curve)?.el),
            ),
        );
    }
    {
        let pushed = crate::tower::TautExpr::T.push(&m, 3)?.eval(&m)?;
        push(
            &mut out,
            &mut clock,
            Record::from_diff_exact(
                "taut-push-point",
                "pushing the point variable gives its convolution power",
                &params("N=3"),
                &pushed.el.sub(&Element::var(m.jac().table(), Var::T, 3)),
            ),
        );
    }

    for n in 2..=3u32 {
        let x = m.gamma_nat(n, &ClassSpec::Curve)?;
        let taut = m.gamma_nat_taut(n, &ClassSpec::Curve)?;
        for bign in 2..=3u32 {
            let pushed = taut.push(&m, bign)?.eval(&m)?;
            let j0 = (bign - 1) * n;
            let want = x.scale(&Rat::from_integer(int_pow(bign as i64, n)));
            push(
                &mut out,
                &mut clock,
                Record::from_diff(
                    "filtration-eigenvalue",
                    "the top divided t-derivative of the pushed class is the eigenvalue multiple",
                    &params(&format!("n={n} N={bign} j={j0}")),
                    &m.dt_div(&pushed, j0).el.sub(&want.el),
                ),
            );
            let maxt = pushed.el.iter().map(|(mo, _)| mo.t).max().unwrap_or(0);
            let mut witness = String::new();
            for j in (j0 + 1)..=maxt.max(j0) {
                if !m.dt_div(&pushed, j).is_zero() {
                    witness = format!("nonzero at j={j}");
                    break;
                }
            }
            push(
                &mut out,
                &mut clock,
                Record::from_bool(
                    "filtration-vanishing",
                    "all higher divided t-derivatives of the pushed class vanish",
                    &params(&format!("n={n} N={bign}")),
                    witness.is_empty(),
                    &witness,
                ),
            );
            let rq = m.r_section(&m.q_push(&pushed)?)?;
            let split = m.degree_split(&m.convert(&rq, Basis::Gamma)?)?;
            let lowest = split
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, _)| *k)
                .min();
            match lowest {
                Some(k) if k == n as i64 => push(
                    &mut out,
                    &mut clock,
                    Record::from_diff(
                        "filtration-lowest-grade",
                        "the lowest grade of the projected push is the eigenvalue multiple",
                        &params(&format!("n={n} N={bign}")),
                        &split[&k].el.sub(&want.el),
                    ),
                ),
                other => push(
                    &mut out,
                    &mut clock,
                    Record::from_bool(
                        "filtration-lowest-grade",
                        "the lowest grade of the projected push is the eigenvalue multiple",
                        &params(&format!("n={n} N={bign}")),
                        false,
                        &format!("lowest nonzero grade {other:?}, expected {n}"),
                    ),
                ),
            }
        }
    }

    Ok(SuiteOutput {
        records: out,
        warnings: Vec::new(),
        cap_hits: m.jac().table().cap_hits(),
    })
}

fn suite_gk(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    if cfg.d != 0 {
        return Ok(SuiteOutput {
            records: vec![Record::skipped(
                "gk-field-mode",
                "divisor relation calculus runs over a field base",
                &format!("g={} d={}", cfg.g, cfg.d),
                "requires d=0",
            )],
            warnings: Vec::new(),
            cap_hits: 0,
        });
    }

    let mut out = Vec::new();
    let mut warnings = Vec::new();
    let mut cap_hits = 0;
    let mut clock = Clock::start();

    // Model-level checks, independent of the divisor.
    {
        let m = cfg.model(&[])?;
        push_all(&mut out, &mut clock, divisors::section_component_check(&m)?);
        for (nu, s) in [(2u32, 1u32), (3, 1), (4, 2)] {
            push_all(&mut out, &mut clock, divisors::u_push_check(&m, nu, s)?);
        }
        cap_hits += m.jac().table().cap_hits();
    }

    let mut scenarios: Vec<(Vec<&str>, Vec<&str>, u32)> = vec![
        (vec!["p1", "p2"], vec!["p1", "p2"], 1),
        (vec![], vec!["p0", "p0"], 2),
    ];
    if cfg.g >= 3 {
        scenarios.push((
            vec!["p1", "p2", "p3", "p4"],
            vec!["p1", "p2", "p3", "p4"],
            1,
        ));
    }

    for (declared, points, r0) in scenarios {
        let m = cfg.model(&declared)?;
        let spec = DivisorSpec::new(points.iter().copied(), r0)?;
        let calc = DivisorCalc::new(&m, spec)?;
        let d = calc.degree();
        let tag = format!("D={} g={}", calc.spec(), cfg.g);
        if let Some(w) = calc.clifford_warning() {
            warnings.push(w);
        }

        // Elementary-symmetric triangle.
        for i in 0..=d {
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "gk-sym-fun-triangle",
                    "the t-free reduction matches its binomial closed form",
                    &format!("{tag} i={i}"),
                    &calc.ebar_class(i)?.el.sub(&calc.ebar_from_sum(i)?.el),
                ),
            );
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "gk-ebar-constant",
                    "the reduced symmetric classes are killed by t-derivatives",
                    &format!("{tag} i={i}"),
                    &m.dt_div(&calc.ebar_class(i)?, 1).el,
                ),
            );
        }
        {
            let mut acc = m.jac().zero();
            for i in 0..=d {
                let tpow = Element::var(m.jac().table(), Var::T, d - i);
                acc = acc.add(&calc.ebar_class(i)?.el.mul(&tpow)?);
            }
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "gk-sym-fun-eq",
                    "the reduced classes weighted by t-powers rebuild the divisor class",
                    &tag,
                    &acc.sub(&calc.divisor_class().el),
                ),
            );
        }
        for i in 0..=d {
            let mut acc = m.jac().zero();
            for k in 0..=i {
                let coeff = Rat::from_integer(binom((d - k) as i64, (d - i) as u32));
                let tpow = Element::var(m.jac().table(), Var::T, i - k);
                acc = acc.add(&calc.ebar_class(k)?.el.mul(&tpow)?.scale(&coeff));
            }
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "gk-sym-fun-inverse",
                    "the triangular inverse recovers the symmetric classes",
                    &format!("{tag} i={i}"),
                    &acc.sub(&calc.e_class(i)?.el),
                ),
            );
        }
        {
            let rq = m.r_section(&m.q_push(calc.divisor_class())?)?;
            let rq = m.convert(&rq, Basis::Gamma)?;
            push(
                &mut out,
                &mut clock,
                Record::from_diff_exact(
                    "gk-section-sum",
                    "the canonical section of the projected divisor is the sum of reduced classes",
                    &tag,
                    &calc.ebar_sum()?.el.sub(&rq.el),
                ),
            );
        }

        // Component-equality replay over the valid hypothesis range.
        for s in 0..=r0 {
            let lo = (d as i64 - r0 as i64 + s as i64 + 1).max(1) as u32;
            let hi = if s == 0 { d + 1 } else { 2 * cfg.g * s + d };
            for n in lo..=hi {
                push_all(&mut out, &mut clock, calc.consistency(s, n)?);
            }
        }

        // Pushing the tower relations to the Jacobian side.
        for s in 0..=r0 {
            let lo = (d as i64 - r0 as i64 + s as i64 + 1).max(1) as u32;
            for n in lo..=(2 * cfg.g * s + d) {
                push(
                    &mut out,
                    &mut clock,
                    calc.push_intertwine_check(n, s)?,
                );
            }
        }

        push_all(&mut out, &mut clock, calc.cor4_checks()?);

        let set = calc.emit_all()?;
        push(
            &mut out,
            &mut clock,
            Record::from_bool(
                "gk-emit",
                "every relation family emits with its internal cross-checks",
                &format!("{tag} relations={}", set.relations.len()),
                !set.relations.is_empty(),
                "",
            ),
        );
        for w in set.warnings {
            warnings.push(w);
        }
        cap_hits += m.jac().table().cap_hits();
    }

    Ok(SuiteOutput {
        records: out,
        warnings,
        cap_hits,
    })
}
