//! Symmetric-function calculus of an effective divisor in the tower over a
//! field, and the relation families a declared linear system induces.
//!
//! A divisor is a multiset of named points together with a declared value
//! `r0` for the dimension of its linear system; the dimension is an input
//! hypothesis, not something the free model can derive.  The module builds
//! the Pontryagin elementary-symmetric classes of the divisor, their
//! `t`-reductions, the weighted diagonal sums they pair with, and emits the
//! induced relations.  Everything runs over a field base (`d = 0`), where
//! the dictionary between the two coefficient bases is exact.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{Element, Grading};
use crate::combin::{binom, factorial, rat, Rat};
use crate::jacobian::{ClassSpec, JacobianRing};
use crate::report::Record;
use crate::syminf;
use crate::tower::{Basis, Model, TowerElem};
use crate::{Error, Result};

fn sign(k: i64) -> Rat {
    if k.rem_euclid(2) == 0 {
        rat(1, 1)
    } else {
        rat(-1, 1)
    }
}

/// An effective divisor `D = p_1 + .. + p_d` given by point names (`"p0"`
/// is the base point), plus the declared dimension `r0 >= 1` of its linear
/// system.
#[derive(Clone, Debug)]
pub struct DivisorSpec {
    points: Vec<String>,
    pub r0: u32,
}

impl DivisorSpec {
    pub fn new<S: Into<String>>(points: impl IntoIterator<Item = S>, r0: u32) -> Result<Self> {
        let mut points: Vec<String> = points.into_iter().map(Into::into).collect();
        points.sort();
        if points.is_empty() {
            return Err(Error::Range("a divisor needs at least one point".into()));
        }
        if r0 == 0 {
            return Err(Error::Range(
                "the declared linear-system dimension r0 must be >= 1".into(),
            ));
        }
        Ok(DivisorSpec { points, r0 })
    }

    /// `d` copies of the base point.
    pub fn base_points(d: u32, r0: u32) -> Result<Self> {
        DivisorSpec::new((0..d).map(|_| "p0"), r0)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn degree(&self) -> u32 {
        self.points.len() as u32
    }
}

impl fmt::Display for DivisorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} r0={}", self.points.join("+"), self.r0)
    }
}

/// One asserted-zero relation, tagged with its family and parameters.
#[derive(Clone, Debug)]
pub struct Relation {
    pub label: String,
    pub flavor: &'static str,
    pub n: u32,
    pub s: u32,
    /// `"tower"` for symmetric-power classes, `"jacobian"` for pushed ones.
    pub basis: &'static str,
    pub el: Element,
}

/// A family of emitted relations plus advisory notes and warnings.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub g: u32,
    pub divisor: DivisorSpec,
    pub relations: Vec<Relation>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl RelationSet {
    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g,
            "points": self.divisor.points(),
            "degree": self.divisor.degree(),
            "r0": self.divisor.r0,
            "relations": self.relations.iter().map(|r| json!({
                "label": r.label,
                "flavor": r.flavor,
                "N": r.n,
                "s": r.s,
                "basis": r.basis,
                "element": r.el.to_json(),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
            "warnings": self.warnings,
        })
    }

    fn merge(&mut self, other: RelationSet) {
        self.relations.extend(other.relations);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
        for w in other.warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }
}

/// The five emitted relation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationFlavor {
    Id1,
    Id2,
    Cor2,
    Cor3,
    Cor4,
}

impl RelationFlavor {
    pub const ALL: [RelationFlavor; 5] = [
        RelationFlavor::Id1,
        RelationFlavor::Id2,
        RelationFlavor::Cor2,
        RelationFlavor::Cor3,
        RelationFlavor::Cor4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationFlavor::Id1 => "id1",
            RelationFlavor::Id2 => "id2",
            RelationFlavor::Cor2 => "cor2",
            RelationFlavor::Cor3 => "cor3",
            RelationFlavor::Cor4 => "cor4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown relation flavor `{s}`")))
    }
}

/// Degree-1 class of a named point: the lift of its canonical colimit
/// image.  The base point lifts to `t`.
pub fn point_class(model: &Model, name: &str) -> Result<TowerElem> {
    let spec = if name == "p0" {
        ClassSpec::BasePoint
    } else {
        ClassSpec::Point(name.into())
    };
    let fa = syminf::fa_of_spec(model.jac(), &spec)?;
    model.lift_to_degree(&fa, 1)
}

/// Section embedding of the curve class, in twisted storage (the two
/// storages agree over a field).
pub fn curve_section(model: &Model) -> Result<TowerElem> {
    let st = model.s_tilde(&model.jac().curve_class())?;
    model.convert(&st, Basis::Gamma)
}

/// Memoized weighted sums of diagonal products over ordered compositions:
/// `U(nu, s) = sum over n_1+..+n_s = nu, n_i >= 2, of prod Gamma_{n_i}(C)/n_i`.
struct UCache<'a> {
    model: &'a Model,
    gamma_over_n: Vec<Element>,
    memo: BTreeMap<(u32, u32), Element>,
}

impl<'a> UCache<'a> {
    fn new(model: &'a Model) -> Self {
        UCache {
            model,
            gamma_over_n: Vec::new(),
            memo: BTreeMap::new(),
        }
    }

    fn gamma(&mut self, n: u32) -> Result<Element> {
        while self.gamma_over_n.len() <= n as usize {
            let k = self.gamma_over_n.len() as u32;
            let e = if k < 2 {
                self.model.jac().zero()
            } else {
                self.model
                    .gamma_n(k, &ClassSpec::Curve)?
                    .el
                    .scale(&rat(1, k as i64))
            };
            self.gamma_over_n.push(e);
        }
        Ok(self.gamma_over_n[n as usize].clone())
    }

    fn get(&mut self, nu: u32, s: u32) -> Result<Element> {
        if s == 0 {
            return Ok(if nu == 0 {
                self.model.jac().one()
            } else {
                self.model.jac().zero()
            });
        }
        if nu < 2 * s {
            return Ok(self.model.jac().zero());
        }
        if let Some(e) = self.memo.get(&(nu, s)) {
            return Ok(e.clone());
        }
        let mut acc = self.model.jac().zero();
        for n1 in 2..=(nu - 2 * (s - 1)) {
            let gam = self.gamma(n1)?;
            if gam.is_zero() {
                continue;
            }
            let rest = self.get(nu - n1, s - 1)?;
            if rest.is_zero() {
                continue;
            }
            acc = acc.add(&gam.mul(&rest)?);
        }
        self.memo.insert((nu, s), acc.clone());
        Ok(acc)
    }
}

/// `U(nu, s)`; zero whenever `nu < 2s`, and `U(0,0) = 1`.
pub fn u_class(model: &Model, nu: u32, s: u32) -> Result<TowerElem> {
    model.twisted(UCache::new(model).get(nu, s)?)
}

/// The pushed counterpart of [`u_class`]: the same composition sum with
/// `Gamma_n(C)/n` replaced by `(n-1)! c_n`.
pub fn upsilon_class(jac: &JacobianRing, nu: u32, s: u32) -> Result<Element> {
    if s == 0 {
        return Ok(if nu == 0 { jac.one() } else { jac.zero() });
    }
    if nu < 2 * s {
        return Ok(jac.zero());
    }
    let mut acc = jac.zero();
    for n1 in 2..=(nu - 2 * (s - 1)) {
        let w = jac
            .gen_c(n1)
            .scale(&Rat::from_integer(factorial(n1 - 1)));
        if w.is_zero() {
            continue;
        }
        let rest = upsilon_class(jac, nu - n1, s - 1)?;
        if rest.is_zero() {
            continue;
        }
        acc = acc.add(&w.mul(&rest)?);
    }
    Ok(acc)
}

/// Per-degree comparison of the embedded curve section against the
/// composition sums: the degree-`b` component of the section must be
/// `(-1)^b U(b, 1)` for every `b` up to two past the vanishing bound.
pub fn section_component_check(model: &Model) -> Result<Vec<Record>> {
    let g = model.config().g;
    let c = curve_section(model)?;
    let parts = model.degree_split(&c)?;
    let mut out = Vec::new();
    for b in 0..=(2 * g + 2) {
        let got = parts
            .get(&(b as i64))
            .map(|p| p.el.clone())
            .unwrap_or_else(|| model.jac().zero());
        let want = u_class(model, b, 1)?.el.scale(&sign(b as i64));
        out.push(Record::from_diff_exact(
            "gk-section-component",
            "degree components of the embedded curve section match the signed diagonal sums",
            &format!("g={g} b={b}"),
            &got.sub(&want),
        ));
    }
    Ok(out)
}

/// Pushing a composition sum to the Jacobian: everything below coweight
/// `nu` dies and the coweight-`nu` slice is the weighted coweight product.
pub fn u_push_check(model: &Model, nu: u32, s: u32) -> Result<Vec<Record>> {
    let g = model.config().g;
    let params = format!("g={g} nu={nu} s={s}");
    let u = u_class(model, nu, s)?;
    let pushed = model.sigma_tilde_push(&u)?;
    let mut low = model.jac().zero();
    for w in 0..nu as i64 {
        low = low.add(&pushed.grade_component(Grading::Coweight, w));
    }
    let lead = pushed.grade_component(Grading::Coweight, nu as i64);
    let want = upsilon_class(model.jac(), nu, s)?;
    Ok(vec![
        Record::from_diff_exact(
            "gk-u-push-low",
            "pushed diagonal sums have no components below their degree",
            &params,
            &low,
        ),
        Record::from_diff_exact(
            "gk-u-push-lead",
            "the lowest-coweight slice of a pushed diagonal sum is the weighted coweight product",
            &params,
            &lead.sub(&want),
        ),
    ])
}

/// Divisor calculus over one model; construction checks field mode and
/// that every named point is declared.
pub struct DivisorCalc<'a> {
    model: &'a Model,
    spec: DivisorSpec,
    dclass: TowerElem,
}

impl<'a> DivisorCalc<'a> {
    pub fn new(model: &'a Model, spec: DivisorSpec) -> Result<Self> {
        let cfg = model.config();
        if cfg.d != 0 {
            return Err(Error::Config(format!(
                "divisor calculus runs over a field: configure d = 0, not d = {}",
                cfg.d
            )));
        }
        for p in spec.points() {
            if p != "p0" && !cfg.points.iter().any(|q| q == p) {
                return Err(Error::UnknownPoint(p.clone()));
            }
        }
        let mut dclass = model.twisted(model.jac().one())?;
        for p in spec.points() {
            dclass = dclass.mul(&point_class(model, p)?)?;
        }
        Ok(DivisorCalc {
            model,
            spec,
            dclass,
        })
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn spec(&self) -> &DivisorSpec {
        &self.spec
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree()
    }

    /// `[D]`, the Pontryagin product of the degree-1 point classes.
    pub fn divisor_class(&self) -> &TowerElem {
        &self.dclass
    }

    /// Elementary-symmetric class `e_i(D)`, cut out by the divided
    /// t-derivative: `e_0 = 1`, `e_d = [D]`.
    pub fn e_class(&self, i: u32) -> Result<TowerElem> {
        let d = self.degree();
        if i > d {
            return Err(Error::Range(format!(
                "symmetric-function index {i} exceeds the divisor degree {d}"
            )));
        }
        Ok(self.model.dt_div(&self.dclass, d - i))
    }

    /// `t`-reduction of `e_i(D)`: the slice every positive `t`-power
    /// removed from.
    pub fn ebar_class(&self, i: u32) -> Result<TowerElem> {
        self.model.pi_t(&self.e_class(i)?)
    }

    /// The same class written as the alternating binomial sum over the
    /// lower `e`-classes; must agree with [`DivisorCalc::ebar_class`].
    pub fn ebar_from_sum(&self, i: u32) -> Result<TowerElem> {
        let d = self.degree();
        if i > d {
            return Err(Error::Range(format!(
                "symmetric-function index {i} exceeds the divisor degree {d}"
            )));
        }
        let mut acc = self.model.jac().zero();
        for j in 0..=i {
            let coeff = sign(j as i64) * Rat::from_integer(binom((d - i + j) as i64, j));
            let term = self
                .e_class(i - j)?
                .el
                .mul(&self.model.t_var().pow(j)?)?;
            acc = acc.add(&term.scale(&coeff));
        }
        self.model.twisted(acc)
    }

    /// Sum of all `t`-reduced symmetric classes; equals the section image
    /// of the divisor's colimit class.
    pub fn ebar_sum(&self) -> Result<TowerElem> {
        let mut acc = self.model.twisted(self.model.jac().zero())?;
        for i in 0..=self.degree() {
            acc = acc.add(&self.ebar_class(i)?)?;
        }
        Ok(acc)
    }

    /// Coweight-`i` slice of the pushforward of `ebar_i` to the Jacobian.
    pub fn eps_class(&self, i: u32) -> Result<Element> {
        let y = self.model.sigma_tilde_push(&self.ebar_class(i)?)?;
        Ok(y.grade_component(Grading::Coweight, i as i64))
    }

    /// Special divisors keep `d - 2 r0 >= 0`; outside that range the
    /// declared `r0` is suspicious (but allowed).
    pub fn clifford_warning(&self) -> Option<String> {
        let g = self.model.config().g;
        let d = self.degree();
        let r0 = self.spec.r0;
        if d as i64 <= 2 * g as i64 - 2 && (d as i64) - 2 * (r0 as i64) < 0 {
            Some(format!(
                "declared r0={r0} violates the special-divisor bound d - 2*r0 >= 0 at degree {d} (genus {g})"
            ))
        } else {
            None
        }
    }

    fn check_params(&self, s: u32, n: u32) -> Result<()> {
        let d = self.degree() as i64;
        let r0 = self.spec.r0 as i64;
        if s as i64 > r0 {
            return Err(Error::Range(format!(
                "s={s} exceeds the declared linear-system dimension r0={r0}"
            )));
        }
        if (n as i64) <= d - r0 + s as i64 {
            return Err(Error::Range(format!(
                "N={n} must exceed d - r0 + s = {}",
                d - r0 + s as i64
            )));
        }
        Ok(())
    }

    fn id1_element_with(&self, uc: &mut UCache, n: u32, s: u32) -> Result<Element> {
        let mut acc = self.model.jac().zero();
        for i in 0..=self.degree().min(n) {
            let u = uc.get(n - i, s)?;
            if u.is_zero() {
                continue;
            }
            let term = self.ebar_class(i)?.el.mul(&u)?;
            acc = acc.add(&term.scale(&sign(i as i64)));
        }
        Ok(acc)
    }

    /// `sum_i (-1)^i ebar_i(D) * U(N-i, s)`, the tower-side relation.
    pub fn id1_relation(&self, n: u32, s: u32) -> Result<Element> {
        self.id1_element_with(&mut UCache::new(self.model), n, s)
    }

    /// `sum_i (-1)^i eps_i(D) * Upsilon(N-i, s)`, the Jacobian-side
    /// relation.
    pub fn id2_relation(&self, n: u32, s: u32) -> Result<Element> {
        let jac = self.model.jac();
        let mut acc = jac.zero();
        for i in 0..=self.degree().min(n) {
            let ups = upsilon_class(jac, n - i, s)?;
            if ups.is_zero() {
                continue;
            }
            let term = self.eps_class(i)?.mul(&ups)?;
            acc = acc.add(&term.scale(&sign(i as i64)));
        }
        Ok(acc)
    }

    /// Pushing the tower relation to the Jacobian and slicing at coweight
    /// `N` must reproduce the Jacobian relation.
    pub fn push_intertwine_check(&self, n: u32, s: u32) -> Result<Record> {
        let rel1 = self.model.twisted(self.id1_relation(n, s)?)?;
        let pushed = self.model.sigma_tilde_push(&rel1)?;
        let lhs = pushed.grade_component(Grading::Coweight, n as i64);
        let rhs = self.id2_relation(n, s)?;
        Ok(Record::from_diff_exact(
            "gk-push-intertwine",
            "coweight slice of the pushed tower relation reproduces the Jacobian relation",
            &format!("D={} N={n} s={s}", self.spec),
            &lhs.sub(&rhs),
        ))
    }

    /// Expands the windowed product `(sum_i ebar_i) * (u - c)^{*r0}` along
    /// two independent routes and compares them degree by degree: the
    /// direct degree slice against the composition sums, one record per
    /// `u`-power group plus regrouping and total records.
    pub fn consistency(&self, s: u32, n: u32) -> Result<Vec<Record>> {
        self.check_params(s, n)?;
        let model = self.model;
        let jac = model.jac();
        let d = self.degree();
        let r0 = self.spec.r0;
        let pick = (n + (r0 - s)) as i64;
        let c = curve_section(model)?;
        let u1 = model.twisted(model.u_var(1))?;
        let esum = self.ebar_sum()?;
        let ebars: Vec<TowerElem> = (0..=d)
            .map(|i| self.ebar_class(i))
            .collect::<Result<_>>()?;
        let mut uc = UCache::new(model);
        let mut recs = Vec::new();
        let mut lhs_total = jac.zero();
        let mut rhs_total = jac.zero();
        for j in 0..=r0 {
            let w_j = esum
                .mul(&u1.pow(r0 - j)?)?
                .mul(&c.neg().pow(j)?)?
                .scale(&Rat::from_integer(binom(r0 as i64, j)));
            let lhs_j = model.degree_component(&w_j, pick)?.el;
            let mut rhs_j = jac.zero();
            for i in 0..=d {
                let b = n as i64 + j as i64 - s as i64 - i as i64;
                if b < 0 {
                    continue;
                }
                let u = uc.get(b as u32, j)?;
                if u.is_zero() {
                    continue;
                }
                let coeff = sign(n as i64 - s as i64 - i as i64)
                    * Rat::from_integer(binom(r0 as i64, j));
                let term = ebars[i as usize]
                    .el
                    .mul(&u1.el.pow(r0 - j)?)?
                    .mul(&u)?;
                rhs_j = rhs_j.add(&term.scale(&coeff));
            }
            recs.push(Record::from_diff_exact(
                "gk-consistency-slice",
                "degree slice of the divisor window product matches its composition expansion per u-power group",
                &format!("D={} s={s} N={n} j={j}", self.spec),
                &lhs_j.sub(&rhs_j),
            ));
            lhs_total = lhs_total.add(&lhs_j);
            rhs_total = rhs_total.add(&rhs_j);
        }
        let w = esum.mul(&u1.sub(&c)?.pow(r0)?)?;
        let direct = model.degree_component(&w, pick)?.el;
        recs.push(Record::from_diff_exact(
            "gk-consistency-regroup",
            "binomial regrouping of the window product is exact",
            &format!("D={} s={s} N={n}", self.spec),
            &direct.sub(&lhs_total),
        ));
        recs.push(Record::from_diff_exact(
            "gk-consistency",
            "degree slice of the divisor window product matches its composition expansion",
            &format!("D={} s={s} N={n}", self.spec),
            &lhs_total.sub(&rhs_total),
        ));
        Ok(recs)
    }

    /// The product `([p_1] - t) * .. * ([p_d] - t)`; equals the top
    /// `t`-reduced symmetric class.
    pub fn point_product(&self) -> Result<TowerElem> {
        let t = self.model.twisted(self.model.t_var())?;
        let mut acc = self.model.twisted(self.model.jac().one())?;
        for p in self.spec.points() {
            acc = acc.mul(&point_class(self.model, p)?.sub(&t)?)?;
        }
        Ok(acc)
    }

    /// `sum_{j=1}^{d+1} (-1)^j e_{d+1-j}(D) * Delta_j(C)/j`, the diagonal
    /// form of the degree-(d+1) relation.
    pub fn cor4_relation(&self) -> Result<Element> {
        let d = self.degree();
        let mut acc = self.model.jac().zero();
        for j in 1..=d + 1 {
            let dl = self.model.delta_push(j, &ClassSpec::Curve)?.el;
            let term = self.e_class(d + 1 - j)?.el.mul(&dl)?;
            acc = acc.add(&term.scale(&(sign(j as i64) * rat(1, j as i64))));
        }
        Ok(acc)
    }

    /// Re-derives the diagonal-form relation from the (s=1, N=d+1) tower
    /// relation: the binomial bridge per index, then the assembled
    /// identity `cor4 = (-1)^(d+1) id1(d+1, 1) - ebar_d * Gamma_1(C)`.
    pub fn cor4_checks(&self) -> Result<Vec<Record>> {
        let d = self.degree();
        let model = self.model;
        let mut recs = Vec::new();
        for m in 0..=d {
            let mut acc = model.jac().zero();
            for i in 0..=m {
                let coeff = Rat::from_integer(binom((d - i) as i64, m - i));
                let term = self
                    .ebar_class(i)?
                    .el
                    .mul(&model.t_var().pow(m - i)?)?;
                acc = acc.add(&term.scale(&coeff));
            }
            recs.push(Record::from_diff_exact(
                "gk-cor4-bridge",
                "binomial resummation of the t-reduced classes recovers the symmetric class",
                &format!("D={} M={m}", self.spec),
                &acc.sub(&self.e_class(m)?.el),
            ));
        }
        let id1 = self.id1_relation(d + 1, 1)?;
        let gamma1 = model.gamma_n(1, &ClassSpec::Curve)?.el;
        let want = id1
            .scale(&sign(d as i64 + 1))
            .sub(&self.ebar_class(d)?.el.mul(&gamma1)?);
        recs.push(Record::from_diff_exact(
            "gk-cor4-derivation",
            "diagonal form of the degree-(d+1) relation agrees with its tower-relation derivation",
            &format!("D={}", self.spec),
            &self.cor4_relation()?.sub(&want),
        ));
        Ok(recs)
    }

    fn empty_set(&self) -> RelationSet {
        RelationSet {
            g: self.model.config().g,
            divisor: self.spec.clone(),
            relations: Vec::new(),
            notes: Vec::new(),
            warnings: self.clifford_warning().into_iter().collect(),
        }
    }

    /// Emits one relation family over its full parameter range.
    pub fn emit(&self, flavor: RelationFlavor) -> Result<RelationSet> {
        let d = self.degree();
        let r0 = self.spec.r0;
        let g = self.model.config().g;
        let mut set = self.empty_set();
        match flavor {
            RelationFlavor::Id1 | RelationFlavor::Id2 => {
                let mut uc = UCache::new(self.model);
                for s in 0..=r0 {
                    let start = ((d as i64) - (r0 as i64) + (s as i64) + 1).max(1) as u32;
                    let end = 2 * g * s + d;
                    for n in start..=end {
                        let (el, basis) = match flavor {
                            RelationFlavor::Id1 => {
                                (self.id1_element_with(&mut uc, n, s)?, "tower")
                            }
                            _ => (self.id2_relation(n, s)?, "jacobian"),
                        };
                        set.relations.push(Relation {
                            label: format!("{}(N={n},s={s})", flavor.name()),
                            flavor: flavor.name(),
                            n,
                            s,
                            basis,
                            el,
                        });
                    }
                }
                if flavor == RelationFlavor::Id2 {
                    set.notes.push(format!(
                        "rows with s={r0}: killing the point classes (algebraic equivalence) \
                         leaves the weighted products of curve coweight components, zero for \
                         every N > {d}"
                    ));
                }
            }
            RelationFlavor::Cor2 => {
                let start = ((d as i64) - (r0 as i64) + 1).max(1) as u32;
                for n in start..=d {
                    set.relations.push(Relation {
                        label: format!("cor2(N={n})"),
                        flavor: "cor2",
                        n,
                        s: 0,
                        basis: "tower",
                        el: self.ebar_class(n)?.el,
                    });
                    set.relations.push(Relation {
                        label: format!("cor2-push(N={n})"),
                        flavor: "cor2",
                        n,
                        s: 0,
                        basis: "jacobian",
                        el: self.eps_class(n)?,
                    });
                }
            }
            RelationFlavor::Cor3 => {
                let prod = self.point_product()?;
                let diff = prod.el.sub(&self.ebar_class(d)?.el);
                if !diff.is_zero() {
                    return Err(Error::CrossCheck(format!(
                        "point product disagrees with the top t-reduced class: {diff}"
                    )));
                }
                set.relations.push(Relation {
                    label: "cor3".into(),
                    flavor: "cor3",
                    n: d,
                    s: 0,
                    basis: "tower",
                    el: prod.el,
                });
            }
            RelationFlavor::Cor4 => {
                for rec in self.cor4_checks()? {
                    if rec.status.is_failure() {
                        return Err(Error::CrossCheck(format!(
                            "{} ({}): {}",
                            rec.name, rec.params, rec.witness
                        )));
                    }
                }
                set.relations.push(Relation {
                    label: "cor4".into(),
                    flavor: "cor4",
                    n: d + 1,
                    s: 1,
                    basis: "tower",
                    el: self.cor4_relation()?,
                });
            }
        }
        Ok(set)
    }

    /// Emits every family, in the fixed flavor order.
    pub fn emit_all(&self) -> Result<RelationSet> {
        let sets: Vec<RelationSet> = RelationFlavor::ALL
            .par_iter()
            .map(|f| self.emit(*f))
            .collect::<Result<_>>()?;
        let mut out = self.empty_set();
        for s in sets {
            out.merge(s);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::ModelConfig;
    use crate::report::Status;

    fn model(g: u32, points: &[&str]) -> Model {
        Model::new(ModelConfig::new(g, 0).with_points(points.iter().copied())).unwrap()
    }

    fn assert_exact(recs: &[Record]) {
        for r in recs {
            assert_eq!(
                r.status,
                Status::Exact,
                "{} ({}) failed: {}",
                r.name,
                r.params,
                r.witness
            );
        }
    }

    #[test]
    fn point_and_divisor_classes() {
        let m = model(2, &["p1", "p2"]);
        let t = m.t_var();

        let base = DivisorCalc::new(&m, DivisorSpec::base_points(3, 1).unwrap()).unwrap();
        assert!(base
            .divisor_class()
            .el
            .sub(&t.pow(3).unwrap())
            .is_zero());

        let dc = DivisorCalc::new(
            &m,
            DivisorSpec::new(["p1", "p2"], 1).unwrap(),
        )
        .unwrap();
        assert!(dc.e_class(0).unwrap().el.sub(&m.jac().one()).is_zero());
        assert!(dc
            .e_class(2)
            .unwrap()
            .el
            .sub(&dc.divisor_class().el)
            .is_zero());
        let comp = m.degree_component(dc.divisor_class(), 2).unwrap();
        assert!(comp.el.sub(&dc.divisor_class().el).is_zero());
        assert!(dc.e_class(3).is_err());
    }

    #[test]
    fn symmetric_function_triangle() {
        let m = model(2, &["p1", "p2"]);
        let dc = DivisorCalc::new(&m, DivisorSpec::new(["p1", "p2"], 1).unwrap()).unwrap();
        let d = dc.degree();

        for i in 0..=d {
            let a = dc.ebar_class(i).unwrap();
            let b = dc.ebar_from_sum(i).unwrap();
            assert!(a.el.sub(&b.el).is_zero(), "t-reduction mismatch at i={i}");
            for mm in 1..=3 {
                assert!(m.dt_div(&a, mm).is_zero(), "t-derivative survives at i={i}");
            }
        }

        // reconstruction from the reduced classes
        let mut recon = m.jac().zero();
        for i in 0..=d {
            let term = dc
                .ebar_class(i)
                .unwrap()
                .el
                .mul(&m.t_var().pow(d - i).unwrap())
                .unwrap();
            recon = recon.add(&term);
        }
        assert!(recon.sub(&dc.divisor_class().el).is_zero());

        // triangular inverse
        for i in 0..=d {
            let mut acc = m.jac().zero();
            for k in 0..=i {
                let coeff = Rat::from_integer(binom((d - k) as i64, d - i));
                let term = dc
                    .ebar_class(k)
                    .unwrap()
                    .el
                    .mul(&m.t_var().pow(i - k).unwrap())
                    .unwrap();
                acc = acc.add(&term.scale(&coeff));
            }
            assert!(acc.sub(&dc.e_class(i).unwrap().el).is_zero());
        }

        // first reduced class against its closed form
        let t = m.twisted(m.t_var()).unwrap();
        let want = point_class(&m, "p1")
            .unwrap()
            .sub(&t)
            .unwrap()
            .add(&point_class(&m, "p2").unwrap().sub(&t).unwrap())
            .unwrap();
        assert!(dc.ebar_class(1).unwrap().el.sub(&want.el).is_zero());

        // the reduced sum is the section image of the colimit class
        let colimit = m.q_push(dc.divisor_class()).unwrap();
        let section = m.convert(&m.r_section(&colimit).unwrap(), Basis::Gamma).unwrap();
        assert!(dc.ebar_sum().unwrap().el.sub(&section.el).is_zero());
    }

    #[test]
    fn u_and_upsilon_enumeration() {
        let m = model(2, &[]);
        assert!(u_class(&m, 0, 0)
            .unwrap()
            .el
            .sub(&m.jac().one())
            .is_zero());
        assert!(u_class(&m, 3, 2).unwrap().is_zero());
        let g2 = m.gamma_n(2, &ClassSpec::Curve).unwrap().el;
        assert!(u_class(&m, 2, 1)
            .unwrap()
            .el
            .sub(&g2.scale(&rat(1, 2)))
            .is_zero());
        assert!(u_class(&m, 4, 2)
            .unwrap()
            .el
            .sub(&g2.mul(&g2).unwrap().scale(&rat(1, 4)))
            .is_zero());

        let jac = m.jac();
        let c2 = jac.gen_c(2);
        assert!(upsilon_class(jac, 4, 2)
            .unwrap()
            .sub(&c2.mul(&c2).unwrap())
            .is_zero());

        let m3 = model(3, &[]);
        let jac3 = m3.jac();
        let want = jac3
            .gen_c(2)
            .mul(&jac3.gen_c(3))
            .unwrap()
            .scale(&rat(4, 1));
        assert!(upsilon_class(jac3, 5, 2).unwrap().sub(&want).is_zero());
    }

    #[test]
    fn section_components_match() {
        let m = model(2, &[]);
        assert_exact(&section_component_check(&m).unwrap());
    }

    #[test]
    fn consistency_small_cases() {
        let m = model(2, &["p1", "p2"]);
        let dc = DivisorCalc::new(&m, DivisorSpec::new(["p1", "p2"], 1).unwrap()).unwrap();
        assert_exact(&dc.consistency(1, 3).unwrap());
        assert_exact(&dc.consistency(0, 3).unwrap());
        assert!(dc.consistency(2, 5).is_err());
        assert!(dc.consistency(1, 2).is_err());

        let degen = DivisorCalc::new(&m, DivisorSpec::base_points(2, 2).unwrap()).unwrap();
        assert_exact(&degen.consistency(0, 3).unwrap());
    }

    #[test]
    fn emission_families() {
        let m = model(2, &["p1", "p2"]);
        let dc = DivisorCalc::new(&m, DivisorSpec::new(["p1", "p2"], 1).unwrap()).unwrap();

        let id1 = dc.emit(RelationFlavor::Id1).unwrap();
        let labels: Vec<&str> = id1.relations.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                "id1(N=2,s=0)",
                "id1(N=3,s=1)",
                "id1(N=4,s=1)",
                "id1(N=5,s=1)",
                "id1(N=6,s=1)"
            ]
        );

        let id2 = dc.emit(RelationFlavor::Id2).unwrap();
        assert_eq!(id2.relations.len(), 5);
        assert!(!id2.notes.is_empty());

        for (n, s) in [(3u32, 1u32), (4, 1), (2, 0)] {
            let rec = dc.push_intertwine_check(n, s).unwrap();
            assert_eq!(rec.status, Status::Exact, "{}: {}", rec.params, rec.witness);
        }

        let cor2 = dc.emit(RelationFlavor::Cor2).unwrap();
        assert_eq!(cor2.relations.len(), 2);
        assert_eq!(cor2.relations[0].label, "cor2(N=2)");
        assert_eq!(cor2.relations[1].basis, "jacobian");

        let cor3 = dc.emit(RelationFlavor::Cor3).unwrap();
        let want = dc.point_product().unwrap();
        assert!(cor3.relations[0].el.sub(&want.el).is_zero());

        let all = dc.emit_all().unwrap();
        assert_eq!(all.relations.len(), 5 + 5 + 2 + 1 + 1);
        let v = all.to_json();
        for (rel, row) in all
            .relations
            .iter()
            .zip(v["relations"].as_array().unwrap())
        {
            let parsed =
                Element::from_json(m.jac().table(), &row["element"]).unwrap();
            assert!(parsed.sub(&rel.el).is_zero());
        }

        assert!(RelationFlavor::parse("cor3").is_ok());
        assert!(RelationFlavor::parse("cor9").is_err());
    }

    #[test]
    fn diagonal_form_derivation() {
        let m = model(2, &["p1", "p2"]);
        let dc = DivisorCalc::new(&m, DivisorSpec::new(["p1", "p2"], 1).unwrap()).unwrap();
        assert_exact(&dc.cor4_checks().unwrap());
        assert_eq!(dc.emit(RelationFlavor::Cor4).unwrap().relations.len(), 1);
    }

    #[test]
    fn pushes_of_composition_sums() {
        let m = model(2, &[]);
        assert_exact(&u_push_check(&m, 2, 1).unwrap());
        assert_exact(&u_push_check(&m, 4, 2).unwrap());
    }

    #[test]
    fn construction_guards() {
        let m1 = Model::new(ModelConfig::new(2, 1).with_points(["p1"])).unwrap();
        assert!(DivisorCalc::new(&m1, DivisorSpec::new(["p1"], 1).unwrap()).is_err());

        let m0 = model(2, &[]);
        assert!(DivisorCalc::new(&m0, DivisorSpec::new(["q"], 1).unwrap()).is_err());
        assert!(DivisorSpec::new(Vec::<String>::new(), 1).is_err());
        assert!(DivisorSpec::new(["p0"], 0).is_err());

        let dc = DivisorCalc::new(&m0, DivisorSpec::base_points(1, 1).unwrap()).unwrap();
        let w = dc.clifford_warning().unwrap();
        assert!(w.contains("r0=1"));
    }
}
